#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <span>

#include "mixlogit/linalg.hpp"
#include "mixlogit/rng.hpp"

namespace mixlogit {

/// Exact draw from PG(1, c) via Devroye's alternating-series rejection
/// sampler (truncation point 0.64, exponential right tail and truncated
/// inverse-Gaussian left part).
double sample_polya_gamma(double c, RngStream& stream);

/// E[PG(1, c)] = tanh(c/2) / (2c), 1/4 at c = 0.
double polya_gamma_mean(double c) noexcept;
/// Var[PG(1, c)] = (sinh c - c) / (4 c^3 cosh^2(c/2)), 1/24 at c = 0.
double polya_gamma_variance(double c) noexcept;

Eigen::VectorXd sample_mvn_cov(const Eigen::VectorXd& mean, const PdMatrix& cov,
                               RngStream& stream);

/// Draw from N(P^-1 b, P^-1) using the Cholesky factor of the precision P;
/// P is never inverted.
Eigen::VectorXd sample_mvn_precision(const PdMatrix& precision,
                                     const Eigen::VectorXd& linear_term, RngStream& stream);

/// Inverse Wishart with density proportional to
/// |X|^{-(df+p+1)/2} exp(-tr(scale X^-1)/2); mean scale / (df - p - 1).
PdMatrix sample_inverse_wishart(double df, const PdMatrix& scale, RngStream& stream);

/// Gamma in the rate parameterization: mean shape / rate.
double sample_gamma(double shape, double rate, RngStream& stream);

/// Standard Gumbel(0, 1).
double sample_gumbel(RngStream& stream);

/// Index drawn with the given probabilities. `probs` must be non-negative
/// and sum to one within 1e-12.
std::size_t sample_categorical(std::span<const double> probs, RngStream& stream);

}  // namespace mixlogit
