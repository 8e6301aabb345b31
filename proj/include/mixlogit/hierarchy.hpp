#pragma once

#include <Eigen/Dense>

#include "mixlogit/linalg.hpp"
#include "mixlogit/model.hpp"
#include "mixlogit/rng.hpp"

namespace mixlogit {

/// Form of the population-mean update.
///   kConjugate: N((S0^-1 + N W^-1)^-1 (S0^-1 mu0 + W^-1 sum beta), (S0^-1 + N W^-1)^-1)
///   kPrinted:   N(mean of beta, W / N), i.e. a flat prior on the mean.
enum class ZetaUpdate { kConjugate, kPrinted };

/// Seeded bugs for the Geweke mutation suite. kNone in all real runs.
enum class Mutation { kNone, kA, kOmega, kZeta, kBeta, kAlpha };

std::string to_string(ZetaUpdate z);
ZetaUpdate parse_zeta_update(const std::string& text);
std::string to_string(Mutation m);
Mutation parse_mutation(const std::string& text);

/// a_k ~ Gamma((nu + K)/2, rate 1/A_k^2 + nu (Omega^-1)_kk), independently.
Eigen::VectorXd draw_half_t_scales(const Eigen::MatrixXd& omega_inverse,
                                   const HyperParameters& hyper, RngStream& stream,
                                   Mutation mutation = Mutation::kNone);

/// Omega ~ IW(nu + count + K - 1, 2 nu diag(a) + scatter), where `scatter`
/// sums `count` outer products (beta - zeta)(beta - zeta)^T.
PdMatrix draw_covariance(const Eigen::MatrixXd& scatter, double count, const Eigen::VectorXd& a,
                         const HyperParameters& hyper, RngStream& stream,
                         Mutation mutation = Mutation::kNone);

/// Population mean given N individual tastes (rows of `beta`).
Eigen::VectorXd draw_population_mean(const Eigen::MatrixXd& beta, const PdMatrix& omega,
                                     const HyperParameters& hyper, ZetaUpdate form,
                                     RngStream& stream, Mutation mutation = Mutation::kNone);

/// log N(x | mean, cov) up to the normalizing constant.
double gaussian_log_kernel(const Eigen::VectorXd& x, const Eigen::VectorXd& mean,
                           const PdMatrix& cov);

}  // namespace mixlogit
