#include "mixlogit/random.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "mixlogit/errors.hpp"

namespace mixlogit {
namespace {

constexpr double kPi = std::numbers::pi;
// Devroye's switch point between the left (inverse Gaussian) and right
// (exponential) proposals.
constexpr double kTrunc = 0.64;

double log_normal_cdf(double x) {
  if (x < -30.0) {
    return -0.5 * x * x - std::log(-x) - 0.5 * std::log(2.0 * kPi);
  }
  return std::log(0.5 * std::erfc(-x / std::numbers::sqrt2));
}

// n-th term of the alternating series for the J*(1, 0) density, piecewise
// representation around kTrunc.
double series_term(int n, double x) {
  const double k = (n + 0.5) * kPi;
  if (x > kTrunc) return k * std::exp(-0.5 * k * k * x);
  if (x <= 0.0) return 0.0;
  const double log_term = -1.5 * (std::log(0.5 * kPi) + std::log(x)) + std::log(k) -
                          2.0 * (n + 0.5) * (n + 0.5) / x;
  return std::exp(log_term);
}

// Probability of proposing from the right (exponential) part.
double right_tail_mass(double z) {
  const double fz = 0.125 * kPi * kPi + 0.5 * z * z;
  const double rt = std::sqrt(1.0 / kTrunc);
  const double b = rt * (kTrunc * z - 1.0);
  const double a = -rt * (kTrunc * z + 1.0);
  const double x0 = std::log(fz) + fz * kTrunc;
  const double xb = x0 - z + log_normal_cdf(b);
  const double xa = x0 + z + log_normal_cdf(a);
  const double q_over_p = 4.0 / kPi * (std::exp(xb) + std::exp(xa));
  return 1.0 / (1.0 + q_over_p);
}

// Inverse Gaussian IG(1/z, 1) restricted to (0, kTrunc).
double truncated_inverse_gaussian(double z, RngStream& stream) {
  double x = kTrunc + 1.0;
  if (1.0 / kTrunc > z) {
    // Mean beyond the truncation point: propose from the truncated Levy law
    // and thin by exp(-z^2 x / 2).
    double accept = 0.0;
    while (stream.uniform() > accept) {
      double e1 = stream.exponential();
      double e2 = stream.exponential();
      while (e1 * e1 > 2.0 * e2 / kTrunc) {
        e1 = stream.exponential();
        e2 = stream.exponential();
      }
      x = 1.0 + e1 * kTrunc;
      x = kTrunc / (x * x);
      accept = std::exp(-0.5 * z * z * x);
    }
  } else {
    const double mu = 1.0 / z;
    while (x > kTrunc) {
      const double y = stream.normal();
      const double mu_y = mu * y * y;
      const double half_mu = 0.5 * mu;
      x = mu + half_mu * mu_y - half_mu * std::sqrt(4.0 * mu_y + mu_y * mu_y);
      if (stream.uniform() > mu / (mu + x)) x = mu * mu / x;
    }
  }
  return x;
}

}  // namespace

double sample_polya_gamma(double c, RngStream& stream) {
  if (!std::isfinite(c)) {
    throw InvalidInput("sample_polya_gamma: tilt must be finite, got " + std::to_string(c));
  }
  // PG(1, c) = J*(1, c/2) / 4.
  const double z = 0.5 * std::abs(c);
  const double fz = 0.125 * kPi * kPi + 0.5 * z * z;
  const double p_right = right_tail_mass(z);

  for (;;) {
    const double x = stream.uniform() < p_right ? kTrunc + stream.exponential() / fz
                                                : truncated_inverse_gaussian(z, stream);
    double s = series_term(0, x);
    const double y = stream.uniform() * s;
    for (int n = 1;; ++n) {
      if (n % 2 == 1) {
        s -= series_term(n, x);
        if (y <= s) return 0.25 * x;
      } else {
        s += series_term(n, x);
        if (y > s) break;
      }
    }
  }
}

double polya_gamma_mean(double c) noexcept {
  const double ac = std::abs(c);
  if (ac < 1e-4) return 0.25 - ac * ac / 48.0;
  return std::tanh(0.5 * ac) / (2.0 * ac);
}

double polya_gamma_variance(double c) noexcept {
  const double ac = std::abs(c);
  if (ac < 1e-3) return 1.0 / 24.0 - ac * ac / 240.0;
  // sinh(c) / cosh^2(c/2) = 2 tanh(c/2) keeps large c finite.
  const double sech = 1.0 / std::cosh(0.5 * ac);
  return (2.0 * std::tanh(0.5 * ac) - ac * sech * sech) / (4.0 * ac * ac * ac);
}

Eigen::VectorXd sample_mvn_cov(const Eigen::VectorXd& mean, const PdMatrix& cov,
                               RngStream& stream) {
  if (mean.size() != cov.dim()) throw InvalidInput("sample_mvn_cov: dimension mismatch");
  Eigen::VectorXd z(mean.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = stream.normal();
  return mean + cov.lower().triangularView<Eigen::Lower>() * z;
}

Eigen::VectorXd sample_mvn_precision(const PdMatrix& precision,
                                     const Eigen::VectorXd& linear_term, RngStream& stream) {
  if (linear_term.size() != precision.dim()) {
    throw InvalidInput("sample_mvn_precision: dimension mismatch");
  }
  Eigen::VectorXd z(linear_term.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = stream.normal();
  const auto lower = precision.lower().triangularView<Eigen::Lower>();
  // mean = L^-T L^-1 b, noise = L^-T z.
  Eigen::VectorXd w = lower.solve(linear_term);
  w += z;
  return lower.transpose().solve(w);
}

PdMatrix sample_inverse_wishart(double df, const PdMatrix& scale, RngStream& stream) {
  const Eigen::Index p = scale.dim();
  if (!(df > static_cast<double>(p) - 1.0)) {
    throw InvalidInput("sample_inverse_wishart: df must exceed dim - 1, got " +
                       std::to_string(df));
  }
  // Bartlett factor A of a Wishart(df, I) draw; then
  // X = U (A A^T)^-1 U^T with scale = U U^T.
  Eigen::MatrixXd bartlett = Eigen::MatrixXd::Zero(p, p);
  for (Eigen::Index i = 0; i < p; ++i) {
    bartlett(i, i) = std::sqrt(sample_gamma(0.5 * (df - static_cast<double>(i)), 0.5, stream));
    for (Eigen::Index j = 0; j < i; ++j) bartlett(i, j) = stream.normal();
  }
  const Eigen::MatrixXd bartlett_inv =
      bartlett.triangularView<Eigen::Lower>().solve(Eigen::MatrixXd::Identity(p, p));
  const Eigen::MatrixXd m = scale.lower() * bartlett_inv.transpose();
  const Eigen::MatrixXd draw = m * m.transpose();
  return PdMatrix(0.5 * (draw + draw.transpose()), "inverse_wishart_draw");
}

double sample_gamma(double shape, double rate, RngStream& stream) {
  if (!(shape > 0.0) || !(rate > 0.0) || !std::isfinite(shape) || !std::isfinite(rate)) {
    throw InvalidInput("sample_gamma: shape and rate must be positive and finite (shape=" +
                       std::to_string(shape) + ", rate=" + std::to_string(rate) + ")");
  }
  std::gamma_distribution<double> dist(shape, 1.0 / rate);
  return dist(stream.engine());
}

double sample_gumbel(RngStream& stream) { return -std::log(-std::log(stream.uniform())); }

std::size_t sample_categorical(std::span<const double> probs, RngStream& stream) {
  if (probs.empty()) throw InvalidInput("sample_categorical: empty probability vector");
  double total = 0.0;
  for (double p : probs) {
    if (!(p >= 0.0) || !std::isfinite(p)) {
      throw InvalidInput("sample_categorical: probabilities must be finite and non-negative");
    }
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw InvalidInput("sample_categorical: probabilities sum to " + std::to_string(total));
  }
  const double u = stream.uniform();
  double cumulative = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (probs[i] <= 0.0) continue;
    last_positive = i;
    cumulative += probs[i];
    if (u < cumulative) return i;
  }
  return last_positive;
}

}  // namespace mixlogit
