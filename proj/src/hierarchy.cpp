#include "mixlogit/hierarchy.hpp"

#include "mixlogit/errors.hpp"
#include "mixlogit/random.hpp"

namespace mixlogit {

std::string to_string(ZetaUpdate z) { return z == ZetaUpdate::kConjugate ? "conjugate" : "printed"; }

ZetaUpdate parse_zeta_update(const std::string& text) {
  if (text == "conjugate") return ZetaUpdate::kConjugate;
  if (text == "printed") return ZetaUpdate::kPrinted;
  throw InvalidInput("unknown zeta update '" + text + "' (conjugate|printed)");
}

std::string to_string(Mutation m) {
  switch (m) {
    case Mutation::kNone:
      return "none";
    case Mutation::kA:
      return "a";
    case Mutation::kOmega:
      return "omega";
    case Mutation::kZeta:
      return "zeta";
    case Mutation::kBeta:
      return "beta";
    case Mutation::kAlpha:
      return "alpha";
  }
  return "unknown";
}

Mutation parse_mutation(const std::string& text) {
  for (Mutation m : {Mutation::kNone, Mutation::kA, Mutation::kOmega, Mutation::kZeta,
                     Mutation::kBeta, Mutation::kAlpha}) {
    if (to_string(m) == text) return m;
  }
  throw InvalidInput("unknown mutation '" + text + "'");
}

Eigen::VectorXd draw_half_t_scales(const Eigen::MatrixXd& omega_inverse,
                                   const HyperParameters& hyper, RngStream& stream,
                                   Mutation mutation) {
  const Eigen::Index K = omega_inverse.rows();
  const double shape = 0.5 * (hyper.nu + static_cast<double>(K));
  // Mutation: the nu factor on (Omega^-1)_kk is dropped.
  const double weight = mutation == Mutation::kA ? 1.0 : hyper.nu;
  Eigen::VectorXd a(K);
  for (Eigen::Index k = 0; k < K; ++k) {
    const double rate = hyper.a_prior_rate(static_cast<int>(k)) + weight * omega_inverse(k, k);
    a(k) = sample_gamma(shape, rate, stream);
  }
  return a;
}

PdMatrix draw_covariance(const Eigen::MatrixXd& scatter, double count, const Eigen::VectorXd& a,
                         const HyperParameters& hyper, RngStream& stream, Mutation mutation) {
  const double df = hyper.omega_prior_df() + count;
  Eigen::MatrixXd scale = hyper.omega_prior_scale(a);
  // Mutation: the scatter of individual tastes is ignored.
  if (mutation != Mutation::kOmega) scale += scatter;
  return sample_inverse_wishart(df, PdMatrix(scale, "omega_posterior_scale"), stream);
}

Eigen::VectorXd draw_population_mean(const Eigen::MatrixXd& beta, const PdMatrix& omega,
                                     const HyperParameters& hyper, ZetaUpdate form,
                                     RngStream& stream, Mutation mutation) {
  const Eigen::Index N = beta.rows();
  if (N < 1) throw InvalidInput("draw_population_mean: needs at least one individual");
  const Eigen::VectorXd beta_sum = beta.colwise().sum().transpose();

  if (form == ZetaUpdate::kPrinted) {
    const Eigen::VectorXd mean = beta_sum / static_cast<double>(N);
    if (mutation == Mutation::kZeta) return mean;
    const PdMatrix cov(omega.matrix() / static_cast<double>(N), "zeta_covariance");
    return sample_mvn_cov(mean, cov, stream);
  }

  const PdMatrix sigma0(hyper.sigma0, "zeta_prior");
  const Eigen::MatrixXd sigma0_inv = sigma0.inverse();
  const Eigen::MatrixXd omega_inv = omega.inverse();
  const PdMatrix precision(sigma0_inv + static_cast<double>(N) * omega_inv, "zeta_precision");
  const Eigen::VectorXd linear = sigma0_inv * hyper.mu0 + omega_inv * beta_sum;
  if (mutation == Mutation::kZeta) return precision.solve(linear);
  return sample_mvn_precision(precision, linear, stream);
}

double gaussian_log_kernel(const Eigen::VectorXd& x, const Eigen::VectorXd& mean,
                           const PdMatrix& cov) {
  const Eigen::VectorXd z = cov.lower().triangularView<Eigen::Lower>().solve(x - mean);
  return -0.5 * z.squaredNorm();
}

}  // namespace mixlogit
