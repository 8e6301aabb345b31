#include "doctest.h"
#include "mixlogit/hierarchy.hpp"
#include "mixlogit/random.hpp"

#include <cmath>

using namespace mixlogit;

TEST_CASE("half-t scale update: shape (nu + K)/2 and rate 1/A^2 + nu (Omega^-1)_kk") {
  HyperParameters h = HyperParameters::defaults(0, 2);
  RngStream s(1, {});
  const int n = 100000;
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(2);
  for (int i = 0; i < n; ++i) sum += draw_half_t_scales(Eigen::MatrixXd::Identity(2, 2), h, s);
  const double shape = 2.0;
  const double rate = 1e-6 + 2.0;
  for (int k = 0; k < 2; ++k) {
    CHECK(std::abs(sum(k) / n - shape / rate) < 4.0 * std::sqrt(shape / (rate * rate) / n));
  }
}

TEST_CASE("half-t scale update with a huge Omega tends to the prior-dominated rate") {
  HyperParameters h = HyperParameters::defaults(0, 1);
  h.A = Eigen::VectorXd::Constant(1, 2.0);
  RngStream s(2, {});
  const int n = 100000;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) sum += draw_half_t_scales(Eigen::MatrixXd::Constant(1, 1, 1e-12), h, s)(0);
  const double mean = (h.nu + 1) / 2 * 4.0;
  CHECK(sum / n == doctest::Approx(mean).epsilon(0.02));
}

TEST_CASE("covariance update with zero scatter") {
  HyperParameters h = HyperParameters::defaults(0, 2);
  const Eigen::Vector2d a(0.5, 2.0);
  const double count = 200.0;
  RngStream s(3, {});
  Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(2, 2);
  const int n = 20000;
  for (int i = 0; i < n; ++i) sum += draw_covariance(Eigen::MatrixXd::Zero(2, 2), count, a, h, s).matrix();
  const double df = h.nu + count + 2 - 1;
  const Eigen::MatrixXd expected = (2.0 * h.nu * a).asDiagonal() * (1.0 / (df - 2 - 1));
  CHECK((sum / n - expected).cwiseAbs().maxCoeff() < 0.01 * expected.maxCoeff());
}

TEST_CASE("covariance update concentrates on the scatter of simulated tastes") {
  Eigen::MatrixXd omega_true(2, 2);
  omega_true << 0.5, 0.1, 0.1, 0.5;
  const PdMatrix cov(omega_true, "t");
  RngStream s(4, {});
  const int N = 10000;
  Eigen::MatrixXd beta(N, 2);
  for (int n = 0; n < N; ++n) beta.row(n) = sample_mvn_cov(Eigen::Vector2d::Zero(), cov, s).transpose();
  const Eigen::MatrixXd scatter = beta.transpose() * beta;
  HyperParameters h = HyperParameters::defaults(0, 2);
  Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(2, 2);
  for (int i = 0; i < 200; ++i) sum += draw_covariance(scatter, N, Eigen::Vector2d(1.0, 1.0), h, s).matrix();
  const Eigen::MatrixXd mean = sum / 200.0;
  CHECK(std::abs(mean(0, 0) / 0.5 - 1.0) < 0.05);
  CHECK(std::abs(mean(1, 1) / 0.5 - 1.0) < 0.05);
}

TEST_CASE("population mean updates") {
  HyperParameters h = HyperParameters::defaults(0, 1);
  const Eigen::MatrixXd beta = Eigen::MatrixXd::Constant(50, 1, 1.5);
  const PdMatrix omega(Eigen::MatrixXd::Constant(1, 1, 2.0), "t");
  RngStream s(5, {});
  const int n = 100000;
  double sum = 0.0;
  double sum2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z = draw_population_mean(beta, omega, h, ZetaUpdate::kPrinted, s)(0);
    sum += z;
    sum2 += z * z;
  }
  CHECK(sum / n == doctest::Approx(1.5).epsilon(0.002));
  CHECK(sum2 / n - (sum / n) * (sum / n) == doctest::Approx(2.0 / 50).epsilon(0.03));

  // Conjugate: precision 1/10 + 50/2, mean (0 + 75/2) / precision.
  const double prec = 0.1 + 25.0;
  sum = 0.0;
  sum2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z = draw_population_mean(beta, omega, h, ZetaUpdate::kConjugate, s)(0);
    sum += z;
    sum2 += z * z;
  }
  CHECK(std::abs(sum / n - 37.5 / prec) < 4.0 * std::sqrt(1.0 / prec / n));
  CHECK(sum2 / n - (sum / n) * (sum / n) == doctest::Approx(1.0 / prec).epsilon(0.03));
}

TEST_CASE("mutations change the update") {
  HyperParameters h = HyperParameters::defaults(0, 1);
  const Eigen::MatrixXd beta = Eigen::MatrixXd::Constant(50, 1, 1.5);
  const PdMatrix omega(Eigen::MatrixXd::Constant(1, 1, 2.0), "t");
  RngStream s(6, {});
  const double a = draw_population_mean(beta, omega, h, ZetaUpdate::kPrinted, s, Mutation::kZeta)(0);
  const double b = draw_population_mean(beta, omega, h, ZetaUpdate::kPrinted, s, Mutation::kZeta)(0);
  CHECK(a == b);
  CHECK(parse_mutation("omega") == Mutation::kOmega);
  CHECK(parse_zeta_update("printed") == ZetaUpdate::kPrinted);
}
