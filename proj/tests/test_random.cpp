#include "doctest.h"
#include "mixlogit/errors.hpp"
#include "mixlogit/random.hpp"

#include <cmath>
#include <numbers>
#include <vector>

using namespace mixlogit;

namespace {

// Mean and variance of PG(1, c) from its infinite-convolution weights.
struct SeriesMoments {
  double mean = 0.0;
  double var = 0.0;
};

SeriesMoments series_moments(double c) {
  constexpr double pi = std::numbers::pi;
  SeriesMoments m;
  const int terms = 2000000;
  for (int k = terms; k >= 1; --k) {
    const double h = k - 0.5;
    const double b = 1.0 / (2.0 * pi * pi * (h * h + c * c / (4.0 * pi * pi)));
    m.mean += b;
    m.var += b * b;
  }
  m.mean += 1.0 / (2.0 * pi * pi * terms);  // integral tail of 1/(2 pi^2 k^2)
  return m;
}

}  // namespace

TEST_CASE("closed-form PG moments agree with the convolution series") {
  for (double c : {0.0, 0.3, 1.0, 2.5, 7.0, 20.0}) {
    CAPTURE(c);
    const SeriesMoments s = series_moments(c);
    CHECK(polya_gamma_mean(c) == doctest::Approx(s.mean).epsilon(1e-6));
    CHECK(polya_gamma_variance(c) == doctest::Approx(s.var).epsilon(1e-6));
    CHECK(polya_gamma_mean(-c) == polya_gamma_mean(c));
  }
  CHECK(polya_gamma_mean(0.0) == 0.25);
  CHECK(polya_gamma_variance(0.0) == doctest::Approx(1.0 / 24.0).epsilon(1e-15));
}

TEST_CASE("moment formulas are continuous across the small-c branch") {
  for (double c : {0.9e-4, 1.1e-4, 0.9e-3, 1.1e-3}) {
    const SeriesMoments s = series_moments(c);
    CHECK(polya_gamma_mean(c) == doctest::Approx(s.mean).epsilon(1e-6));
    CHECK(polya_gamma_variance(c) == doctest::Approx(s.var).epsilon(1e-6));
  }
}

TEST_CASE("PG sampler rejects non-finite tilts") {
  RngStream s(1, {});
  CHECK_THROWS_AS(sample_polya_gamma(NAN, s), InvalidInput);
  CHECK_THROWS_AS(sample_polya_gamma(INFINITY, s), InvalidInput);
}

TEST_CASE("PG draws at a large tilt") {
  RngStream s(3, {});
  const int n = 100000;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    const double w = sample_polya_gamma(50.0, s);
    REQUIRE(w > 0.0);
    sum += w;
  }
  const double se = std::sqrt(polya_gamma_variance(50.0) / n);
  CHECK(std::abs(sum / n - std::tanh(25.0) / 100.0) < 4.0 * se);
}

TEST_CASE("gamma draws use the rate parameterization") {
  RngStream s(4, {});
  const int n = 200000;
  double sum = 0.0;
  double sum2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double g = sample_gamma(2.0, 3.0, s);
    sum += g;
    sum2 += g * g;
  }
  const double mean = sum / n;
  const double var = sum2 / n - mean * mean;
  CHECK(std::abs(mean - 2.0 / 3.0) < 4.0 * std::sqrt(2.0 / 9.0 / n));
  CHECK(var == doctest::Approx(2.0 / 9.0).epsilon(0.02));
  CHECK_THROWS_AS(sample_gamma(0.0, 1.0, s), InvalidInput);
  CHECK_THROWS_AS(sample_gamma(1.0, -1.0, s), InvalidInput);
}

TEST_CASE("inverse Wishart mean") {
  Eigen::MatrixXd psi(2, 2);
  psi << 2.0, 0.5, 0.5, 1.0;
  const PdMatrix scale(psi, "test");
  const double df = 12.0;
  RngStream s(5, {});
  Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(2, 2);
  Eigen::MatrixXd sum2 = Eigen::MatrixXd::Zero(2, 2);
  const int n = 40000;
  for (int i = 0; i < n; ++i) {
    const Eigen::MatrixXd w = sample_inverse_wishart(df, scale, s).matrix();
    REQUIRE((w - w.transpose()).norm() == 0.0);
    sum += w;
    sum2 += w.cwiseProduct(w);
  }
  const Eigen::MatrixXd mean = sum / n;
  const Eigen::MatrixXd expected = psi / (df - 2.0 - 1.0);
  for (int r = 0; r < 2; ++r) {
    for (int c = 0; c < 2; ++c) {
      const double sd = std::sqrt(sum2(r, c) / n - mean(r, c) * mean(r, c));
      CHECK(std::abs(mean(r, c) - expected(r, c)) < 4.0 * sd / std::sqrt(n));
    }
  }
  CHECK_THROWS_AS(sample_inverse_wishart(1.0, scale, s), InvalidInput);
}

TEST_CASE("multivariate normal in precision form") {
  Eigen::MatrixXd p(2, 2);
  p << 4.0, 1.0, 1.0, 2.0;
  Eigen::VectorXd b(2);
  b << 1.0, -1.0;
  const PdMatrix precision(p, "test");
  const Eigen::MatrixXd cov = p.inverse();
  const Eigen::VectorXd mu = cov * b;
  RngStream s(6, {});
  const int n = 100000;
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(2);
  Eigen::MatrixXd outer = Eigen::MatrixXd::Zero(2, 2);
  for (int i = 0; i < n; ++i) {
    const Eigen::VectorXd x = sample_mvn_precision(precision, b, s);
    sum += x;
    outer += (x - mu) * (x - mu).transpose();
  }
  const Eigen::VectorXd mean = sum / n;
  for (int k = 0; k < 2; ++k) CHECK(std::abs(mean(k) - mu(k)) < 4.0 * std::sqrt(cov(k, k) / n));
  const Eigen::MatrixXd emp = outer / n;
  CHECK((emp - cov).cwiseAbs().maxCoeff() < 0.01);
}

TEST_CASE("multivariate normal in covariance form") {
  Eigen::MatrixXd c(2, 2);
  c << 1.0, 0.6, 0.6, 2.0;
  const PdMatrix cov(c, "test");
  Eigen::VectorXd m(2);
  m << 3.0, -2.0;
  RngStream s(7, {});
  const int n = 100000;
  Eigen::MatrixXd outer = Eigen::MatrixXd::Zero(2, 2);
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(2);
  for (int i = 0; i < n; ++i) {
    const Eigen::VectorXd x = sample_mvn_cov(m, cov, s);
    sum += x;
    outer += (x - m) * (x - m).transpose();
  }
  CHECK(((sum / n) - m).cwiseAbs().maxCoeff() < 4.0 * std::sqrt(2.0 / n));
  CHECK(((outer / n) - c).cwiseAbs().maxCoeff() < 0.03);
}

TEST_CASE("categorical draws") {
  RngStream s(8, {});
  const std::vector<double> p{0.2, 0.5, 0.3};
  std::vector<int> counts(3, 0);
  const int n = 100000;
  for (int i = 0; i < n; ++i) counts[sample_categorical(p, s)]++;
  for (int j = 0; j < 3; ++j) {
    CHECK(std::abs(counts[j] / double(n) - p[j]) < 4.0 * std::sqrt(p[j] * (1 - p[j]) / n));
  }
  const std::vector<double> bad{0.2, 0.5, 0.2};
  CHECK_THROWS_AS(sample_categorical(bad, s), InvalidInput);
  const std::vector<double> negative{1.2, -0.2};
  CHECK_THROWS_AS(sample_categorical(negative, s), InvalidInput);
}

TEST_CASE("standard Gumbel mean") {
  RngStream s(9, {});
  const int n = 200000;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) sum += sample_gumbel(s);
  const double sd = std::numbers::pi / std::sqrt(6.0);
  CHECK(std::abs(sum / n - std::numbers::egamma) < 4.0 * sd / std::sqrt(n));
}
