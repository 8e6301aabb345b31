#include "doctest.h"
#include "mixlogit/errors.hpp"
#include "mixlogit/model.hpp"
#include "mixlogit/synthgen.hpp"

#include <cmath>
#include <vector>

using namespace mixlogit;

namespace {

long double lse_oracle(const std::vector<double>& v, std::size_t skip = SIZE_MAX) {
  long double m = -INFINITY;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i != skip) m = std::max<long double>(m, v[i]);
  }
  long double s = 0.0L;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i != skip) s += std::exp(static_cast<long double>(v[i]) - m);
  }
  return m + std::log(s);
}

ChoiceDataset small_dataset() {
  ChoiceDataset d = generate_covariates(4, 3, 3, 2, 2, CovariateLaw::kNormal, 99);
  for (std::size_t i = 0; i < d.y.size(); ++i) d.y[i] = static_cast<int>(i % 3);
  return d;
}

}  // namespace

TEST_CASE("log-sum-exp matches an extended-precision oracle") {
  const std::vector<std::vector<double>> cases{
      {0.0, 0.0, 0.0}, {700.0, 699.0, -700.0}, {-700.0, -699.5}, {1e-3, 2e-3, -5.0, 3.0}, {42.0}};
  for (const auto& v : cases) {
    CHECK(log_sum_exp(v) == doctest::Approx(static_cast<double>(lse_oracle(v))).epsilon(1e-15));
    for (std::size_t k = 0; k < v.size() && v.size() > 1; ++k) {
      CHECK(log_sum_exp_excluding(v, k) ==
            doctest::Approx(static_cast<double>(lse_oracle(v, k))).epsilon(1e-15));
    }
  }
}

TEST_CASE("excluding an element never subtracts it") {
  // Subtraction would lose everything here: e^1000 dominates.
  const std::vector<double> v{1000.0, 0.0, 0.0};
  CHECK(log_sum_exp_excluding(v, 0) == doctest::Approx(std::log(2.0)));
}

TEST_CASE("MNL probabilities") {
  const std::vector<double> v{1.0, 2.0, 3.0};
  const Eigen::VectorXd p = mnl_probabilities(v);
  CHECK(p.sum() == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(p(2) / p(1) == doctest::Approx(std::exp(1.0)));
  const std::vector<double> extreme{700.0, -700.0};
  const Eigen::VectorXd q = mnl_probabilities(extreme);
  CHECK(q.allFinite());
  CHECK(q(0) == 1.0);
  const std::vector<double> bad{1.0, NAN};
  CHECK_THROWS_AS(mnl_probabilities(bad), InvalidInput);
}

TEST_CASE("generic utilities match a naive loop") {
  const ChoiceDataset d = small_dataset();
  GenericParamState s;
  s.alpha = Eigen::Vector2d(0.3, -1.2);
  s.beta = Eigen::MatrixXd::Random(d.N, d.K);
  const UtilityTensor v = representative_utility(d, s);
  for (int n = 0; n < d.N; ++n) {
    for (int t = 0; t < d.T; ++t) {
      for (int j = 0; j < d.J; ++j) {
        double u = 0.0;
        for (int l = 0; l < d.L; ++l) u += d.xf[d.cell(n, t, j) * d.L + l] * s.alpha(l);
        for (int k = 0; k < d.K; ++k) u += d.xr[d.cell(n, t, j) * d.K + k] * s.beta(n, k);
        CHECK(v(n, t, j) == doctest::Approx(u).epsilon(1e-14));
      }
    }
  }
}

TEST_CASE("alternative-specific utilities match a naive loop") {
  const ChoiceDataset d = small_dataset();
  AltSpecificParamState s;
  s.alpha = Eigen::MatrixXd::Random(d.J, d.L);
  for (int j = 0; j < d.J; ++j) s.beta.push_back(Eigen::MatrixXd::Random(d.N, d.K));
  const UtilityTensor v = representative_utility(d, s);
  for (int n = 0; n < d.N; ++n) {
    for (int t = 0; t < d.T; ++t) {
      for (int j = 0; j < d.J; ++j) {
        double u = 0.0;
        for (int l = 0; l < d.L; ++l) u += d.xf[d.cell(n, t, j) * d.L + l] * s.alpha(j, l);
        for (int k = 0; k < d.K; ++k) u += d.xr[d.cell(n, t, j) * d.K + k] * s.beta[j](n, k);
        CHECK(v(n, t, j) == doctest::Approx(u).epsilon(1e-14));
      }
    }
  }
}

TEST_CASE("sequence log-likelihood is the sum of log probabilities of the choices") {
  const ChoiceDataset d = small_dataset();
  UtilityTensor v(d.N, d.T, d.J);
  for (std::size_t i = 0; i < v.values.size(); ++i) v.values[i] = std::sin(double(i));
  double total = 0.0;
  for (int n = 0; n < d.N; ++n) {
    double ll = 0.0;
    for (int t = 0; t < d.T; ++t) {
      const Eigen::VectorXd p = mnl_probabilities(v.row(n, t));
      ll += std::log(p(d.choice(n, t)));
    }
    CHECK(sequence_log_likelihood(d, v, n) == doctest::Approx(ll).epsilon(1e-13));
    total += ll;
  }
  CHECK(total_log_likelihood(d, v) == doctest::Approx(total).epsilon(1e-13));
}

TEST_CASE("L and eta") {
  UtilityTensor v(1, 1, 2);
  v(0, 0, 0) = 1.5;
  v(0, 0, 1) = -0.25;
  const LogitReduction r = compute_L_eta(v, 0);
  CHECK(r.eta(0, 0) == doctest::Approx(1.75).epsilon(1e-15));
  CHECK(r.L(0, 0) == doctest::Approx(-0.25).epsilon(1e-15));

  UtilityTensor w(1, 1, 4);
  UtilityTensor w_perm(1, 1, 4);
  const double vals[4] = {0.1, 2.0, -3.0, 0.7};
  const double perm[4] = {0.1, 0.7, 2.0, -3.0};
  for (int j = 0; j < 4; ++j) {
    w(0, 0, j) = vals[j];
    w_perm(0, 0, j) = perm[j];
  }
  CHECK(compute_L_eta(w, 0).L(0, 0) == doctest::Approx(compute_L_eta(w_perm, 0).L(0, 0)).epsilon(1e-15));

  UtilityTensor one(1, 1, 1);
  CHECK_THROWS_AS(compute_L_eta(one, 0), InvalidInput);
}

TEST_CASE("kappa") {
  CHECK(kappa(1) == 0.5);
  CHECK(kappa(0) == -0.5);
  CHECK_THROWS_AS(kappa(2), InvalidInput);
}

TEST_CASE("logistic identity at eta = 0 is exact") {
  RngStream s(1, {});
  const PgIdentityCheck c = pg_identity_check(0.0, 1, 1000, s);
  CHECK(c.lhs == 0.5);
  CHECK(c.rhs_estimate == 0.5);
  CHECK(c.std_error == 0.0);
}

TEST_CASE("expanded design reproduces alternative-specific utilities") {
  const ChoiceDataset d = small_dataset();
  const ChoiceDataset e = expand_alternative_specific(d);
  CHECK(e.L == d.L * d.J);
  CHECK(e.K == d.K * d.J);
  AltSpecificParamState alt;
  alt.alpha = Eigen::MatrixXd::Random(d.J, d.L);
  for (int j = 0; j < d.J; ++j) alt.beta.push_back(Eigen::MatrixXd::Random(d.N, d.K));
  GenericParamState gen;
  gen.alpha = Eigen::VectorXd(e.L);
  gen.beta = Eigen::MatrixXd(d.N, e.K);
  for (int j = 0; j < d.J; ++j) {
    for (int l = 0; l < d.L; ++l) gen.alpha(j * d.L + l) = alt.alpha(j, l);
    for (int k = 0; k < d.K; ++k) gen.beta.col(j * d.K + k) = alt.beta[j].col(k);
  }
  const UtilityTensor va = representative_utility(d, alt);
  const UtilityTensor vg = representative_utility(e, gen);
  for (std::size_t i = 0; i < va.values.size(); ++i) {
    CHECK(va.values[i] == doctest::Approx(vg.values[i]).epsilon(1e-14));
  }
}

TEST_CASE("dataset validation and digest") {
  ChoiceDataset d = small_dataset();
  CHECK_NOTHROW(d.validate());
  const std::string h = d.digest();
  d.xf[0] += 1e-12;
  CHECK(d.digest() != h);
  d.y[0] = 7;
  CHECK_THROWS_AS(d.validate(), InvalidInput);
  CHECK_THROWS_AS(ChoiceDataset::zeros(0, 1, 2, 1, 1), InvalidInput);
}

TEST_CASE("monitors") {
  UtilityTensor v(1, 2, 2);
  v.values = {0.0, -3.0, 2.0, 5.0};
  CHECK(max_abs_utility(v) == 5.0);
  v.values[1] = NAN;
  CHECK(std::isinf(max_abs_utility(v)));
  ChoiceDataset d = ChoiceDataset::zeros(1, 1, 2, 0, 0);
  d.y = {1};
  UtilityTensor u(1, 1, 2);
  u.values = {0.0, std::log(3.0)};
  CHECK(mean_chosen_probability(d, u) == doctest::Approx(0.75));
}
