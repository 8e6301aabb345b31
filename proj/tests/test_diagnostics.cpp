#include "doctest.h"
#include "mixlogit/diagnostics.hpp"
#include "mixlogit/errors.hpp"
#include "mixlogit/random.hpp"
#include "mixlogit/rng.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <limits>

using namespace mixlogit;

namespace {

std::vector<double> ar1(double rho, std::size_t n, std::uint64_t seed) {
  RngStream s(seed, {});
  std::vector<double> x(n);
  double prev = s.normal() / std::sqrt(1.0 - rho * rho);
  for (std::size_t i = 0; i < n; ++i) {
    prev = rho * prev + s.normal();
    x[i] = prev;
  }
  return x;
}

Chain chain_of(const std::vector<std::string>& names, const std::vector<std::vector<double>>& cols) {
  Chain c;
  c.names = names;
  for (std::size_t i = 0; i < cols[0].size(); ++i) {
    std::vector<double> row;
    for (const auto& col : cols) row.push_back(col[i]);
    c.add_draw(static_cast<std::int64_t>(i), row);
  }
  return c;
}

}  // namespace

TEST_CASE("constant chain: degenerate ESS, zero sd") {
  std::vector<double> x(500, 3.25);
  bool degenerate = false;
  CHECK(effective_sample_size(x, &degenerate) == 500.0);
  CHECK(degenerate);
  const Summary s = summarize(chain_of({"c"}, {x}));
  CHECK(s.params[0].sd == 0.0);
  CHECK(s.params[0].ess_degenerate);
  CHECK(s.params[0].mean == 3.25);
  CHECK(s.params[0].q025 == 3.25);
  CHECK(s.params[0].mcse() == 0.0);
}

TEST_CASE("iid ESS is near n") {
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const auto x = ar1(0.0, 20000, seed);
    const double ess = effective_sample_size(x);
    CHECK(ess > 0.8 * 20000);
    CHECK(ess <= 20000.0 * 1.2);
  }
}

TEST_CASE("AR(1) ESS matches n (1 - rho) / (1 + rho)") {
  for (double rho : {0.5, 0.9}) {
    CAPTURE(rho);
    const std::size_t n = 100000;
    const double expected = n * (1.0 - rho) / (1.0 + rho);
    const double ess = effective_sample_size(ar1(rho, n, 77));
    CHECK(std::abs(ess / expected - 1.0) < 0.3);
  }
}

TEST_CASE("ESS stays within (0, n]") {
  std::vector<double> alt(1001);
  for (std::size_t i = 0; i < alt.size(); ++i) alt[i] = (i % 2 == 0) ? 1.0 : -1.0;
  const double ess = effective_sample_size(alt);
  CHECK(ess > 0.0);
  CHECK(ess <= 1001.0);
}

TEST_CASE("type-7 quantiles") {
  CHECK(quantile({1, 2, 3, 4}, 0.5) == 2.5);
  CHECK(quantile({4, 1, 3, 2}, 0.0) == 1.0);
  CHECK(quantile({4, 1, 3, 2}, 1.0) == 4.0);
  CHECK(quantile({0, 10}, 0.25) == 2.5);
}

TEST_CASE("summary needs enough draws") {
  std::vector<double> short_col(kMinSummaryDraws - 1, 1.0);
  CHECK_THROWS_AS(summarize(chain_of({"x"}, {short_col})), InvalidInput);
}

TEST_CASE("recovery report") {
  const auto x = ar1(0.0, 5000, 9);
  const Summary s = summarize(chain_of({"p", "q"}, {x, x}));
  const RecoveryReport r = recovery_report(s, {{"p", 0.0}, {"q", 10.0}});
  REQUIRE(r.rows.size() == 2);
  CHECK(r.rows[0].covered);
  CHECK(r.rows[0].abs_z < 4.0);
  CHECK(!r.rows[1].covered);
  CHECK(r.rows[1].bias == doctest::Approx(s.params[1].mean - 10.0));
  const double rmse = std::sqrt((r.rows[0].bias * r.rows[0].bias + r.rows[1].bias * r.rows[1].bias) / 2);
  CHECK(r.rmse == doctest::Approx(rmse));
  CHECK_THROWS_AS(recovery_report(s, {{"missing", 1.0}}), InvalidInput);
}

TEST_CASE("comparing a chain with itself gives zero z") {
  const Chain c = chain_of({"x", "y"}, {ar1(0.5, 2000, 1), ar1(0.2, 2000, 2)});
  const Comparison cmp = compare_chains(c, c, {{"x", "x"}, {"y", "y"}});
  REQUIRE(cmp.rows.size() == 2);
  for (const auto& row : cmp.rows) CHECK(row.z == 0.0);
  CHECK(cmp.unmapped.empty());
}

TEST_CASE("comparison is invariant to column order") {
  const auto x = ar1(0.5, 2000, 3);
  const auto y = ar1(0.5, 2000, 4);
  const Chain a = chain_of({"x", "y"}, {x, y});
  const Chain b = chain_of({"y", "x"}, {y, x});
  const Comparison cmp = compare_chains(a, b, {{"x", "x"}, {"y", "y"}});
  for (const auto& row : cmp.rows) CHECK(row.z == 0.0);
  const Comparison shifted = compare_chains(a, chain_of({"x"}, {ar1(0.5, 2000, 5)}), {{"x", "x"}});
  CHECK(shifted.rows.size() == 1);
  CHECK(std::find(shifted.unmapped.begin(), shifted.unmapped.end(), "y") != shifted.unmapped.end());
}

TEST_CASE("comparison reports names missing from a chain") {
  const Chain a = chain_of({"x"}, {ar1(0.1, 500, 6)});
  const Comparison cmp = compare_chains(a, a, {{"x", "x"}, {"nope", "x"}});
  CHECK(cmp.rows.size() == 1);
  CHECK(std::find(cmp.unmapped.begin(), cmp.unmapped.end(), "nope->x") != cmp.unmapped.end());
}

TEST_CASE("divergence trace statistics") {
  DivergenceReport r;
  CHECK_THROWS_AS(divergence_trace_stats(r), InvalidInput);
  r.triggered = true;
  for (int i = 0; i < 50; ++i) {
    MonitorPoint p;
    p.iteration = i;
    p.max_abs_v = std::exp(0.1 * i);
    p.mean_chosen_prob = (i < 40) ? 0.5 : 1.0;
    r.trace.push_back(p);
  }
  r.trace[3].max_abs_v = std::numeric_limits<double>::infinity();
  const TraceStats t = divergence_trace_stats(r);
  CHECK(t.v_growth_slope == doctest::Approx(0.1));
  CHECK(t.prob_chosen_tail_mean > 0.5);
  CHECK(t.prob_chosen_tail_mean <= 1.0);
}
