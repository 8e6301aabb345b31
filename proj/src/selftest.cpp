#include "mixlogit/selftest.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>

#include "mixlogit/errors.hpp"
#include "mixlogit/model.hpp"
#include "mixlogit/random.hpp"

namespace mixlogit {

namespace {

constexpr double kPi = std::numbers::pi;

double oracle_weight(int k, double c) {
  const double h = k - 0.5;
  return 1.0 / (2.0 * kPi * kPi * (h * h + c * c / (4.0 * kPi * kPi)));
}

struct Moments {
  double mean = 0.0;
  double var = 0.0;
  double m4 = 0.0;  // fourth central moment
  std::int64_t n = 0;
};

Moments moments_of(const std::vector<double>& x) {
  Moments m;
  m.n = static_cast<std::int64_t>(x.size());
  for (double v : x) m.mean += v;
  m.mean /= static_cast<double>(m.n);
  for (double v : x) {
    const double d2 = (v - m.mean) * (v - m.mean);
    m.var += d2;
    m.m4 += d2 * d2;
  }
  m.var /= static_cast<double>(m.n - 1);
  m.m4 /= static_cast<double>(m.n);
  return m;
}

double se_mean(const Moments& m) { return std::sqrt(m.var / static_cast<double>(m.n)); }
double se_var(const Moments& m) {
  return std::sqrt(std::max(m.m4 - m.var * m.var, 0.0) / static_cast<double>(m.n));
}

SelftestCheck make_check(const std::string& group, const std::string& name) {
  SelftestCheck c;
  c.group = group;
  c.name = name;
  return c;
}

std::vector<double> draw_exact(double c, std::int64_t n, std::uint64_t seed, std::uint64_t unit) {
  RngStream stream(seed, {Purpose::kTest, 0, 0, unit});
  std::vector<double> out(static_cast<std::size_t>(n));
  for (auto& w : out) w = sample_polya_gamma(c, stream);
  return out;
}

std::string tilt_label(double c) {
  std::string s = std::to_string(c);
  s.erase(s.find_last_not_of('0') + 1);
  if (s.back() == '.') s.pop_back();
  return "c=" + s;
}

void moment_checks(const SelftestOptions& o, SelftestResult& r) {
  std::uint64_t unit = 0;
  for (double c : o.moment_tilts) {
    const auto w = draw_exact(c, o.moment_draws, o.seed, unit++);
    const Moments m = moments_of(w);
    const double mu = polya_gamma_mean(c);
    const double var = polya_gamma_variance(c);
    SelftestCheck mean_check = make_check("moments", "mean " + tilt_label(c));
    mean_check.statistic = (m.mean - mu) / se_mean(m);
    mean_check.threshold = 4.0;
    mean_check.passed = std::abs(mean_check.statistic) < mean_check.threshold;
    mean_check.detail = {{"c", c}, {"draws", m.n}, {"sample_mean", m.mean}, {"exact_mean", mu},
                         {"se", se_mean(m)}};
    r.checks.push_back(mean_check);

    SelftestCheck var_check = make_check("moments", "variance " + tilt_label(c));
    var_check.statistic = (m.var - var) / se_var(m);
    var_check.threshold = 4.0;
    var_check.passed = std::abs(var_check.statistic) < var_check.threshold;
    var_check.detail = {{"c", c}, {"draws", m.n}, {"sample_variance", m.var},
                        {"exact_variance", var}, {"se", se_var(m)}};
    r.checks.push_back(var_check);
  }
}

double ks_critical_1pct(std::size_t n, std::size_t m) {
  const double dn = static_cast<double>(n);
  const double dm = static_cast<double>(m);
  return 1.628 * std::sqrt((dn + dm) / (dn * dm));
}

void symmetry_checks(const SelftestOptions& o, SelftestResult& r) {
  for (double c : {1.0, 3.0}) {
    const auto pos = draw_exact(c, o.symmetry_draws, o.seed, 100 + static_cast<std::uint64_t>(c));
    const auto neg = draw_exact(-c, o.symmetry_draws, o.seed, 200 + static_cast<std::uint64_t>(c));
    SelftestCheck chk = make_check("symmetry", "ks " + tilt_label(c) + " vs " + tilt_label(-c));
    chk.statistic = ks_distance(pos, neg);
    chk.threshold = ks_critical_1pct(pos.size(), neg.size());
    chk.passed = chk.statistic < chk.threshold;
    chk.detail = {{"c", c}, {"draws", o.symmetry_draws}};
    r.checks.push_back(chk);
  }
}

void oracle_checks(const SelftestOptions& o, SelftestResult& r) {
  constexpr int kTerms = 200;
  std::uint64_t unit = 300;
  for (double c : {0.0, 1.0, 3.0}) {
    const auto exact = draw_exact(c, o.oracle_draws, o.seed, unit++);
    RngStream stream(o.seed, {Purpose::kTest, 1, 0, unit++});
    std::vector<double> ref(static_cast<std::size_t>(o.oracle_draws));
    for (auto& w : ref) w = polya_gamma_sum_of_gammas(c, stream, kTerms);
    const Moments me = moments_of(exact);
    const Moments mr = moments_of(ref);

    double tail_mean = 0.0;
    double tail_var = 0.0;
    // Dropped terms k > kTerms, summed far enough for double precision.
    for (int k = kTerms + 1; k <= 200000; ++k) {
      const double b = oracle_weight(k, c);
      tail_mean += b;
      tail_var += b * b;
    }
    SelftestCheck mean_check = make_check("oracle", "mean " + tilt_label(c));
    mean_check.statistic =
        (me.mean - mr.mean - tail_mean) / std::hypot(se_mean(me), se_mean(mr));
    mean_check.threshold = 4.0;
    mean_check.passed = std::abs(mean_check.statistic) < mean_check.threshold;
    mean_check.detail = {{"c", c},
                         {"exact_sampler_mean", me.mean},
                         {"oracle_mean", mr.mean},
                         {"truncation_correction", tail_mean}};
    r.checks.push_back(mean_check);

    SelftestCheck var_check = make_check("oracle", "variance " + tilt_label(c));
    var_check.statistic = (me.var - mr.var - tail_var) / std::hypot(se_var(me), se_var(mr));
    var_check.threshold = 4.0;
    var_check.passed = std::abs(var_check.statistic) < var_check.threshold;
    var_check.detail = {{"c", c},
                        {"exact_sampler_variance", me.var},
                        {"oracle_variance", mr.var},
                        {"truncation_correction", tail_var}};
    r.checks.push_back(var_check);

    SelftestCheck ks = make_check("oracle", "ks " + tilt_label(c));
    ks.statistic = ks_distance(exact, ref);
    ks.threshold = ks_critical_1pct(exact.size(), ref.size());
    ks.passed = ks.statistic < ks.threshold;
    ks.detail = {{"c", c}, {"draws", o.oracle_draws}};
    r.checks.push_back(ks);
  }
}

void identity_checks(const SelftestOptions& o, SelftestResult& r) {
  std::uint64_t unit = 400;
  for (double eta : {-3.0, -1.0, 0.0, 1.0, 3.0}) {
    for (int y : {0, 1}) {
      RngStream stream(o.seed, {Purpose::kTest, 2, 0, unit++});
      const PgIdentityCheck id = pg_identity_check(eta, y, o.identity_draws, stream);
      SelftestCheck chk = make_check("identity", "eta=" + std::to_string(static_cast<int>(eta)) +
                                        " y=" + std::to_string(y));
      const double diff = id.rhs_estimate - id.lhs;
      // eta = 0 makes the integrand constant: zero spread, exact agreement expected.
      if (id.std_error > 0.0) {
        chk.statistic = diff / id.std_error;
      } else {
        chk.statistic = std::abs(diff) <= 1e-15 ? 0.0 : INFINITY;
      }
      chk.threshold = 3.0;
      chk.passed = std::abs(chk.statistic) < chk.threshold;
      chk.detail = {{"eta", eta},
                    {"y", y},
                    {"lhs", id.lhs},
                    {"rhs_estimate", id.rhs_estimate},
                    {"se", id.std_error},
                    {"draws", o.identity_draws}};
      r.checks.push_back(chk);
    }
  }
}

}  // namespace

double polya_gamma_sum_of_gammas(double c, RngStream& stream, int terms) {
  double s = 0.0;
  for (int k = 1; k <= terms; ++k) s += oracle_weight(k, c) * stream.exponential();
  return s;
}

double polya_gamma_sum_of_gammas_mean(double c, int terms) {
  double s = 0.0;
  for (int k = 1; k <= terms; ++k) s += oracle_weight(k, c);
  return s;
}

double ks_distance(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw InvalidInput("ks_distance: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == x) ++i;
    while (j < b.size() && b[j] == x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

bool SelftestResult::passed() const {
  return !checks.empty() &&
         std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed; });
}

std::vector<const SelftestCheck*> SelftestResult::group(const std::string& name) const {
  std::vector<const SelftestCheck*> out;
  for (const auto& c : checks) {
    if (c.group == name) out.push_back(&c);
  }
  return out;
}

SelftestResult run_pg_selftest_group(const std::string& group, const SelftestOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  SelftestResult r;
  if (group == "moments") {
    moment_checks(options, r);
  } else if (group == "symmetry") {
    symmetry_checks(options, r);
  } else if (group == "oracle") {
    oracle_checks(options, r);
  } else if (group == "identity") {
    identity_checks(options, r);
  } else {
    throw InvalidInput("unknown selftest group '" + group + "'");
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

SelftestResult run_pg_selftest(const SelftestOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  SelftestResult r;
  for (const char* g : {"moments", "symmetry", "oracle", "identity"}) {
    auto part = run_pg_selftest_group(g, options);
    r.checks.insert(r.checks.end(), part.checks.begin(), part.checks.end());
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

nlohmann::json to_json(const SelftestResult& r) {
  nlohmann::json checks = nlohmann::json::array();
  for (const auto& c : r.checks) {
    checks.push_back({{"group", c.group},
                      {"name", c.name},
                      {"passed", c.passed},
                      {"statistic", c.statistic},
                      {"threshold", c.threshold},
                      {"detail", c.detail}});
  }
  return {{"passed", r.passed()}, {"seconds", r.seconds}, {"checks", checks}};
}

}  // namespace mixlogit
