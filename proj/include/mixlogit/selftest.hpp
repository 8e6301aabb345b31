#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "mixlogit/rng.hpp"

namespace mixlogit {

/// PG(1, c) by the truncated infinite convolution
/// (1 / (2 pi^2)) sum_{k=1}^{terms} g_k / ((k - 1/2)^2 + c^2 / (4 pi^2)), g_k ~ Exp(1).
/// Biased low by the dropped tail; used only as an independent reference.
double polya_gamma_sum_of_gammas(double c, RngStream& stream, int terms = 200);

/// Exact mean of the truncated sum above.
double polya_gamma_sum_of_gammas_mean(double c, int terms = 200);

struct SelftestOptions {
  std::uint64_t seed = 20190412;
  std::int64_t moment_draws = 100000;
  std::int64_t identity_draws = 1000000;
  std::int64_t symmetry_draws = 20000;
  std::int64_t oracle_draws = 20000;
  std::vector<double> moment_tilts{0.0, 0.5, 1.0, 2.0, 5.0};
};

struct SelftestCheck {
  std::string group;  // moments | symmetry | oracle | identity
  std::string name;
  bool passed = false;
  double statistic = 0.0;  // z-score or KS distance
  double threshold = 0.0;
  nlohmann::json detail;
};

struct SelftestResult {
  std::vector<SelftestCheck> checks;
  double seconds = 0.0;
  bool passed() const;
  std::vector<const SelftestCheck*> group(const std::string& name) const;
};

/// Moments of the exact sampler against closed forms (4 SE), sign symmetry
/// of the tilt by a two-sample Kolmogorov-Smirnov test at the 1% level,
/// agreement of sampler and sum-of-gammas moments (4 SE, after correcting
/// the oracle's known truncation bias), and the integral identity over
/// eta in {-3,-1,0,1,3} x y in {0,1} (3 SE).
SelftestResult run_pg_selftest(const SelftestOptions& options = {});

/// Runs only one group; used by the acceptance suite to time groups apart.
SelftestResult run_pg_selftest_group(const std::string& group, const SelftestOptions& options = {});

nlohmann::json to_json(const SelftestResult& r);

/// Two-sample Kolmogorov-Smirnov distance.
double ks_distance(std::vector<double> a, std::vector<double> b);

}  // namespace mixlogit
