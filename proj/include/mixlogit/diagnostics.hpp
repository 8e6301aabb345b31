#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "mixlogit/divergence.hpp"

namespace mixlogit {

/// Stored post-burn-in draws plus per-iteration monitor series.
struct Chain {
  std::vector<std::string> names;
  std::vector<std::int64_t> iterations;  // iteration index of each stored draw
  std::vector<double> draws;             // row-major, iterations.size() x names.size()
  std::map<std::string, std::vector<double>> monitors;
  nlohmann::json meta = nlohmann::json::object();

  std::size_t n_draws() const noexcept { return iterations.size(); }
  std::size_t n_params() const noexcept { return names.size(); }

  void add_draw(std::int64_t iteration, std::span<const double> values);
  std::span<const double> row(std::size_t i) const {
    return {draws.data() + i * names.size(), names.size()};
  }
  std::vector<double> column(std::size_t p) const;
  /// -1 when absent.
  std::ptrdiff_t index_of(const std::string& name) const;
};

struct ParamSummary {
  std::string name;
  double mean = 0.0;
  double sd = 0.0;
  double q025 = 0.0;
  double q50 = 0.0;
  double q975 = 0.0;
  double ess = 0.0;
  bool ess_degenerate = false;

  /// Monte Carlo standard error of the mean, sd / sqrt(ESS).
  double mcse() const;
};

struct Summary {
  std::vector<ParamSummary> params;
  const ParamSummary* find(const std::string& name) const;
};

inline constexpr std::size_t kMinSummaryDraws = 100;

/// Effective sample size by Geyer's initial positive sequence: sums of
/// adjacent autocorrelation pairs are accumulated until the first negative
/// pair. Result lies in (0, n]. A constant series sets `degenerate` and
/// returns n.
double effective_sample_size(std::span<const double> x, bool* degenerate = nullptr);

/// Type-7 (linear interpolation) sample quantile of unsorted data.
double quantile(std::vector<double> x, double prob);

Summary summarize(const Chain& chain);

struct RecoveryRow {
  std::string name;
  double truth = 0.0;
  double mean = 0.0;
  double bias = 0.0;
  double abs_z = 0.0;
  bool covered = false;  // truth inside the central 95% interval
};
struct RecoveryReport {
  std::vector<RecoveryRow> rows;
  double rmse = 0.0;
};
RecoveryReport recovery_report(const Summary& summary,
                               const std::vector<std::pair<std::string, double>>& truth);

struct ComparisonRow {
  std::string name_a;
  std::string name_b;
  double mean_a = 0.0;
  double mean_b = 0.0;
  double se_a = 0.0;
  double se_b = 0.0;
  double z = 0.0;
};
struct Comparison {
  std::vector<ComparisonRow> rows;
  /// Map entries whose names are missing from a chain, plus chain-a
  /// parameters without a map entry.
  std::vector<std::string> unmapped;
};
/// z = (mean_a - mean_b) / sqrt(se_a^2 + se_b^2) with ESS-based standard errors.
Comparison compare_chains(const Chain& a, const Chain& b,
                          const std::vector<std::pair<std::string, std::string>>& param_map);

struct TraceStats {
  double prob_chosen_tail_mean = 0.0;
  double v_growth_slope = 0.0;
};
/// Tail mean of the chosen-alternative probability and least-squares slope
/// of log max|V| against iteration over the report's window. Non-finite
/// entries are skipped.
TraceStats divergence_trace_stats(const DivergenceReport& report);

}  // namespace mixlogit
