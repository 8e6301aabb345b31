#include "mixlogit/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numeric>
#include <unordered_map>
#include <unordered_set>

#include <unsupported/Eigen/FFT>

#include "mixlogit/errors.hpp"

namespace mixlogit {

void Chain::add_draw(std::int64_t iteration, std::span<const double> values) {
  if (values.size() != names.size()) throw InvalidInput("Chain::add_draw: width mismatch");
  iterations.push_back(iteration);
  draws.insert(draws.end(), values.begin(), values.end());
}

std::vector<double> Chain::column(std::size_t p) const {
  std::vector<double> out(n_draws());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = draws[i * names.size() + p];
  return out;
}

std::ptrdiff_t Chain::index_of(const std::string& name) const {
  const auto it = std::find(names.begin(), names.end(), name);
  return it == names.end() ? -1 : std::distance(names.begin(), it);
}

double ParamSummary::mcse() const { return ess > 0.0 ? sd / std::sqrt(ess) : 0.0; }

const ParamSummary* Summary::find(const std::string& name) const {
  for (const auto& p : params) {
    if (p.name == name) return &p;
  }
  return nullptr;
}

namespace {

// Autocovariances at lags 0..n-1 (biased, divided by n) via zero-padded FFT.
std::vector<double> autocovariance(std::span<const double> x, double mean) {
  const std::size_t n = x.size();
  std::size_t m = 1;
  while (m < 2 * n) m <<= 1;
  std::vector<double> padded(m, 0.0);
  for (std::size_t i = 0; i < n; ++i) padded[i] = x[i] - mean;
  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> freq;
  fft.fwd(freq, padded);
  for (auto& f : freq) f = std::complex<double>(std::norm(f), 0.0);
  std::vector<double> acov;
  fft.inv(acov, freq);
  acov.resize(n);
  for (auto& a : acov) a /= static_cast<double>(n);
  return acov;
}

}  // namespace

double effective_sample_size(std::span<const double> x, bool* degenerate) {
  const std::size_t n = x.size();
  if (degenerate) *degenerate = false;
  if (n < 4) throw InvalidInput("effective_sample_size: need at least four draws");
  const double mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n);
  const auto acov = autocovariance(x, mean);
  const double scale = std::max(1.0, std::abs(mean));
  if (!(acov[0] > 1e-28 * scale * scale)) {
    if (degenerate) *degenerate = true;
    return static_cast<double>(n);
  }
  double tau = -1.0;
  for (std::size_t lag = 0; lag + 1 < n; lag += 2) {
    const double pair = (acov[lag] + acov[lag + 1]) / acov[0];
    if (pair < 0.0) break;
    tau += 2.0 * pair;
  }
  const double ess = static_cast<double>(n) / std::max(tau, 1e-12);
  return std::clamp(ess, std::numeric_limits<double>::min(), static_cast<double>(n));
}

double quantile(std::vector<double> x, double prob) {
  if (x.empty()) throw InvalidInput("quantile: empty sample");
  std::sort(x.begin(), x.end());
  const double h = (static_cast<double>(x.size()) - 1.0) * prob;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, x.size() - 1);
  return x[lo] + (h - static_cast<double>(lo)) * (x[hi] - x[lo]);
}

Summary summarize(const Chain& chain) {
  if (chain.n_draws() < kMinSummaryDraws) {
    throw InvalidInput("summarize: need at least " + std::to_string(kMinSummaryDraws) +
                       " stored draws, have " + std::to_string(chain.n_draws()));
  }
  Summary summary;
  const double n = static_cast<double>(chain.n_draws());
  for (std::size_t p = 0; p < chain.n_params(); ++p) {
    const std::vector<double> col = chain.column(p);
    ParamSummary s;
    s.name = chain.names[p];
    s.mean = std::accumulate(col.begin(), col.end(), 0.0) / n;
    double ss = 0.0;
    for (double v : col) ss += (v - s.mean) * (v - s.mean);
    s.sd = std::sqrt(ss / (n - 1.0));
    s.q025 = quantile(col, 0.025);
    s.q50 = quantile(col, 0.5);
    s.q975 = quantile(col, 0.975);
    s.ess = effective_sample_size(col, &s.ess_degenerate);
    if (s.ess_degenerate) s.sd = 0.0;
    summary.params.push_back(std::move(s));
  }
  return summary;
}

RecoveryReport recovery_report(const Summary& summary,
                               const std::vector<std::pair<std::string, double>>& truth) {
  std::vector<std::string> missing;
  for (const auto& [name, value] : truth) {
    if (!summary.find(name)) missing.push_back(name);
  }
  if (!missing.empty()) {
    std::string list;
    for (const auto& m : missing) list += (list.empty() ? "" : ", ") + m;
    throw InvalidInput("recovery_report: summary lacks " + list);
  }
  RecoveryReport report;
  double sq = 0.0;
  for (const auto& [name, value] : truth) {
    const ParamSummary& s = *summary.find(name);
    RecoveryRow row;
    row.name = name;
    row.truth = value;
    row.mean = s.mean;
    row.bias = s.mean - value;
    if (s.sd > 0.0) {
      row.abs_z = std::abs(row.bias) / s.sd;
    } else {
      row.abs_z = row.bias == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    }
    row.covered = value >= s.q025 && value <= s.q975;
    sq += row.bias * row.bias;
    report.rows.push_back(row);
  }
  report.rmse = truth.empty() ? 0.0 : std::sqrt(sq / static_cast<double>(truth.size()));
  return report;
}

Comparison compare_chains(const Chain& a, const Chain& b,
                          const std::vector<std::pair<std::string, std::string>>& param_map) {
  const Summary sa = summarize(a);
  const Summary sb = summarize(b);
  Comparison out;
  std::unordered_set<std::string> mapped_a;
  for (const auto& [name_a, name_b] : param_map) {
    const ParamSummary* pa = sa.find(name_a);
    const ParamSummary* pb = sb.find(name_b);
    if (!pa || !pb) {
      out.unmapped.push_back(name_a + "->" + name_b);
      continue;
    }
    mapped_a.insert(name_a);
    ComparisonRow row;
    row.name_a = name_a;
    row.name_b = name_b;
    row.mean_a = pa->mean;
    row.mean_b = pb->mean;
    row.se_a = pa->mcse();
    row.se_b = pb->mcse();
    const double diff = row.mean_a - row.mean_b;
    const double se = std::sqrt(row.se_a * row.se_a + row.se_b * row.se_b);
    if (se > 0.0) {
      row.z = diff / se;
    } else {
      row.z = diff == 0.0 ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), diff);
    }
    out.rows.push_back(row);
  }
  for (const auto& name : a.names) {
    if (!mapped_a.count(name)) out.unmapped.push_back(name);
  }
  return out;
}

TraceStats divergence_trace_stats(const DivergenceReport& report) {
  if (!report.triggered) {
    throw InvalidInput("divergence_trace_stats: report was not triggered");
  }
  TraceStats stats;
  double prob_sum = 0.0;
  std::size_t prob_count = 0;
  std::vector<double> xs, ys;
  for (const auto& p : report.trace) {
    if (std::isfinite(p.mean_chosen_prob)) {
      prob_sum += p.mean_chosen_prob;
      ++prob_count;
    }
    if (std::isfinite(p.max_abs_v) && p.max_abs_v > 0.0) {
      xs.push_back(static_cast<double>(p.iteration));
      ys.push_back(std::log(p.max_abs_v));
    }
  }
  stats.prob_chosen_tail_mean =
      prob_count ? prob_sum / static_cast<double>(prob_count)
                 : std::numeric_limits<double>::quiet_NaN();
  if (xs.size() < 2) {
    stats.v_growth_slope = std::numeric_limits<double>::quiet_NaN();
    return stats;
  }
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / static_cast<double>(ys.size());
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  stats.v_growth_slope = sxx > 0.0 ? sxy / sxx : 0.0;
  return stats;
}

}  // namespace mixlogit
