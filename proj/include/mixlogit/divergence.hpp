#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace mixlogit {

enum class DivergenceReason { kNone, kUtilityOverflow, kParameterOverflow, kNonFinite };

std::string to_string(DivergenceReason reason);
DivergenceReason parse_divergence_reason(const std::string& text);

struct DivergenceThresholds {
  double v_max = 500.0;
  double param_max = 1e6;
  int window = 100;
};

struct MonitorPoint {
  std::int64_t iteration = 0;
  double max_abs_v = 0.0;
  double mean_chosen_prob = 0.0;
  double max_abs_param = 0.0;
};

struct DivergenceReport {
  bool triggered = false;
  std::int64_t iteration = -1;
  DivergenceReason reason = DivergenceReason::kNone;
  /// The last `window` monitor points, oldest first.
  std::vector<MonitorPoint> trace;
};

/// Post-sweep checkpoint shared by both samplers. Fires on the first
/// observation with a non-finite value, max|V| above v_max, or a parameter
/// magnitude above param_max, checked in that order.
class DivergenceMonitor {
 public:
  explicit DivergenceMonitor(DivergenceThresholds thresholds);

  /// Returns true when this observation triggers divergence.
  bool observe(const MonitorPoint& point);

  const DivergenceReport& report() const noexcept { return report_; }
  const DivergenceThresholds& thresholds() const noexcept { return thresholds_; }

 private:
  DivergenceThresholds thresholds_;
  DivergenceReport report_;
};

}  // namespace mixlogit
