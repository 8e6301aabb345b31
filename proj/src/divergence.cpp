#include "mixlogit/divergence.hpp"

#include <cmath>

#include "mixlogit/errors.hpp"

namespace mixlogit {

std::string to_string(DivergenceReason reason) {
  switch (reason) {
    case DivergenceReason::kNone:
      return "none";
    case DivergenceReason::kUtilityOverflow:
      return "utility-overflow";
    case DivergenceReason::kParameterOverflow:
      return "parameter-overflow";
    case DivergenceReason::kNonFinite:
      return "non-finite";
  }
  return "unknown";
}

DivergenceReason parse_divergence_reason(const std::string& text) {
  for (auto r : {DivergenceReason::kNone, DivergenceReason::kUtilityOverflow,
                 DivergenceReason::kParameterOverflow, DivergenceReason::kNonFinite}) {
    if (to_string(r) == text) return r;
  }
  throw InvalidInput("unknown divergence reason '" + text + "'");
}

DivergenceMonitor::DivergenceMonitor(DivergenceThresholds thresholds)
    : thresholds_(thresholds) {
  if (!(thresholds_.v_max > 0.0) || !(thresholds_.param_max > 0.0) || thresholds_.window < 1) {
    throw InvalidInput("DivergenceMonitor: thresholds and window must be positive");
  }
}

bool DivergenceMonitor::observe(const MonitorPoint& point) {
  if (report_.triggered) return true;
  report_.trace.push_back(point);
  if (report_.trace.size() > static_cast<std::size_t>(thresholds_.window)) {
    report_.trace.erase(report_.trace.begin());
  }

  DivergenceReason reason = DivergenceReason::kNone;
  if (!std::isfinite(point.max_abs_v) || !std::isfinite(point.mean_chosen_prob) ||
      !std::isfinite(point.max_abs_param)) {
    reason = DivergenceReason::kNonFinite;
  } else if (point.max_abs_v > thresholds_.v_max) {
    reason = DivergenceReason::kUtilityOverflow;
  } else if (point.max_abs_param > thresholds_.param_max) {
    reason = DivergenceReason::kParameterOverflow;
  }
  if (reason == DivergenceReason::kNone) return false;

  report_.triggered = true;
  report_.iteration = point.iteration;
  report_.reason = reason;
  return true;
}

}  // namespace mixlogit
