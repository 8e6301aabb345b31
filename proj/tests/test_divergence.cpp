#include "doctest.h"
#include "mixlogit/divergence.hpp"
#include "mixlogit/errors.hpp"

#include <limits>

using namespace mixlogit;

namespace {
MonitorPoint point(std::int64_t it, double v, double param = 1.0, double prob = 0.5) {
  MonitorPoint p;
  p.iteration = it;
  p.max_abs_v = v;
  p.max_abs_param = param;
  p.mean_chosen_prob = prob;
  return p;
}
}  // namespace

TEST_CASE("quiet observations do not trigger") {
  DivergenceMonitor m({});
  for (int i = 0; i < 1000; ++i) CHECK(!m.observe(point(i, 499.0, 9.9e5)));
  CHECK(!m.report().triggered);
  CHECK(m.report().iteration == -1);
  CHECK(m.report().trace.size() == 100);
  CHECK(m.report().trace.front().iteration == 900);
}

TEST_CASE("utility overflow") {
  DivergenceMonitor m({});
  m.observe(point(0, 1.0));
  CHECK(m.observe(point(1, 500.5)));
  CHECK(m.report().reason == DivergenceReason::kUtilityOverflow);
  CHECK(m.report().iteration == 1);
  CHECK(m.report().trace.size() == 2);
  CHECK(m.report().trace.back().max_abs_v == 500.5);
}

TEST_CASE("parameter overflow") {
  DivergenceMonitor m({});
  CHECK(m.observe(point(3, 1.0, 2e6)));
  CHECK(m.report().reason == DivergenceReason::kParameterOverflow);
}

TEST_CASE("non-finite takes precedence, then utility, then parameter") {
  const double inf = std::numeric_limits<double>::infinity();
  const double nan = std::numeric_limits<double>::quiet_NaN();
  {
    DivergenceMonitor m({});
    CHECK(m.observe(point(0, 600.0, 2e6, nan)));
    CHECK(m.report().reason == DivergenceReason::kNonFinite);
  }
  {
    DivergenceMonitor m({});
    CHECK(m.observe(point(0, inf)));
    CHECK(m.report().reason == DivergenceReason::kNonFinite);
  }
  {
    DivergenceMonitor m({});
    CHECK(m.observe(point(0, 600.0, 2e6)));
    CHECK(m.report().reason == DivergenceReason::kUtilityOverflow);
  }
}

TEST_CASE("report is frozen after the first trigger") {
  DivergenceMonitor m({});
  m.observe(point(5, 700.0));
  CHECK(m.observe(point(6, 1.0)));
  CHECK(m.report().iteration == 5);
  CHECK(m.report().trace.size() == 1);
}

TEST_CASE("custom thresholds and window") {
  DivergenceThresholds t;
  t.v_max = 10.0;
  t.window = 3;
  DivergenceMonitor m(t);
  for (int i = 0; i < 5; ++i) m.observe(point(i, 1.0));
  CHECK(m.observe(point(5, 11.0)));
  CHECK(m.report().trace.size() == 3);
  CHECK(m.report().trace.front().iteration == 3);
}

TEST_CASE("reason names round trip") {
  for (auto r : {DivergenceReason::kNone, DivergenceReason::kUtilityOverflow,
                 DivergenceReason::kParameterOverflow, DivergenceReason::kNonFinite}) {
    CHECK(parse_divergence_reason(to_string(r)) == r);
  }
  CHECK_THROWS_AS(parse_divergence_reason("bogus"), InvalidInput);
}
