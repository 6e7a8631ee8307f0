#pragma once
// Output path containers shared by the time-change and SDE constructions.

#include <limits>
#include <vector>

namespace ssmp {

// One recorded jump of the coordinate process: the state moves from pre to
// post = pre * factor at the given time.
struct JumpEvent {
  double time = 0.0;
  double factor = 1.0;
  double pre = 0.0;
  double post = 0.0;
};

struct SamplePath {
  std::vector<double> times;
  std::vector<double> values;
  bool absorbed = false;
  double absorption_time = std::numeric_limits<double>::infinity();
  std::vector<double> sign_change_times;
  std::vector<JumpEvent> jumps;  // populated only when jump recording is on

  // Cadlag lookup: value at the last grid node <= t.
  double value_at(double t) const {
    if (times.empty()) return 0.0;
    size_t lo = 0, hi = times.size();
    while (hi - lo > 1) {
      const size_t mid = (lo + hi) / 2;
      if (times[mid] <= t)
        lo = mid;
      else
        hi = mid;
    }
    return values[lo];
  }
};

}  // namespace ssmp
