#pragma once
// Killed spectrally negative Levy paths on a time grid: the log-magnitude
// building block consumed by the time-change constructions.
//
// Discretization: fixed-step Euler for drift and diffusion; jumps above the
// sampling cutoff arrive by thinning at the sampled mass and are inserted as
// extra grid nodes; the compensator of the sampled part of the band [-1, 0)
// is subtracted as exact drift (dropping the unsampled compensated band is
// unbiased).  Killing is the first arrival of a rate-q exponential clock.

#include <limits>
#include <vector>

#include "ssmp/measures.hpp"
#include "ssmp/rng.hpp"

namespace ssmp {

struct LevyPath {
  std::vector<double> times;   // strictly increasing, starts at 0
  std::vector<double> values;  // log-magnitude, values[0] = 0
  bool killed = false;
  double kill_time = std::numeric_limits<double>::infinity();
  std::vector<double> jump_times;
};

// Incremental node generator for one path.  step() advances to the next node
// (grid point, inserted jump time, or a caller-supplied clip time) and
// returns false exactly once, when the killing clock fires first; after that
// time() reports the kill time and the value is no longer meaningful.
class LevyWalker {
 public:
  LevyWalker(const LevyTriplet& triplet, double dt, RngStream& rng);

  bool step(double t_max = std::numeric_limits<double>::infinity());

  double time() const { return time_; }
  double value() const { return value_; }
  bool at_jump() const { return at_jump_; }
  bool killed() const { return killed_; }
  double last_jump_size() const { return last_jump_; }

  // Drift per unit time actually applied, including the compensator
  // correction for the sampled part of the band [-1, 0).
  double effective_drift() const { return drift_; }

 private:
  const LevyTriplet* triplet_;
  RngStream* rng_;
  double dt_;
  double drift_;
  double sigma_;
  double rate_;  // sampled jump intensity
  double time_ = 0.0;
  double value_ = 0.0;
  double next_grid_;
  double next_jump_;
  double kill_time_;
  long grid_index_ = 0;
  bool at_jump_ = false;
  bool killed_ = false;
  double last_jump_ = 0.0;
};

LevyPath simulate_levy(const LevyTriplet& triplet, double horizon, double dt,
                       RngStream& rng);

// Left-continuous generalized inverse of s -> int_0^s e^{xi_r} dr, with the
// integral accumulated by the left-endpoint rule on each grid cell.  Returns
// +infinity when the accumulated integral never exceeds t.
double exponential_functional_inverse(const LevyPath& path, double t);

// Kahan-compensated accumulator for int e^{xi} dt over cells.
class ExpFunctional {
 public:
  void add(double width, double log_level) { add_term(std::exp(log_level) * width); }
  void add_term(double term) {
    const double y = term - comp_;
    const double t = sum_ + y;
    comp_ = (t - sum_) - y;
    sum_ = t;
  }
  double total() const { return sum_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

}  // namespace ssmp
