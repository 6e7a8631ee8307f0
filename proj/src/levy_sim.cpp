#include "ssmp/levy_sim.hpp"

#include <cmath>
#include <stdexcept>

namespace ssmp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Compensator of the sampled portion of the compensated band [-1, 0):
// subtracted from the drift so that dropping the unsampled band stays
// unbiased.
double sampled_band_compensator(const JumpMeasureSpec& pi) {
  return pi.integrate_sampled(
      [](double u) { return u >= -1.0 ? u : 0.0; }, {-1.0});
}

}  // namespace

LevyWalker::LevyWalker(const LevyTriplet& triplet, double dt, RngStream& rng)
    : triplet_(&triplet), rng_(&rng), dt_(dt) {
  if (!(dt > 0.0)) throw std::domain_error("levy walker: dt must be > 0");
  drift_ = triplet.a - sampled_band_compensator(triplet.pi);
  sigma_ = std::sqrt(triplet.sigma2);
  rate_ = triplet.pi.sampled_mass();
  // Draw order is fixed: killing clock first, then the first jump gap.
  kill_time_ = triplet.q > 0.0 ? rng.exponential(triplet.q) : kInf;
  next_jump_ = rate_ > 0.0 ? rng.exponential(rate_) : kInf;
  next_grid_ = dt_;
}

bool LevyWalker::step(double t_max) {
  at_jump_ = false;
  last_jump_ = 0.0;
  double t_next = std::min(next_grid_, std::min(next_jump_, t_max));
  if (kill_time_ <= t_next) {
    killed_ = true;
    time_ = kill_time_;
    return false;
  }
  const double delta = t_next - time_;
  if (delta > 0.0)
    value_ += drift_ * delta + sigma_ * std::sqrt(delta) * rng_->normal();
  if (t_next == next_jump_) {
    last_jump_ = triplet_->pi.sample(*rng_);
    value_ += last_jump_;
    at_jump_ = true;
    next_jump_ += rng_->exponential(rate_);
  }
  if (t_next == next_grid_) {
    ++grid_index_;
    next_grid_ = dt_ * (grid_index_ + 1);
  }
  time_ = t_next;
  return true;
}

LevyPath simulate_levy(const LevyTriplet& triplet, double horizon, double dt,
                       RngStream& rng) {
  if (!(horizon > 0.0)) throw std::domain_error("simulate_levy: horizon <= 0");
  if (!(dt > 0.0 && dt <= horizon))
    throw std::domain_error("simulate_levy: need 0 < dt <= horizon");
  triplet.validate();

  LevyPath path;
  path.times.push_back(0.0);
  path.values.push_back(0.0);
  LevyWalker walker(triplet, dt, rng);
  while (walker.time() < horizon) {
    if (!walker.step(horizon)) {
      path.killed = true;
      path.kill_time = walker.time();
      break;
    }
    if (walker.time() <= path.times.back()) continue;  // zero-width tie
    path.times.push_back(walker.time());
    path.values.push_back(walker.value());
    if (walker.at_jump()) path.jump_times.push_back(walker.time());
  }
  return path;
}

double exponential_functional_inverse(const LevyPath& path, double t) {
  if (t < 0.0)
    throw std::domain_error("exponential_functional_inverse: t < 0");
  if (t == 0.0) return 0.0;
  ExpFunctional acc;
  for (size_t i = 0; i + 1 < path.times.size(); ++i) {
    const double width = path.times[i + 1] - path.times[i];
    const double rate = std::exp(path.values[i]);
    if (acc.total() + rate * width > t)
      return path.times[i] + (t - acc.total()) / rate;
    acc.add_term(rate * width);
  }
  // Final cell up to the kill time, when present: the path is truncated
  // there, so the accumulated integral is frozen afterwards.
  if (path.killed && !path.times.empty()) {
    const double width = path.kill_time - path.times.back();
    const double rate = std::exp(path.values.back());
    if (width > 0.0 && acc.total() + rate * width > t)
      return path.times.back() + (t - acc.total()) / rate;
  }
  return kInf;
}

}  // namespace ssmp
