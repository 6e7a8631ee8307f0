#include "ssmp/jump_sde.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ssmp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<double> output_grid(double horizon, double dt) {
  const long n = std::lround(std::floor(horizon / dt + 1e-9));
  std::vector<double> times;
  times.reserve(n + 1);
  for (long j = 0; j <= n; ++j) times.push_back(j * dt);
  return times;
}

double sampled_compensator(const Quintuple& quintuple, double cutoff,
                           bool absolute) {
  const BarPi bp(quintuple, cutoff);
  const BarPiSampler sampler(bp, 0);
  return absolute ? sampler.comp_abs() : sampler.comp_signed();
}

// One Euler step's jump candidates: Poisson count at the frozen rate, event
// times uniform in the step, factors applied multiplicatively in sampled
// order.  Returns the event time at which the state became exactly zero,
// or +infinity when it stayed away from zero.
double apply_jump_candidates(double& state, double t0, double width,
                             double rate, const BarPiSampler& sampler,
                             bool fold_abs, SamplePath& out, bool record,
                             RngStream& rng) {
  if (!(rate > 0.0) || !(width > 0.0)) return kInf;
  const long count = rng.poisson(rate * width);
  if (count == 0) return kInf;
  std::vector<double> times(count);
  for (long i = 0; i < count; ++i) times[i] = t0 + rng.uniform() * width;
  std::sort(times.begin(), times.end());
  for (long i = 0; i < count; ++i) {
    double u = sampler.sample(rng);
    if (fold_abs) u = std::abs(u);
    const double pre = state;
    state = pre * u;
    if (std::abs(state) > std::abs(pre))
      throw std::logic_error("sde jump: factor outside [-1, 1]");
    if (record) out.jumps.push_back({times[i], u, pre, state});
    if (u < 0.0) out.sign_change_times.push_back(times[i]);
    if (state == 0.0) return times[i];
  }
  return kInf;
}

}  // namespace

void SdeConfig::validate() const {
  if (!(dt > 0.0) || !(dt < horizon))
    throw std::invalid_argument("sde config: need 0 < dt < horizon");
  if (m < 1) throw std::invalid_argument("sde config: m must be >= 1");
  if (!(rate_cap >= static_cast<double>(m)))
    throw std::invalid_argument("sde config: rate_cap must be >= m");
  if (!(cutoff >= 0.0) || cutoff >= 1.0)
    throw std::invalid_argument("sde config: cutoff must lie in [0, 1)");
  if (!(restart_up_prob >= 0.0 && restart_up_prob <= 1.0))
    throw std::invalid_argument(
        "sde config: restart_up_prob must lie in [0, 1]");
  if (n_paths < 1)
    throw std::invalid_argument("sde config: n_paths must be >= 1");
  if (threads < 0)
    throw std::invalid_argument("sde config: threads must be >= 0");
}

double step_drift(const Quintuple& quintuple, double z_prev, double dt,
                  double cutoff) {
  return sign(z_prev) * dt *
         (drift_coefficient(quintuple) -
          sampled_compensator(quintuple, cutoff, false));
}

double step_drift0(const Quintuple& quintuple, double z_prev, double dt,
                   double cutoff) {
  return sign0(z_prev) * dt *
         (drift_coefficient(quintuple) -
          sampled_compensator(quintuple, cutoff, false));
}

SamplePath simulate_sde(const Quintuple& quintuple, double z,
                        const SdeConfig& config, RngStream& rng) {
  config.validate();
  quintuple.validate();
  if (z == 0.0)
    throw std::domain_error(
        "simulate_sde: z must be nonzero; paths from zero require "
        "simulate_approx_sde with large m");

  const BarPi bp(quintuple, config.cutoff);
  const BarPiSampler sampler(bp, 0);
  const double kappa = drift_coefficient(quintuple);
  const double comp = sampler.comp_signed();
  const double mass = sampler.total_mass();
  const double sigma = std::sqrt(quintuple.triplet.sigma2);

  SamplePath out;
  out.times = output_grid(config.horizon, config.dt);
  out.values.assign(out.times.size(), 0.0);
  out.values[0] = z;

  double state = z;
  for (size_t k = 1; k < out.times.size(); ++k) {
    const double width = out.times[k] - out.times[k - 1];
    const double zp = state;
    const double az = std::abs(zp);
    // Jump intensity frozen at the pre-step state.  Near zero the 1/|z|
    // model rate exceeds any cap, so it is additionally recapped at one
    // expected candidate per step; the drift compensation factor rf is
    // matched to the applied rate (rate * az / mass) so that the mean jump
    // effect and its compensator cancel at every magnitude.
    const double rate = std::min(
        std::min(config.rate_cap, az > 0.0 ? 1.0 / az : kInf) * mass,
        1.0 / width);
    const double rf = mass > 0.0 ? az * rate / mass : 0.0;
    // Candidates act on the pre-drift state; drift and diffusion follow,
    // with the sign and magnitude read from the post-jump state.
    const double t_zero =
        apply_jump_candidates(state, out.times[k - 1], width, rate, sampler,
                              /*fold_abs=*/false, out, config.record_jumps,
                              rng);
    if (t_zero < kInf) {
      out.absorbed = true;
      out.absorption_time = t_zero;
      for (; k < out.times.size(); ++k) out.values[k] = 0.0;
      return out;
    }
    const double sj = state;
    state = sj + sign(sj) * width * (kappa - rf * comp) +
            sigma * std::sqrt(std::abs(sj) * width) * rng.normal();
    out.values[k] = state;
  }
  return out;
}

SamplePath simulate_approx_sde(const Quintuple& quintuple, double z,
                               const SdeConfig& config, RngStream& rng) {
  config.validate();
  quintuple.validate();

  const BarPi bp(quintuple, config.cutoff);
  const BarPiSampler sampler(bp, static_cast<int>(config.m));
  const double kappa = drift_coefficient(quintuple);
  const double comp = sampler.comp_signed();
  const double mass = sampler.total_mass();
  const double sigma = std::sqrt(quintuple.triplet.sigma2);
  const double m = static_cast<double>(config.m);
  const RestartProcess restart(m, cramer_value(quintuple),
                               config.restart_up_prob);

  SamplePath out;
  out.times = output_grid(config.horizon, config.dt);
  const size_t n_nodes = out.times.size();
  out.values.assign(n_nodes, 0.0);
  out.values[0] = z;

  double state = z;
  double t = 0.0;
  size_t next = 1;
  while (next < n_nodes) {
    if (state == 0.0) {
      // Hold at zero for an Exp(m) wait, then restart at +-cramer/m.
      const double t_restart = t + rng.exponential(restart.rate);
      while (next < n_nodes && out.times[next] < t_restart)
        out.values[next++] = 0.0;
      if (next >= n_nodes) break;
      state = rng.bernoulli(restart.up_prob) ? restart.site_up
                                             : restart.site_down;
      t = t_restart;
    }
    // Euler (sub)step from t to the next grid node; a restart mid-cell makes
    // the first step after it shorter than dt.  Same scheme as the signed
    // equation (jumps on the pre-drift state at a recapped rate, compensation
    // matched to the applied rate), with the level m as the rate cap.
    const double width = out.times[next] - t;
    const double zp = state;
    const double az = std::abs(zp);
    const double rate = std::min(
        std::min(m, az > 0.0 ? 1.0 / az : kInf) * mass, 1.0 / width);
    const double rf = mass > 0.0 ? az * rate / mass : 0.0;
    const double t_zero =
        apply_jump_candidates(state, t, width, rate, sampler,
                              /*fold_abs=*/false, out, config.record_jumps,
                              rng);
    if (t_zero < kInf) {
      state = 0.0;
      t = t_zero;  // the wait at zero starts at the jump time
      continue;
    }
    const double sj = state;
    state = sj + sign0(sj) * width * (kappa - rf * comp) +
            sigma * std::sqrt(std::abs(sj) * width) * rng.normal();
    out.values[next] = state;
    t = out.times[next];
    ++next;
  }
  return out;
}

SamplePath simulate_abs_sde(const Quintuple& quintuple, double x0,
                            const SdeConfig& config, RngStream& rng) {
  config.validate();
  quintuple.validate();
  if (x0 < 0.0)
    throw std::domain_error("simulate_abs_sde: x0 must be >= 0");

  const BarPi bp(quintuple, config.cutoff);
  const BarPiSampler sampler(bp, 0);
  const double cramer = cramer_value(quintuple);
  const double comp = sampler.comp_abs();
  const double mass = sampler.total_mass();
  const double sigma = std::sqrt(quintuple.triplet.sigma2);

  SamplePath out;
  out.times = output_grid(config.horizon, config.dt);
  out.values.assign(out.times.size(), 0.0);
  out.values[0] = x0;

  double state = x0;
  for (size_t k = 1; k < out.times.size(); ++k) {
    if (state == 0.0 && cramer <= 0.0) {
      // Nonpositive drift at zero: the state can never leave again.
      out.absorbed = true;
      out.absorption_time = out.times[k - 1];
      for (; k < out.times.size(); ++k) out.values[k] = 0.0;
      return out;
    }
    const double width = out.times[k] - out.times[k - 1];
    const double xp = state;
    const double rate = std::min(
        std::min(config.rate_cap, xp > 0.0 ? 1.0 / xp : kInf) * mass,
        1.0 / width);
    const double rf = mass > 0.0 ? xp * rate / mass : 0.0;
    const double t_zero =
        apply_jump_candidates(state, out.times[k - 1], width, rate, sampler,
                              /*fold_abs=*/true, out, config.record_jumps,
                              rng);
    if (t_zero < kInf) {
      // A total-kill factor parked the state at zero; the top of the next
      // iteration either absorbs it (cramer <= 0) or relaunches it by drift.
      out.values[k] = 0.0;
      continue;
    }
    const double sj = state;
    state = sj + width * (cramer - rf * comp) +
            sigma * std::sqrt(sj * width) * rng.normal();
    if (state < 0.0) state = 0.0;  // clamp the Euler overshoot
    out.values[k] = state;
  }
  if (state == 0.0 && cramer <= 0.0 && !out.absorbed) {
    out.absorbed = true;
    out.absorption_time = out.times.back();
  }
  return out;
}

SamplePath fold_to_abs(const SamplePath& path) {
  SamplePath out = path;
  for (double& v : out.values) v = std::abs(v);
  for (JumpEvent& e : out.jumps) {
    e.factor = std::abs(e.factor);
    e.pre = std::abs(e.pre);
    e.post = std::abs(e.post);
  }
  return out;
}

}  // namespace ssmp
