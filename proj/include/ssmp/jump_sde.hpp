#pragma once
// Direct Euler solvers for the jump-type SDEs of a symmetric real-valued
// self-similar Markov process of index one:
//   - the signed equation away from zero (multiplicative jump factors in
//     [-1, 1] arriving at intensity barPi(du)/|Z|),
//   - its level-m approximation, whose jump factors are restricted to
//     [-1, 1 - 1/m], whose thinning rate is 1/|Z| ^ m, and which restarts
//     from zero after an Exp(m) wait at +-cramer_value/m,
//   - the absolute-value (folded) equation with constant drift cramer_value
//     and square-root diffusion.
//
// All schemes freeze the jump intensity and the drift compensation factor
// at the step's left endpoint; candidate jumps per step are Poisson(rate *
// dt), placed uniformly in the step and applied multiplicatively in sampled
// order to the pre-drift state, after which drift and diffusion act on the
// post-jump state.  The 1/|Z| intensity is recapped at one expected
// candidate per step, and the drift compensation factor is matched to the
// applied rate, so that the simulated jumps and their compensator cancel in
// mean at every magnitude, including arbitrarily close to zero.

#include <cstdint>

#include "ssmp/measures.hpp"
#include "ssmp/rng.hpp"
#include "ssmp/sample_path.hpp"

namespace ssmp {

struct SdeConfig {
  double dt = 1e-3;
  double horizon = 1.0;
  long n_paths = 1;
  std::uint64_t seed = 1;
  // Jump factors in (1 - cutoff, 1) are never sampled directly; their
  // compensated contribution is mean zero and is dropped.
  double cutoff = 1e-4;
  long m = 1;             // approximation level (jump factors <= 1 - 1/m)
  double rate_cap = 1e4;  // cap on the 1/|z| thinning intensity
  double restart_up_prob = 0.5;  // restart sign skew; 1/2 is symmetric
  bool record_jumps = false;
  int threads = 0;  // batch runners only; 0 = hardware concurrency

  // Throws std::invalid_argument unless 0 < dt < horizon, m >= 1,
  // rate_cap >= m, cutoff in [0, 1), restart_up_prob in [0, 1], n_paths >= 1.
  void validate() const;
};

// Restart mechanism at zero for the level-m approximation: total rate m
// split equally between an up-site and a down-site at +-cramer/m.
struct RestartProcess {
  double rate = 0.0;
  double site_up = 0.0;
  double site_down = 0.0;
  double up_prob = 0.5;

  RestartProcess() = default;
  RestartProcess(double m, double cramer, double up_probability = 0.5)
      : rate(m),
        site_up(cramer / m),
        site_down(-cramer / m),
        up_prob(up_probability) {}
};

// Deterministic drift of one Euler step for the signed equation:
//   sign(z_prev) * dt * (kappa - int_sampled (u - 1) barPi(du)),
// kappa = drift_coefficient; the subtracted integral is the compensator of
// the explicitly simulated jumps, moved into the drift via
// Z_{s-}(u-1)/|Z_{s-}| = sign(Z_{s-})(u-1).  sign(0) = -1 here; step_drift0
// is the variant with sign0 (zero at zero) used by the approximation.
double step_drift(const Quintuple& quintuple, double z_prev, double dt,
                  double cutoff = 0.0);
double step_drift0(const Quintuple& quintuple, double z_prev, double dt,
                   double cutoff = 0.0);

// Signed equation from z != 0.  Jump candidates arrive at
// min(min(rate_cap, 1/|z|) * (sampled barPi mass), 1/dt) per unit time;
// each applies z <- z * u.  A u = 0 factor (the killing atom) absorbs the
// path; u < 0 records a sign change.  Throws std::domain_error at z = 0
// (start from zero with simulate_approx_sde at large m instead).
SamplePath simulate_sde(const Quintuple& quintuple, double z,
                        const SdeConfig& config, RngStream& rng);

// Level-m approximation; accepts any start point including zero.
SamplePath simulate_approx_sde(const Quintuple& quintuple, double z,
                               const SdeConfig& config, RngStream& rng);

// Absolute-value equation from x0 >= 0: constant drift cramer_value,
// diffusion sigma * sqrt(X dt), jumps X <- X * |u|; negative Euler
// overshoots are clamped to zero before the next step.  When cramer_value
// <= 0 a path that reaches zero stays there and is flagged absorbed.
SamplePath simulate_abs_sde(const Quintuple& quintuple, double x0,
                            const SdeConfig& config, RngStream& rng);

// Pointwise absolute value of the recorded path; times, absorption data,
// sign-change times and jump events (folded through |.|) are preserved.
SamplePath fold_to_abs(const SamplePath& path);

}  // namespace ssmp
