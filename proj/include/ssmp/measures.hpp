#pragma once
// Jump-measure parametrization and the scalar functionals feeding the
// simulators.
//
// A Levy triplet (a, sigma^2, Pi, q) with Pi supported on (-inf, 0) and
// killing rate q has Laplace exponent
//
//   Psi(lambda) = -q + a*lambda + sigma^2*lambda^2/2
//                 + int (e^{lambda u} - 1 - lambda*u*1{u >= -1}) Pi(du).
//
// A quintuple adds a finite measure V on [-1, 0).  Its jump-factor measure
// barPi on [-1, 1] is the image of Pi under u -> e^u on (0, 1], an atom of
// mass q at 0, and V itself on [-1, 0).  The derived scalars are
//
//   drift_coefficient = Psi(1) + int (u - 1) V(du)         (kappa)
//   cramer_value      = Psi(1) + int (|u| - 1) V(du)       (kappa tilde)
//
// and the process started away from zero leaves zero continuously after
// absorption if and only if cramer_value > 0.

#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "ssmp/rng.hpp"

namespace ssmp {

// Sign conventions used by the constructions: sign(0) = -1, sign0(0) = 0.
inline double sign(double x) { return x > 0.0 ? 1.0 : -1.0; }
inline double sign0(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

struct Atom {
  double location = 0.0;
  double mass = 0.0;
};

// c * e^{beta u} du with beta > 0; finite mass on any (-inf, b].
struct ExponentialDensity {
  double c = 0.0;
  double beta = 1.0;
};

// c * |u|^{-1-alpha} du with alpha in (0,2); infinite mass near 0-.
struct TruncatedStableDensity {
  double c = 0.0;
  double alpha = 0.5;
};

// Arbitrary nonnegative pdf; masses and quantiles fall back to quadrature
// and bisection.  Used for pushforward measures assembled internally.
struct GenericDensity {
  std::function<double(double)> pdf;
  bool finite_total_mass = true;
};

using DensityFamily =
    std::variant<ExponentialDensity, TruncatedStableDensity, GenericDensity>;

// One absolutely continuous piece of a jump measure on [lo, hi].  The band of
// width small_jump_cutoff ending at hi (the singular end for the stable-like
// family) is never sampled; its effect is compensated analytically by the
// consumers.
struct DensityComponent {
  DensityFamily family;
  double lo = -std::numeric_limits<double>::infinity();
  double hi = 0.0;
  double small_jump_cutoff = 0.0;

  double pdf(double u) const;
  double mass(double a, double b) const;
  double sampled_mass() const { return mass(lo, hi - small_jump_cutoff); }
  double total_mass() const { return mass(lo, hi); }
  bool finite_total_mass() const;
  // Inverse of m -> mass(lo, u) on the sampled region; target in (0, sampled].
  double quantile_sampled(double target_mass) const;
  // int_a^b f(u) pdf(u) du for f smooth on (a, b); handles the singular or
  // unbounded ends with substitution / geometric refinement.
  double integrate(const std::function<double(double)>& f, double a,
                   double b) const;
  double integrate_sampled(const std::function<double(double)>& f) const {
    return integrate(f, lo, hi - small_jump_cutoff);
  }
  void validate(const std::string& name) const;
};

struct JumpMeasureSpec {
  std::vector<Atom> atoms;
  std::vector<DensityComponent> densities;

  bool empty() const { return atoms.empty() && densities.empty(); }
  double atom_mass() const;
  double sampled_mass() const;
  double total_mass() const;
  bool finite_total_mass() const;
  // Draw from the normalized sampled portion (atoms plus densities outside
  // their cutoff bands).
  double sample(RngStream& rng) const;
  // f integrated against the sampled portion; breaks lists interior points
  // where f is allowed to be non-smooth.
  double integrate_sampled(const std::function<double(double)>& f,
                           const std::vector<double>& breaks = {}) const;
  // f integrated against the whole measure (f must make the integral
  // converge near the singular end).
  double integrate_all(const std::function<double(double)>& f,
                       const std::vector<double>& breaks = {}) const;
  // Checks masses, supports and integrability; name prefixes error messages.
  void validate(const std::string& name, double support_lo, double support_hi,
                bool require_finite) const;
};

struct LevyTriplet {
  double a = 0.0;
  double sigma2 = 0.0;
  JumpMeasureSpec pi;  // spectrally negative: support in (-inf, 0)
  double q = 0.0;

  void validate() const;
};

struct Quintuple {
  LevyTriplet triplet;
  JumpMeasureSpec v;  // finite measure on [-1, 0)

  void validate() const;
};

double laplace_exponent(const LevyTriplet& triplet, double lambda);
double drift_coefficient(const Quintuple& quintuple);
double cramer_value(const Quintuple& quintuple);

// True iff Psi(1) > 0 (the process drifts so that overshooting levels from
// below has positive probability; boundary Psi(1) = 0 excluded).
bool check_overshoot_condition(const LevyTriplet& triplet);

// Triplet of the absolute-value (folded) process: V is pulled back through
// u -> log|u| and merged into Pi, with the compensator shift folded into the
// linear term.  laplace_exponent(fold_triplet(q), 1) == cramer_value(q).
LevyTriplet fold_triplet(const Quintuple& quintuple);

// Jump-factor measure on [-1, 1] assembled from a quintuple.  Atoms of Pi map
// exactly to atoms of the positive part; density mass with factor above
// 1 - cutoff is left unsampled and recorded as a drift correction.
class BarPi {
 public:
  BarPi() = default;
  BarPi(const Quintuple& quintuple, double cutoff);

  double zero_atom() const { return q_; }
  double cutoff() const { return cutoff_; }
  const std::vector<Atom>& positive_atoms() const { return pos_atoms_; }
  const JumpMeasureSpec& negative_part() const { return v_; }
  // Pi in log-factor space with the effective cutoff applied; the positive
  // density part of barPi is its image under exp.
  const JumpMeasureSpec& log_positive_density() const { return pi_density_; }

  double sampled_mass() const;
  // int g(u) barPi(du) over the sampled portion / the full measure.
  double integrate_sampled(const std::function<double(double)>& g) const;
  double integrate_all(const std::function<double(double)>& g) const;
  // int_(1-cutoff,1) (u-1) barPi(du); -infinity when the band integral
  // diverges (stable-like activity with alpha >= 1).
  double band_drift_correction() const { return band_correction_; }

 private:
  JumpMeasureSpec pi_density_;  // density components only, log-factor space
  std::vector<Atom> pos_atoms_;  // factor space, in (0, 1)
  JumpMeasureSpec v_;
  double q_ = 0.0;
  double cutoff_ = 0.0;
  double band_correction_ = 0.0;
};

// Frozen sampling and moment tables for one (barPi, truncation level) pair.
// m = 0 means no truncation; m >= 1 restricts jump factors to [-1, 1 - 1/m].
class BarPiSampler {
 public:
  BarPiSampler() = default;
  BarPiSampler(const BarPi& bar_pi, int m);

  double total_mass() const { return total_mass_; }
  double comp_signed() const { return comp_signed_; }  // int (u-1) included set
  double comp_abs() const { return comp_abs_; }        // int (|u|-1) included
  double sample(RngStream& rng) const;                 // jump factor u

 private:
  struct Segment {
    double cum_hi = 0.0;   // cumulative mass at segment end
    bool is_atom = false;
    double atom_u = 0.0;
    DensityComponent comp;  // valid when !is_atom
    double cum_lo = 0.0;
    bool map_exp = false;   // sample in log space, return exp(v)
  };
  std::vector<Segment> segments_;
  double total_mass_ = 0.0;
  double comp_signed_ = 0.0;
  double comp_abs_ = 0.0;
};

}  // namespace ssmp
