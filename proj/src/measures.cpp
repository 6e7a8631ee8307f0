#include "ssmp/measures.hpp"

#include <algorithm>
#include <cmath>

#include "ssmp/quadrature.hpp"

namespace ssmp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// expm1(x) - x evaluated without cancellation for small |x|.
double expm1_minus_x(double x) {
  if (std::abs(x) < 1e-4) {
    const double x2 = x * x;
    return 0.5 * x2 * (1.0 + x / 3.0 + x2 / 12.0 + x * x2 / 60.0);
  }
  return std::expm1(x) - x;
}

// Composite quadrature driver: integrates pieces produced by `next_piece`
// until it returns an empty interval or contributions become negligible.
template <typename NextPiece>
double accumulate_pieces(const std::function<double(double)>& g,
                         NextPiece next_piece, int order, long max_pieces) {
  double acc = 0.0;
  int negligible_run = 0;
  for (long k = 0; k < max_pieces; ++k) {
    const auto [a, b] = next_piece(k);
    if (!(b > a)) break;
    const double contrib = gl_integrate(g, a, b, order);
    acc += contrib;
    if (std::abs(contrib) <= 1e-17 * (std::abs(acc) + 1e-300)) {
      if (++negligible_run >= 2) break;
    } else {
      negligible_run = 0;
    }
  }
  return acc;
}

}  // namespace

// ---------------------------------------------------------------------------
// DensityComponent

double DensityComponent::pdf(double u) const {
  if (u < lo || u > hi) return 0.0;
  if (const auto* e = std::get_if<ExponentialDensity>(&family))
    return e->c * std::exp(e->beta * u);
  if (const auto* s = std::get_if<TruncatedStableDensity>(&family))
    return u < 0.0 ? s->c * std::pow(-u, -1.0 - s->alpha) : kInf;
  const auto& g = std::get<GenericDensity>(family);
  return g.pdf(u);
}

bool DensityComponent::finite_total_mass() const {
  if (std::holds_alternative<ExponentialDensity>(family)) return true;
  if (const auto* s = std::get_if<TruncatedStableDensity>(&family))
    return hi < 0.0 || s->c == 0.0;
  return std::get<GenericDensity>(family).finite_total_mass;
}

double DensityComponent::mass(double a, double b) const {
  a = std::max(a, lo);
  b = std::min(b, hi);
  if (!(b > a)) return 0.0;
  if (const auto* e = std::get_if<ExponentialDensity>(&family)) {
    const double top = std::exp(e->beta * b);
    const double bot = a == -kInf ? 0.0 : std::exp(e->beta * a);
    return e->c / e->beta * (top - bot);
  }
  if (const auto* s = std::get_if<TruncatedStableDensity>(&family)) {
    if (s->c == 0.0) return 0.0;
    if (b >= 0.0) return kInf;
    return s->c / s->alpha *
           (std::pow(-b, -s->alpha) - std::pow(-a, -s->alpha));
  }
  return integrate([](double) { return 1.0; }, a, b);
}

double DensityComponent::quantile_sampled(double target_mass) const {
  const double top = hi - small_jump_cutoff;
  if (const auto* e = std::get_if<ExponentialDensity>(&family)) {
    const double base = lo == -kInf ? 0.0 : std::exp(e->beta * lo);
    const double u = std::log(base + target_mass * e->beta / e->c) / e->beta;
    return std::min(u, top);
  }
  if (const auto* s = std::get_if<TruncatedStableDensity>(&family)) {
    const double base = std::pow(-lo, -s->alpha);
    const double au =
        std::pow(base + target_mass * s->alpha / s->c, -1.0 / s->alpha);
    return std::max(-au, lo);
  }
  // Generic: bisection on the cumulative mass.  Only exercised for measures
  // assembled internally (folding); never in simulation hot loops.
  double a = lo, b = top;
  for (int i = 0; i < 200 && b - a > 1e-14 * (1.0 + std::abs(a)); ++i) {
    const double mid = 0.5 * (a + b);
    if (mass(lo, mid) < target_mass)
      a = mid;
    else
      b = mid;
  }
  return 0.5 * (a + b);
}

double DensityComponent::integrate(const std::function<double(double)>& f,
                                   double a, double b) const {
  a = std::max(a, lo);
  b = std::min(b, hi);
  if (!(b > a)) return 0.0;

  if (const auto* e = std::get_if<ExponentialDensity>(&family)) {
    if (e->c == 0.0) return 0.0;
    const double c = e->c, beta = e->beta;
    auto g = [&](double u) { return f(u) * c * std::exp(beta * u); };
    // Geometrically growing pieces from b toward -inf (or a).
    auto piece = [&](long k) {
      const double p_hi = k == 0 ? b : b - (std::ldexp(1.0, k) - 1.0);
      const double p_lo = std::max(a, b - (std::ldexp(1.0, k + 1) - 1.0));
      return std::pair<double, double>(p_lo, std::min(p_hi, b));
    };
    return accumulate_pieces(g, piece, 256, 64);
  }

  if (const auto* s = std::get_if<TruncatedStableDensity>(&family)) {
    if (s->c == 0.0) return 0.0;
    const double c = s->c, alpha = s->alpha;
    // Substitute u = -e^{-v}: the integrand becomes c f(-e^{-v}) e^{alpha v}
    // on [va, vb], smooth up to the (possibly infinite) top end.
    const double va = -std::log(-a);
    const double vb = b < 0.0 ? -std::log(-b) : kInf;
    auto g = [&](double v) {
      return c * f(-std::exp(-v)) * std::exp(alpha * v);
    };
    auto piece = [&](long k) {
      const double p_lo = va + static_cast<double>(k);
      const double p_hi = std::min(vb, p_lo + 1.0);
      return std::pair<double, double>(p_lo, p_hi);
    };
    return accumulate_pieces(g, piece, 64, 100000);
  }

  const auto& gen = std::get<GenericDensity>(family);
  auto g = [&](double u) { return f(u) * gen.pdf(u); };
  if (a == -kInf) {
    auto piece = [&](long k) {
      const double p_hi = k == 0 ? b : b - (std::ldexp(1.0, k) - 1.0);
      const double p_lo = b - (std::ldexp(1.0, k + 1) - 1.0);
      return std::pair<double, double>(p_lo, std::min(p_hi, b));
    };
    return accumulate_pieces(g, piece, 64, 64);
  }
  // Finite interval: composite rule with geometric refinement toward both
  // endpoints, which absorbs integrable endpoint singularities.
  const double w = b - a;
  std::vector<double> cuts;
  cuts.push_back(a);
  for (int k = 40; k >= 2; --k) cuts.push_back(a + w * std::ldexp(1.0, -k));
  for (int k = 2; k <= 40; ++k) cuts.push_back(b - w * std::ldexp(1.0, -k));
  cuts.push_back(b);
  double acc = 0.0;
  for (size_t i = 0; i + 1 < cuts.size(); ++i)
    acc += gl_integrate(g, cuts[i], cuts[i + 1], 64);
  return acc;
}

void DensityComponent::validate(const std::string& name) const {
  if (!(lo < hi)) throw std::invalid_argument(name + ": requires lo < hi");
  if (!(small_jump_cutoff >= 0.0))
    throw std::invalid_argument(name + ": small_jump_cutoff must be >= 0");
  if (small_jump_cutoff >= hi - lo)
    throw std::invalid_argument(name +
                                ": small_jump_cutoff covers the support");
  if (const auto* e = std::get_if<ExponentialDensity>(&family)) {
    if (!(e->c >= 0.0)) throw std::invalid_argument(name + ": c must be >= 0");
    if (!(e->beta > 0.0))
      throw std::invalid_argument(name + ": beta must be > 0");
  } else if (const auto* s = std::get_if<TruncatedStableDensity>(&family)) {
    if (!(s->c >= 0.0)) throw std::invalid_argument(name + ": c must be >= 0");
    if (!(s->alpha > 0.0 && s->alpha < 2.0))
      throw std::invalid_argument(name + ": alpha must be in (0,2)");
    if (!(lo >= -1.0))
      throw std::invalid_argument(name +
                                  ": truncated_stable support is (-1,0)");
    if (s->c > 0.0 && hi - small_jump_cutoff >= 0.0)
      throw std::invalid_argument(
          name +
          ": truncated_stable needs small_jump_cutoff > 0 (infinite mass)");
  } else {
    if (!std::get<GenericDensity>(family).pdf)
      throw std::invalid_argument(name + ": generic density needs a pdf");
  }
}

// ---------------------------------------------------------------------------
// JumpMeasureSpec

double JumpMeasureSpec::atom_mass() const {
  double m = 0.0;
  for (const Atom& at : atoms) m += at.mass;
  return m;
}

double JumpMeasureSpec::sampled_mass() const {
  double m = atom_mass();
  for (const DensityComponent& dc : densities) m += dc.sampled_mass();
  return m;
}

double JumpMeasureSpec::total_mass() const {
  double m = atom_mass();
  for (const DensityComponent& dc : densities) m += dc.total_mass();
  return m;
}

bool JumpMeasureSpec::finite_total_mass() const {
  for (const DensityComponent& dc : densities)
    if (!dc.finite_total_mass()) return false;
  return true;
}

double JumpMeasureSpec::sample(RngStream& rng) const {
  const double total = sampled_mass();
  double r = rng.uniform_pos() * total;
  for (const Atom& at : atoms) {
    if (r < at.mass) return at.location;
    r -= at.mass;
  }
  for (size_t i = 0; i < densities.size(); ++i) {
    const double m = densities[i].sampled_mass();
    if (r < m || i + 1 == densities.size())
      return densities[i].quantile_sampled(
          std::min(std::max(r, 1e-300), m));
    r -= m;
  }
  return atoms.empty() ? 0.0 : atoms.back().location;
}

namespace {

double integrate_component_with_breaks(const DensityComponent& dc,
                                       const std::function<double(double)>& f,
                                       double a, double b,
                                       const std::vector<double>& breaks) {
  std::vector<double> cuts{a};
  for (double br : breaks)
    if (br > a && br < b) cuts.push_back(br);
  cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  double acc = 0.0;
  for (size_t i = 0; i + 1 < cuts.size(); ++i)
    acc += dc.integrate(f, cuts[i], cuts[i + 1]);
  return acc;
}

}  // namespace

double JumpMeasureSpec::integrate_sampled(
    const std::function<double(double)>& f,
    const std::vector<double>& breaks) const {
  double acc = 0.0;
  for (const Atom& at : atoms) acc += at.mass * f(at.location);
  for (const DensityComponent& dc : densities)
    acc += integrate_component_with_breaks(dc, f, dc.lo,
                                           dc.hi - dc.small_jump_cutoff,
                                           breaks);
  return acc;
}

double JumpMeasureSpec::integrate_all(const std::function<double(double)>& f,
                                      const std::vector<double>& breaks) const {
  double acc = 0.0;
  for (const Atom& at : atoms) acc += at.mass * f(at.location);
  for (const DensityComponent& dc : densities)
    acc += integrate_component_with_breaks(dc, f, dc.lo, dc.hi, breaks);
  return acc;
}

void JumpMeasureSpec::validate(const std::string& name, double support_lo,
                               double support_hi, bool require_finite) const {
  for (const Atom& at : atoms) {
    if (!(at.mass >= 0.0))
      throw std::invalid_argument(name + ": atom mass must be >= 0");
    if (!(at.location >= support_lo && at.location < support_hi) &&
        at.mass > 0.0)
      throw std::invalid_argument(name + ": atom location outside support");
  }
  for (size_t i = 0; i < densities.size(); ++i) {
    const DensityComponent& dc = densities[i];
    dc.validate(name + ".densities[" + std::to_string(i) + "]");
    if (dc.lo < support_lo - 1e-12 || dc.hi > support_hi + 1e-12)
      throw std::invalid_argument(name + ".densities[" + std::to_string(i) +
                                  "]: support outside allowed range");
  }
  if (require_finite && !finite_total_mass())
    throw std::invalid_argument(name + ": must have finite total mass");
  if (require_finite && !(total_mass() < kInf))
    throw std::invalid_argument(name + ": total mass is not finite");
}

// ---------------------------------------------------------------------------
// Triplet / quintuple scalars

void LevyTriplet::validate() const {
  if (!(sigma2 >= 0.0))
    throw std::invalid_argument("triplet: sigma2 must be >= 0");
  if (!(q >= 0.0)) throw std::invalid_argument("triplet: q must be >= 0");
  pi.validate("pi", -kInf, 0.0, false);
}

void Quintuple::validate() const {
  triplet.validate();
  v.validate("v", -1.0, 0.0, true);
}

double laplace_exponent(const LevyTriplet& triplet, double lambda) {
  if (!(lambda >= 0.0))
    throw std::domain_error("laplace_exponent: lambda must be >= 0");
  triplet.validate();
  double psi = -triplet.q + triplet.a * lambda +
               0.5 * triplet.sigma2 * lambda * lambda;
  // e^{lu} - 1 - lu on [-1,0); e^{lu} - 1 below -1.  The -1 break keeps each
  // quadrature piece smooth; expm1 forms avoid cancellation near 0.
  auto f = [lambda](double u) {
    if (u >= -1.0) return expm1_minus_x(lambda * u);
    return std::expm1(lambda * u);
  };
  psi += triplet.pi.integrate_all(f, {-1.0});
  return psi;
}

double drift_coefficient(const Quintuple& quintuple) {
  quintuple.validate();
  const double psi1 = laplace_exponent(quintuple.triplet, 1.0);
  return psi1 + quintuple.v.integrate_all([](double u) { return u - 1.0; });
}

double cramer_value(const Quintuple& quintuple) {
  quintuple.validate();
  const double psi1 = laplace_exponent(quintuple.triplet, 1.0);
  return psi1 + quintuple.v.integrate_all([](double u) { return -u - 1.0; });
}

bool check_overshoot_condition(const LevyTriplet& triplet) {
  return laplace_exponent(triplet, 1.0) > 0.0;
}

LevyTriplet fold_triplet(const Quintuple& quintuple) {
  quintuple.validate();
  LevyTriplet out = quintuple.triplet;
  // V becomes extra jumps of the log-magnitude at locations log|u|.  The
  // compound-Poisson part enters the 1{v >= -1} compensator convention, so
  // the linear term shifts by int log|u| 1{log|u| >= -1} V(du).
  for (const Atom& at : quintuple.v.atoms) {
    if (at.mass <= 0.0) continue;
    const double vloc = std::log(-at.location);
    if (vloc < 0.0) out.pi.atoms.push_back({vloc, at.mass});
    if (vloc >= -1.0) out.a += vloc * at.mass;
  }
  const double minus_inv_e = -std::exp(-1.0);
  for (const DensityComponent& src : quintuple.v.densities) {
    DensityComponent mapped;
    GenericDensity gen;
    gen.pdf = [src](double v) {
      const double x = -std::exp(v);
      return src.pdf(x) * std::exp(v);
    };
    gen.finite_total_mass = true;
    mapped.family = std::move(gen);
    mapped.lo = src.hi < 0.0 ? std::log(-src.hi) : -kInf;
    mapped.hi = std::log(-src.lo);
    mapped.small_jump_cutoff = 0.0;
    if (mapped.hi > mapped.lo) out.pi.densities.push_back(mapped);
    out.a += src.integrate([](double x) { return std::log(-x); }, src.lo,
                           std::min(src.hi, minus_inv_e));
  }
  return out;
}

// ---------------------------------------------------------------------------
// BarPi

BarPi::BarPi(const Quintuple& quintuple, double cutoff) {
  quintuple.validate();
  if (!(cutoff >= 0.0 && cutoff < 1.0))
    throw std::invalid_argument("bar_pi: cutoff must be in [0,1)");
  cutoff_ = cutoff;
  q_ = quintuple.triplet.q;
  v_ = quintuple.v;

  for (const Atom& at : quintuple.triplet.pi.atoms) {
    if (at.mass <= 0.0) continue;
    pos_atoms_.push_back({std::exp(at.location), at.mass});
  }

  // Factor band (1-cutoff, 1) corresponds to log-jumps in (log(1-cutoff), 0).
  const double vcut = cutoff > 0.0 ? -std::log1p(-cutoff) : 0.0;
  band_correction_ = 0.0;
  for (DensityComponent dc : quintuple.triplet.pi.densities) {
    const double band_lo = std::max(dc.lo, -vcut);
    if (const auto* s = std::get_if<TruncatedStableDensity>(&dc.family);
        s && s->c > 0.0 && s->alpha >= 1.0 && dc.hi > band_lo &&
        dc.hi >= 0.0) {
      // (e^v - 1) ~ v is not integrable against |v|^{-1-alpha} for alpha>=1.
      band_correction_ = -kInf;
    } else if (dc.hi > band_lo) {
      band_correction_ +=
          dc.integrate([](double v) { return std::expm1(v); }, band_lo, dc.hi);
    }
    dc.small_jump_cutoff = std::max(dc.small_jump_cutoff, dc.hi + vcut);
    pi_density_.densities.push_back(dc);
  }
}

double BarPi::sampled_mass() const {
  double m = q_ + v_.sampled_mass() + pi_density_.sampled_mass();
  for (const Atom& at : pos_atoms_) m += at.mass;
  return m;
}

double BarPi::integrate_sampled(const std::function<double(double)>& g) const {
  double acc = q_ * g(0.0);
  for (const Atom& at : pos_atoms_) acc += at.mass * g(at.location);
  acc += pi_density_.integrate_sampled(
      [&](double v) { return g(std::exp(v)); });
  acc += v_.integrate_sampled(g);
  return acc;
}

double BarPi::integrate_all(const std::function<double(double)>& g) const {
  double acc = q_ * g(0.0);
  for (const Atom& at : pos_atoms_) acc += at.mass * g(at.location);
  acc += pi_density_.integrate_all([&](double v) { return g(std::exp(v)); });
  acc += v_.integrate_all(g);
  return acc;
}

// ---------------------------------------------------------------------------
// BarPiSampler

BarPiSampler::BarPiSampler(const BarPi& bar_pi, int m) {
  const double limit = m > 0 ? 1.0 - 1.0 / m : 2.0;
  const double v_top = m > 0 ? std::log1p(-1.0 / m) : 0.0;
  double cum = 0.0;
  comp_signed_ = 0.0;
  comp_abs_ = 0.0;

  auto push_atom = [&](double u, double mass) {
    if (mass <= 0.0) return;
    Segment seg;
    seg.is_atom = true;
    seg.atom_u = u;
    seg.cum_lo = cum;
    cum += mass;
    seg.cum_hi = cum;
    segments_.push_back(seg);
    comp_signed_ += mass * (u - 1.0);
    comp_abs_ += mass * (std::abs(u) - 1.0);
  };

  for (const Atom& at : bar_pi.positive_atoms())
    if (at.location <= limit + 1e-15) push_atom(at.location, at.mass);

  for (const DensityComponent& src :
       bar_pi.log_positive_density().densities) {
    DensityComponent dc = src;
    const double top = std::min(dc.hi - dc.small_jump_cutoff, v_top);
    if (!(top > dc.lo)) continue;
    dc.small_jump_cutoff = dc.hi - top;
    const double mass = dc.sampled_mass();
    if (!(mass > 0.0)) continue;
    Segment seg;
    seg.comp = dc;
    seg.map_exp = true;
    seg.cum_lo = cum;
    cum += mass;
    seg.cum_hi = cum;
    segments_.push_back(seg);
    comp_signed_ += dc.integrate_sampled(
        [](double v) { return std::expm1(v); });
    comp_abs_ += dc.integrate_sampled([](double v) { return std::expm1(v); });
  }

  push_atom(0.0, bar_pi.zero_atom());

  for (const Atom& at : bar_pi.negative_part().atoms)
    push_atom(at.location, at.mass);

  for (const DensityComponent& dc : bar_pi.negative_part().densities) {
    const double mass = dc.sampled_mass();
    if (!(mass > 0.0)) continue;
    Segment seg;
    seg.comp = dc;
    seg.map_exp = false;
    seg.cum_lo = cum;
    cum += mass;
    seg.cum_hi = cum;
    segments_.push_back(seg);
    comp_signed_ +=
        dc.integrate_sampled([](double u) { return u - 1.0; });
    comp_abs_ += dc.integrate_sampled([](double u) { return -u - 1.0; });
  }

  total_mass_ = cum;
}

double BarPiSampler::sample(RngStream& rng) const {
  const double r = rng.uniform_pos() * total_mass_;
  // Linear walk: the segment count is tiny (atoms plus a few densities).
  for (const Segment& seg : segments_) {
    if (r < seg.cum_hi || &seg == &segments_.back()) {
      if (seg.is_atom) return seg.atom_u;
      const double target =
          std::min(std::max(r - seg.cum_lo, 1e-300), seg.cum_hi - seg.cum_lo);
      const double v = seg.comp.quantile_sampled(target);
      return seg.map_exp ? std::exp(v) : v;
    }
  }
  return 0.0;
}

}  // namespace ssmp
