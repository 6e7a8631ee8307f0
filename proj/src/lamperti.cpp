#include "ssmp/lamperti.hpp"

#include <cmath>
#include <stdexcept>

namespace ssmp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Cells per stagnation-check chunk; a chunk that grows the exponential
// functional by less than 1e-15 of the pending target declares absorption
// (the functional has numerically saturated).
constexpr long kChunkCells = 4096;
constexpr double kStagnationRel = 1e-15;

struct OutputGrid {
  std::vector<double> times;
  static OutputGrid build(double horizon, double dt) {
    OutputGrid g;
    const long n = std::lround(std::floor(horizon / dt + 1e-9));
    g.times.reserve(n + 1);
    for (long j = 0; j <= n; ++j) g.times.push_back(j * dt);
    return g;
  }
};

}  // namespace

SamplePath lamperti_positive(const LevyTriplet& triplet, double z,
                             double horizon, double dt, RngStream& rng) {
  if (!(z > 0.0)) throw std::domain_error("lamperti_positive: z must be > 0");
  if (!(horizon > 0.0) || !(dt > 0.0) || dt > horizon)
    throw std::domain_error("lamperti_positive: need 0 < dt <= horizon");
  triplet.validate();

  SamplePath out;
  out.times = OutputGrid::build(horizon, dt).times;
  out.values.assign(out.times.size(), 0.0);
  const size_t n_out = out.times.size();

  LevyWalker walker(triplet, dt, rng);
  ExpFunctional acc;
  size_t j = 0;
  double prev_t = 0.0, prev_v = 0.0;
  bool absorbed = false;
  long cells_in_chunk = 0;
  double chunk_start = 0.0;

  while (j < n_out) {
    const bool alive = walker.step();
    const double width = walker.time() - prev_t;
    const double rate = std::exp(prev_v);
    while (j < n_out && acc.total() + rate * width > out.times[j] / z) {
      out.values[j] = z * rate;
      ++j;
    }
    acc.add_term(rate * width);
    if (!alive) {
      absorbed = true;
      break;
    }
    prev_t = walker.time();
    prev_v = walker.value();
    if (++cells_in_chunk >= kChunkCells) {
      if (j < n_out &&
          acc.total() - chunk_start < kStagnationRel * (out.times[j] / z)) {
        absorbed = true;
        break;
      }
      chunk_start = acc.total();
      cells_in_chunk = 0;
    }
  }

  if (absorbed && j < n_out) {
    out.absorbed = true;
    out.absorption_time = z * acc.total();
    for (; j < n_out; ++j) out.values[j] = 0.0;
  }
  return out;
}

SamplePath lamperti_kiu(const Quintuple& plus, const Quintuple& minus,
                        double z, double horizon, double dt, RngStream& rng,
                        KiuDiagnostics* diagnostics) {
  if (z == 0.0) throw std::domain_error("lamperti_kiu: z must be nonzero");
  if (!(horizon > 0.0) || !(dt > 0.0) || dt > horizon)
    throw std::domain_error("lamperti_kiu: need 0 < dt <= horizon");
  plus.validate();
  minus.validate();

  SamplePath out;
  out.times = OutputGrid::build(horizon, dt).times;
  out.values.assign(out.times.size(), 0.0);
  const size_t n_out = out.times.size();
  const double az = std::abs(z);

  double eta = sign(z);  // current sign of the process
  double base = 0.0;     // accumulated log-magnitude of completed stages
  double base_comp = 0.0;  // Kahan compensation for base
  ExpFunctional acc;
  size_t j = 0;
  bool absorbed = false;
  bool done = false;
  long cells_in_chunk = 0;
  double chunk_start = 0.0;

  auto add_to_base = [&](double term) {
    const double y = term - base_comp;
    const double t = base + y;
    base_comp = (t - base) - y;
    base = t;
  };

  while (!done) {
    const Quintuple& side = eta > 0.0 ? plus : minus;
    const double p = side.v.sampled_mass();
    const double zeta = p > 0.0 ? rng.exponential(p) : kInf;
    LevyWalker walker(side.triplet, dt, rng);
    double prev_t = 0.0, prev_v = 0.0;

    for (;;) {
      const bool alive = walker.step();
      const bool stage_ends = zeta <= walker.time();
      const double cell_end = std::min(walker.time(), zeta);
      const double width = cell_end - prev_t;
      const double level = base + prev_v;
      const double rate = std::exp(level);
      while (j < n_out && acc.total() + rate * width > out.times[j] / az) {
        out.values[j] = eta * az * rate;
        ++j;
      }
      acc.add_term(rate * width);
      if (j >= n_out) {
        done = true;
        break;
      }
      if (++cells_in_chunk >= kChunkCells) {
        if (acc.total() - chunk_start <
            kStagnationRel * (out.times[j] / az)) {
          absorbed = true;
          done = true;
          break;
        }
        chunk_start = acc.total();
        cells_in_chunk = 0;
      }
      if (!alive && walker.time() < zeta) {
        // Killing inside the stage: jump to zero.
        absorbed = true;
        done = true;
        break;
      }
      if (stage_ends) {
        // Sign change: magnitude multiplies by the sampled |V| factor.
        const double v_sample = side.v.sample(rng);
        const double u_jump = std::log(std::abs(v_sample));
        const double xi_end = prev_v;  // cadlag value at the stage end
        if (diagnostics) {
          diagnostics->stage_lifetimes.push_back(zeta);
          diagnostics->v_magnitudes.push_back(std::abs(v_sample));
          diagnostics->pre_flip_log.push_back(base + xi_end);
        }
        add_to_base(xi_end);
        add_to_base(u_jump);
        if (diagnostics) diagnostics->post_flip_log.push_back(base);
        eta = -eta;
        out.sign_change_times.push_back(az * acc.total());
        break;  // next stage
      }
      prev_t = walker.time();
      prev_v = walker.value();
    }
  }

  if (absorbed && j < n_out) {
    out.absorbed = true;
    out.absorption_time = az * acc.total();
    for (; j < n_out; ++j) out.values[j] = 0.0;
  }
  return out;
}

}  // namespace ssmp
