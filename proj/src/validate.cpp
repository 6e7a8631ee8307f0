#include "ssmp/validate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <stdexcept>

#include "ssmp/batch.hpp"
#include "ssmp/lamperti.hpp"
#include "ssmp/rng.hpp"

namespace ssmp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Stream layout: batch b of the test tagged T draws path i from
// RngStream(seed, (T << 32) | (b << 28) | i).  Sixteen batches per tag,
// up to 2^28 paths per batch.
uint64_t stream_id(uint64_t tag, int batch, long i) {
  return (tag << 32) | (static_cast<uint64_t>(batch) << 28) |
         static_cast<uint64_t>(i);
}

long grid_index(double t, double dt, size_t grid_size) {
  long idx = std::lround(t / dt);
  if (idx < 0) idx = 0;
  if (idx >= static_cast<long>(grid_size)) idx = grid_size - 1;
  return idx;
}

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

// Collect path values at the given grid indices (and optionally the number
// of sign changes up to count_flips_before) for n independently seeded runs.
struct MarginalBatch {
  std::vector<std::vector<double>> at;  // [time index][path]
  std::vector<double> flip_counts;      // filled when count_flips_before >= 0
};

MarginalBatch collect_marginals(
    const std::function<SamplePath(RngStream&)>& simulate, long n,
    uint64_t seed, uint64_t tag, int batch, const std::vector<long>& indices,
    int threads, double count_flips_before = -1.0) {
  MarginalBatch out;
  out.at.assign(indices.size(), std::vector<double>(n, 0.0));
  if (count_flips_before >= 0.0) out.flip_counts.assign(n, 0.0);
  parallel_paths(n, threads, [&](long i) {
    RngStream rng(seed, stream_id(tag, batch, i));
    const SamplePath path = simulate(rng);
    for (size_t j = 0; j < indices.size(); ++j)
      out.at[j][i] = path.values[indices[j]];
    if (count_flips_before >= 0.0) {
      long flips = 0;
      for (double s : path.sign_change_times)
        if (s <= count_flips_before) ++flips;
      out.flip_counts[i] = static_cast<double>(flips);
    }
  });
  return out;
}

ReportEntry make_entry(std::string name, double statistic, double threshold,
                       bool higher_is_better, long n,
                       std::vector<uint64_t> seeds,
                       std::vector<double> time_points, std::string detail) {
  ReportEntry e;
  e.test_name = std::move(name);
  e.statistic = statistic;
  e.threshold = threshold;
  e.higher_is_better = higher_is_better;
  e.passed = higher_is_better ? statistic >= threshold
                              : statistic <= threshold;
  e.n_samples = n;
  e.seeds = std::move(seeds);
  e.time_points = std::move(time_points);
  e.detail = std::move(detail);
  return e;
}

void append_json_string(std::string& out, const std::string& s) {
  out += '"';
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  out += '"';
}

void append_json_number(std::string& out, double x) {
  if (!std::isfinite(x)) {
    out += "null";
    return;
  }
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  out += buf;
}

// Bin nonnegative integer-valued counts into {0, 1, 2, 3, >=4}.
std::vector<double> bin_counts(const std::vector<double>& counts) {
  std::vector<double> bins(5, 0.0);
  for (double c : counts) {
    const long k = std::lround(c);
    bins[k < 4 ? (k < 0 ? 0 : k) : 4] += 1.0;
  }
  return bins;
}

}  // namespace

// --- report ------------------------------------------------------------------

bool ValidationReport::all_passed() const {
  for (const ReportEntry& e : entries)
    if (!e.passed) return false;
  return true;
}

std::string ValidationReport::to_json() const {
  std::string out = "{\n  \"all_passed\": ";
  out += all_passed() ? "true" : "false";
  out += ",\n  \"entries\": [";
  for (size_t i = 0; i < entries.size(); ++i) {
    const ReportEntry& e = entries[i];
    out += i ? ",\n    {" : "\n    {";
    out += "\"test_name\": ";
    append_json_string(out, e.test_name);
    out += ", \"statistic\": ";
    append_json_number(out, e.statistic);
    out += ", \"threshold\": ";
    append_json_number(out, e.threshold);
    out += ", \"direction\": \"";
    out += e.higher_is_better ? ">=" : "<=";
    out += "\", \"passed\": ";
    out += e.passed ? "true" : "false";
    out += ", \"n_samples\": " + std::to_string(e.n_samples);
    out += ", \"seeds\": [";
    for (size_t j = 0; j < e.seeds.size(); ++j) {
      if (j) out += ", ";
      out += std::to_string(e.seeds[j]);
    }
    out += "], \"time_points\": [";
    for (size_t j = 0; j < e.time_points.size(); ++j) {
      if (j) out += ", ";
      append_json_number(out, e.time_points[j]);
    }
    out += "], \"detail\": ";
    append_json_string(out, e.detail);
    out += "}";
  }
  out += "\n  ]\n}\n";
  return out;
}

std::string ValidationReport::to_table() const {
  std::string out;
  char line[256];
  std::snprintf(line, sizeof line, "%-4s  %-34s %12s %3s %12s  %s\n", "",
                "test", "statistic", "", "threshold", "n");
  out += line;
  out += std::string(78, '-') + "\n";
  for (const ReportEntry& e : entries) {
    std::snprintf(line, sizeof line, "%-4s  %-34s %12.5g %3s %12.5g  %ld\n",
                  e.passed ? "PASS" : "FAIL", e.test_name.c_str(), e.statistic,
                  e.higher_is_better ? ">=" : "<=", e.threshold, e.n_samples);
    out += line;
    if (!e.detail.empty()) out += "        " + e.detail + "\n";
  }
  std::snprintf(line, sizeof line, "overall: %s\n",
                all_passed() ? "PASS" : "FAIL");
  out += line;
  return out;
}

std::vector<double> ValidateConfig::resolved_time_points() const {
  if (!time_points.empty()) return time_points;
  return {0.25 * sde.horizon, 0.5 * sde.horizon, sde.horizon};
}

// --- bump test functions -------------------------------------------------------

double Bump::value(double y) const {
  const double s = (y - center) / width;
  const double g = 1.0 - s * s;
  if (!(g > 0.0)) return 0.0;
  return std::exp(-1.0 / g);
}

double Bump::d1(double y) const {
  const double s = (y - center) / width;
  const double g = 1.0 - s * s;
  if (!(g > 0.0)) return 0.0;
  return std::exp(-1.0 / g) * (-2.0 * s / (g * g)) / width;
}

double Bump::d2(double y) const {
  const double s = (y - center) / width;
  const double g = 1.0 - s * s;
  if (!(g > 0.0)) return 0.0;
  const double g2 = g * g;
  const double phi = std::exp(-1.0 / g);
  return phi * (4.0 * s * s / (g2 * g2) - 2.0 / g2 - 8.0 * s * s / (g2 * g)) /
         (width * width);
}

void GeneratorSpec::validate() const {
  quintuple.validate();
  if (bumps.empty())
    throw std::invalid_argument("generator spec: need at least one bump");
  for (const Bump& b : bumps) {
    if (!(b.width > 0.0))
      throw std::invalid_argument("generator spec: bump width must be > 0");
    if (b.center - b.width <= 0.0 && b.center + b.width >= 0.0)
      throw std::invalid_argument(
          "generator spec: bump support must exclude zero");
  }
}

// --- generator ----------------------------------------------------------------

GeneratorEvaluator::GeneratorEvaluator(const Quintuple& quintuple,
                                       double cutoff, double rate_cap)
    : bar_pi_(quintuple, cutoff),
      kappa_(drift_coefficient(quintuple)),
      sigma2_(quintuple.triplet.sigma2),
      rate_cap_(rate_cap) {
  const BarPiSampler sampler(bar_pi_, 0);
  comp_signed_ = sampler.comp_signed();
  if (!(rate_cap_ > 0.0))
    throw std::invalid_argument("generator: rate_cap must be > 0");
  has_jumps_ = sampler.total_mass() > 0.0;
}

double GeneratorEvaluator::apply(const Bump& f, double z) const {
  if (z == 0.0) return 0.0;
  const double az = std::abs(z);
  const double rf = std::min(1.0, az * rate_cap_);
  double out = sign(z) * (kappa_ - rf * comp_signed_) * f.d1(z) +
               0.5 * sigma2_ * az * f.d2(z);
  if (has_jumps_) {
    const double rate = std::min(1.0 / az, rate_cap_);
    const double fz = f.value(z);
    out += rate * bar_pi_.integrate_sampled(
                      [&](double u) { return f.value(u * z) - fz; });
  }
  return out;
}

// --- scaling ------------------------------------------------------------------

ReportEntry test_scaling(const Quintuple& quintuple, double z, double c,
                         const ValidateConfig& config) {
  if (!(c > 0.0)) throw std::invalid_argument("test_scaling: c must be > 0");
  config.sde.validate();
  quintuple.validate();
  const std::vector<double> ts = config.resolved_time_points();
  const long n = config.sde.n_paths;
  const uint64_t tag = config.stream_tag;

  SdeConfig big = config.sde;
  big.dt *= c;
  big.horizon *= c;
  const SdeConfig small = config.sde;

  std::vector<long> indices;
  const size_t grid = static_cast<size_t>(
      std::lround(std::floor(config.sde.horizon / config.sde.dt + 1e-9))) + 1;
  for (double t : ts) indices.push_back(grid_index(t, config.sde.dt, grid));

  auto run_big = [&](RngStream& rng) {
    return z == 0.0 ? simulate_approx_sde(quintuple, 0.0, big, rng)
                    : simulate_sde(quintuple, z, big, rng);
  };
  auto run_small = [&](RngStream& rng) {
    return z == 0.0 ? simulate_approx_sde(quintuple, 0.0, small, rng)
                    : simulate_sde(quintuple, z / c, small, rng);
  };
  MarginalBatch a = collect_marginals(run_big, n, config.sde.seed, tag, 0,
                                      indices, config.sde.threads);
  const MarginalBatch b = collect_marginals(run_small, n, config.sde.seed, tag,
                                            1, indices, config.sde.threads);

  double max_d = 0.0;
  std::string detail;
  std::vector<double> actual_ts;
  for (size_t j = 0; j < indices.size(); ++j) {
    for (double& v : a.at[j]) v /= c;  // c^{-1} Z_{ct}
    const KsResult ks = ks_two_sample(a.at[j], b.at[j]);
    max_d = std::max(max_d, ks.statistic);
    const double t_actual = indices[j] * config.sde.dt;
    actual_ts.push_back(t_actual);
    if (!detail.empty()) detail += "; ";
    detail += "t=" + format_double(t_actual) + ": D=" +
              format_double(ks.statistic);
  }
  return make_entry("scaling_c" + format_double(c), max_d,
                    config.ks_threshold, false, n,
                    {config.sde.seed, tag}, actual_ts, detail);
}

// --- symmetry -----------------------------------------------------------------

namespace {

ReportEntry symmetry_entry(const Quintuple& quintuple, double z,
                           const ValidateConfig& config, bool paired) {
  config.sde.validate();
  quintuple.validate();
  const std::vector<double> ts = config.resolved_time_points();
  const long n = config.sde.n_paths;
  const uint64_t tag = config.stream_tag;
  const size_t grid = static_cast<size_t>(
      std::lround(std::floor(config.sde.horizon / config.sde.dt + 1e-9))) + 1;
  std::vector<long> indices;
  for (double t : ts) indices.push_back(grid_index(t, config.sde.dt, grid));

  MarginalBatch a, b;
  if (!paired) {
    a = collect_marginals(
        [&](RngStream& rng) {
          return simulate_approx_sde(quintuple, 0.0, config.sde, rng);
        },
        n, config.sde.seed, tag, 0, indices, config.sde.threads);
  } else {
    a = collect_marginals(
        [&](RngStream& rng) {
          return simulate_sde(quintuple, z, config.sde, rng);
        },
        n, config.sde.seed, tag, 0, indices, config.sde.threads);
    b = collect_marginals(
        [&](RngStream& rng) {
          return simulate_sde(quintuple, -z, config.sde, rng);
        },
        n, config.sde.seed, tag, 1, indices, config.sde.threads);
  }

  double max_d = 0.0;
  std::string detail;
  std::vector<double> actual_ts;
  for (size_t j = 0; j < indices.size(); ++j) {
    std::vector<double> mirrored = paired ? b.at[j] : a.at[j];
    for (double& v : mirrored) v = -v;
    const KsResult ks = ks_two_sample(a.at[j], mirrored);
    max_d = std::max(max_d, ks.statistic);
    const double t_actual = indices[j] * config.sde.dt;
    actual_ts.push_back(t_actual);
    if (!detail.empty()) detail += "; ";
    detail += "t=" + format_double(t_actual) + ": D=" +
              format_double(ks.statistic);
  }
  return make_entry(paired ? "symmetry_paired" : "symmetry_from_zero", max_d,
                    config.ks_threshold, false, n,
                    {config.sde.seed, tag}, actual_ts, detail);
}

}  // namespace

ReportEntry test_symmetry(const Quintuple& quintuple,
                          const ValidateConfig& config) {
  return symmetry_entry(quintuple, 0.0, config, false);
}

ReportEntry test_symmetry(const Quintuple& quintuple, double z,
                          const ValidateConfig& config) {
  if (z == 0.0)
    throw std::invalid_argument("test_symmetry: paired form needs z != 0");
  return symmetry_entry(quintuple, z, config, true);
}

// --- occupation near zero -------------------------------------------------------

double occupation_fraction(const std::vector<SamplePath>& batch, double band) {
  if (!(band > 0.0))
    throw std::invalid_argument("occupation_fraction: band must be > 0");
  if (batch.empty())
    throw std::invalid_argument("occupation_fraction: empty batch");
  double total = 0.0;
  for (const SamplePath& path : batch) {
    long alive = 0, inside = 0;
    for (size_t k = 0; k < path.times.size(); ++k) {
      if (path.absorbed && path.times[k] >= path.absorption_time) break;
      ++alive;
      if (std::abs(path.values[k]) <= band) ++inside;
    }
    total += alive > 0 ? static_cast<double>(inside) / alive : 0.0;
  }
  return total / batch.size();
}

ReportEntry test_occupation_zero(const Quintuple& quintuple, double band,
                                 const std::vector<long>& m_levels,
                                 const ValidateConfig& config) {
  if (!(band > 0.0))
    throw std::invalid_argument("test_occupation_zero: band must be > 0");
  if (m_levels.empty())
    throw std::invalid_argument("test_occupation_zero: need restart levels");
  config.sde.validate();
  quintuple.validate();
  if (!(cramer_value(quintuple) > 0.0))
    throw std::domain_error(
        "test_occupation_zero: needs cramer_value > 0 so paths leave zero");

  const long n = config.sde.n_paths;
  const uint64_t tag = config.stream_tag;
  std::vector<double> fractions;
  std::string detail;
  for (size_t level = 0; level < m_levels.size(); ++level) {
    SdeConfig cfg = config.sde;
    cfg.m = m_levels[level];
    std::vector<double> per_path(n, 0.0);
    parallel_paths(n, config.sde.threads, [&](long i) {
      RngStream rng(config.sde.seed,
                    stream_id(tag, static_cast<int>(level), i));
      const SamplePath path = simulate_approx_sde(quintuple, 0.0, cfg, rng);
      long alive = 0, inside = 0;
      for (size_t k = 0; k < path.times.size(); ++k) {
        if (path.absorbed && path.times[k] >= path.absorption_time) break;
        ++alive;
        if (std::abs(path.values[k]) <= band) ++inside;
      }
      per_path[i] = alive > 0 ? static_cast<double>(inside) / alive : 0.0;
    });
    double total = 0.0;
    for (double f : per_path) total += f;
    fractions.push_back(total / n);
    if (!detail.empty()) detail += "; ";
    detail += "m=" + std::to_string(m_levels[level]) + ": " +
              format_double(fractions.back());
  }

  bool decreasing = true;
  for (size_t i = 1; i < fractions.size(); ++i)
    if (!(fractions[i] < fractions[i - 1])) decreasing = false;

  ReportEntry e = make_entry(
      "occupation_zero", fractions.back(), config.occupation_threshold, false,
      n, {config.sde.seed, tag}, {config.sde.horizon},
      detail + (decreasing ? "; strictly decreasing" : "; NOT decreasing"));
  e.passed = e.passed && decreasing;
  return e;
}

// --- moment growth --------------------------------------------------------------

ReportEntry test_moment_linearity(const Quintuple& quintuple, int k,
                                  const ValidateConfig& config) {
  if (k < 1)
    throw std::invalid_argument("test_moment_linearity: k must be >= 1");
  config.sde.validate();
  quintuple.validate();
  const double cramer = cramer_value(quintuple);
  if (k == 1 && !(cramer > 0.0))
    throw std::domain_error(
        "test_moment_linearity: needs cramer_value > 0 so paths leave zero");

  const std::vector<double> ts = config.resolved_time_points();
  const long n = config.sde.n_paths;
  const uint64_t tag = config.stream_tag;

  // One independent batch per time point so the regression errors are
  // independent across points.
  std::vector<double> xs, means, ses;
  for (size_t j = 0; j < ts.size(); ++j) {
    SdeConfig cfg = config.sde;
    const size_t grid = static_cast<size_t>(
        std::lround(std::floor(cfg.horizon / cfg.dt + 1e-9))) + 1;
    const long idx = grid_index(ts[j], cfg.dt, grid);
    const double t_actual = idx * cfg.dt;
    cfg.horizon = t_actual;
    std::vector<double> vals(n, 0.0);
    parallel_paths(n, config.sde.threads, [&](long i) {
      RngStream rng(config.sde.seed, stream_id(tag, static_cast<int>(j), i));
      const SamplePath path = simulate_abs_sde(quintuple, 0.0, cfg, rng);
      double v = path.values.back();
      for (int p = 1; p < k; ++p) v *= path.values.back();
      vals[i] = v;
    });
    double sum = 0.0, sq = 0.0;
    for (double v : vals) {
      sum += v;
      sq += v * v;
    }
    const double mean = sum / n;
    const double var = std::max(0.0, sq / n - mean * mean);
    xs.push_back(k == 1 ? t_actual : std::pow(t_actual, k));
    means.push_back(mean);
    ses.push_back(std::sqrt(var / n));
  }

  const WlsFit fit = wls_fit(xs, means, ses);
  if (k >= 2) {
    return make_entry("moment_growth_k" + std::to_string(k), fit.slope, kInf,
                      false, n, {config.sde.seed, tag}, ts,
                      "experimental: fitted growth constant C_" +
                          std::to_string(k) + " = " + format_double(fit.slope) +
                          " +- " + format_double(fit.se_slope) +
                          "; no pass threshold");
  }
  const double z_slope = std::abs(fit.slope - cramer) / fit.se_slope;
  const double z_icpt = std::abs(fit.intercept) / fit.se_intercept;
  return make_entry(
      "moment_linearity", std::max(z_slope, z_icpt), config.z_score_limit,
      false, n, {config.sde.seed, tag}, ts,
      "slope=" + format_double(fit.slope) + "+-" + format_double(fit.se_slope) +
          " vs " + format_double(cramer) + " (z=" + format_double(z_slope) +
          "); intercept=" + format_double(fit.intercept) + "+-" +
          format_double(fit.se_intercept) + " (z=" + format_double(z_icpt) +
          ")");
}

// --- generator residual ----------------------------------------------------------

ReportEntry test_generator_residual(const Quintuple& quintuple, double z,
                                    const Bump& f, double t,
                                    const ValidateConfig& config) {
  config.sde.validate();
  quintuple.validate();
  if (z == 0.0)
    throw std::domain_error("test_generator_residual: start must be nonzero");
  if (!(f.width > 0.0) || (f.center - f.width <= 0.0 && f.center + f.width >= 0.0))
    throw std::invalid_argument(
        "test_generator_residual: bump support must exclude zero");
  const long n = config.sde.n_paths;
  const uint64_t tag = config.stream_tag;

  SdeConfig cfg = config.sde;
  const size_t grid = static_cast<size_t>(
      std::lround(std::floor(cfg.horizon / cfg.dt + 1e-9))) + 1;
  const long idx = grid_index(t, cfg.dt, grid);
  const double t_actual = idx * cfg.dt;
  cfg.horizon = t_actual;

  const GeneratorEvaluator gen(quintuple, cfg.cutoff, cfg.rate_cap);
  std::vector<double> residuals(n, 0.0), path_max(n, 0.0);
  const double fz = f.value(z);
  parallel_paths(n, config.sde.threads, [&](long i) {
    RngStream rng(config.sde.seed, stream_id(tag, 0, i));
    const SamplePath path = simulate_sde(quintuple, z, cfg, rng);
    double riemann = 0.0, vmax = 0.0;
    const size_t last = path.values.size() - 1;
    for (size_t k = 0; k < last; ++k) {
      riemann += gen.apply(f, path.values[k]);
      vmax = std::max(vmax, std::abs(path.values[k]));
    }
    vmax = std::max(vmax, std::abs(path.values[last]));
    residuals[i] = f.value(path.values[last]) - fz - riemann * cfg.dt;
    path_max[i] = vmax;
  });

  double sum = 0.0, sq = 0.0, vmax = std::abs(z);
  for (long i = 0; i < n; ++i) {
    sum += residuals[i];
    sq += residuals[i] * residuals[i];
    vmax = std::max(vmax, path_max[i]);
  }
  const double mean = sum / n;
  const double se = std::sqrt(std::max(0.0, sq / n - mean * mean) / n);

  // O(dt) discretization budget: dt * sup |Af| over the visited range.
  double sup_af = 0.0;
  const int scan = 2048;
  for (int j = 0; j < scan; ++j) {
    const double zz = (j + 0.5) / scan * vmax;
    sup_af = std::max(sup_af, std::abs(gen.apply(f, zz)));
    sup_af = std::max(sup_af, std::abs(gen.apply(f, -zz)));
  }
  const double budget = cfg.dt * sup_af;
  const double denom = se + budget;
  const double statistic = denom > 0.0 ? std::abs(mean) / denom : 0.0;
  return make_entry(
      "generator_residual_c" + format_double(f.center), statistic,
      config.residual_sigma, false, n, {config.sde.seed, tag}, {t_actual},
      "residual=" + format_double(mean) + " se=" + format_double(se) +
          " dt_budget=" + format_double(budget) +
          " sup|Af|=" + format_double(sup_af));
}

std::vector<ReportEntry> test_generator_residual(const GeneratorSpec& spec,
                                                 double z,
                                                 const ValidateConfig& config) {
  spec.validate();
  std::vector<ReportEntry> out;
  ValidateConfig cfg = config;
  const std::vector<double> ts = config.resolved_time_points();
  for (const Bump& b : spec.bumps) {
    out.push_back(
        test_generator_residual(spec.quintuple, z, b, ts.back(), cfg));
    ++cfg.stream_tag;
  }
  return out;
}

// --- cross construction -----------------------------------------------------------

namespace {

// Both representations describe the process only up to its first zero
// contact: the time-change routes are absorbed there, while the direct SDE
// keeps diffusing across.  For a like-for-like comparison, stop an SDE path
// at the first node whose sign disagrees with the start sign toggled by the
// recorded jump flips (a diffusion-driven zero contact), zero-filling from
// that node on.  Returns the stop time (+infinity when untouched); the
// path's recorded flips after the stop are dropped.
double stop_at_zero_contact(SamplePath& path, double z) {
  double expected = sign(z);
  size_t flip = 0;
  for (size_t k = 0; k < path.values.size(); ++k) {
    while (flip < path.sign_change_times.size() &&
           path.sign_change_times[flip] <= path.times[k]) {
      expected = -expected;
      ++flip;
    }
    const double v = path.values[k];
    const bool contact = v == 0.0 || sign(v) != expected;
    if (contact && !(path.absorbed && path.times[k] >= path.absorption_time)) {
      const double t_stop = path.times[k];
      for (size_t j = k; j < path.values.size(); ++j) path.values[j] = 0.0;
      path.sign_change_times.resize(flip);
      path.absorbed = true;
      path.absorption_time = t_stop;
      return t_stop;
    }
    if (v == 0.0) return path.absorption_time;  // already absorbed by a kill
  }
  return std::numeric_limits<double>::infinity();
}

}  // namespace

std::vector<ReportEntry> test_cross_construction(const Quintuple& quintuple,
                                                 double z,
                                                 const ValidateConfig& config) {
  config.sde.validate();
  quintuple.validate();
  const bool symmetric = !quintuple.v.empty();
  if (!symmetric && !(z > 0.0))
    throw std::domain_error(
        "test_cross_construction: V = 0 uses the positive route; need z > 0");
  if (z == 0.0)
    throw std::domain_error("test_cross_construction: need z != 0");

  const std::vector<double> ts = config.resolved_time_points();
  const long n = config.sde.n_paths;
  const uint64_t tag = config.stream_tag;
  const size_t grid = static_cast<size_t>(
      std::lround(std::floor(config.sde.horizon / config.sde.dt + 1e-9))) + 1;
  std::vector<long> indices;
  for (double t : ts) indices.push_back(grid_index(t, config.sde.dt, grid));
  const double t_last = indices.back() * config.sde.dt;

  const double flips_before = symmetric ? t_last : -1.0;
  MarginalBatch sde = collect_marginals(
      [&](RngStream& rng) {
        SamplePath path = simulate_sde(quintuple, z, config.sde, rng);
        stop_at_zero_contact(path, z);
        return path;
      },
      n, config.sde.seed, tag, 0, indices, config.sde.threads, flips_before);
  MarginalBatch tc = collect_marginals(
      [&](RngStream& rng) {
        return symmetric
                   ? lamperti_kiu(quintuple, quintuple, z, config.sde.horizon,
                                  config.sde.dt, rng)
                   : lamperti_positive(quintuple.triplet, z,
                                       config.sde.horizon, config.sde.dt, rng);
      },
      n, config.sde.seed, tag, 1, indices, config.sde.threads, flips_before);

  double max_d = 0.0;
  std::string detail;
  std::vector<double> actual_ts;
  for (size_t j = 0; j < indices.size(); ++j) {
    const KsResult ks = ks_two_sample(sde.at[j], tc.at[j]);
    max_d = std::max(max_d, ks.statistic);
    const double t_actual = indices[j] * config.sde.dt;
    actual_ts.push_back(t_actual);
    if (!detail.empty()) detail += "; ";
    detail += "t=" + format_double(t_actual) + ": D=" +
              format_double(ks.statistic);
  }

  std::vector<ReportEntry> out;
  out.push_back(make_entry("cross_construction_marginals", max_d,
                           config.ks_threshold, false, n,
                           {config.sde.seed, tag}, actual_ts, detail));
  if (symmetric) {
    const Chi2Result chi =
        chi2_homogeneity(bin_counts(sde.flip_counts),
                         bin_counts(tc.flip_counts));
    out.push_back(make_entry(
        "cross_construction_sign_flips", chi.p_value, config.p_floor, true, n,
        {config.sde.seed, tag}, {t_last},
        "chi2=" + format_double(chi.statistic) +
            " dof=" + std::to_string(chi.dof) +
            " flip counts binned {0,1,2,3,>=4} by t=" +
            format_double(t_last)));
  }
  return out;
}

// --- null calibration ---------------------------------------------------------------

std::vector<CalibrationResult> run_null_calibration(
    long n, int repetitions, const ValidateConfig& config) {
  if (n < 2 || repetitions < 1)
    throw std::invalid_argument("null calibration: need n >= 2 and reps >= 1");
  const uint64_t seed = config.sde.seed;
  const uint64_t tag = config.stream_tag;

  std::vector<CalibrationResult> out;
  auto add = [&](const std::string& name, int passes) {
    CalibrationResult r;
    r.test_name = name;
    r.passes = passes;
    r.repetitions = repetitions;
    r.passed =
        passes >= static_cast<int>(std::ceil(0.95 * repetitions) + 0.5);
    out.push_back(r);
  };

  int p_pass = 0, d_pass = 0, sym_pass = 0, chi_pass = 0, z_pass = 0,
      res_pass = 0;
  for (int rep = 0; rep < repetitions; ++rep) {
    // Disjoint seeds per repetition and per role.
    RngStream ra(seed, stream_id(tag, 0, rep));
    RngStream rb(seed, stream_id(tag, 1, rep));
    std::vector<double> a(n), b(n);
    for (long i = 0; i < n; ++i) a[i] = ra.normal();
    for (long i = 0; i < n; ++i) b[i] = rb.normal();

    // Two-sample KS against a same-law partner: p-floor and distance rules.
    const KsResult ks = ks_two_sample(a, b);
    if (ks.p_value > config.p_floor) ++p_pass;
    if (ks.statistic < config.ks_threshold) ++d_pass;

    // Dependent symmetric-pair distance (the z = 0 symmetry rule).
    std::vector<double> neg(a);
    for (double& v : neg) v = -v;
    if (ks_two_sample(a, neg).statistic < config.ks_threshold) ++sym_pass;

    // Chi-square homogeneity of same-law Poisson counts.
    RngStream rc(seed, stream_id(tag, 2, rep));
    RngStream rd(seed, stream_id(tag, 3, rep));
    const long nc = std::max<long>(200, n / 10);
    std::vector<double> ca(nc), cb(nc);
    for (long i = 0; i < nc; ++i)
      ca[i] = static_cast<double>(rc.poisson(0.7));
    for (long i = 0; i < nc; ++i)
      cb[i] = static_cast<double>(rd.poisson(0.7));
    if (chi2_homogeneity(bin_counts(ca), bin_counts(cb)).p_value >
        config.p_floor)
      ++chi_pass;

    // Regression z-score rule on exact-law batches (slope 1, intercept 0).
    RngStream re(seed, stream_id(tag, 4, rep));
    std::vector<double> xs = {0.25, 0.5, 1.0}, means, ses;
    const long nb = std::max<long>(100, n / 10);
    for (double t : xs) {
      double sum = 0.0, sq = 0.0;
      for (long i = 0; i < nb; ++i) {
        const double v = t + re.normal();
        sum += v;
        sq += v * v;
      }
      const double mean = sum / nb;
      means.push_back(mean);
      ses.push_back(std::sqrt(std::max(0.0, sq / nb - mean * mean) / nb));
    }
    const WlsFit fit = wls_fit(xs, means, ses);
    const double zs = std::abs(fit.slope - 1.0) / fit.se_slope;
    const double zi = std::abs(fit.intercept) / fit.se_intercept;
    if (std::max(zs, zi) <= config.z_score_limit) ++z_pass;

    // Mean-zero residual rule at the residual_sigma gate.
    RngStream rf(seed, stream_id(tag, 5, rep));
    double sum = 0.0, sq = 0.0;
    for (long i = 0; i < n; ++i) {
      const double v = rf.normal();
      sum += v;
      sq += v * v;
    }
    const double mean = sum / n;
    const double se = std::sqrt(std::max(0.0, sq / n - mean * mean) / n);
    if (std::abs(mean) <= config.residual_sigma * se) ++res_pass;
  }

  add("null_ks_p_floor", p_pass);
  add("null_ks_distance", d_pass);
  add("null_symmetry_distance", sym_pass);
  add("null_chi2_homogeneity", chi_pass);
  add("null_moment_z_score", z_pass);
  add("null_residual_z_score", res_pass);
  return out;
}

// --- standard battery -----------------------------------------------------------------

ValidationReport run_standard_validation(const Quintuple& quintuple,
                                         const ValidateConfig& config) {
  quintuple.validate();
  config.sde.validate();
  const bool leaves_zero = cramer_value(quintuple) > 0.0;

  ValidationReport report;
  ValidateConfig cfg = config;

  if (leaves_zero) {
    report.entries.push_back(test_symmetry(quintuple, cfg));
    ++cfg.stream_tag;
    report.entries.push_back(test_scaling(quintuple, 0.0, 2.0, cfg));
    ++cfg.stream_tag;
    report.entries.push_back(test_moment_linearity(quintuple, 1, cfg));
    ++cfg.stream_tag;
    report.entries.push_back(
        test_occupation_zero(quintuple, cfg.occupation_band,
                             {4, 16, 64, 256}, cfg));
    ++cfg.stream_tag;
  } else {
    report.entries.push_back(test_symmetry(quintuple, 1.0, cfg));
    ++cfg.stream_tag;
    report.entries.push_back(test_scaling(quintuple, 1.0, 2.0, cfg));
    ++cfg.stream_tag;
  }

  Bump bump;
  bump.center = 1.25;
  bump.width = 0.75;
  const std::vector<double> ts = cfg.resolved_time_points();
  report.entries.push_back(
      test_generator_residual(quintuple, 1.0, bump, ts.back(), cfg));
  ++cfg.stream_tag;

  for (ReportEntry& e : test_cross_construction(quintuple, 1.0, cfg))
    report.entries.push_back(std::move(e));
  ++cfg.stream_tag;

  return report;
}

}  // namespace ssmp
