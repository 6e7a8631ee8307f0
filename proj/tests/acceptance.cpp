// Release gate: every acceptance criterion measured in one binary.  Each
// criterion prints exactly one PASS/FAIL line carrying the measured
// statistics and the pinned tolerance; the exit status is nonzero if any
// criterion fails.  Tolerances are fixed here, in code, on purpose.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "ssmp/batch.hpp"
#include "ssmp/config.hpp"
#include "ssmp/jump_sde.hpp"
#include "ssmp/lamperti.hpp"
#include "ssmp/measures.hpp"
#include "ssmp/path_io.hpp"
#include "ssmp/rng.hpp"
#include "ssmp/sample_path.hpp"
#include "ssmp/stats.hpp"
#include "ssmp/validate.hpp"

namespace {

using namespace ssmp;

// Pinned gates.
constexpr double kKsGate = 0.02;
constexpr double kSlopeSigmaGate = 3.0;
constexpr double kOccupationGate = 0.01;
constexpr double kScalarTol = 1e-9;
constexpr long kN = 100000;
constexpr double kDt = 1e-3;
constexpr std::uint64_t kSeed = 20260818;

int g_failed = 0;

std::string fmt(const char* format, ...) {
  va_list args;
  va_start(args, format);
  char buffer[1024];
  std::vsnprintf(buffer, sizeof buffer, format, args);
  va_end(args);
  return buffer;
}

void report(int index, const char* name, bool passed,
            const std::string& detail) {
  std::printf("%s  criterion %2d: %s (%s)\n", passed ? "PASS" : "FAIL",
              index, name, detail.c_str());
  std::fflush(stdout);
  if (!passed) ++g_failed;
}

double now_seconds() {
  return std::chrono::duration<double>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

// Marginal values at the requested times over n independent paths, one
// stream per path index under the given tag.
std::vector<std::vector<double>> collect(
    long n, std::uint64_t tag, const std::vector<double>& ts,
    const std::function<SamplePath(RngStream&)>& one_path) {
  std::vector<std::vector<double>> at(ts.size(),
                                      std::vector<double>(n, 0.0));
  parallel_paths(n, 0, [&](long i) {
    RngStream rng(kSeed, (tag << 32) | static_cast<std::uint64_t>(i));
    const SamplePath path = one_path(rng);
    for (size_t j = 0; j < ts.size(); ++j) at[j][i] = path.value_at(ts[j]);
  });
  return at;
}

double mean_of(const std::vector<double>& xs) {
  double sum = 0.0;
  for (double x : xs) sum += x;
  return sum / static_cast<double>(xs.size());
}

double sd_of(const std::vector<double>& xs, double mean) {
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

Quintuple besq_quintuple() {
  Quintuple q;
  q.triplet.a = -1.0;
  q.triplet.sigma2 = 4.0;  // Psi(1) = -1 + 2 = 1, sigma = 2
  return q;
}

// Psi(1) = 1, sigma = 2, no Levy jumps, V = 0.5 * delta_{-1/2}:
// folded drift = 1 + 0.5 * (1/2 - 1) = 0.75.
Quintuple half_flip_quintuple() {
  Quintuple q = besq_quintuple();
  q.v.atoms.push_back({-0.5, 0.5});
  return q;
}

void criterion_1() {
  const double start = now_seconds();
  const Quintuple q = besq_quintuple();
  SdeConfig cfg;
  cfg.dt = kDt;
  cfg.horizon = 1.0;
  cfg.seed = kSeed;
  const std::vector<double> ts{0.25, 0.5, 1.0};
  const auto at = collect(kN, 10, ts, [&](RngStream& rng) {
    return simulate_abs_sde(q, 0.0, cfg, rng);
  });
  bool ok = true;
  std::string detail;
  for (size_t j = 0; j < ts.size(); ++j) {
    const double t = ts[j];
    const KsResult ks = ks_one_sample(
        at[j], [t](double x) { return chi1_cdf(x / t); });
    ok = ok && ks.statistic < kKsGate;
    detail += fmt("t=%g: D=%.4f; ", t, ks.statistic);
  }
  detail += fmt("gate %.2f, n=%ld, dt=%g, %.0fs", kKsGate, kN, kDt,
                now_seconds() - start);
  report(1, "magnitude equation from zero matches the scaled chi-square law",
         ok, detail);
}

void criterion_2() {
  const double start = now_seconds();
  const Quintuple q = besq_quintuple();
  SdeConfig cfg;
  // This criterion pins m = 256 and n but not dt.  The signed scheme
  // re-crosses zero on a +-drift*dt lattice with O(sqrt(|z| dt)) kicks, a
  // launch bias of the same sqrt(dt/t) order as the clamped magnitude
  // scheme but roughly twice the size (measured |Z| D = 0.047/0.033/0.023
  // at dt = 1e-3).  A finer step keeps the discretization term under the
  // gate so the test probes what it gates: the level-256 approximation.
  cfg.dt = 6.25e-5;
  cfg.horizon = 1.0;
  cfg.seed = kSeed;
  cfg.m = 256;
  const std::vector<double> ts{0.25, 0.5, 1.0};
  const auto at = collect(kN, 20, ts, [&](RngStream& rng) {
    return simulate_approx_sde(q, 0.0, cfg, rng);
  });
  bool ok = true;
  std::string detail;
  for (size_t j = 0; j < ts.size(); ++j) {
    const double t = ts[j];
    std::vector<double> negated = at[j];
    for (double& x : negated) x = -x;
    const KsResult sym = ks_two_sample(at[j], negated);
    std::vector<double> magnitude = at[j];
    for (double& x : magnitude) x = std::fabs(x);
    const KsResult law = ks_one_sample(
        magnitude, [t](double x) { return chi1_cdf(x / t); });
    ok = ok && sym.statistic < kKsGate && law.statistic < kKsGate;
    detail += fmt("t=%g: sym D=%.4f, |Z| D=%.4f; ", t, sym.statistic,
                  law.statistic);
  }
  detail += fmt("gate %.2f, m=256, dt=%g, %.0fs", kKsGate, cfg.dt,
                now_seconds() - start);
  report(2, "symmetrized approximation from zero is symmetric with the "
            "correct magnitude law",
         ok, detail);
}

void criterion_3() {
  const double start = now_seconds();
  const Quintuple q = half_flip_quintuple();
  const double cramer = cramer_value(q);
  const bool scalar_ok = std::fabs(cramer - 0.75) < 1e-12;

  // This criterion pins n and the 3 SE gate but not dt.  The clamped
  // square-root Euler scheme carries a mean bias ~ +0.8 sqrt(dt t), which
  // contributes ~ +0.5 sqrt(dt) to the fitted slope; at n = 1e5 the slope
  // SE is ~ 0.005, so dt = 1e-3 leaves z ~ 3.5 from discretization alone.
  // A finer step for this criterion keeps the discretization term well
  // under the statistical gate.
  const double dt3 = 2.5e-4;
  const std::vector<double> ts{0.25, 0.5, 1.0};
  std::vector<double> means, ses;
  for (size_t j = 0; j < ts.size(); ++j) {
    SdeConfig cfg;
    cfg.dt = dt3;
    cfg.horizon = ts[j];
    cfg.seed = kSeed;
    const auto at =
        collect(kN, 30 + j, {ts[j]}, [&](RngStream& rng) {
          return simulate_abs_sde(q, 0.0, cfg, rng);
        });
    const double mean = mean_of(at[0]);
    means.push_back(mean);
    ses.push_back(sd_of(at[0], mean) / std::sqrt(static_cast<double>(kN)));
  }
  const WlsFit fit = wls_fit(ts, means, ses);
  const double z = std::fabs(fit.slope - cramer) / fit.se_slope;
  const bool ok = scalar_ok && z < kSlopeSigmaGate;
  report(3, "mean magnitude from zero grows linearly at the folded drift "
            "rate",
         ok,
         fmt("folded drift %.6g (expect 0.75); slope=%.5f+-%.5f, z=%.2f vs "
             "%.0f SE; intercept=%.5f+-%.5f (not gated); n=%ld, dt=%g, %.0fs",
             cramer, fit.slope, fit.se_slope, z, kSlopeSigmaGate,
             fit.intercept, fit.se_intercept, kN, dt3, now_seconds() - start));
}

void criterion_4() {
  const double start = now_seconds();
  const Quintuple q = half_flip_quintuple();
  bool ok = true;
  std::string detail;
  for (double c : {2.0, 4.0}) {
    ValidateConfig cfg;
    cfg.sde.dt = kDt;
    cfg.sde.horizon = 1.0;
    cfg.sde.n_paths = kN;
    cfg.sde.seed = kSeed;
    cfg.sde.m = 256;
    cfg.ks_threshold = kKsGate;
    cfg.stream_tag = c == 2.0 ? 40 : 45;
    const ReportEntry entry = test_scaling(q, 0.0, c, cfg);
    ok = ok && entry.passed;
    detail += fmt("c=%g: max D=%.4f; ", c, entry.statistic);
  }
  detail += fmt("gate %.2f per time point, m=256, %.0fs", kKsGate,
                now_seconds() - start);
  report(4, "marginals from zero collapse under the self-similar rescaling",
         ok, detail);
}

void criterion_5() {
  const double start = now_seconds();
  // Psi(1) = 1 with sigma^2 = 1 and Pi = 0.5 * delta_{-ln 2}: the
  // compensated jump term contributes 0.5 * (ln 2 - 1/2), so
  // a = 1/2 - 0.5 * (ln 2 - 1/2).  Since 4 * cramer / sigma^2 = 4 >= 2,
  // zero is polar: both routes stay strictly positive and their marginals
  // are continuous.  (A vanishing diffusion instead concentrates ~70% of
  // the mass on a no-jump atom whose O(dt) offset between the two
  // discretizations saturates any KS distance.)
  Quintuple q;
  q.triplet.a = 0.5 - 0.5 * (std::log(2.0) - 0.5);
  q.triplet.sigma2 = 1.0;
  q.triplet.pi.atoms.push_back({-std::log(2.0), 0.5});
  const double psi1 = laplace_exponent(q.triplet, 1.0);

  SdeConfig cfg;
  cfg.dt = kDt;
  cfg.horizon = 1.0;
  cfg.seed = kSeed;
  const std::vector<double> ts{0.5, 1.0};
  const auto lamperti = collect(kN, 50, ts, [&](RngStream& rng) {
    return lamperti_positive(q.triplet, 1.0, cfg.horizon, cfg.dt, rng);
  });
  const auto sde = collect(kN, 51, ts, [&](RngStream& rng) {
    return simulate_sde(q, 1.0, cfg, rng);
  });
  bool ok = std::fabs(psi1 - 1.0) < 1e-12;
  std::string detail = fmt("Psi(1)=%.6g; ", psi1);
  for (size_t j = 0; j < ts.size(); ++j) {
    const KsResult ks = ks_two_sample(lamperti[j], sde[j]);
    ok = ok && ks.statistic < kKsGate;
    detail += fmt("t=%g: D=%.4f; ", ts[j], ks.statistic);
  }
  detail += fmt("gate %.2f, n=%ld, %.0fs", kKsGate, kN,
                now_seconds() - start);
  report(5, "signed equation matches the time-change construction on a "
            "positive process",
         ok, detail);
}

void criterion_6() {
  const double start = now_seconds();
  const Quintuple q = besq_quintuple();  // V = 0, diffusive, absorbing
  const double horizon = 1.0;
  const std::vector<double> ts{0.25, 0.5, 1.0};
  const auto alternating = collect(kN, 60, ts, [&](RngStream& rng) {
    return lamperti_kiu(q, q, 1.0, horizon, kDt, rng);
  });
  const auto positive = collect(kN, 61, ts, [&](RngStream& rng) {
    return lamperti_positive(q.triplet, 1.0, horizon, kDt, rng);
  });
  bool ok = true;
  std::string detail;
  for (size_t j = 0; j < ts.size(); ++j) {
    const KsResult ks = ks_two_sample(alternating[j], positive[j]);
    ok = ok && ks.statistic < kKsGate;
    detail += fmt("t=%g: D=%.4f; ", ts[j], ks.statistic);
  }
  detail += fmt("gate %.2f, n=%ld, %.0fs", kKsGate, kN,
                now_seconds() - start);
  report(6, "alternating construction reduces to the positive construction "
            "without sign flips",
         ok, detail);
}

void criterion_7() {
  const double start = now_seconds();
  GeneratorSpec spec;
  spec.quintuple = besq_quintuple();  // diffusion only: no jumps, no kill
  spec.bumps = {{0.75, 0.5}, {1.25, 0.75}, {2.0, 1.0}};
  ValidateConfig cfg;
  cfg.sde.dt = kDt;
  cfg.sde.horizon = 1.0;
  cfg.sde.n_paths = kN;
  cfg.sde.seed = kSeed;
  cfg.stream_tag = 70;
  const std::vector<ReportEntry> entries =
      test_generator_residual(spec, 1.0, cfg);
  bool ok = true;
  std::string detail;
  for (const ReportEntry& entry : entries) {
    ok = ok && entry.passed;
    detail += fmt("%s: z=%.3f; ", entry.test_name.c_str(), entry.statistic);
  }
  detail += fmt("gate %.0f combined SE (SE + dt budget), n=%ld, dt=%g, %.0fs",
                cfg.residual_sigma, kN, kDt, now_seconds() - start);
  report(7, "martingale residual of smooth bumps is centered for the "
            "diffusive process",
         ok, detail);
}

void criterion_8() {
  const double start = now_seconds();
  Quintuple q;
  q.triplet.a = 0.5;
  q.triplet.sigma2 = 1.0;
  q.v.atoms.push_back({-1.0, 0.6});  // folded drift = 1 > 0
  ValidateConfig cfg;
  cfg.sde.dt = kDt;
  cfg.sde.horizon = 1.0;
  cfg.sde.n_paths = 20000;  // path count is not pinned by the gate
  cfg.sde.seed = kSeed;
  cfg.occupation_threshold = kOccupationGate;
  cfg.occupation_band = 1e-6;
  cfg.stream_tag = 80;
  const ReportEntry entry =
      test_occupation_zero(q, 1e-6, {4, 16, 64, 256}, cfg);
  report(8, "occupation of the zero band vanishes with the approximation "
            "level",
         entry.passed,
         fmt("%s; gate %.2f at m=256, %.0fs", entry.detail.c_str(),
             kOccupationGate, now_seconds() - start));
}

void criterion_9() {
  const double start = now_seconds();

  // Convexity of the Laplace exponent over representative triplets.
  std::vector<LevyTriplet> triplets;
  triplets.push_back(besq_quintuple().triplet);
  {
    Quintuple q;
    q.triplet.a = 1.0 - 0.5 * (std::log(2.0) - 0.5);
    q.triplet.pi.atoms.push_back({-std::log(2.0), 0.5});
    triplets.push_back(q.triplet);
  }
  {
    LevyTriplet t;
    t.a = 0.4;
    t.sigma2 = 1.2;
    t.q = 0.3;
    DensityComponent exp_component;
    exp_component.family = ExponentialDensity{0.8, 1.5};
    exp_component.lo = -2.0;
    exp_component.hi = -0.1;
    t.pi.densities.push_back(exp_component);
    triplets.push_back(t);
  }
  {
    LevyTriplet t;
    t.a = -0.2;
    t.sigma2 = 0.5;
    DensityComponent stable_component;
    stable_component.family = TruncatedStableDensity{0.2, 0.5};
    stable_component.lo = -1.0;
    stable_component.hi = -0.25;
    t.pi.densities.push_back(stable_component);
    triplets.push_back(t);
  }
  double worst_second_difference = 0.0;
  bool convex_ok = true;
  for (const LevyTriplet& triplet : triplets) {
    const int grid = 81;
    std::vector<double> psi(grid);
    double scale = 1.0;
    for (int i = 0; i < grid; ++i) {
      psi[i] = laplace_exponent(triplet, 2.0 * i / (grid - 1));
      scale = std::max(scale, std::fabs(psi[i]));
    }
    for (int i = 1; i + 1 < grid; ++i) {
      const double d2 = (psi[i + 1] - 2.0 * psi[i] + psi[i - 1]) / scale;
      worst_second_difference = std::min(worst_second_difference, d2);
      convex_ok = convex_ok && d2 >= -kScalarTol;
    }
  }

  // Folded-drift identity: cramer_value equals the folded triplet's
  // exponent at 1, for atoms and densities alike.
  std::vector<Quintuple> quintuples;
  quintuples.push_back(half_flip_quintuple());
  {
    Quintuple q = besq_quintuple();
    q.v.atoms.push_back({-1.0, 0.6});
    quintuples.push_back(q);
  }
  {
    Quintuple q;
    q.triplet.a = 0.4;
    q.triplet.sigma2 = 1.2;
    q.triplet.q = 0.3;
    DensityComponent pi_component;
    pi_component.family = ExponentialDensity{0.8, 1.5};
    pi_component.lo = -2.0;
    pi_component.hi = -0.1;
    q.triplet.pi.densities.push_back(pi_component);
    q.triplet.pi.atoms.push_back({-0.9, 0.4});
    DensityComponent v_component;
    v_component.family = ExponentialDensity{0.4, 2.0};
    v_component.lo = -0.9;
    v_component.hi = -0.1;
    q.v.densities.push_back(v_component);
    q.v.atoms.push_back({-0.35, 0.2});
    quintuples.push_back(q);
  }
  double worst_identity = 0.0;
  for (const Quintuple& q : quintuples) {
    const double gap = std::fabs(cramer_value(q) -
                                 laplace_exponent(fold_triplet(q), 1.0));
    worst_identity = std::max(worst_identity, gap);
  }
  const bool identity_ok = worst_identity <= kScalarTol;

  // Manifest determinism: identical config, byte-identical documents,
  // through an on-disk round trip as well.
  RunConfig run;
  run.mode = RunMode::kSimulateAbs;
  run.quintuple = half_flip_quintuple();
  run.z0 = 0.0;
  run.sde.seed = 123;
  const std::string manifest_a = manifest_json(run);
  const std::string manifest_b = manifest_json(run);
  write_text_file("/tmp/ssmp_acceptance_manifest.json", manifest_a);
  const std::string manifest_c =
      read_text_file("/tmp/ssmp_acceptance_manifest.json");
  const std::string echo = run_config_to_json(run);
  const bool manifest_ok = manifest_a == manifest_b &&
                           manifest_a == manifest_c &&
                           run_config_to_json(parse_run_config(echo)) == echo;

  report(9, "scalar layer: convexity, folded-drift identity, manifest "
            "determinism",
         convex_ok && identity_ok && manifest_ok,
         fmt("min scaled second difference %.2e (>= -1e-9); max identity "
             "gap %.2e (<= 1e-9); manifest bytes %s; %.0fs",
             worst_second_difference, worst_identity,
             manifest_ok ? "stable" : "UNSTABLE", now_seconds() - start));
}

void criterion_10() {
  const double start = now_seconds();
  ValidateConfig cfg;
  cfg.sde.seed = kSeed;
  cfg.stream_tag = 100;
  const std::vector<CalibrationResult> results =
      run_null_calibration(kN, 100, cfg);
  bool ok = !results.empty();
  int worst = results.empty() ? 0 : results.front().passes;
  std::string worst_name = results.empty() ? "none" : results.front().test_name;
  for (const CalibrationResult& result : results) {
    ok = ok && result.passed;
    if (result.passes < worst) {
      worst = result.passes;
      worst_name = result.test_name;
    }
  }
  report(10, "null calibration: every decision rule passes on same-law pairs",
         ok,
         fmt("%zu rules x 100 repetitions, worst %s at %d/100 (need >= 95), "
             "n=%ld, %.0fs",
             results.size(), worst_name.c_str(), worst, kN,
             now_seconds() - start));
}

}  // namespace

int main() {
  std::printf("acceptance gates: KS %.2f, slope %.0f SE, occupation %.2f, "
              "scalar %.0e, n=%ld, dt=%g, seed=%llu\n",
              kKsGate, kSlopeSigmaGate, kOccupationGate, kScalarTol, kN, kDt,
              static_cast<unsigned long long>(kSeed));
  criterion_1();
  criterion_2();
  criterion_3();
  criterion_4();
  criterion_5();
  criterion_6();
  criterion_7();
  criterion_8();
  criterion_9();
  criterion_10();
  std::printf("acceptance: %d/10 criteria passed\n", 10 - g_failed);
  return g_failed == 0 ? 0 : 1;
}
