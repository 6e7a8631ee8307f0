// Command-line entry point: a single JSON config document declares the run;
// flags override only the seed, the path count, and the output directory.
//
//   ssmp <mode> --config <file> [--seed N] [--paths N] [--out DIR]
//
// Every run writes <out>/manifest.json (config echo, derived scalars, seeds,
// versions).  Simulation modes add paths.csv and summary.json; validate mode
// adds report.json and report.txt and exits nonzero when any entry fails.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "ssmp/batch.hpp"
#include "ssmp/config.hpp"
#include "ssmp/jump_sde.hpp"
#include "ssmp/lamperti.hpp"
#include "ssmp/levy_sim.hpp"
#include "ssmp/measures.hpp"
#include "ssmp/path_io.hpp"
#include "ssmp/rng.hpp"
#include "ssmp/sample_path.hpp"
#include "ssmp/validate.hpp"

namespace {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;
using ssmp::RunConfig;
using ssmp::RunMode;

std::vector<ssmp::SamplePath> run_sample_batch(const RunConfig& config) {
  const ssmp::SdeConfig& sde = config.sde;
  std::vector<ssmp::SamplePath> paths(sde.n_paths);
  ssmp::parallel_paths(sde.n_paths, sde.threads, [&](long i) {
    ssmp::RngStream rng(sde.seed, static_cast<std::uint64_t>(i));
    switch (config.mode) {
      case RunMode::kSimulateLamperti:
        paths[i] = ssmp::lamperti_positive(config.quintuple.triplet,
                                           config.z0, sde.horizon, sde.dt,
                                           rng);
        break;
      case RunMode::kSimulateKiu:
        paths[i] = ssmp::lamperti_kiu(config.quintuple, config.quintuple,
                                      config.z0, sde.horizon, sde.dt, rng);
        break;
      case RunMode::kSimulateSde:
        paths[i] = ssmp::simulate_sde(config.quintuple, config.z0, sde, rng);
        break;
      case RunMode::kSimulateApprox:
        paths[i] = ssmp::simulate_approx_sde(config.quintuple, config.z0,
                                             sde, rng);
        break;
      case RunMode::kSimulateAbs:
        paths[i] = ssmp::simulate_abs_sde(config.quintuple, config.z0, sde,
                                          rng);
        break;
      default:
        break;
    }
  });
  return paths;
}

Json marginal_stats(const std::vector<double>& samples) {
  Json node;
  node["n"] = samples.size();
  if (samples.empty()) {
    node["mean"] = nullptr;
    node["stddev"] = nullptr;
    node["min"] = nullptr;
    node["max"] = nullptr;
    return node;
  }
  double sum = 0.0;
  for (double x : samples) sum += x;
  const double mean = sum / static_cast<double>(samples.size());
  double ss = 0.0;
  for (double x : samples) ss += (x - mean) * (x - mean);
  const double stddev =
      samples.size() > 1
          ? std::sqrt(ss / static_cast<double>(samples.size() - 1))
          : 0.0;
  node["mean"] = mean;
  node["stddev"] = stddev;
  node["min"] = *std::min_element(samples.begin(), samples.end());
  node["max"] = *std::max_element(samples.begin(), samples.end());
  return node;
}

Json summary_for_paths(const RunConfig& config,
                       const std::vector<ssmp::SamplePath>& paths) {
  Json summary;
  summary["config"] = Json::parse(ssmp::run_config_to_json(config));
  summary["seeds"] = {{"seed", config.sde.seed},
                      {"streams", "path index 0 .. n_paths - 1"}};
  Json marginals = Json::array();
  for (double t : config.validation.resolved_time_points()) {
    std::vector<double> samples;
    samples.reserve(paths.size());
    long absorbed = 0;
    for (const ssmp::SamplePath& path : paths) {
      samples.push_back(path.value_at(t));
      if (path.absorbed && path.absorption_time <= t) ++absorbed;
    }
    Json entry = marginal_stats(samples);
    entry["t"] = t;
    entry["absorbed_fraction"] =
        paths.empty() ? 0.0
                      : static_cast<double>(absorbed) /
                            static_cast<double>(paths.size());
    marginals.push_back(entry);
  }
  summary["marginals"] = marginals;
  return summary;
}

Json summary_for_levy(const RunConfig& config,
                      const std::vector<ssmp::LevyPath>& paths) {
  Json summary;
  summary["config"] = Json::parse(ssmp::run_config_to_json(config));
  summary["seeds"] = {{"seed", config.sde.seed},
                      {"streams", "path index 0 .. n_paths - 1"}};
  Json marginals = Json::array();
  for (double t : config.validation.resolved_time_points()) {
    std::vector<double> samples;
    long killed = 0;
    for (const ssmp::LevyPath& path : paths) {
      if (path.killed && path.kill_time <= t) {
        ++killed;
        continue;
      }
      // Value at the last node <= t (cadlag lookup).
      size_t lo = 0;
      for (size_t k = 0; k < path.times.size(); ++k)
        if (path.times[k] <= t) lo = k;
      samples.push_back(path.values[lo]);
    }
    Json entry = marginal_stats(samples);
    entry["t"] = t;
    entry["killed_fraction"] =
        paths.empty() ? 0.0
                      : static_cast<double>(killed) /
                            static_cast<double>(paths.size());
    marginals.push_back(entry);
  }
  summary["marginals"] = marginals;
  return summary;
}

int run(const RunConfig& config) {
  const fs::path out_dir(config.output_dir);
  fs::create_directories(out_dir);

  ssmp::write_text_file((out_dir / "manifest.json").string(),
                        ssmp::manifest_json(config));
  std::printf("wrote %s\n", (out_dir / "manifest.json").string().c_str());

  if (config.mode == RunMode::kSimulateApprox &&
      ssmp::cramer_value(config.quintuple) <= 0.0)
    std::fprintf(stderr,
                 "warning: cramer_value <= 0; the limiting process may be "
                 "trapped at zero\n");

  if (config.mode == RunMode::kValidate) {
    const ssmp::ValidationReport report =
        ssmp::run_standard_validation(config.quintuple, config.validation);
    const std::string table = report.to_table();
    std::fputs(table.c_str(), stdout);
    ssmp::write_text_file((out_dir / "report.txt").string(), table);
    std::printf("wrote %s\n", (out_dir / "report.txt").string().c_str());
    if (config.write_json) {
      ssmp::write_text_file((out_dir / "report.json").string(),
                            report.to_json() + "\n");
      std::printf("wrote %s\n", (out_dir / "report.json").string().c_str());
    }
    return report.all_passed() ? 0 : 2;
  }

  if (config.mode == RunMode::kSimulateLevy) {
    std::vector<ssmp::LevyPath> paths(config.sde.n_paths);
    ssmp::parallel_paths(config.sde.n_paths, config.sde.threads, [&](long i) {
      ssmp::RngStream rng(config.sde.seed, static_cast<std::uint64_t>(i));
      paths[i] = ssmp::simulate_levy(config.quintuple.triplet,
                                     config.sde.horizon, config.sde.dt, rng);
    });
    if (config.write_csv) {
      ssmp::write_text_file((out_dir / "paths.csv").string(),
                            ssmp::levy_paths_to_csv(paths));
      std::printf("wrote %s\n", (out_dir / "paths.csv").string().c_str());
    }
    if (config.write_json) {
      ssmp::write_text_file((out_dir / "summary.json").string(),
                            summary_for_levy(config, paths).dump(2) + "\n");
      std::printf("wrote %s\n", (out_dir / "summary.json").string().c_str());
    }
    return 0;
  }

  const std::vector<ssmp::SamplePath> paths = run_sample_batch(config);
  if (config.write_csv) {
    ssmp::write_text_file((out_dir / "paths.csv").string(),
                          ssmp::paths_to_csv(paths));
    std::printf("wrote %s\n", (out_dir / "paths.csv").string().c_str());
  }
  if (config.write_json) {
    ssmp::write_text_file((out_dir / "summary.json").string(),
                          summary_for_paths(config, paths).dump(2) + "\n");
    std::printf("wrote %s\n", (out_dir / "summary.json").string().c_str());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"simulation and verification toolkit for symmetric "
               "real-valued self-similar Markov processes"};
  app.require_subcommand(1);

  std::string config_path;
  std::uint64_t seed_override = 0;
  long paths_override = 0;
  std::string out_override;

  const std::pair<const char*, const char*> modes[] = {
      {"simulate-levy", "log-magnitude paths of the driving process"},
      {"simulate-lamperti", "positive process via the time change"},
      {"simulate-kiu", "real-valued process via alternating stages"},
      {"simulate-sde", "signed jump-type equation from z != 0"},
      {"simulate-approx", "symmetrized approximation with restarts at zero"},
      {"simulate-abs", "nonnegative magnitude equation"},
      {"validate", "statistical test battery with a pass/fail report"},
  };
  for (const auto& [name, description] : modes) {
    CLI::App* sub = app.add_subcommand(name, description);
    sub->add_option("--config", config_path, "JSON config document")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--seed", seed_override, "override the base seed");
    sub->add_option("--paths", paths_override, "override n_paths")
        ->check(CLI::PositiveNumber);
    sub->add_option("--out", out_override, "override the output directory");
  }

  CLI11_PARSE(app, argc, argv);
  CLI::App* chosen = app.get_subcommands().front();

  try {
    RunConfig config = ssmp::load_run_config(config_path);
    if (config.mode != ssmp::parse_run_mode(chosen->get_name(), "/mode")) {
      std::fprintf(stderr,
                   "error: mode mismatch: command line says \"%s\" but the "
                   "config document says \"%s\"\n",
                   chosen->get_name().c_str(),
                   ssmp::run_mode_name(config.mode));
      return 1;
    }
    if (chosen->count("--seed") > 0) config.sde.seed = seed_override;
    if (chosen->count("--paths") > 0) config.sde.n_paths = paths_override;
    if (chosen->count("--out") > 0) config.output_dir = out_override;
    config.validation.sde = config.sde;
    config.validate();
    return run(config);
  } catch (const std::exception& error) {
    std::fprintf(stderr, "error: %s\n", error.what());
    return 1;
  }
}
