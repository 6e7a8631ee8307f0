#pragma once
// Run configuration: a single JSON document declares the run mode, the
// quintuple (drift, Gaussian coefficient, jump measure, killing rate,
// sign-flip measure), solver settings, validation thresholds, and output
// options.  One document drives everything; command-line flags may override
// only the seed, the path count, and the output directory.
//
// Every schema violation raises ConfigError carrying the JSON-pointer style
// path of the offending node (e.g. "/quintuple/pi/atoms/0/mass"), so a bad
// document is diagnosable without reading the parser.

#include <cstdint>
#include <stdexcept>
#include <string>

#include "ssmp/jump_sde.hpp"
#include "ssmp/measures.hpp"
#include "ssmp/validate.hpp"

namespace ssmp {

class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string path, const std::string& message);

  // JSON-pointer of the node the message refers to ("" = document root).
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

enum class RunMode {
  kSimulateLevy,      // log-magnitude Levy path only
  kSimulateLamperti,  // positive process via the time change
  kSimulateKiu,       // real-valued process via alternating stages
  kSimulateSde,       // signed jump-type equation from z != 0
  kSimulateApprox,    // symmetrized approximation, restarts at zero
  kSimulateAbs,       // nonnegative magnitude equation
  kValidate,          // statistical test battery, writes a report
};

// Mode names as used in the "mode" config key and on the command line:
// simulate-levy, simulate-lamperti, simulate-kiu, simulate-sde,
// simulate-approx, simulate-abs, validate.
const char* run_mode_name(RunMode mode);
// Throws ConfigError(path, ...) listing the valid names.
RunMode parse_run_mode(const std::string& text, const std::string& path);

struct RunConfig {
  RunMode mode = RunMode::kValidate;
  Quintuple quintuple;
  SdeConfig sde;                // also embedded into validation.sde
  ValidateConfig validation;    // thresholds for mode validate
  double z0 = 1.0;              // initial value (nonnegative x0 in abs mode)
  std::string output_dir = "out";
  bool write_csv = true;
  bool write_json = true;

  // Semantic checks on top of the schema: quintuple and solver-config
  // validity plus the mode's initial-value precondition.  Initial-value
  // violations throw ConfigError at path "/z0"; the rest propagate the
  // component exceptions (std::invalid_argument / std::domain_error).
  void validate() const;
};

// Parses a config document from JSON text.  Throws ConfigError on malformed
// JSON, wrong types, unknown keys, or missing required keys ("mode",
// "quintuple").  Does not run RunConfig::validate().
RunConfig parse_run_config(const std::string& json_text);

// Reads the file and parses it; file-system failures become ConfigError
// with path "".
RunConfig load_run_config(const std::string& file_path);

// Normalized document: every field explicit, keys in schema order.  Parsing
// the output reproduces the config; serializing again is byte-identical.
// Throws std::invalid_argument for quintuples holding non-parametric
// (callback-backed) density components, which have no document form.
std::string run_config_to_json(const RunConfig& config);

// Run manifest with keys {config, derived_scalars, seeds, versions}.
// derived_scalars holds psi1 (the Laplace exponent at 1),
// drift_coefficient, cramer_value, the leaves_zero verdict
// (cramer_value > 0: the process leaves zero rather than staying trapped),
// and, when sigma2 > 0, delta_equivalent = 4*cramer_value/sigma2 with the
// zero_polar verdict (delta_equivalent >= 2).  Deterministic: identical
// configs produce byte-identical text.
std::string manifest_json(const RunConfig& config);

}  // namespace ssmp
