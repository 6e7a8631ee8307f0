#include "ssmp/config.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

namespace ssmp {
namespace {

using Json = nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& path, const std::string& message) {
  throw ConfigError(path, message);
}

std::string join(const std::string& path, const std::string& key) {
  return path + "/" + key;
}

std::string join(const std::string& path, size_t index) {
  return path + "/" + std::to_string(index);
}

const char* type_name(const Json& node) {
  switch (node.type()) {
    case Json::value_t::null:
      return "null";
    case Json::value_t::object:
      return "object";
    case Json::value_t::array:
      return "array";
    case Json::value_t::string:
      return "string";
    case Json::value_t::boolean:
      return "boolean";
    case Json::value_t::number_integer:
    case Json::value_t::number_unsigned:
    case Json::value_t::number_float:
      return "number";
    default:
      return "value";
  }
}

void require_object(const Json& node, const std::string& path) {
  if (!node.is_object())
    fail(path, std::string("expected an object, got ") + type_name(node));
}

void require_array(const Json& node, const std::string& path) {
  if (!node.is_array())
    fail(path, std::string("expected an array, got ") + type_name(node));
}

// Strict schema: any key outside the allowed set is an error at that key.
void check_keys(const Json& node, const std::string& path,
                std::initializer_list<const char*> allowed) {
  for (const auto& item : node.items()) {
    bool known = false;
    for (const char* key : allowed) {
      if (item.key() == key) {
        known = true;
        break;
      }
    }
    if (!known) fail(join(path, item.key()), "unknown key");
  }
}

double as_double(const Json& node, const std::string& path) {
  if (!node.is_number())
    fail(path, std::string("expected a number, got ") + type_name(node));
  return node.get<double>();
}

long as_long(const Json& node, const std::string& path) {
  if (!node.is_number_integer())
    fail(path, std::string("expected an integer, got ") + type_name(node));
  return node.get<long>();
}

std::uint64_t as_uint64(const Json& node, const std::string& path) {
  if (node.is_number_unsigned()) return node.get<std::uint64_t>();
  if (node.is_number_integer() && node.get<long long>() >= 0)
    return static_cast<std::uint64_t>(node.get<long long>());
  fail(path, std::string("expected a nonnegative integer, got ") +
                 type_name(node));
}

bool as_bool(const Json& node, const std::string& path) {
  if (!node.is_boolean())
    fail(path, std::string("expected a boolean, got ") + type_name(node));
  return node.get<bool>();
}

std::string as_string(const Json& node, const std::string& path) {
  if (!node.is_string())
    fail(path, std::string("expected a string, got ") + type_name(node));
  return node.get<std::string>();
}

// Returns nullptr when absent; "key present with wrong type" is reported by
// the as_* helper at the joined path.
const Json* find(const Json& node, const char* key) {
  const auto it = node.find(key);
  return it == node.end() ? nullptr : &*it;
}

const Json& require(const Json& node, const std::string& path,
                    const char* key) {
  const Json* child = find(node, key);
  if (child == nullptr) fail(join(path, key), "missing required key");
  return *child;
}

Atom parse_atom(const Json& node, const std::string& path) {
  require_object(node, path);
  check_keys(node, path, {"location", "mass"});
  Atom atom;
  atom.location = as_double(require(node, path, "location"),
                            join(path, "location"));
  atom.mass = as_double(require(node, path, "mass"), join(path, "mass"));
  return atom;
}

DensityComponent parse_density(const Json& node, const std::string& path) {
  require_object(node, path);
  check_keys(node, path,
             {"family", "c", "beta", "alpha", "lo", "hi",
              "small_jump_cutoff"});
  const std::string family =
      as_string(require(node, path, "family"), join(path, "family"));

  DensityComponent density;
  if (family == "exponential") {
    ExponentialDensity params;
    params.c = as_double(require(node, path, "c"), join(path, "c"));
    params.beta = as_double(require(node, path, "beta"), join(path, "beta"));
    if (find(node, "alpha") != nullptr)
      fail(join(path, "alpha"), "not a parameter of the exponential family");
    density.family = params;
    // Unbounded-below support is the family default; "lo" may narrow it.
  } else if (family == "truncated_stable") {
    TruncatedStableDensity params;
    params.c = as_double(require(node, path, "c"), join(path, "c"));
    params.alpha =
        as_double(require(node, path, "alpha"), join(path, "alpha"));
    if (find(node, "beta") != nullptr)
      fail(join(path, "beta"),
           "not a parameter of the truncated stable family");
    density.family = params;
    density.lo = -1.0;
  } else {
    fail(join(path, "family"),
         "unknown density family \"" + family +
             "\" (expected \"exponential\" or \"truncated_stable\")");
  }

  if (const Json* lo = find(node, "lo"))
    density.lo = as_double(*lo, join(path, "lo"));
  if (const Json* hi = find(node, "hi"))
    density.hi = as_double(*hi, join(path, "hi"));
  if (const Json* cut = find(node, "small_jump_cutoff"))
    density.small_jump_cutoff = as_double(*cut, join(path, "small_jump_cutoff"));
  return density;
}

JumpMeasureSpec parse_measure(const Json& node, const std::string& path) {
  require_object(node, path);
  check_keys(node, path, {"atoms", "densities"});
  JumpMeasureSpec measure;
  if (const Json* atoms = find(node, "atoms")) {
    const std::string atoms_path = join(path, "atoms");
    require_array(*atoms, atoms_path);
    for (size_t i = 0; i < atoms->size(); ++i)
      measure.atoms.push_back(parse_atom((*atoms)[i], join(atoms_path, i)));
  }
  if (const Json* densities = find(node, "densities")) {
    const std::string densities_path = join(path, "densities");
    require_array(*densities, densities_path);
    for (size_t i = 0; i < densities->size(); ++i)
      measure.densities.push_back(
          parse_density((*densities)[i], join(densities_path, i)));
  }
  return measure;
}

Quintuple parse_quintuple(const Json& node, const std::string& path) {
  require_object(node, path);
  check_keys(node, path, {"a", "sigma2", "q", "pi", "v"});
  Quintuple quintuple;
  if (const Json* a = find(node, "a"))
    quintuple.triplet.a = as_double(*a, join(path, "a"));
  if (const Json* sigma2 = find(node, "sigma2"))
    quintuple.triplet.sigma2 = as_double(*sigma2, join(path, "sigma2"));
  if (const Json* q = find(node, "q"))
    quintuple.triplet.q = as_double(*q, join(path, "q"));
  if (const Json* pi = find(node, "pi"))
    quintuple.triplet.pi = parse_measure(*pi, join(path, "pi"));
  if (const Json* v = find(node, "v"))
    quintuple.v = parse_measure(*v, join(path, "v"));
  return quintuple;
}

void parse_sde(const Json& node, const std::string& path, SdeConfig* sde) {
  require_object(node, path);
  check_keys(node, path,
             {"dt", "horizon", "n_paths", "seed", "cutoff", "m", "rate_cap",
              "restart_up_prob", "record_jumps", "threads"});
  if (const Json* dt = find(node, "dt"))
    sde->dt = as_double(*dt, join(path, "dt"));
  if (const Json* horizon = find(node, "horizon"))
    sde->horizon = as_double(*horizon, join(path, "horizon"));
  if (const Json* n_paths = find(node, "n_paths"))
    sde->n_paths = as_long(*n_paths, join(path, "n_paths"));
  if (const Json* seed = find(node, "seed"))
    sde->seed = as_uint64(*seed, join(path, "seed"));
  if (const Json* cutoff = find(node, "cutoff"))
    sde->cutoff = as_double(*cutoff, join(path, "cutoff"));
  if (const Json* m = find(node, "m")) sde->m = as_long(*m, join(path, "m"));
  if (const Json* rate_cap = find(node, "rate_cap"))
    sde->rate_cap = as_double(*rate_cap, join(path, "rate_cap"));
  if (const Json* skew = find(node, "restart_up_prob"))
    sde->restart_up_prob = as_double(*skew, join(path, "restart_up_prob"));
  if (const Json* record = find(node, "record_jumps"))
    sde->record_jumps = as_bool(*record, join(path, "record_jumps"));
  if (const Json* threads = find(node, "threads"))
    sde->threads = static_cast<int>(as_long(*threads, join(path, "threads")));
}

void parse_validate_block(const Json& node, const std::string& path,
                          ValidateConfig* validation) {
  require_object(node, path);
  check_keys(node, path,
             {"ks_threshold", "p_floor", "z_score_limit", "residual_sigma",
              "occupation_threshold", "occupation_band", "time_points",
              "stream_tag"});
  if (const Json* v = find(node, "ks_threshold"))
    validation->ks_threshold = as_double(*v, join(path, "ks_threshold"));
  if (const Json* v = find(node, "p_floor"))
    validation->p_floor = as_double(*v, join(path, "p_floor"));
  if (const Json* v = find(node, "z_score_limit"))
    validation->z_score_limit = as_double(*v, join(path, "z_score_limit"));
  if (const Json* v = find(node, "residual_sigma"))
    validation->residual_sigma = as_double(*v, join(path, "residual_sigma"));
  if (const Json* v = find(node, "occupation_threshold"))
    validation->occupation_threshold =
        as_double(*v, join(path, "occupation_threshold"));
  if (const Json* v = find(node, "occupation_band"))
    validation->occupation_band =
        as_double(*v, join(path, "occupation_band"));
  if (const Json* v = find(node, "time_points")) {
    const std::string points_path = join(path, "time_points");
    require_array(*v, points_path);
    validation->time_points.clear();
    for (size_t i = 0; i < v->size(); ++i)
      validation->time_points.push_back(
          as_double((*v)[i], join(points_path, i)));
  }
  if (const Json* v = find(node, "stream_tag"))
    validation->stream_tag = as_uint64(*v, join(path, "stream_tag"));
}

RunConfig parse_document(const Json& document) {
  require_object(document, "");
  check_keys(document, "",
             {"mode", "quintuple", "z0", "sde", "validate", "output_dir",
              "formats"});

  RunConfig config;
  config.mode = parse_run_mode(
      as_string(require(document, "", "mode"), "/mode"), "/mode");
  config.quintuple = parse_quintuple(require(document, "", "quintuple"),
                                     "/quintuple");
  if (const Json* z0 = find(document, "z0"))
    config.z0 = as_double(*z0, "/z0");
  if (const Json* sde = find(document, "sde"))
    parse_sde(*sde, "/sde", &config.sde);
  if (const Json* validate = find(document, "validate"))
    parse_validate_block(*validate, "/validate", &config.validation);
  if (const Json* out = find(document, "output_dir"))
    config.output_dir = as_string(*out, "/output_dir");
  if (const Json* formats = find(document, "formats")) {
    require_array(*formats, "/formats");
    config.write_csv = false;
    config.write_json = false;
    for (size_t i = 0; i < formats->size(); ++i) {
      const std::string format =
          as_string((*formats)[i], join("/formats", i));
      if (format == "csv")
        config.write_csv = true;
      else if (format == "json")
        config.write_json = true;
      else
        fail(join("/formats", i),
             "unknown format \"" + format + "\" (expected \"csv\" or "
             "\"json\")");
    }
  }
  config.validation.sde = config.sde;
  return config;
}

Json density_to_json(const DensityComponent& density) {
  Json node;
  if (const auto* exp = std::get_if<ExponentialDensity>(&density.family)) {
    node["family"] = "exponential";
    node["c"] = exp->c;
    node["beta"] = exp->beta;
  } else if (const auto* stable =
                 std::get_if<TruncatedStableDensity>(&density.family)) {
    node["family"] = "truncated_stable";
    node["c"] = stable->c;
    node["alpha"] = stable->alpha;
  } else {
    throw std::invalid_argument(
        "config: callback-backed density components have no document form");
  }
  node["lo"] = density.lo;
  node["hi"] = density.hi;
  node["small_jump_cutoff"] = density.small_jump_cutoff;
  return node;
}

Json measure_to_json(const JumpMeasureSpec& measure) {
  Json node;
  node["atoms"] = Json::array();
  for (const Atom& atom : measure.atoms)
    node["atoms"].push_back({{"location", atom.location},
                             {"mass", atom.mass}});
  node["densities"] = Json::array();
  for (const DensityComponent& density : measure.densities)
    node["densities"].push_back(density_to_json(density));
  return node;
}

}  // namespace

ConfigError::ConfigError(std::string path, const std::string& message)
    : std::runtime_error("config error at \"" + path + "\": " + message),
      path_(std::move(path)) {}

const char* run_mode_name(RunMode mode) {
  switch (mode) {
    case RunMode::kSimulateLevy:
      return "simulate-levy";
    case RunMode::kSimulateLamperti:
      return "simulate-lamperti";
    case RunMode::kSimulateKiu:
      return "simulate-kiu";
    case RunMode::kSimulateSde:
      return "simulate-sde";
    case RunMode::kSimulateApprox:
      return "simulate-approx";
    case RunMode::kSimulateAbs:
      return "simulate-abs";
    case RunMode::kValidate:
      return "validate";
  }
  return "unknown";
}

RunMode parse_run_mode(const std::string& text, const std::string& path) {
  static constexpr RunMode kModes[] = {
      RunMode::kSimulateLevy, RunMode::kSimulateLamperti,
      RunMode::kSimulateKiu,  RunMode::kSimulateSde,
      RunMode::kSimulateApprox, RunMode::kSimulateAbs, RunMode::kValidate};
  for (RunMode mode : kModes)
    if (text == run_mode_name(mode)) return mode;
  std::string names;
  for (RunMode mode : kModes) {
    if (!names.empty()) names += ", ";
    names += run_mode_name(mode);
  }
  fail(path, "unknown mode \"" + text + "\" (expected one of: " + names + ")");
}

void RunConfig::validate() const {
  quintuple.validate();
  sde.validate();
  switch (mode) {
    case RunMode::kSimulateLamperti:
      if (!(z0 > 0.0))
        throw ConfigError("/z0",
                          "simulate-lamperti requires a positive initial "
                          "value");
      break;
    case RunMode::kSimulateKiu:
      if (z0 == 0.0)
        throw ConfigError("/z0",
                          "simulate-kiu requires a nonzero initial value");
      break;
    case RunMode::kSimulateSde:
      if (z0 == 0.0)
        throw ConfigError("/z0",
                          "simulate-sde requires a nonzero initial value; "
                          "use simulate-approx to start from zero");
      break;
    case RunMode::kSimulateAbs:
      if (z0 < 0.0)
        throw ConfigError("/z0",
                          "simulate-abs requires a nonnegative initial "
                          "value");
      break;
    default:
      break;
  }
}

RunConfig parse_run_config(const std::string& json_text) {
  Json document;
  try {
    document = Json::parse(json_text);
  } catch (const nlohmann::json::parse_error& error) {
    fail("", std::string("invalid JSON: ") + error.what());
  }
  return parse_document(document);
}

RunConfig load_run_config(const std::string& file_path) {
  std::ifstream in(file_path, std::ios::binary);
  if (!in) fail("", "cannot open config file \"" + file_path + "\"");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_run_config(text.str());
}

std::string run_config_to_json(const RunConfig& config) {
  Json document;
  document["mode"] = run_mode_name(config.mode);

  Json quintuple;
  quintuple["a"] = config.quintuple.triplet.a;
  quintuple["sigma2"] = config.quintuple.triplet.sigma2;
  quintuple["q"] = config.quintuple.triplet.q;
  quintuple["pi"] = measure_to_json(config.quintuple.triplet.pi);
  quintuple["v"] = measure_to_json(config.quintuple.v);
  document["quintuple"] = quintuple;

  document["z0"] = config.z0;

  Json sde;
  sde["dt"] = config.sde.dt;
  sde["horizon"] = config.sde.horizon;
  sde["n_paths"] = config.sde.n_paths;
  sde["seed"] = config.sde.seed;
  sde["cutoff"] = config.sde.cutoff;
  sde["m"] = config.sde.m;
  sde["rate_cap"] = config.sde.rate_cap;
  sde["restart_up_prob"] = config.sde.restart_up_prob;
  sde["record_jumps"] = config.sde.record_jumps;
  sde["threads"] = config.sde.threads;
  document["sde"] = sde;

  Json validate;
  validate["ks_threshold"] = config.validation.ks_threshold;
  validate["p_floor"] = config.validation.p_floor;
  validate["z_score_limit"] = config.validation.z_score_limit;
  validate["residual_sigma"] = config.validation.residual_sigma;
  validate["occupation_threshold"] = config.validation.occupation_threshold;
  validate["occupation_band"] = config.validation.occupation_band;
  validate["time_points"] = config.validation.time_points;
  validate["stream_tag"] = config.validation.stream_tag;
  document["validate"] = validate;

  document["output_dir"] = config.output_dir;
  Json formats = Json::array();
  if (config.write_csv) formats.push_back("csv");
  if (config.write_json) formats.push_back("json");
  document["formats"] = formats;

  return document.dump(2) + "\n";
}

std::string manifest_json(const RunConfig& config) {
  Json manifest;
  manifest["config"] = Json::parse(run_config_to_json(config));

  const double psi1 = laplace_exponent(config.quintuple.triplet, 1.0);
  const double kappa = drift_coefficient(config.quintuple);
  const double cramer = cramer_value(config.quintuple);
  const double sigma2 = config.quintuple.triplet.sigma2;
  Json scalars;
  scalars["psi1"] = psi1;
  scalars["drift_coefficient"] = kappa;
  scalars["cramer_value"] = cramer;
  scalars["leaves_zero"] = cramer > 0.0;
  if (sigma2 > 0.0) {
    const double delta_equivalent = 4.0 * cramer / sigma2;
    scalars["delta_equivalent"] = delta_equivalent;
    scalars["zero_polar"] = delta_equivalent >= 2.0;
  } else {
    scalars["delta_equivalent"] = nullptr;
    scalars["zero_polar"] = nullptr;
  }
  manifest["derived_scalars"] = scalars;

  Json seeds;
  seeds["seed"] = config.sde.seed;
  seeds["stream_layout"] = "per-path stream id; validation tests use "
                           "(tag << 32) | (batch << 28) | path_index";
  manifest["seeds"] = seeds;

  Json versions;
  versions["ssmp"] = "1.0.0";
  versions["manifest_format"] = 1;
  manifest["versions"] = versions;

  return manifest.dump(2) + "\n";
}

}  // namespace ssmp
