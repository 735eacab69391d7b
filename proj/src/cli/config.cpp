#include "stablentk/cli/config.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <set>

#include "stablentk/inputs.hpp"
#include "stablentk/io.hpp"

extern char** environ;

namespace stablentk::cli {

using nlohmann::ordered_json;

namespace {

constexpr std::uint64_t kTagInputs = 0x696e70;
const char* const kEnvPrefix = "STABLENTK_";

template <class T>
T get(const ordered_json& j, const char* key, const std::string& path) {
  const std::string full = path.empty() ? key : path + "." + key;
  if (!j.contains(key)) throw ConfigError("missing config key '" + full + "'");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError("config key '" + full + "' has the wrong type: " + j.at(key).dump());
  }
}

bool is_count(const ordered_json& v) {
  return v.is_number_unsigned() || (v.is_number_integer() && v.get<long long>() >= 0);
}

const ordered_json& at_key(const ordered_json& j, const char* key, const std::string& full) {
  if (!j.contains(key)) throw ConfigError("missing config key '" + full + "'");
  return j.at(key);
}

std::size_t get_count(const ordered_json& j, const char* key, const std::string& path) {
  const std::string full = path.empty() ? key : path + "." + key;
  const auto& v = at_key(j, key, full);
  if (!is_count(v)) throw ConfigError("config key '" + full + "' must be a nonnegative integer, got " + v.dump());
  return v.get<std::size_t>();
}

double get_number(const ordered_json& j, const char* key, const std::string& path) {
  const std::string full = path.empty() ? key : path + "." + key;
  if (!j.contains(key)) throw ConfigError("missing config key '" + full + "'");
  const auto& v = j.at(key);
  if (!v.is_number()) throw ConfigError("config key '" + full + "' must be a number, got " + v.dump());
  return v.get<double>();
}

std::vector<std::size_t> get_counts(const ordered_json& j, const char* key, const std::string& path) {
  const std::string full = path.empty() ? key : path + "." + key;
  const auto& v = at_key(j, key, full);
  if (!v.is_array()) throw ConfigError("config key '" + full + "' must be an array of integers");
  std::vector<std::size_t> out;
  for (const auto& e : v) {
    if (!is_count(e)) throw ConfigError("config key '" + full + "' must hold nonnegative integers");
    out.push_back(e.get<std::size_t>());
  }
  return out;
}

void require(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

void require_one_of(const std::string& value, std::initializer_list<const char*> allowed, const std::string& key) {
  for (const char* a : allowed)
    if (value == a) return;
  std::string list;
  for (const char* a : allowed) list += (list.empty() ? "" : ", ") + std::string(a);
  throw ConfigError("config key '" + key + "' must be one of {" + list + "}, got '" + value + "'");
}

void require_increasing_widths(const std::vector<std::size_t>& w, const std::string& key, bool allow_empty) {
  require(allow_empty || !w.empty(), "config key '" + key + "' must not be empty");
  for (std::size_t i = 0; i < w.size(); ++i) {
    require(w[i] >= 2, "config key '" + key + "' entries must be >= 2");
    require(i == 0 || w[i] > w[i - 1], "config key '" + key + "' must be strictly increasing");
  }
}

std::string upper(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::toupper(c); });
  return s;
}

// Finds the config key whose upper-cased name equals `name` among `obj`'s keys.
ordered_json* find_key(ordered_json& obj, const std::string& name) {
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (upper(it.key()) == name) return &it.value();
  return nullptr;
}

}  // namespace

ordered_json to_json(const ExperimentConfig& c) {
  ordered_json j;
  j["experiment"] = c.experiment;
  j["alpha"] = c.alpha;
  j["widths"] = c.widths;
  j["samples"] = c.samples;
  j["inputs"] = {{"generator", c.inputs.generator}, {"d", c.inputs.d}, {"k", c.inputs.k},
                 {"columns", c.inputs.columns}};
  j["seed"] = c.seed;
  j["workers"] = c.workers;
  j["out"] = c.out;
  j["grid_points"] = c.grid_points;
  j["hill_tail_fraction"] = c.hill_tail_fraction;
  j["orthant_samples"] = c.orthant_samples;
  j["prefactor_mode"] = c.prefactor_mode;
  j["calibration_width"] = c.calibration_width;
  j["theorem3"] = {{"width", c.theorem3.width}, {"seeds", c.theorem3.seeds}};
  const TrainSpec& t = c.train;
  j["train"] = {{"width", t.width},
                {"seeds", t.seeds},
                {"dt", t.dt},
                {"t_max", t.t_max},
                {"record_every", t.record_every},
                {"eta_mode", t.eta_mode},
                {"eta", t.eta},
                {"target", t.target},
                {"drift_widths", t.drift_widths},
                {"drift_seeds", t.drift_seeds},
                {"write_trajectories", t.write_trajectories}};
  j["paths"] = {{"alphas", c.paths.alphas}, {"width", c.paths.width}, {"grid", c.paths.grid},
                {"seeds", c.paths.seeds}};
  return j;
}

ordered_json default_config_json() { return to_json(ExperimentConfig{}); }

void merge_config(ordered_json& base, const ordered_json& patch, const std::string& where) {
  if (!patch.is_object()) throw ConfigError(where + ": configuration must be a JSON object");
  for (auto it = patch.begin(); it != patch.end(); ++it) {
    const std::string path = where.empty() ? it.key() : where + "." + it.key();
    if (!base.contains(it.key())) throw ConfigError("unknown config key '" + path + "'");
    ordered_json& slot = base[it.key()];
    if (slot.is_object() && it.value().is_object())
      merge_config(slot, it.value(), path);
    else
      slot = it.value();
  }
}

void apply_env_overrides(ordered_json& config, const std::map<std::string, std::string>& env) {
  const std::string prefix = kEnvPrefix;
  for (const auto& [name, value] : env) {
    if (name.rfind(prefix, 0) != 0) continue;
    std::string rest = name.substr(prefix.size());
    ordered_json* node = &config;
    std::string path;
    for (;;) {
      const auto sep = rest.find("__");
      const std::string part = rest.substr(0, sep);
      if (!node->is_object()) throw ConfigError("environment variable " + name + " does not name a config key");
      ordered_json* next = find_key(*node, part);
      if (!next) throw ConfigError("environment variable " + name + " does not name a config key");
      node = next;
      if (sep == std::string::npos) break;
      rest = rest.substr(sep + 2);
    }
    ordered_json parsed = ordered_json::parse(value, nullptr, false);
    if (parsed.is_discarded() || (node->is_string() && !parsed.is_string())) parsed = value;
    // Comma-separated lists are accepted for array keys.
    if (node->is_array() && !parsed.is_array()) {
      ordered_json arr = ordered_json::array();
      std::size_t start = 0;
      while (start <= value.size()) {
        const auto comma = value.find(',', start);
        const std::string item = value.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
        ordered_json e = ordered_json::parse(item, nullptr, false);
        if (e.is_discarded()) throw ConfigError("environment variable " + name + ": cannot parse list item '" + item + "'");
        arr.push_back(e);
        if (comma == std::string::npos) break;
        start = comma + 1;
      }
      parsed = arr;
    }
    *node = parsed;
  }
}

std::map<std::string, std::string> stablentk_environment() {
  std::map<std::string, std::string> env;
  for (char** e = environ; e && *e; ++e) {
    const std::string kv = *e;
    const auto eq = kv.find('=');
    if (eq == std::string::npos) continue;
    const std::string name = kv.substr(0, eq);
    if (name.rfind(kEnvPrefix, 0) == 0) env[name] = kv.substr(eq + 1);
  }
  return env;
}

ExperimentConfig parse_config(const ordered_json& j) {
  ExperimentConfig c;
  c.experiment = get<std::string>(j, "experiment", "");
  require_one_of(c.experiment, {"limit-dist", "ntk-limit", "train", "paths", "calibrate"}, "experiment");
  c.alpha = get_number(j, "alpha", "");
  require(c.alpha > 0.0 && c.alpha <= 2.0, "config key 'alpha' must lie in (0, 2], got " + format_double(c.alpha));
  c.widths = get_counts(j, "widths", "");
  require_increasing_widths(c.widths, "widths", false);
  c.samples = get_count(j, "samples", "");
  require(c.samples >= 100, "config key 'samples' must be >= 100");

  const ordered_json& in = j.at("inputs");
  c.inputs.generator = get<std::string>(in, "generator", "inputs");
  require_one_of(c.inputs.generator, {"explicit", "random-unit-sphere", "orthonormal", "axis-aligned"},
                 "inputs.generator");
  c.inputs.d = get_count(in, "d", "inputs");
  c.inputs.k = get_count(in, "k", "inputs");
  c.inputs.columns = get<std::vector<std::vector<double>>>(in, "columns", "inputs");
  if (c.inputs.generator == "explicit") {
    require(!c.inputs.columns.empty(), "inputs.columns must be non-empty for the explicit generator");
    for (const auto& col : c.inputs.columns)
      require(col.size() == c.inputs.columns.front().size() && !col.empty(),
              "inputs.columns must all have the same nonzero length");
    c.inputs.k = c.inputs.columns.size();
    c.inputs.d = c.inputs.columns.front().size();
  } else {
    require(c.inputs.columns.empty(), "inputs.columns is only used with the explicit generator");
  }
  require(c.inputs.d >= 1 && c.inputs.k >= 1, "inputs.d and inputs.k must be >= 1");
  require(c.inputs.k <= 20, "inputs.k must be <= 20");
  if (c.inputs.generator == "orthonormal" || c.inputs.generator == "axis-aligned")
    require(c.inputs.k <= c.inputs.d, "inputs.k must be <= inputs.d for the " + c.inputs.generator + " generator");

  c.seed = get<std::uint64_t>(j, "seed", "");
  const auto& workers = j.at("workers");
  require(workers.is_number_integer() && workers.get<long long>() >= 0, "config key 'workers' must be >= 0");
  c.workers = workers.get<int>();
  c.out = get<std::string>(j, "out", "");
  require(!c.out.empty(), "config key 'out' must not be empty");
  c.grid_points = get_count(j, "grid_points", "");
  require(c.grid_points >= 2, "config key 'grid_points' must be >= 2");
  c.hill_tail_fraction = get_number(j, "hill_tail_fraction", "");
  require(c.hill_tail_fraction > 0.0 && c.hill_tail_fraction <= 0.05, "config key 'hill_tail_fraction' must lie in (0, 0.05]");
  c.orthant_samples = get_count(j, "orthant_samples", "");
  require(c.orthant_samples >= 10000, "config key 'orthant_samples' must be >= 10000");
  c.prefactor_mode = get<std::string>(j, "prefactor_mode", "");
  require_one_of(c.prefactor_mode, {"calibrate", "paper_literal", "tail_consistent"}, "prefactor_mode");
  c.calibration_width = get_count(j, "calibration_width", "");
  require(c.calibration_width >= 65536, "config key 'calibration_width' must be >= 65536");

  const ordered_json& t3 = j.at("theorem3");
  c.theorem3.width = get_count(t3, "width", "theorem3");
  c.theorem3.seeds = get_count(t3, "seeds", "theorem3");
  require(c.theorem3.width >= 2 && c.theorem3.seeds >= 1, "theorem3.width must be >= 2 and theorem3.seeds >= 1");

  const ordered_json& tr = j.at("train");
  TrainSpec& t = c.train;
  t.width = get_count(tr, "width", "train");
  t.seeds = get_count(tr, "seeds", "train");
  t.dt = get_number(tr, "dt", "train");
  t.t_max = get_number(tr, "t_max", "train");
  t.record_every = get_count(tr, "record_every", "train");
  t.eta_mode = get<std::string>(tr, "eta_mode", "train");
  t.eta = get_number(tr, "eta", "train");
  t.target = get<std::string>(tr, "target", "train");
  t.drift_widths = get_counts(tr, "drift_widths", "train");
  t.drift_seeds = get_count(tr, "drift_seeds", "train");
  t.write_trajectories = get<bool>(tr, "write_trajectories", "train");
  require(t.width >= 2, "train.width must be >= 2");
  require(t.seeds >= 1, "train.seeds must be >= 1");
  require(t.dt >= 0.0, "train.dt must be >= 0 (0 selects the default step)");
  require(t.t_max > 0.0, "train.t_max must be positive");
  require(t.dt == 0.0 || t.t_max >= t.dt, "train.t_max must be >= train.dt");
  require(t.record_every >= 1, "train.record_every must be >= 1");
  require_one_of(t.eta_mode, {"paper", "custom"}, "train.eta_mode");
  require(t.eta > 0.0, "train.eta must be positive");
  require_one_of(t.target, {"random", "zero-residual"}, "train.target");
  require_increasing_widths(t.drift_widths, "train.drift_widths", true);
  require(t.drift_seeds >= 1, "train.drift_seeds must be >= 1");

  const ordered_json& p = j.at("paths");
  c.paths.alphas = get<std::vector<double>>(p, "alphas", "paths");
  c.paths.width = get_count(p, "width", "paths");
  c.paths.grid = get_count(p, "grid", "paths");
  c.paths.seeds = get_count(p, "seeds", "paths");
  require(!c.paths.alphas.empty(), "paths.alphas must not be empty");
  for (double a : c.paths.alphas) require(a > 0.0 && a <= 2.0, "paths.alphas entries must lie in (0, 2]");
  require(c.paths.width >= 1 && c.paths.grid >= 1 && c.paths.seeds >= 1,
          "paths.width, paths.grid and paths.seeds must be >= 1");
  return c;
}

std::string config_digest(const ExperimentConfig& c) {
  ordered_json j = to_json(c);
  j.erase("workers");
  j.erase("out");
  return digest_hex(fnv1a64(j.dump()));
}

InputSet make_inputs(const ExperimentConfig& c) {
  const InputSpec& s = c.inputs;
  Rng rng(c.seed, {kTagInputs});
  if (s.generator == "explicit") return explicit_inputs(s.columns);
  if (s.generator == "axis-aligned") return axis_aligned_inputs(s.d, s.k);
  if (s.generator == "orthonormal") return random_orthonormal_inputs(s.d, s.k, rng);
  return random_unit_sphere_inputs(s.d, s.k, rng);
}

}  // namespace stablentk::cli
