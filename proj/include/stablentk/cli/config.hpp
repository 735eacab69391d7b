#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "stablentk/network.hpp"

namespace stablentk::cli {

/// Raised for anything the user supplied that cannot be run: bad JSON,
/// unknown keys, out-of-range values, inputs failing a precondition.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct InputSpec {
  std::string generator = "axis-aligned";  ///< explicit | random-unit-sphere | orthonormal | axis-aligned
  std::size_t d = 1;
  std::size_t k = 1;
  std::vector<std::vector<double>> columns;  ///< explicit generator only
};

struct TrainSpec {
  std::size_t width = 4096;
  std::size_t seeds = 50;
  double dt = 0.0;  ///< 0 selects the default step
  double t_max = 20.0;
  std::size_t record_every = 100;
  std::string eta_mode = "paper";  ///< paper | custom
  double eta = 1.0;
  std::string target = "random";  ///< random | zero-residual
  std::vector<std::size_t> drift_widths{1024, 4096, 16384};
  std::size_t drift_seeds = 10;
  bool write_trajectories = true;
};

struct PathsSpec {
  std::vector<double> alphas{2.0, 1.5, 1.0, 0.5};
  std::size_t width = 1024;
  std::size_t grid = 41;
  std::size_t seeds = 1;
};

struct Theorem3Spec {
  std::size_t width = 4096;
  std::size_t seeds = 200;
};

struct ExperimentConfig {
  std::string experiment = "limit-dist";
  double alpha = 1.0;
  std::vector<std::size_t> widths{1024, 8192, 65536};
  std::size_t samples = 10000;
  InputSpec inputs;
  std::uint64_t seed = 2024;
  int workers = 0;
  std::string out = "results";
  std::size_t grid_points = 61;
  double hill_tail_fraction = 0.05;
  std::size_t orthant_samples = 100000;
  std::string prefactor_mode = "calibrate";  ///< calibrate | paper_literal | tail_consistent
  std::size_t calibration_width = 65536;
  Theorem3Spec theorem3;
  TrainSpec train;
  PathsSpec paths;
};

/// Every key with its default value, as JSON.
nlohmann::ordered_json default_config_json();

/// Merges `patch` into `base` key by key (objects recursively). Unknown keys
/// raise ConfigError naming the full key path.
void merge_config(nlohmann::ordered_json& base, const nlohmann::ordered_json& patch, const std::string& where);

/// Applies STABLENTK_<KEY> environment overrides; nested keys use a double
/// underscore (STABLENTK_TRAIN__T_MAX). Values are parsed as JSON when
/// possible, else taken as strings. `env` maps variable names to values.
void apply_env_overrides(nlohmann::ordered_json& config, const std::map<std::string, std::string>& env);

/// Reads the process environment into a map (only STABLENTK_* variables).
std::map<std::string, std::string> stablentk_environment();

/// Validates and converts. Throws ConfigError with the offending key.
ExperimentConfig parse_config(const nlohmann::ordered_json& j);

nlohmann::ordered_json to_json(const ExperimentConfig& c);

/// FNV-1a digest of the canonical JSON of everything that affects results
/// (`workers` and `out` excluded), as 16 hex digits.
std::string config_digest(const ExperimentConfig& c);

/// Builds the input set described by the config (random generators draw
/// from the config seed).
InputSet make_inputs(const ExperimentConfig& c);

}  // namespace stablentk::cli
