// stablentk: command-line front end for the heavy-tailed NTK experiments.
//
//   stablentk <limit-dist|ntk-limit|train|paths|calibrate> [--config PATH]
//             [--seed U64] [--out DIR] [--workers N] [--dry-run]
//
// Settings are resolved as defaults < config file < STABLENTK_* environment
// variables < flags.

#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "stablentk/cli/commands.hpp"
#include "stablentk/cli/config.hpp"

namespace {

using nlohmann::ordered_json;
using namespace stablentk::cli;

struct Flags {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<int> workers;
  bool dry_run = false;
};

ordered_json resolve(const std::string& experiment, const Flags& f) {
  ordered_json cfg = default_config_json();
  if (!f.config_path.empty()) {
    std::ifstream is(f.config_path);
    if (!is) throw ConfigError("cannot open config file " + f.config_path);
    ordered_json file = ordered_json::parse(is, nullptr, false);
    if (file.is_discarded()) throw ConfigError(f.config_path + " is not valid JSON");
    merge_config(cfg, file, "");
  }
  apply_env_overrides(cfg, stablentk_environment());
  if (f.seed) cfg["seed"] = *f.seed;
  if (f.out) cfg["out"] = *f.out;
  if (f.workers) cfg["workers"] = *f.workers;
  cfg["experiment"] = experiment;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Monte Carlo experiments for shallow ReLU networks with alpha-stable weights"};
  app.require_subcommand(1);
  Flags flags;
  for (const char* name : {"limit-dist", "ntk-limit", "train", "paths", "calibrate"}) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", flags.config_path, "JSON configuration file")->check(CLI::ExistingFile);
    sub->add_option("--seed", flags.seed, "master seed");
    sub->add_option("--out", flags.out, "output directory");
    sub->add_option("--workers", flags.workers, "worker threads (0 = all cores)")->check(CLI::NonNegativeNumber);
    sub->add_flag("--dry-run", flags.dry_run, "print the resolved configuration and exit");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInvalid;
  }
  const std::string experiment = app.get_subcommands().front()->get_name();

  ExperimentConfig cfg;
  ordered_json resolved;
  try {
    resolved = resolve(experiment, flags);
    cfg = parse_config(resolved);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInvalid;
  }

  if (flags.dry_run) {
    std::cout << resolved.dump(2) << '\n' << "config digest " << config_digest(cfg) << '\n';
    return kExitPass;
  }

  ResultSet results(config_digest(cfg));
  const int code = run_experiment(cfg, results, std::cerr);
  if (code == kExitInvalid) return code;
  try {
    results.write(cfg.out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInvalid;
  }
  std::cerr << "results written to " << cfg.out << " (exit " << code << ")\n";
  return code;
}
