#pragma once

#include <filesystem>
#include <map>
#include <ostream>
#include <string>

#include <nlohmann/json.hpp>

#include "stablentk/cli/config.hpp"
#include "stablentk/io.hpp"

namespace stablentk::cli {

enum ExitCode : int { kExitPass = 0, kExitAssertion = 1, kExitInvalid = 2 };

/// Everything a command produces, held in memory until the command is done
/// and then written by one thread. Paths are relative to the output
/// directory; summary.json is added by write().
class ResultSet {
 public:
  explicit ResultSet(std::string digest) : digest_(std::move(digest)) {}

  const std::string& digest() const { return digest_; }
  void add_text(const std::string& path, std::string content);
  /// Prepends the command and config digest to the table's comment lines.
  void add_table(const std::string& path, Table table, const std::string& command);

  nlohmann::ordered_json summary;

  const std::map<std::string, std::string>& files() const { return files_; }
  /// The serialized summary.json.
  std::string summary_text() const;
  /// Creates `dir` and writes every file plus summary.json.
  void write(const std::filesystem::path& dir) const;

 private:
  std::string digest_;
  std::map<std::string, std::string> files_;
};

/// Runs the experiment named by cfg.experiment, filling `out`. Progress goes
/// to `log`. Returns an ExitCode; ConfigError and guard rejections map to
/// kExitInvalid with the message on `log`.
int run_experiment(const ExperimentConfig& cfg, ResultSet& out, std::ostream& log);

int cmd_limit_dist(const ExperimentConfig& cfg, ResultSet& out, std::ostream& log);
int cmd_ntk_limit(const ExperimentConfig& cfg, ResultSet& out, std::ostream& log);
int cmd_train(const ExperimentConfig& cfg, ResultSet& out, std::ostream& log);
int cmd_paths(const ExperimentConfig& cfg, ResultSet& out, std::ostream& log);
int cmd_calibrate(const ExperimentConfig& cfg, ResultSet& out, std::ostream& log);

}  // namespace stablentk::cli
