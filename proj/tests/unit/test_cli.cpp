#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "stablentk/cli/commands.hpp"
#include "stablentk/cli/config.hpp"

using namespace stablentk::cli;
using nlohmann::ordered_json;

namespace {

ExperimentConfig config_from(const ordered_json& patch) {
  ordered_json j = default_config_json();
  merge_config(j, patch, "");
  return parse_config(j);
}

int run(const ExperimentConfig& cfg, ResultSet& out) {
  std::ostringstream log;
  return run_experiment(cfg, out, log);
}

}  // namespace

TEST(Config, DefaultsParse) {
  const ExperimentConfig c = parse_config(default_config_json());
  EXPECT_EQ(c.experiment, "limit-dist");
  EXPECT_EQ(c.widths, (std::vector<std::size_t>{1024, 8192, 65536}));
  EXPECT_EQ(c.seed, 2024u);
}

TEST(Config, RejectsBadValues) {
  EXPECT_THROW(config_from({{"alpha", 2.5}}), ConfigError);
  EXPECT_THROW(config_from({{"alpha", "one"}}), ConfigError);
  EXPECT_THROW(config_from({{"widths", {1024, 512}}}), ConfigError);
  EXPECT_THROW(config_from({{"hill_tail_fraction", 0.1}}), ConfigError);
  EXPECT_THROW(config_from({{"train", {{"target", "other"}}}}), ConfigError);
  EXPECT_THROW(config_from({{"inputs", {{"generator", "orthonormal"}, {"d", 2}, {"k", 3}}}}), ConfigError);
  ordered_json j = default_config_json();
  EXPECT_THROW(merge_config(j, {{"train", {{"tmax", 1}}}}, ""), ConfigError);
}

TEST(Config, ExplicitColumnsSetShape) {
  const ExperimentConfig c =
      config_from({{"inputs", {{"generator", "explicit"}, {"columns", {{1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}}}}}});
  EXPECT_EQ(c.inputs.d, 3u);
  EXPECT_EQ(c.inputs.k, 2u);
  EXPECT_TRUE(make_inputs(c).unit_norm());
}

TEST(Config, EnvironmentOverrides) {
  ordered_json j = default_config_json();
  apply_env_overrides(j, {{"STABLENTK_ALPHA", "1.5"},
                          {"STABLENTK_TRAIN__T_MAX", "3"},
                          {"STABLENTK_WIDTHS", "64,128"},
                          {"STABLENTK_PREFACTOR_MODE", "paper_literal"},
                          {"OTHER", "x"}});
  const ExperimentConfig c = parse_config(j);
  EXPECT_DOUBLE_EQ(c.alpha, 1.5);
  EXPECT_DOUBLE_EQ(c.train.t_max, 3.0);
  EXPECT_EQ(c.widths, (std::vector<std::size_t>{64, 128}));
  EXPECT_EQ(c.prefactor_mode, "paper_literal");
  EXPECT_THROW(apply_env_overrides(j, {{"STABLENTK_NOPE", "1"}}), ConfigError);
}

TEST(Config, DigestIgnoresWorkersAndOut) {
  ExperimentConfig a = parse_config(default_config_json()), b = a;
  b.workers = 7;
  b.out = "elsewhere";
  EXPECT_EQ(config_digest(a), config_digest(b));
  b.seed = 1;
  EXPECT_NE(config_digest(a), config_digest(b));
}

TEST(Commands, InvalidInputExitCode) {
  ExperimentConfig c = config_from({{"experiment", "ntk-limit"},
                                    {"inputs", {{"generator", "explicit"}, {"columns", {{1.0, 0.0}, {1.0, 0.0}}}}}});
  ResultSet out(config_digest(c));
  EXPECT_EQ(run(c, out), kExitInvalid);
  c = config_from({{"experiment", "ntk-limit"}, {"alpha", 2.0}});
  EXPECT_EQ(run(c, out), kExitInvalid);
}

TEST(Commands, LimitDistFilesIdenticalAcrossWorkers) {
  ExperimentConfig c = config_from({{"widths", {64, 256}}, {"samples", 500}});
  ResultSet a(config_digest(c)), b(config_digest(c));
  c.workers = 1;
  EXPECT_EQ(run(c, a), kExitPass);
  c.workers = 3;
  EXPECT_EQ(run(c, b), kExitPass);
  EXPECT_EQ(a.files(), b.files());
  EXPECT_EQ(a.summary_text(), b.summary_text());
  ASSERT_TRUE(a.files().count("sweep.csv"));
  const std::string& sweep = a.files().at("sweep.csv");
  EXPECT_NE(sweep.find("# config " + a.digest()), std::string::npos);
  EXPECT_NE(sweep.find("width,ecf_sup_distance"), std::string::npos);
  EXPECT_TRUE(a.files().count("ecf/width_64.csv"));
  EXPECT_TRUE(a.files().count("gamma_x.txt"));
}

TEST(Commands, TrainZeroTargetIsFlat) {
  const ExperimentConfig c = config_from(
      {{"experiment", "train"},
       {"train", {{"width", 64}, {"seeds", 2}, {"t_max", 1.0}, {"target", "zero-residual"}, {"drift_widths", ordered_json::array()}}}});
  ResultSet out(config_digest(c));
  EXPECT_EQ(run(c, out), kExitPass);
  EXPECT_EQ(out.summary["passed"], 2);
  const std::string& traj = out.files().at("trajectories/seed_0000.csv");
  std::istringstream is(traj);
  std::string line;
  while (std::getline(is, line))
    if (!line.empty() && line[0] != '#' && line[0] != 't') EXPECT_NE(line.find(",0,"), std::string::npos) << line;
}

TEST(Commands, TrainDivergenceIsReportedPerSeed) {
  const ExperimentConfig c = config_from(
      {{"experiment", "train"},
       {"alpha", 1.5},
       {"inputs", {{"generator", "orthonormal"}, {"d", 4}, {"k", 4}}},
       {"train", {{"width", 256}, {"seeds", 3}, {"dt", 50.0}, {"t_max", 500.0}, {"drift_widths", ordered_json::array()}}}});
  ResultSet out(config_digest(c));
  EXPECT_EQ(run(c, out), kExitAssertion);
  EXPECT_EQ(out.summary["diverged"], 3);
  EXPECT_NE(out.files().at("seeds.csv").find("diverged"), std::string::npos);
}

TEST(Commands, PathsSpikeAndSinglePoint) {
  ExperimentConfig c = config_from({{"experiment", "paths"}, {"paths", {{"grid", 5}, {"seeds", 20}}}});
  ResultSet out(config_digest(c));
  EXPECT_EQ(run(c, out), kExitPass);
  const auto& s = out.summary["surfaces"];
  ASSERT_EQ(s.size(), 4u);
  EXPECT_EQ(s[0]["alpha"], 2.0);
  EXPECT_EQ(s[3]["alpha"], 0.5);
  // alpha = 0.5: the largest outer weight carries most of the l1 mass; at
  // alpha = 2 it is a small fraction.
  EXPECT_GT(s[3]["mean_top_neuron_share"].get<double>(), 10.0 * s[0]["mean_top_neuron_share"].get<double>());
  EXPECT_TRUE(out.files().count("paths/alpha_0.5_seed_0000.svg"));

  c = config_from({{"experiment", "paths"}, {"paths", {{"grid", 1}, {"alphas", {1.0}}}}});
  ResultSet one(config_digest(c));
  EXPECT_EQ(run(c, one), kExitPass);
  std::istringstream is(one.files().at("paths/alpha_1_seed_0000.csv"));
  std::string line;
  int rows = 0;
  while (std::getline(is, line))
    if (!line.empty() && line[0] != '#') ++rows;
  EXPECT_EQ(rows, 2);  // header + one value
}

TEST(Commands, WriteCreatesFiles) {
  const auto dir = std::filesystem::temp_directory_path() / "stablentk_cli_test";
  std::filesystem::remove_all(dir);
  ResultSet out("0123456789abcdef");
  out.add_text("a/b.txt", "x\n");
  out.summary = {{"k", 1}};
  out.write(dir);
  std::ifstream is(dir / "a" / "b.txt");
  std::string s;
  std::getline(is, s);
  EXPECT_EQ(s, "x");
  EXPECT_TRUE(std::filesystem::exists(dir / "summary.json"));
  std::filesystem::remove_all(dir);
}
