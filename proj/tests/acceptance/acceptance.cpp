// Acceptance run: one PASS/FAIL line per criterion with the measured values
// and the wall time against its budget.
//
//   acceptance            run every criterion
//   acceptance 2 7        run criteria 2 and 7 only
//
// Exit status is 0 when every selected criterion passes.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "stablentk/cli/commands.hpp"
#include "stablentk/cli/config.hpp"
#include "stablentk/inputs.hpp"
#include "stablentk/kernel.hpp"
#include "stablentk/limits.hpp"
#include "stablentk/network.hpp"
#include "stablentk/stable.hpp"
#include "stablentk/verify.hpp"

using namespace stablentk;
namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

// Tolerances and budgets. Changing any of these changes what "pass" means.
constexpr double kSamplerEcfTol = 0.02;
constexpr double kLimitEcfTol = 0.1;
constexpr double kLimitHillTol = 0.15;
constexpr double kKernelHillTol = 0.1;
constexpr double kRankBandSigmas = 3.0;
constexpr double kCalibrationRate = 0.95;
constexpr double kPsdFloor = -1e-10;
constexpr double kTrainPassRate = 0.9;
constexpr double kGradRelTol = 1e-6;
constexpr double kDecompTol = 1e-10;
constexpr double kLevySigmas = 3.0;

constexpr std::uint64_t kSeed = 2024;

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  std::string name;
  double budget_seconds;
  std::function<Outcome()> run;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::string g(double v) { return fmt("%.4g", v); }

std::vector<std::size_t> width_sweep() { return {1u << 10, 1u << 13, 1u << 16}; }

// ---------------------------------------------------------------------------

Outcome sampler_fidelity() {
  Outcome o{true, ""};
  const Matrix grid = cf_grid(1, 61, -3.0, 3.0);
  for (double a : {0.5, 1.0, 1.5, 2.0}) {
    Rng rng(kSeed, {0x6163, static_cast<std::uint64_t>(a * 10)});
    std::vector<double> v(100000);
    sample_symmetric_standard(a, rng, v);
    const EcfReport rep =
        ecf(as_column(v), grid, [a](std::span<const double> z) { return std::exp(-std::pow(std::abs(z[0]), a)); });
    o.pass = o.pass && rep.sup_distance < kSamplerEcfTol;
    o.detail += "alpha " + g(a) + ": sup " + g(rep.sup_distance) + "; ";
  }
  o.detail += "tol " + g(kSamplerEcfTol);
  return o;
}

Outcome theorem1_scalar() {
  Outcome o{true, ""};
  const InputSet x = InputSet::from_columns({{1.0}});
  SweepOptions opt;
  opt.samples = 10000;
  opt.seed = kSeed;
  for (double a : {0.6, 1.0, 1.5}) {
    const SweepResult s = theorem1_sweep(x, a, width_sweep(), opt);
    const SweepPoint& last = s.points.back();
    const bool ok = last.statistic < kLimitEcfTol && s.slope < 0.0 &&
                    std::abs(last.hill.alpha - a) <= kLimitHillTol;
    o.pass = o.pass && ok;
    o.detail += "alpha " + g(a) + ": sup";
    for (const auto& p : s.points) o.detail += " " + g(p.statistic);
    o.detail += ", slope " + g(s.slope) + ", hill " + g(last.hill.alpha) + (ok ? "" : " [fail]") + "; ";
  }
  o.detail += "tol sup < " + g(kLimitEcfTol) + ", hill +-" + g(kLimitHillTol);
  return o;
}

Outcome theorem1_joint() {
  const InputSet x = axis_aligned_inputs(2, 2);
  SweepOptions opt;
  opt.samples = 10000;
  opt.seed = kSeed;
  const SweepResult s = theorem1_sweep(x, 1.0, width_sweep(), opt);
  Outcome o;
  o.pass = s.slope < 0.0;
  o.detail = "sup";
  for (const auto& p : s.points) o.detail += " " + g(p.statistic);
  o.detail += ", slope " + g(s.slope) + ", strictly decreasing " + (s.strictly_decreasing ? "yes" : "no");
  return o;
}

Outcome theorem2_scalar() {
  Outcome o{true, ""};
  const InputSet x = InputSet::from_columns({{1.0}});
  SweepOptions opt;
  opt.samples = 10000;
  opt.seed = kSeed;
  const double band = kRankBandSigmas / std::sqrt(static_cast<double>(opt.samples));
  for (double a : {1.0, 1.5}) {
    Rng prng(kSeed, {0x6f72});
    const std::vector<OrthantEstimate> probs = orthant_probs(x, a, 100000, prng);
    const CalibrationReport cal = calibrate_prefactor(x, a, 1u << 16, probs, opt);
    const LimitKernelLaw law = make_limit_kernel_law(x, a, probs, cal.selected);
    const SweepResult s = theorem2_sweep(x, a, width_sweep(), opt, law);
    const SweepPoint& last = s.points.back();
    const bool ok = std::abs(last.hill.alpha - a / 2.0) <= kKernelHillTol &&
                    std::abs(last.rank_correlation) <= band && s.slope < 0.0;
    o.pass = o.pass && ok;
    o.detail += "alpha " + g(a) + ": prefactor " + to_string(cal.selected) + " (ks " + g(cal.ks_paper_literal) +
                " vs " + g(cal.ks_tail_consistent) + "), hill " + g(last.hill.alpha) +
                ", rank corr " + g(last.rank_correlation) + ", ks";
    for (const auto& p : s.points) o.detail += " " + g(p.statistic);
    o.detail += ", slope " + g(s.slope) + (ok ? "" : " [fail]") + "; ";
  }
  o.detail += "tol hill +-" + g(kKernelHillTol) + ", rank band " + g(band);
  return o;
}

Outcome calibration_self_test() {
  const double a = 1.5;
  const std::size_t reps = 100, draws = 2000;
  const InputSet x = InputSet::from_columns({{1.0}});
  Rng prng(kSeed, {0x6f72});
  const std::vector<OrthantEstimate> probs = orthant_probs(x, a, 100000, prng);
  Outcome o{true, ""};
  for (PrefactorMode mode : {PrefactorMode::paper_literal, PrefactorMode::tail_consistent}) {
    const LimitKernelLaw law = make_limit_kernel_law(x, a, probs, mode);
    std::size_t hits = 0;
    for (std::size_t r = 0; r < reps; ++r) {
      const std::uint64_t base = derive_seed(kSeed, {0x7374, static_cast<std::uint64_t>(mode), r});
      const std::vector<Matrix> observed = limit_kernel_draws(law, draws, base);
      const CalibrationReport rep = calibrate_from_samples(observed, x, a, probs, base + 1);
      hits += rep.selected == mode && !rep.inconclusive;
    }
    const double rate = static_cast<double>(hits) / static_cast<double>(reps);
    o.pass = o.pass && rate >= kCalibrationRate;
    o.detail += to_string(mode) + " " + std::to_string(hits) + "/" + std::to_string(reps) + "; ";
  }
  o.detail += "need " + g(kCalibrationRate);
  return o;
}

cli::ExperimentConfig training_config() {
  ordered_json j = cli::default_config_json();
  cli::merge_config(j,
                    {{"experiment", "train"},
                     {"alpha", 1.5},
                     {"seed", kSeed},
                     {"inputs", {{"generator", "orthonormal"}, {"d", 4}, {"k", 4}}},
                     {"train",
                      {{"width", 4096},
                       {"seeds", 50},
                       {"t_max", 20.0},
                       {"eta_mode", "paper"},
                       {"dt", 0.0},
                       {"target", "random"},
                       {"drift_widths", {1u << 10, 1u << 12, 1u << 14}},
                       {"drift_seeds", 10},
                       {"record_every", 100},
                       {"write_trajectories", false}}}},
                    "");
  return cli::parse_config(j);
}

Outcome theorem3_quantiles() {
  const cli::ExperimentConfig cfg = training_config();
  const InputSet x = cli::make_inputs(cfg);
  const EigenQuantileReport rep = theorem3_quantile(x, 1.5, 4096, 200, kSeed);
  Outcome o;
  o.pass = rep.q05 > 0.0 && rep.worst_part_eigenvalue >= kPsdFloor;
  o.detail = "q05 " + g(rep.q05) + ", smallest " + g(rep.smallest) + ", worst part eigenvalue " +
             g(rep.worst_part_eigenvalue) + " (floor " + g(kPsdFloor) + ")";
  return o;
}

Outcome training_dynamics() {
  const cli::ExperimentConfig cfg = training_config();
  cli::ResultSet out(cli::config_digest(cfg));
  std::ostringstream log;
  cli::cmd_train(cfg, out, log);
  const ordered_json& s = out.summary;
  const double rate = s["pass_rate"].get<double>();
  const double slope = s["h2_drift_slope"].get<double>();
  Outcome o;
  o.pass = rate >= kTrainPassRate && slope < 0.0;
  o.detail = "seeds passing (a)-(c) " + std::to_string(s["passed"].get<std::size_t>()) + "/" +
             std::to_string(s["seeds"].get<std::size_t>()) + ", diverged " +
             std::to_string(s["diverged"].get<std::size_t>()) + ", h2 drift";
  for (const auto& d : s["drift"]) o.detail += " " + g(d["median_h2_drift"].get<double>());
  o.detail += ", slope " + g(slope);
  std::istringstream seeds(out.files().at("seeds.csv"));
  std::string line, failing;
  while (std::getline(seeds, line))
    if (line.find(",pass,") == std::string::npos && !line.empty() && line[0] != '#' && line.rfind("seed,", 0) != 0)
      failing += " " + line.substr(0, line.find(','));
  if (!failing.empty()) o.detail += ", failing seeds" + failing;
  o.detail += "; need rate " + g(kTrainPassRate);
  return o;
}

// Central differences of the full rescaled output. The network is linear in
// each single parameter away from activation boundaries, so the step only
// has to stay clear of the nearest kink.
Outcome gradient_check() {
  struct Shape {
    std::size_t m, d;
    double alpha;
  };
  const std::vector<Shape> shapes{{8, 1, 0.6},  {16, 2, 1.0}, {32, 3, 1.5},  {64, 4, 2.0},  {8, 5, 0.8},
                                  {128, 2, 1.2}, {16, 8, 1.8}, {256, 3, 1.0}, {32, 6, 0.5}, {64, 10, 1.9}};
  double worst = 0.0;
  std::size_t points = 0;
  for (std::size_t c = 0; c < shapes.size(); ++c) {
    const Shape& sh = shapes[c];
    for (std::size_t p = 0; p < 10; ++p) {
      Rng rng(kSeed, {0x6664, c, p});
      NetworkWeights w;
      std::vector<double> xv;
      double margin = 0.0;
      do {  // resample until no pre-activation sits near zero
        w = init_weights(sh.m, sh.d, sh.alpha, rng);
        xv = random_unit_sphere_inputs(sh.d, 1, rng).column(0);
        margin = INFINITY;
        for (std::size_t i = 0; i < sh.m; ++i) {
          double pre = 0.0, nrm = 0.0;
          for (std::size_t k = 0; k < sh.d; ++k) {
            pre += w.inner(i, k) * xv[k];
            nrm += w.inner(i, k) * w.inner(i, k);
          }
          margin = std::min(margin, std::abs(pre) / std::sqrt(nrm));
        }
      } while (margin < 1e-3);
      const InputSet x = InputSet::from_columns({xv});
      auto f = [&](const NetworkWeights& v) { return forward_rescaled(v, x, sh.alpha)[0]; };
      const std::vector<double> go = grad_outer(w, xv, sh.alpha);
      const Matrix gi = grad_inner(w, xv, sh.alpha);
      double diff2 = 0.0, norm2v = 0.0;
      for (std::size_t i = 0; i < sh.m; ++i) {
        double pre = 0.0;
        for (std::size_t k = 0; k < sh.d; ++k) pre += w.inner(i, k) * xv[k];
        {
          const double h = 1e-4 * std::max(1.0, std::abs(w.outer[i]));
          NetworkWeights a = w, b = w;
          a.outer[i] += h;
          b.outer[i] -= h;
          const double fd = (f(a) - f(b)) / (2 * h);
          diff2 += (fd - go[i]) * (fd - go[i]);
          norm2v += go[i] * go[i];
        }
        for (std::size_t k = 0; k < sh.d; ++k) {
          double h = 1e-4 * std::max(1.0, std::abs(w.inner(i, k)));
          if (xv[k] != 0.0) h = std::min(h, 0.5 * std::abs(pre / xv[k]));
          NetworkWeights a = w, b = w;
          a.inner(i, k) += h;
          b.inner(i, k) -= h;
          const double fd = (f(a) - f(b)) / (2 * h);
          diff2 += (fd - gi(i, k)) * (fd - gi(i, k));
          norm2v += gi(i, k) * gi(i, k);
        }
      }
      worst = std::max(worst, std::sqrt(diff2 / norm2v));
      ++points;
    }
  }
  Outcome o;
  o.pass = worst < kGradRelTol;
  o.detail = std::to_string(points) + " points, worst relative error " + g(worst) + " (tol " + g(kGradRelTol) + ")";
  return o;
}

// Error is measured relative to the largest kernel entry (floored at 1):
// heavy-tailed weights make entries span many orders of magnitude.
Outcome decomposition_identity() {
  double worst = 0.0, worst_abs = 0.0;
  for (std::size_t c = 0; c < 1000; ++c) {
    Rng rng(kSeed, {0x6463, c});
    const std::size_t m = 2 + rng.below(199);
    const std::size_t d = 1 + rng.below(6);
    const std::size_t k = 1 + rng.below(5);
    const double a = rng.uniform(0.5, 2.0);
    const NetworkWeights w = init_weights(m, d, a, rng);
    Matrix cols(d, k);
    for (double& v : cols.data()) v = rng.normal();
    const InputSet x(cols);
    const Matrix lhs = decompose(w, x, a).total();
    const Matrix rhs = kernel_rescale(m, a) * ntk(w, x, a);
    double scale = 1.0, err = 0.0;
    for (std::size_t i = 0; i < lhs.data().size(); ++i) {
      scale = std::max(scale, std::abs(rhs.data()[i]));
      err = std::max(err, std::abs(lhs.data()[i] - rhs.data()[i]));
    }
    worst = std::max(worst, err / scale);
    worst_abs = std::max(worst_abs, err);
  }
  Outcome o;
  o.pass = worst <= kDecompTol;
  o.detail = "1000 configurations, worst scaled error " + g(worst) + ", worst absolute " + g(worst_abs) + " (tol " +
             g(kDecompTol) + ")";
  return o;
}

Outcome levy_tail() {
  const std::vector<double> grid{100.0, 1000.0, 10000.0};
  Outcome o{true, ""};
  auto report = [&](const std::string& label, const LevyTailReport& r) {
    bool ok = true;
    o.detail += label + ": target " + g(r.target) + ", est";
    for (const auto& p : r.points) {
      ok = ok && std::abs(p.estimate - p.target) <= kLevySigmas * p.standard_error;
      o.detail += " " + g(p.estimate) + "+-" + g(p.standard_error);
    }
    o.pass = o.pass && ok;
    o.detail += ok ? "; " : " [fail]; ";
  };

  // A = positive half-line for symmetric St(1.3, 1), whose spectral measure
  // puts 1/2 at each of +1 and -1.
  {
    const double a = 1.3;
    Rng rng(kSeed, {0x6c31});
    std::vector<double> v(1000000);
    sample_symmetric_standard(a, rng, v);
    report("1-d half-line", levy_tail_check(as_column(v), a, [](std::span<const double> d) { return d[0] > 0.0; },
                                            c_alpha(a) * 0.5, grid));
  }
  // A = cone of half-angle 0.25 around e_2 for a three-atom measure in R^2.
  {
    const double a = 0.8;
    DiscreteSpectralMeasure gamma(2);
    const std::vector<double> s1{1.0, 0.0}, s2{0.0, 1.0}, s3{-1.0, -1.0};
    gamma.add(s1, 0.5);
    gamma.add(s2, 0.3);
    gamma.add(s3, 0.2);
    Rng rng(kSeed, {0x6c32});
    Matrix samples(1000000, 2);
    for (std::size_t i = 0; i < samples.rows(); ++i) {
      const std::vector<double> s = sample_discrete_spectral(gamma, a, rng);
      samples(i, 0) = s[0];
      samples(i, 1) = s[1];
    }
    const double cos_half = std::cos(0.25);
    report("2-d cone",
           levy_tail_check(samples, a, [cos_half](std::span<const double> d) { return d[1] > cos_half; },
                           c_alpha(a) * 0.3, grid));
  }
  o.detail += "within " + g(kLevySigmas) + " se at n = 100, 1000, 10000";
  return o;
}

// ---------------------------------------------------------------------------
// Determinism: every command, run at workers 1 and 3, writes identical bytes.

std::map<std::string, std::string> read_tree(const fs::path& dir) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (!e.is_regular_file()) continue;
    std::ifstream is(e.path(), std::ios::binary);
    std::ostringstream ss;
    ss << is.rdbuf();
    files[fs::relative(e.path(), dir).generic_string()] = ss.str();
  }
  return files;
}

Outcome determinism() {
  const std::vector<ordered_json> runs{
      {{"experiment", "limit-dist"}, {"alpha", 1.5}, {"widths", {64, 256}}, {"samples", 500},
       {"inputs", {{"generator", "axis-aligned"}, {"d", 2}, {"k", 2}}}},
      {{"experiment", "ntk-limit"}, {"alpha", 1.5}, {"widths", {64, 256}}, {"samples", 500},
       {"orthant_samples", 10000}, {"inputs", {{"generator", "orthonormal"}, {"d", 3}, {"k", 2}}},
       {"theorem3", {{"width", 64}, {"seeds", 20}}}},
      {{"experiment", "calibrate"}, {"alpha", 1.0}, {"samples", 200},
       {"inputs", {{"generator", "axis-aligned"}, {"d", 1}, {"k", 1}}}},
      {{"experiment", "train"}, {"alpha", 1.5}, {"inputs", {{"generator", "orthonormal"}, {"d", 4}, {"k", 4}}},
       {"train", {{"width", 128}, {"seeds", 4}, {"t_max", 2.0}, {"drift_widths", {64, 128}}, {"drift_seeds", 2},
                  {"record_every", 10}}}},
      {{"experiment", "paths"}, {"paths", {{"alphas", {2.0, 1.0}}, {"width", 64}, {"grid", 5}, {"seeds", 2}}}},
  };
  const fs::path root = fs::temp_directory_path() / ("stablentk_acceptance_" + std::to_string(::getpid()));
  Outcome o{true, ""};
  std::size_t compared = 0;
  for (const ordered_json& patch : runs) {
    ordered_json j = cli::default_config_json();
    cli::merge_config(j, patch, "");
    j["seed"] = kSeed;
    cli::ExperimentConfig cfg = cli::parse_config(j);
    std::vector<std::map<std::string, std::string>> trees;
    std::vector<int> codes;
    for (int workers : {1, 3}) {
      cfg.workers = workers;
      cli::ResultSet out(cli::config_digest(cfg));
      std::ostringstream log;
      codes.push_back(cli::run_experiment(cfg, out, log));
      const fs::path dir = root / (cfg.experiment + "_w" + std::to_string(workers));
      out.write(dir);
      trees.push_back(read_tree(dir));
    }
    const bool same = codes[0] == codes[1] && trees[0] == trees[1] && !trees[0].empty();
    o.pass = o.pass && same;
    compared += trees[0].size();
    o.detail += cfg.experiment + " " + std::to_string(trees[0].size()) + " files " + (same ? "identical" : "DIFFER") +
                "; ";
  }
  fs::remove_all(root);
  o.detail += std::to_string(compared) + " files compared";
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all{
      {1, "sampler fidelity", 20.0, sampler_fidelity},
      {2, "limit law, scalar input", 540.0, theorem1_scalar},
      {3, "limit law, two axis inputs", 300.0, theorem1_joint},
      {4, "limit kernel, scalar input", 600.0, theorem2_scalar},
      {5, "prefactor calibration self-test", 120.0, calibration_self_test},
      {6, "minimum eigenvalue at initialization", 120.0, theorem3_quantiles},
      {7, "gradient flow training", 600.0, training_dynamics},
      {8, "gradient correctness", 10.0, gradient_check},
      {9, "kernel decomposition identity", 30.0, decomposition_identity},
      {10, "stable tail measure", 60.0, levy_tail},
      {11, "determinism across worker counts", 0.0, determinism},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));

  int failures = 0;
  for (const Criterion& c : all) {
    if (!selected.empty() && !selected.count(c.id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = c.budget_seconds <= 0.0 || secs <= c.budget_seconds;
    const bool pass = o.pass && in_time;
    failures += !pass;
    std::printf("[%s] %2d %s: %s | %.1f s", pass ? "PASS" : "FAIL", c.id, c.name.c_str(), o.detail.c_str(), secs);
    if (c.budget_seconds > 0.0) std::printf(" (budget %.0f s%s)", c.budget_seconds, in_time ? "" : ", exceeded");
    std::printf("\n");
    std::fflush(stdout);
  }
  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
