#include "stablentk/cli/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

#include "stablentk/inputs.hpp"
#include "stablentk/kernel.hpp"
#include "stablentk/limits.hpp"
#include "stablentk/parallel.hpp"
#include "stablentk/training.hpp"
#include "stablentk/verify.hpp"

namespace stablentk::cli {

using nlohmann::ordered_json;

namespace {

constexpr std::uint64_t kTagOrthant = 0x6f72;
constexpr std::uint64_t kTagTrainWeights = 0x7477;
constexpr std::uint64_t kTagTrainTarget = 0x7479;
constexpr std::uint64_t kTagDrift = 0x7464;
constexpr std::uint64_t kTagPaths = 0x7061;

std::string num(double v) { return format_double(v); }

// Hill columns are left empty when the sample is too small for an estimate.
std::string hill_cell(const HillEstimate& h, double v) { return h.tail_count ? num(v) : ""; }

std::string alpha_label(double a) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", a);
  return buf;
}

std::string padded(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04zu", i);
  return buf;
}

SweepOptions sweep_options(const ExperimentConfig& cfg) {
  SweepOptions opt;
  opt.samples = cfg.samples;
  opt.seed = cfg.seed;
  opt.workers = cfg.workers;
  opt.hill_tail_fraction = cfg.hill_tail_fraction;
  opt.grid_points = cfg.grid_points;
  return opt;
}

// Config as recorded in summaries: worker count and output directory do not
// affect results and are left out so summaries compare byte for byte.
ordered_json recorded_config(const ExperimentConfig& cfg) {
  ordered_json j = to_json(cfg);
  j.erase("workers");
  j.erase("out");
  return j;
}

void start_summary(ResultSet& out, const ExperimentConfig& cfg) {
  out.summary = ordered_json::object();
  out.summary["experiment"] = cfg.experiment;
  out.summary["config_digest"] = out.digest();
  out.summary["config"] = recorded_config(cfg);
}

// Trend verdict over a sweep: a negative log-log slope. One width has no trend.
bool trend_ok(const SweepResult& s) { return s.points.size() < 2 || s.slope < 0.0; }

ordered_json hill_json(const HillEstimate& h) {
  return {{"alpha", h.alpha}, {"standard_error", h.standard_error}, {"tail_count", h.tail_count}};
}

std::vector<std::vector<double>> columns_of(const InputSet& x) {
  std::vector<std::vector<double>> c;
  for (std::size_t j = 0; j < x.count(); ++j) c.push_back(x.column(j));
  return c;
}

double median(std::vector<double> v) { return quantile(std::move(v), 0.5); }

std::string text_of(const std::function<void(std::ostream&)>& fn) {
  std::ostringstream os;
  fn(os);
  return os.str();
}

}  // namespace

void ResultSet::add_text(const std::string& path, std::string content) { files_[path] = std::move(content); }

void ResultSet::add_table(const std::string& path, Table table, const std::string& command) {
  table.comments.insert(table.comments.begin(), {"stablentk " + command, "config " + digest_});
  add_text(path, text_of([&](std::ostream& os) { table.write(os); }));
}

std::string ResultSet::summary_text() const { return summary.dump(2) + "\n"; }

void ResultSet::write(const std::filesystem::path& dir) const {
  namespace fs = std::filesystem;
  auto put = [&](const std::string& rel, const std::string& content) {
    const fs::path p = dir / rel;
    fs::create_directories(p.parent_path());
    std::ofstream os(p, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + p.string());
    os << content;
  };
  fs::create_directories(dir);
  for (const auto& [rel, content] : files_) put(rel, content);
  put("summary.json", summary_text());
}

// ---------------------------------------------------------------------------

int cmd_limit_dist(const ExperimentConfig& cfg, ResultSet& out, std::ostream& log) {
  const InputSet x = make_inputs(cfg);
  start_summary(out, cfg);
  log << "limit-dist: alpha " << cfg.alpha << ", k = " << x.count() << ", " << cfg.samples << " networks per width\n";
  const SweepResult sweep = theorem1_sweep(x, cfg.alpha, cfg.widths, sweep_options(cfg));

  Table t;
  t.columns = {"width", "ecf_sup_distance", "hill_alpha", "hill_standard_error", "hill_tail_count"};
  ordered_json widths = ordered_json::array();
  for (const auto& p : sweep.points) {
    t.add_row({std::to_string(p.width), num(p.statistic), hill_cell(p.hill, p.hill.alpha),
               hill_cell(p.hill, p.hill.standard_error), std::to_string(p.hill.tail_count)});
    widths.push_back({{"width", p.width}, {"ecf_sup_distance", p.statistic}, {"hill", hill_json(p.hill)}});

    Table g;
    g.comments = {"width " + std::to_string(p.width)};
    for (std::size_t c = 0; c < p.ecf.grid.cols(); ++c) g.columns.push_back("z" + std::to_string(c));
    for (const char* c : {"ecf_re", "ecf_im", "reference_re", "reference_im", "abs_difference"}) g.columns.push_back(c);
    for (std::size_t r = 0; r < p.ecf.grid.rows(); ++r) {
      std::vector<std::string> row;
      for (std::size_t c = 0; c < p.ecf.grid.cols(); ++c) row.push_back(num(p.ecf.grid(r, c)));
      const auto e = p.ecf.empirical[r], ref = p.ecf.reference[r];
      for (double v : {e.real(), e.imag(), ref.real(), ref.imag(), std::abs(e - ref)}) row.push_back(num(v));
      g.add_row(std::move(row));
    }
    out.add_table("ecf/width_" + std::to_string(p.width) + ".csv", std::move(g), "limit-dist");
    log << "  m = " << p.width << ": sup distance " << p.statistic << ", Hill " << p.hill.alpha << '\n';
  }
  t.comments = {"alpha " + num(cfg.alpha), "slope of log distance vs log width " + num(sweep.slope)};
  out.add_table("sweep.csv", std::move(t), "limit-dist");

  if (cfg.alpha == 2.0) {
    out.add_text("gaussian_covariance.txt", text_of([&](std::ostream& os) {
                   write_matrix(os, gaussian_relu_covariance(x), "config " + out.digest());
                 }));
  } else {
    out.add_text("gamma_x.txt", text_of([&](std::ostream& os) {
                   write_spectral_measure(os, spectral_gamma_X(x, cfg.alpha), "config " + out.digest());
                 }));
  }

  const bool pass = trend_ok(sweep);
  out.summary["inputs"] = columns_of(x);
  out.summary["widths"] = widths;
  out.summary["slope"] = sweep.slope;
  out.summary["strictly_decreasing"] = sweep.strictly_decreasing;
  out.summary["trend_pass"] = pass;
  log << "limit-dist: slope " << sweep.slope << (pass ? " (decreasing)\n" : " (NOT decreasing)\n");
  return pass ? kExitPass : kExitAssertion;
}

// ---------------------------------------------------------------------------

namespace {

void require_limit_kernel_alpha(const ExperimentConfig& cfg) {
  if (!(cfg.alpha < 2.0))
    throw ConfigError("the limit kernel is stable only for alpha < 2; got alpha = " + num(cfg.alpha));
}

std::vector<OrthantEstimate> estimate_orthants(const InputSet& x, const ExperimentConfig& cfg) {
  Rng rng(cfg.seed, {kTagOrthant});
  return orthant_probs(x, cfg.alpha, cfg.orthant_samples, rng);
}

void add_calibration(ResultSet& out, const CalibrationReport& rep, std::size_t width, const std::string& command) {
  Table t;
  t.comments = {"width " + std::to_string(width)};
  t.columns = {"convention", "ks_distance"};
  t.add_row({"paper_literal", num(rep.ks_paper_literal)});
  t.add_row({"tail_consistent", num(rep.ks_tail_consistent)});
  t.comments.push_back("noise level " + num(rep.noise_level) + (rep.inconclusive ? ", inconclusive" : ""));
  t.comments.push_back("selected " + to_string(rep.selected));
  out.add_table("calibration.csv", std::move(t), command);
  out.summary["calibration"] = {{"width", width},
                                {"ks_paper_literal", rep.ks_paper_literal},
                                {"ks_tail_consistent", rep.ks_tail_consistent},
                                {"noise_level", rep.noise_level},
                                {"inconclusive", rep.inconclusive},
                                {"selected", to_string(rep.selected)}};
}

void log_calibration(std::ostream& log, const CalibrationReport& rep) {
  log << "==== prefactor calibration ====\n"
      << "  KS vs paper_literal:   " << rep.ks_paper_literal << '\n'
      << "  KS vs tail_consistent: " << rep.ks_tail_consistent << '\n'
      << "  noise level:           " << rep.noise_level << (rep.inconclusive ? " (inconclusive)" : "") << '\n'
      << "  selected:              " << to_string(rep.selected) << '\n'
      << "===============================\n";
}

}  // namespace

int cmd_ntk_limit(const ExperimentConfig& cfg, ResultSet& out, std::ostream& log) {
  require_limit_kernel_alpha(cfg);
  const InputSet x = make_inputs(cfg);
  // Guard before any Monte Carlo work.
  if (!x.unit_norm()) throw ConfigError("ntk-limit: inputs must have unit norm");
  if (!x.linearly_independent())
    throw ConfigError("ntk-limit: inputs are linearly dependent (k = " + std::to_string(x.count()) +
                      ", d = " + std::to_string(x.dim()) + ")");
  start_summary(out, cfg);
  const SweepOptions opt = sweep_options(cfg);
  const std::vector<OrthantEstimate> probs = estimate_orthants(x, cfg);

  PrefactorMode mode;
  if (cfg.prefactor_mode == "calibrate") {
    log << "ntk-limit: calibrating the prefactor at width " << cfg.calibration_width << '\n';
    const CalibrationReport rep = calibrate_prefactor(x, cfg.alpha, cfg.calibration_width, probs, opt);
    log_calibration(log, rep);
    add_calibration(out, rep, cfg.calibration_width, "ntk-limit");
    mode = rep.selected;
  } else {
    mode = prefactor_mode_from_string(cfg.prefactor_mode);
  }
  out.summary["prefactor_mode"] = to_string(mode);

  const LimitKernelLaw law = make_limit_kernel_law(x, cfg.alpha, probs, mode);
  out.add_text("gamma_star_1.txt", text_of([&](std::ostream& os) {
                 write_spectral_measure(os, law.gamma1, "config " + out.digest() + ", " + to_string(mode));
               }));
  out.add_text("gamma_star_2.txt", text_of([&](std::ostream& os) {
                 write_spectral_measure(os, law.gamma2, "config " + out.digest() + ", " + to_string(mode));
               }));

  log << "ntk-limit: KS sweep over " << cfg.widths.size() << " widths\n";
  const SweepResult sweep = theorem2_sweep(x, cfg.alpha, cfg.widths, opt, law);
  const double rank_bound = 3.0 / std::sqrt(static_cast<double>(cfg.samples));
  Table t;
  t.columns = {"width", "ks_distance", "hill_alpha", "hill_standard_error", "hill_target", "rank_correlation",
               "rank_bound"};
  ordered_json widths = ordered_json::array();
  for (const auto& p : sweep.points) {
    t.add_row({std::to_string(p.width), num(p.statistic), hill_cell(p.hill, p.hill.alpha),
               hill_cell(p.hill, p.hill.standard_error), num(cfg.alpha / 2.0), num(p.rank_correlation), num(rank_bound)});
    widths.push_back({{"width", p.width},
                      {"ks_distance", p.statistic},
                      {"hill", hill_json(p.hill)},
                      {"rank_correlation", p.rank_correlation}});
    log << "  m = " << p.width << ": KS " << p.statistic << ", Hill " << p.hill.alpha << " (target "
        << cfg.alpha / 2.0 << "), rank correlation " << p.rank_correlation << '\n';
  }
  t.comments = {"alpha " + num(cfg.alpha) + ", prefactor " + to_string(mode),
                "slope of log KS vs log width " + num(sweep.slope)};
  out.add_table("ks_sweep.csv", std::move(t), "ntk-limit");

  log << "ntk-limit: minimum eigenvalue at width " << cfg.theorem3.width << " over " << cfg.theorem3.seeds
      << " seeds\n";
  const EigenQuantileReport eig =
      theorem3_quantile(x, cfg.alpha, cfg.theorem3.width, cfg.theorem3.seeds, cfg.seed, cfg.workers);
  Table e;
  e.comments = {"width " + std::to_string(cfg.theorem3.width)};
  e.columns = {"seed", "lambda_min"};
  for (std::size_t s = 0; s < eig.lambda_min.size(); ++s) e.add_row({std::to_string(s), num(eig.lambda_min[s])});
  out.add_table("lambda_min.csv", std::move(e), "ntk-limit");

  const bool trend = trend_ok(sweep);
  const bool positive = eig.q05 > 0.0 && eig.psd;
  out.summary["widths"] = widths;
  out.summary["slope"] = sweep.slope;
  out.summary["strictly_decreasing"] = sweep.strictly_decreasing;
  out.summary["trend_pass"] = trend;
  out.summary["lambda_min"] = {{"width", cfg.theorem3.width},
                               {"seeds", cfg.theorem3.seeds},
                               {"q05", eig.q05},
                               {"smallest", eig.smallest},
                               {"worst_part_eigenvalue", eig.worst_part_eigenvalue},
                               {"psd", eig.psd},
                               {"pass", positive}};
  log << "ntk-limit: KS slope " << sweep.slope << ", lambda_min 5% quantile " << eig.q05 << '\n';
  return trend && positive ? kExitPass : kExitAssertion;
}

int cmd_calibrate(const ExperimentConfig& cfg, ResultSet& out, std::ostream& log) {
  require_limit_kernel_alpha(cfg);
  const InputSet x = make_inputs(cfg);
  start_summary(out, cfg);
  const std::vector<OrthantEstimate> probs = estimate_orthants(x, cfg);
  log << "calibrate: " << cfg.samples << " kernels at width " << cfg.calibration_width << '\n';
  const CalibrationReport rep = calibrate_prefactor(x, cfg.alpha, cfg.calibration_width, probs, sweep_options(cfg));
  log_calibration(log, rep);
  add_calibration(out, rep, cfg.calibration_width, "calibrate");
  return kExitPass;
}

// ---------------------------------------------------------------------------

namespace {

struct SeedRun {
  bool diverged = false;
  std::string message;
  Trajectory traj;
  double initial_loss = 0.0;
  double final_loss = 0.0;
  bool converged = false;     // final <= 1e-6 initial
  bool drift_bounded = false;  // max ||W(t) - W(0)||_F < (log m)^{2/alpha}
  bool decay_ok = false;       // no per-step decay violation
  Certificate certificate;
  bool pass() const { return !diverged && converged && drift_bounded && decay_ok; }
};

TrainConfig train_config(const TrainSpec& s) {
  TrainConfig c;
  c.dt = s.dt;
  c.t_max = s.t_max;
  c.record_every = s.record_every;
  c.eta_mode = s.eta_mode == "custom" ? EtaMode::custom : EtaMode::paper;
  c.eta = s.eta;
  return c;
}

std::vector<double> make_targets(const ExperimentConfig& cfg, const NetworkWeights& w0, const InputSet& x,
                                 std::size_t seed_index) {
  if (cfg.train.target == "zero-residual") return forward_rescaled(w0, x, cfg.alpha);
  Rng rng(cfg.seed, {kTagTrainTarget, seed_index});
  std::vector<double> y(x.count());
  for (double& v : y) v = rng.uniform(-1.0, 1.0);
  return y;
}

SeedRun run_seed(const ExperimentConfig& cfg, const InputSet& x, std::uint64_t tag, std::size_t m,
                 std::size_t seed_index) {
  Rng rng(cfg.seed, {tag, m, seed_index});
  const NetworkWeights w0 = init_weights(m, x.dim(), cfg.alpha, rng);
  const std::vector<double> y = make_targets(cfg, w0, x, seed_index);
  SeedRun r;
  try {
    r.traj = train(w0, x, y, cfg.alpha, train_config(cfg.train));
  } catch (const TrainingDivergence& e) {
    r.diverged = true;
    r.message = e.what();
    return r;
  }
  r.initial_loss = r.traj.loss.front();
  r.final_loss = r.traj.loss.back();
  r.converged = r.final_loss <= 1e-6 * r.initial_loss;
  r.drift_bounded = r.traj.max_weight_drift < kernel_rescale(m, cfg.alpha);
  r.decay_ok = r.traj.decay_violations == 0;
  // Rate lambda_0 of the exponential bound, from the smallest eigenvalue seen
  // along the run in the time units of the flow.
  const double lambda0 = r.traj.min_lambda_min * r.traj.eta / kernel_rescale(m, cfg.alpha);
  r.certificate = theorem5_certificate(r.traj, lambda0);
  r.traj.final_weights = NetworkWeights{};
  return r;
}

}  // namespace

int cmd_train(const ExperimentConfig& cfg, ResultSet& out, std::ostream& log) {
  const InputSet x = make_inputs(cfg);
  start_summary(out, cfg);
  const TrainSpec& ts = cfg.train;
  const double drift_bound = kernel_rescale(ts.width, cfg.alpha);
  log << "train: " << ts.seeds << " seeds at width " << ts.width << ", alpha " << cfg.alpha << '\n';
  const std::vector<SeedRun> runs = parallel_map(
      ts.seeds, cfg.workers, [&](std::size_t s) { return run_seed(cfg, x, kTagTrainWeights, ts.width, s); });

  Table t;
  t.comments = {"width " + std::to_string(ts.width) + ", alpha " + num(cfg.alpha) + ", drift bound " +
                num(drift_bound)};
  t.columns = {"seed",           "status",        "dt",           "eta",
               "steps",          "initial_loss",  "final_loss",   "max_weight_drift",
               "min_lambda_min", "decay_violations", "worst_decay_ratio", "certificate", "certificate_worst_ratio",
               "message"};
  std::size_t passed = 0, diverged = 0, certified = 0;
  for (std::size_t s = 0; s < runs.size(); ++s) {
    const SeedRun& r = runs[s];
    if (r.diverged) {
      ++diverged;
      log << "  seed " << s << ": " << r.message << '\n';
      t.add_row({std::to_string(s), "diverged", "", "", "", "", "", "", "", "", "", "", "", "\"" + r.message + "\""});
      continue;
    }
    passed += r.pass();
    certified += r.certificate.holds;
    t.add_row({std::to_string(s), r.pass() ? "pass" : "fail", num(r.traj.dt), num(r.traj.eta),
               std::to_string(r.traj.steps), num(r.initial_loss), num(r.final_loss), num(r.traj.max_weight_drift),
               num(r.traj.min_lambda_min), std::to_string(r.traj.decay_violations), num(r.traj.worst_decay_ratio),
               r.certificate.holds ? "holds" : "violated", num(r.certificate.worst_ratio), ""});
    if (ts.write_trajectories)
      out.add_text("trajectories/seed_" + padded(s) + ".csv", text_of([&](std::ostream& os) {
                     write_trajectory(os, r.traj, "stablentk train, config " + out.digest() + ", seed " +
                                                      std::to_string(s));
                   }));
  }
  out.add_table("seeds.csv", std::move(t), "train");

  // Kernel and outer-gradient drift at t_max across widths.
  ordered_json drift = ordered_json::array();
  Table d;
  d.columns = {"width", "runs", "median_h2_drift", "median_outer_grad_drift"};
  std::vector<double> log_m, log_h2, log_g;
  for (std::size_t m : ts.drift_widths) {
    log << "train: drift at width " << m << '\n';
    const std::vector<SeedRun> dr = parallel_map(ts.drift_seeds, cfg.workers,
                                                 [&](std::size_t s) { return run_seed(cfg, x, kTagDrift, m, s); });
    std::vector<double> h2, g;
    for (const auto& r : dr) {
      if (r.diverged) continue;
      h2.push_back(r.traj.h2_drift.back());
      double sum = 0.0;
      for (const auto& gj : r.traj.outer_grad_drift) sum += gj.back();
      g.push_back(sum / static_cast<double>(r.traj.outer_grad_drift.size()));
    }
    if (h2.empty()) {
      d.add_row({std::to_string(m), "0", "", ""});
      continue;
    }
    const double mh2 = median(h2), mg = median(g);
    d.add_row({std::to_string(m), std::to_string(h2.size()), num(mh2), num(mg)});
    drift.push_back({{"width", m}, {"runs", h2.size()}, {"median_h2_drift", mh2}, {"median_outer_grad_drift", mg}});
    log_m.push_back(std::log(static_cast<double>(m)));
    log_h2.push_back(std::log(mh2));
    log_g.push_back(std::log(mg));
  }
  const bool have_drift = log_m.size() >= 2;
  const double h2_slope = have_drift ? regression_slope(log_m, log_h2) : 0.0;
  const double g_slope = have_drift ? regression_slope(log_m, log_g) : 0.0;
  d.comments = {"statistics at t = " + num(ts.t_max) + " over " + std::to_string(ts.drift_seeds) + " seeds",
                "slope of log median h2 drift vs log width " + num(h2_slope),
                "slope of log median outer-gradient drift vs log width " + num(g_slope)};
  if (!ts.drift_widths.empty()) out.add_table("drift_sweep.csv", std::move(d), "train");

  const double pass_rate = static_cast<double>(passed) / static_cast<double>(ts.seeds);
  const bool drift_ok = !have_drift || h2_slope < 0.0;
  const bool pass = pass_rate >= 0.9 && diverged == 0 && drift_ok;
  out.summary["width"] = ts.width;
  out.summary["drift_bound"] = drift_bound;
  out.summary["seeds"] = ts.seeds;
  out.summary["passed"] = passed;
  out.summary["diverged"] = diverged;
  out.summary["pass_rate"] = pass_rate;
  out.summary["certificate_pass_rate"] = static_cast<double>(certified) / static_cast<double>(ts.seeds);
  out.summary["drift"] = drift;
  out.summary["h2_drift_slope"] = h2_slope;
  out.summary["outer_grad_drift_slope"] = g_slope;
  out.summary["drift_pass"] = drift_ok;
  out.summary["pass"] = pass;
  log << "train: " << passed << "/" << ts.seeds << " seeds pass, " << diverged << " diverged, h2 drift slope "
      << h2_slope << '\n';
  return pass ? kExitPass : kExitAssertion;
}

// ---------------------------------------------------------------------------

namespace {

double kurtosis(const std::vector<double>& v) {
  const double n = static_cast<double>(v.size());
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
  double m2 = 0.0, m4 = 0.0;
  for (double e : v) {
    const double c = (e - mean) * (e - mean);
    m2 += c;
    m4 += c * c;
  }
  m2 /= n;
  m4 /= n;
  return m2 > 0.0 ? m4 / (m2 * m2) : 0.0;
}

}  // namespace

int cmd_paths(const ExperimentConfig& cfg, ResultSet& out, std::ostream& log) {
  start_summary(out, cfg);
  const PathsSpec& ps = cfg.paths;
  const std::size_t g = ps.grid, m = ps.width;
  std::vector<double> coord(g);
  for (std::size_t i = 0; i < g; ++i) coord[i] = g == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(g - 1);
  Matrix cols(2, g * g);
  for (std::size_t r = 0; r < g; ++r)
    for (std::size_t c = 0; c < g; ++c) {
      cols(0, r * g + c) = coord[c];
      cols(1, r * g + c) = coord[r];
    }
  const InputSet x(cols);

  struct Surface {
    std::vector<double> values;
    double top_share = 0.0;
  };
  ordered_json per_alpha = ordered_json::array();
  for (std::size_t a = 0; a < ps.alphas.size(); ++a) {
    const double alpha = ps.alphas[a];
    const std::vector<Surface> surfaces = parallel_map(ps.seeds, cfg.workers, [&](std::size_t s) {
      Rng rng(cfg.seed, {kTagPaths, a, s});
      const NetworkWeights w = init_weights(m, 2, alpha, rng);
      Surface out_s;
      out_s.values = forward_bounded(w, x, alpha);
      double total = 0.0, top = 0.0;
      for (double v : w.outer) {
        total += std::abs(v);
        top = std::max(top, std::abs(v));
      }
      out_s.top_share = total > 0.0 ? top / total : 0.0;
      return out_s;
    });
    std::vector<double> kurt, share;
    for (std::size_t s = 0; s < surfaces.size(); ++s) {
      const Surface& sf = surfaces[s];
      const std::string stem = "paths/alpha_" + alpha_label(alpha) + "_seed_" + padded(s);
      Table t;
      t.comments = {"alpha " + num(alpha) + ", width " + std::to_string(m) + ", tanh activation"};
      t.columns = {"x1", "x2", "value"};
      Matrix grid(g, g);
      for (std::size_t r = 0; r < g; ++r)
        for (std::size_t c = 0; c < g; ++c) {
          const double v = sf.values[r * g + c];
          t.add_row({num(coord[c]), num(coord[r]), num(v)});
          grid(g - 1 - r, c) = v;  // x2 increases upward
        }
      out.add_table(stem + ".csv", std::move(t), "paths");
      out.add_text(stem + ".svg", text_of([&](std::ostream& os) {
                     write_svg_heatmap(os, grid, "alpha " + alpha_label(alpha) + ", seed " + std::to_string(s) +
                                                     ", config " + out.digest());
                   }));
      kurt.push_back(kurtosis(sf.values));
      share.push_back(sf.top_share);
    }
    const double mk = std::accumulate(kurt.begin(), kurt.end(), 0.0) / static_cast<double>(kurt.size());
    const double msh = std::accumulate(share.begin(), share.end(), 0.0) / static_cast<double>(share.size());
    per_alpha.push_back({{"alpha", alpha}, {"mean_kurtosis", mk}, {"mean_top_neuron_share", msh}});
    log << "paths: alpha " << alpha << ": grid kurtosis " << mk << ", top outer-weight share " << msh << '\n';
  }
  out.summary["width"] = m;
  out.summary["grid"] = g;
  out.summary["surfaces"] = per_alpha;
  return kExitPass;
}

// ---------------------------------------------------------------------------

int run_experiment(const ExperimentConfig& cfg, ResultSet& out, std::ostream& log) {
  try {
    if (cfg.experiment == "limit-dist") return cmd_limit_dist(cfg, out, log);
    if (cfg.experiment == "ntk-limit") return cmd_ntk_limit(cfg, out, log);
    if (cfg.experiment == "train") return cmd_train(cfg, out, log);
    if (cfg.experiment == "paths") return cmd_paths(cfg, out, log);
    if (cfg.experiment == "calibrate") return cmd_calibrate(cfg, out, log);
    throw ConfigError("unknown experiment '" + cfg.experiment + "'");
  } catch (const ConfigError& e) {
    log << "error: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const std::invalid_argument& e) {
    log << "error: " << e.what() << '\n';
    return kExitInvalid;
  }
}

}  // namespace stablentk::cli
