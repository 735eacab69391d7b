#include "stablentk/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

#include "stablentk/kernel.hpp"
#include "stablentk/montecarlo.hpp"
#include "stablentk/parallel.hpp"

namespace stablentk {

namespace {

// Stream tags keep the experiments' random streams disjoint.
constexpr std::uint64_t kTagTheorem1 = 0x7431;
constexpr std::uint64_t kTagTheorem2 = 0x7432;
constexpr std::uint64_t kTagLimitKernel = 0x6c6b;
constexpr std::uint64_t kTagTheorem3 = 0x7433;
constexpr std::uint64_t kTagCalibration = 0x6361;

}  // namespace

Matrix cf_grid(std::size_t k, std::size_t points_per_axis, double lo, double hi, std::size_t max_points) {
  if (k == 0) throw std::invalid_argument("cf_grid: dimension must be >= 1");
  std::size_t per_axis = points_per_axis;
  if (k >= 2) {
    per_axis = static_cast<std::size_t>(std::floor(std::pow(static_cast<double>(max_points), 1.0 / k) + 1e-9));
    per_axis = std::min(per_axis, points_per_axis);
  }
  if (per_axis < 2) throw std::invalid_argument("cf_grid: fewer than 2 points per axis");
  std::vector<double> axis(per_axis);
  for (std::size_t i = 0; i < per_axis; ++i)
    axis[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(per_axis - 1);
  std::size_t total = 1;
  for (std::size_t c = 0; c < k; ++c) total *= per_axis;
  Matrix grid(total, k);
  for (std::size_t p = 0; p < total; ++p) {
    std::size_t rem = p;
    for (std::size_t c = k; c-- > 0;) {
      grid(p, c) = axis[rem % per_axis];
      rem /= per_axis;
    }
  }
  return grid;
}

std::vector<std::complex<double>> ecf_values(const Matrix& samples, const Matrix& grid) {
  if (samples.rows() == 0) throw std::invalid_argument("ecf: no samples");
  if (samples.rows() < 100) throw std::invalid_argument("ecf: need at least 100 samples");
  if (samples.cols() != grid.cols()) throw std::invalid_argument("ecf: sample and grid dimensions differ");
  const double n = static_cast<double>(samples.rows());
  std::vector<std::complex<double>> out(grid.rows());
  for (std::size_t p = 0; p < grid.rows(); ++p) {
    double re = 0.0, im = 0.0;
    for (std::size_t s = 0; s < samples.rows(); ++s) {
      const double t = dot(grid.row(p), samples.row(s));
      re += std::cos(t);
      im += std::sin(t);
    }
    out[p] = {re / n, im / n};
  }
  return out;
}

EcfReport ecf(const Matrix& samples, const Matrix& grid, const CfFunction& reference) {
  EcfReport r;
  r.grid = grid;
  r.samples = samples.rows();
  r.empirical = ecf_values(samples, grid);
  r.reference.resize(grid.rows());
  for (std::size_t p = 0; p < grid.rows(); ++p) {
    r.reference[p] = reference(grid.row(p));
    r.sup_distance = std::max(r.sup_distance, std::abs(r.empirical[p] - r.reference[p]));
  }
  return r;
}

Matrix as_column(std::span<const double> v) {
  Matrix m(v.size(), 1);
  std::copy(v.begin(), v.end(), m.data().begin());
  return m;
}

HillEstimate hill_tail_index(std::span<const double> samples, double tail_fraction) {
  if (samples.size() < 10000) throw std::invalid_argument("hill_tail_index: need at least 10^4 samples");
  if (!(tail_fraction > 0.0 && tail_fraction <= 0.05))
    throw std::invalid_argument("hill_tail_index: tail_fraction must lie in (0, 0.05]");
  const std::size_t kk = static_cast<std::size_t>(tail_fraction * static_cast<double>(samples.size()));
  if (kk < 10) throw std::invalid_argument("hill_tail_index: fewer than 10 tail points");
  std::vector<double> a(samples.size());
  std::transform(samples.begin(), samples.end(), a.begin(), [](double v) { return std::abs(v); });
  std::nth_element(a.begin(), a.begin() + static_cast<std::ptrdiff_t>(kk), a.end(), std::greater<>());
  const double threshold = a[kk];
  if (!(threshold > 0.0)) throw std::invalid_argument("hill_tail_index: tail threshold is zero");
  std::sort(a.begin(), a.begin() + static_cast<std::ptrdiff_t>(kk), std::greater<>());
  double s = 0.0;
  for (std::size_t i = 0; i < kk; ++i) s += std::log(a[i] / threshold);
  HillEstimate h;
  h.tail_count = kk;
  h.alpha = static_cast<double>(kk) / s;
  h.standard_error = h.alpha / std::sqrt(static_cast<double>(kk));
  return h;
}

namespace {

double kolmogorov_q(double lambda) {
  if (lambda < 1e-3) return 1.0;
  double sum = 0.0, sign = 1.0;
  for (int j = 1; j <= 200; ++j) {
    const double term = sign * std::exp(-2.0 * j * j * lambda * lambda);
    sum += term;
    if (std::abs(term) < 1e-16) break;
    sign = -sign;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

}  // namespace

KsResult ks_two_sample(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("ks_two_sample: empty sample");
  std::vector<double> x(a.begin(), a.end()), y(b.begin(), b.end());
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const double na = static_cast<double>(x.size()), nb = static_cast<double>(y.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < x.size() && j < y.size()) {
    const double v = std::min(x[i], y[j]);
    while (i < x.size() && x[i] == v) ++i;
    while (j < y.size() && y[j] == v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  const double en = std::sqrt(na * nb / (na + nb));
  return {d, kolmogorov_q((en + 0.12 + 0.11 / en) * d)};
}

namespace {

std::vector<double> ranks(std::span<const double> v) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t p, std::size_t q) { return v[p] < v[q]; });
  std::vector<double> r(v.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t e = i;
    while (e + 1 < idx.size() && v[idx[e + 1]] == v[idx[i]]) ++e;
    const double avg = 0.5 * static_cast<double>(i + e) + 1.0;
    for (std::size_t t = i; t <= e; ++t) r[idx[t]] = avg;
    i = e + 1;
  }
  return r;
}

double pearson(std::span<const double> a, std::span<const double> b) {
  const double n = static_cast<double>(a.size());
  const double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
  const double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  if (saa == 0.0 || sbb == 0.0) return 0.0;
  return sab / std::sqrt(saa * sbb);
}

}  // namespace

double spearman(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.size() < 2) throw std::invalid_argument("spearman: need two samples of equal size >= 2");
  const std::vector<double> ra = ranks(a), rb = ranks(b);
  return pearson(ra, rb);
}

double regression_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("regression_slope: need >= 2 paired points");
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  if (sxx == 0.0) throw std::invalid_argument("regression_slope: x values are all equal");
  return sxy / sxx;
}

double quantile(std::vector<double> v, double q) {
  if (v.empty()) throw std::invalid_argument("quantile: empty sample");
  if (!(q >= 0.0 && q <= 1.0)) throw std::invalid_argument("quantile: q must lie in [0, 1]");
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

LevyTailReport levy_tail_check(const Matrix& samples, double alpha, const DirectionSet& a, double target,
                               std::span<const double> n_grid) {
  if (samples.rows() == 0) throw std::invalid_argument("levy_tail_check: no samples");
  if (n_grid.empty()) throw std::invalid_argument("levy_tail_check: empty n grid");
  const double total = static_cast<double>(samples.rows());
  std::vector<double> norms(samples.rows());
  std::vector<bool> in_a(samples.rows());
  std::vector<double> dir(samples.cols());
  for (std::size_t s = 0; s < samples.rows(); ++s) {
    norms[s] = norm2(samples.row(s));
    if (norms[s] == 0.0) continue;
    for (std::size_t c = 0; c < dir.size(); ++c) dir[c] = samples(s, c) / norms[s];
    in_a[s] = a(dir);
  }
  LevyTailReport rep;
  rep.target = target;
  rep.all_within_3se = true;
  std::vector<double> log_n, log_err;
  for (double n : n_grid) {
    const double radius = std::pow(n, 1.0 / alpha);
    std::size_t hits = 0;
    for (std::size_t s = 0; s < samples.rows(); ++s)
      if (in_a[s] && norms[s] > radius) ++hits;
    const double p = static_cast<double>(hits) / total;
    LevyTailPoint pt;
    pt.n = n;
    pt.target = target;
    pt.estimate = n * p;
    // Binomial standard error; floored at one hit so an empty tail is not
    // reported as infinitely precise.
    pt.standard_error = n * std::sqrt(std::max(p * (1.0 - p), 1.0 / total) / total);
    pt.within_3se = std::abs(pt.estimate - target) <= 3.0 * pt.standard_error;
    rep.all_within_3se = rep.all_within_3se && pt.within_3se;
    if (target > 0.0 && pt.estimate != target) {
      log_n.push_back(std::log(n));
      log_err.push_back(std::log(std::abs(pt.estimate / target - 1.0)));
    }
    rep.points.push_back(pt);
  }
  if (log_n.size() >= 2) rep.relative_error_slope = regression_slope(log_n, log_err);
  return rep;
}

namespace {

void finish_sweep(SweepResult& res) {
  std::vector<double> lx, ly;
  res.strictly_decreasing = true;
  for (std::size_t i = 0; i < res.points.size(); ++i) {
    lx.push_back(std::log(static_cast<double>(res.points[i].width)));
    ly.push_back(std::log(std::max(res.points[i].statistic, 1e-300)));
    if (i > 0 && !(res.points[i].statistic < res.points[i - 1].statistic)) res.strictly_decreasing = false;
  }
  res.slope = lx.size() >= 2 ? regression_slope(lx, ly) : 0.0;
}

void check_widths(const std::vector<std::size_t>& widths) {
  if (widths.empty()) throw std::invalid_argument("sweep: no widths");
  for (std::size_t i = 0; i < widths.size(); ++i) {
    if (widths[i] < 2) throw std::invalid_argument("sweep: widths must be >= 2");
    if (i > 0 && widths[i] <= widths[i - 1]) throw std::invalid_argument("sweep: widths must be strictly increasing");
  }
}

std::vector<double> column_of(const Matrix& m, std::size_t c) {
  std::vector<double> v(m.rows());
  for (std::size_t r = 0; r < m.rows(); ++r) v[r] = m(r, c);
  return v;
}

}  // namespace

SweepResult theorem1_sweep(const InputSet& x, double alpha, const std::vector<std::size_t>& widths,
                           const SweepOptions& opt) {
  check_widths(widths);
  const Matrix grid = cf_grid(x.count(), opt.grid_points);
  CfFunction reference;
  if (alpha == 2.0) {
    const Matrix sigma = gaussian_relu_covariance(x);
    reference = [sigma](std::span<const double> z) {
      double q = 0.0;
      for (std::size_t r = 0; r < z.size(); ++r)
        for (std::size_t s = 0; s < z.size(); ++s) q += z[r] * sigma(r, s) * z[s];
      return std::complex<double>(std::exp(-0.5 * q), 0.0);
    };
  } else {
    const DiscreteSpectralMeasure gamma = spectral_gamma_X(x, alpha);
    reference = [gamma, alpha](std::span<const double> z) { return cf_symmetric(z, gamma, alpha); };
  }
  SweepResult res;
  for (std::size_t m : widths) {
    const Matrix out = mc::network_outputs(x, alpha, {opt.seed, kTagTheorem1, m, opt.samples}, opt.workers);
    SweepPoint pt;
    pt.width = m;
    pt.ecf = ecf(out, grid, reference);
    pt.statistic = pt.ecf.sup_distance;
    if (out.rows() >= 10000) pt.hill = hill_tail_index(column_of(out, 0), opt.hill_tail_fraction);
    res.points.push_back(pt);
  }
  finish_sweep(res);
  return res;
}

double kernel_ks_distance(const std::vector<Matrix>& kernels, const std::vector<Matrix>& limit) {
  if (kernels.empty() || limit.empty()) throw std::invalid_argument("kernel_ks_distance: empty sample");
  const std::size_t k = kernels.front().rows();
  double worst = 0.0;
  std::vector<double> a(kernels.size()), b(limit.size());
  for (std::size_t j = 0; j < k; ++j)
    for (std::size_t l = j; l < k; ++l) {
      for (std::size_t s = 0; s < kernels.size(); ++s) a[s] = kernels[s](j, l);
      for (std::size_t s = 0; s < limit.size(); ++s) b[s] = limit[s](j, l);
      worst = std::max(worst, ks_two_sample(a, b).distance);
    }
  return worst;
}

std::vector<Matrix> limit_kernel_draws(const LimitKernelLaw& law, std::size_t n, std::uint64_t seed, int workers) {
  return parallel_map(n, workers, [&](std::size_t r) {
    Rng rng(seed, {kTagLimitKernel, static_cast<std::uint64_t>(r)});
    return sample_limit_kernel(law, rng).total();
  });
}

SweepResult theorem2_sweep(const InputSet& x, double alpha, const std::vector<std::size_t>& widths,
                           const SweepOptions& opt, const LimitKernelLaw& law) {
  check_widths(widths);
  const std::vector<Matrix> limit = limit_kernel_draws(law, opt.samples, opt.seed, opt.workers);
  SweepResult res;
  for (std::size_t m : widths) {
    const auto pairs = mc::init_kernels(x, alpha, {opt.seed, kTagTheorem2, m, opt.samples}, opt.workers);
    std::vector<Matrix> totals;
    std::vector<double> diag, h1, h2;
    totals.reserve(pairs.size());
    for (const auto& p : pairs) {
      totals.push_back(p.total());
      diag.push_back(totals.back()(0, 0));
      h1.push_back(p.h1(0, 0));
      h2.push_back(p.h2(0, 0));
    }
    SweepPoint pt;
    pt.width = m;
    pt.statistic = kernel_ks_distance(totals, limit);
    if (diag.size() >= 10000) pt.hill = hill_tail_index(diag, opt.hill_tail_fraction);
    pt.rank_correlation = spearman(h1, h2);
    res.points.push_back(pt);
  }
  finish_sweep(res);
  return res;
}

CalibrationReport calibrate_from_samples(const std::vector<Matrix>& observed, const InputSet& x, double alpha,
                                         const std::vector<OrthantEstimate>& probs, std::uint64_t seed,
                                         int workers) {
  if (observed.empty()) throw std::invalid_argument("calibrate: no observed kernels");
  const std::size_t n = observed.size();
  const LimitKernelLaw lit = make_limit_kernel_law(x, alpha, probs, PrefactorMode::paper_literal);
  const LimitKernelLaw tc = make_limit_kernel_law(x, alpha, probs, PrefactorMode::tail_consistent);
  CalibrationReport rep;
  rep.ks_paper_literal = kernel_ks_distance(observed, limit_kernel_draws(lit, n, derive_seed(seed, {1}), workers));
  rep.ks_tail_consistent = kernel_ks_distance(observed, limit_kernel_draws(tc, n, derive_seed(seed, {2}), workers));
  rep.noise_level = std::sqrt(2.0 / static_cast<double>(n));
  rep.inconclusive = std::abs(rep.ks_paper_literal - rep.ks_tail_consistent) < rep.noise_level;
  rep.selected = (!rep.inconclusive && rep.ks_paper_literal < rep.ks_tail_consistent) ? PrefactorMode::paper_literal
                                                                                       : PrefactorMode::tail_consistent;
  return rep;
}

CalibrationReport calibrate_prefactor(const InputSet& x, double alpha, std::size_t m_large,
                                      const std::vector<OrthantEstimate>& probs, const SweepOptions& opt) {
  if (m_large < (std::size_t{1} << 16)) throw std::invalid_argument("calibrate_prefactor: m_large must be >= 2^16");
  const auto pairs = mc::init_kernels(x, alpha, {opt.seed, kTagCalibration, m_large, opt.samples}, opt.workers);
  std::vector<Matrix> totals;
  totals.reserve(pairs.size());
  for (const auto& p : pairs) totals.push_back(p.total());
  return calibrate_from_samples(totals, x, alpha, probs, derive_seed(opt.seed, {kTagCalibration}), opt.workers);
}

EigenQuantileReport theorem3_quantile(const InputSet& x, double alpha, std::size_t m, std::size_t seeds,
                                      std::uint64_t seed, int workers) {
  if (!x.unit_norm()) throw std::invalid_argument("theorem3_quantile: inputs must be flagged unit norm");
  if (!x.linearly_independent())
    throw std::invalid_argument("theorem3_quantile: inputs are not linearly independent");
  if (seeds == 0) throw std::invalid_argument("theorem3_quantile: need at least one seed");
  const auto pairs = mc::init_kernels(x, alpha, {seed, kTagTheorem3, m, seeds}, workers);
  EigenQuantileReport rep;
  rep.worst_part_eigenvalue = std::numeric_limits<double>::infinity();
  for (const auto& p : pairs) {
    const double total = min_eigenvalue(p.total());
    rep.lambda_min.push_back(total);
    rep.worst_part_eigenvalue =
        std::min({rep.worst_part_eigenvalue, total, min_eigenvalue(p.h1), min_eigenvalue(p.h2)});
  }
  rep.q05 = quantile(rep.lambda_min, 0.05);
  rep.smallest = *std::min_element(rep.lambda_min.begin(), rep.lambda_min.end());
  rep.psd = rep.worst_part_eigenvalue >= -1e-10;
  return rep;
}

}  // namespace stablentk
