#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "stablentk/limits.hpp"
#include "stablentk/linalg.hpp"
#include "stablentk/network.hpp"
#include "stablentk/stable.hpp"

namespace stablentk {

// ---------------------------------------------------------------------------
// Empirical characteristic functions

/// Evaluation grid for a k-dimensional CF: `points_per_axis` points on
/// [lo, hi] for k = 1; for k >= 2 a tensor grid with floor(max_points^{1/k})
/// points per axis (14 x 14 = 196 for k = 2 with the default 200).
Matrix cf_grid(std::size_t k, std::size_t points_per_axis = 61, double lo = -3.0, double hi = 3.0,
               std::size_t max_points = 200);

struct EcfReport {
  Matrix grid;                                 ///< one evaluation point per row
  std::vector<std::complex<double>> empirical;
  std::vector<std::complex<double>> reference;
  double sup_distance = 0.0;
  std::size_t samples = 0;
};

/// Mean of exp(i <z, sample>) at every grid row. Samples are rows of
/// `samples`. Needs at least 100 samples.
std::vector<std::complex<double>> ecf_values(const Matrix& samples, const Matrix& grid);

using CfFunction = std::function<std::complex<double>(std::span<const double>)>;

/// ECF against a reference CF on `grid`; sup_distance = max |ECF - ref|.
EcfReport ecf(const Matrix& samples, const Matrix& grid, const CfFunction& reference);

/// Wraps a plain vector of reals as an n x 1 sample matrix.
Matrix as_column(std::span<const double> v);

// ---------------------------------------------------------------------------
// One-dimensional statistics

struct HillEstimate {
  double alpha = 0.0;
  double standard_error = 0.0;
  std::size_t tail_count = 0;
};

/// Hill estimator on |samples| using the top floor(tail_fraction * n) order
/// statistics. Requires n >= 10^4 and 0 < tail_fraction <= 0.05.
HillEstimate hill_tail_index(std::span<const double> samples, double tail_fraction);

struct KsResult {
  double distance = 0.0;
  double p_value = 1.0;
};

/// Two-sample Kolmogorov-Smirnov statistic with the asymptotic p-value.
KsResult ks_two_sample(std::span<const double> a, std::span<const double> b);

/// Spearman rank correlation (average ranks for ties).
double spearman(std::span<const double> a, std::span<const double> b);

/// Least-squares slope of y on x.
double regression_slope(std::span<const double> x, std::span<const double> y);

/// Empirical q-quantile (linear interpolation between order statistics).
double quantile(std::vector<double> v, double q);

// ---------------------------------------------------------------------------
// Tail criterion n P(|xi| > n^{1/alpha}, xi/|xi| in A) -> C_alpha Gamma(A)

using DirectionSet = std::function<bool(std::span<const double>)>;

struct LevyTailPoint {
  double n = 0.0;
  double estimate = 0.0;
  double standard_error = 0.0;
  double target = 0.0;
  bool within_3se = false;
};

struct LevyTailReport {
  std::vector<LevyTailPoint> points;
  double target = 0.0;
  bool all_within_3se = false;
  /// Slope of log|estimate/target - 1| vs log n over points with nonzero
  /// relative error; negative when the estimates approach the target.
  double relative_error_slope = 0.0;
};

/// Evaluates the tail criterion on the rows of `samples` for each n in
/// `n_grid`, against target C_alpha * Gamma(A) = `target`.
LevyTailReport levy_tail_check(const Matrix& samples, double alpha, const DirectionSet& a, double target,
                               std::span<const double> n_grid);

// ---------------------------------------------------------------------------
// Width sweeps

struct SweepPoint {
  std::size_t width = 0;
  double statistic = 0.0;  ///< ECF sup distance (Theorem 1) or KS distance (Theorem 2)
  HillEstimate hill;       ///< tail index of coordinate 0 / entry (0, 0)
  double rank_correlation = 0.0;  ///< Theorem 2 only: Spearman(h1[0,0], h2[0,0])
  EcfReport ecf;                  ///< Theorem 1 only: the full grid behind `statistic`
};

struct SweepResult {
  std::vector<SweepPoint> points;
  /// Least-squares slope of log(statistic) against log(width).
  double slope = 0.0;
  /// Every adjacent pair strictly decreasing.
  bool strictly_decreasing = false;
};

struct SweepOptions {
  std::size_t samples = 10000;
  std::uint64_t seed = 0;
  int workers = 0;
  double hill_tail_fraction = 0.05;
  std::size_t grid_points = 61;
};

/// For each width: `samples` fresh networks, rescaled outputs, ECF sup
/// distance against cf_symmetric(., Gamma_X, alpha) (or, at alpha = 2, the
/// Gaussian CF exp(-z' Sigma z / 2) with the arc-cosine covariance).
SweepResult theorem1_sweep(const InputSet& x, double alpha, const std::vector<std::size_t>& widths,
                           const SweepOptions& opt);

/// For each width: `samples` kernels at initialization; max over upper
/// triangle entries of the KS distance to `samples` limit-kernel draws from
/// `law`; Hill index of entry (0, 0) of the total kernel; Spearman
/// correlation between the (0, 0) entries of the two parts.
SweepResult theorem2_sweep(const InputSet& x, double alpha, const std::vector<std::size_t>& widths,
                           const SweepOptions& opt, const LimitKernelLaw& law);

// ---------------------------------------------------------------------------
// Prefactor calibration

struct CalibrationReport {
  double ks_paper_literal = 0.0;
  double ks_tail_consistent = 0.0;
  double noise_level = 0.0;  ///< |difference| below this is inconclusive
  bool inconclusive = false;
  PrefactorMode selected = PrefactorMode::tail_consistent;
};

/// Max over upper-triangle entries of the KS distance between `kernels` and
/// `limit` (both lists of k x k matrices).
double kernel_ks_distance(const std::vector<Matrix>& kernels, const std::vector<Matrix>& limit);

/// Compares `observed` kernels against fresh draws of both limit-law
/// conventions (same number of draws, streams keyed by `seed`) and picks the
/// closer one. Differences below sqrt(2/n) are reported as inconclusive and
/// resolve to tail_consistent.
CalibrationReport calibrate_from_samples(const std::vector<Matrix>& observed, const InputSet& x, double alpha,
                                         const std::vector<OrthantEstimate>& probs, std::uint64_t seed,
                                         int workers = 0);

/// Finite-width calibration: `samples` kernels at width m_large >= 2^16.
CalibrationReport calibrate_prefactor(const InputSet& x, double alpha, std::size_t m_large,
                                      const std::vector<OrthantEstimate>& probs, const SweepOptions& opt);

/// `n` draws of the limit kernel (total), replicate r keyed by (seed, r).
std::vector<Matrix> limit_kernel_draws(const LimitKernelLaw& law, std::size_t n, std::uint64_t seed,
                                       int workers = 0);

// ---------------------------------------------------------------------------
// Minimum eigenvalue at initialization

struct EigenQuantileReport {
  std::vector<double> lambda_min;  ///< per seed, lambda_min of the rescaled kernel
  double q05 = 0.0;
  double smallest = 0.0;
  /// Smallest eigenvalue over all seeds of h1, h2 and h1 + h2.
  double worst_part_eigenvalue = 0.0;
  bool psd = false;  ///< worst_part_eigenvalue >= -1e-10
};

/// Empirical distribution of lambda_min(H~(W(0), X)) over `seeds` networks of
/// width m. Rejects inputs that are not unit norm and linearly independent.
EigenQuantileReport theorem3_quantile(const InputSet& x, double alpha, std::size_t m, std::size_t seeds,
                                      std::uint64_t seed, int workers = 0);

}  // namespace stablentk
