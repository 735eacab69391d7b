#include <gtest/gtest.h>

#include <cmath>

#include "stablentk/inputs.hpp"
#include "stablentk/verify.hpp"

using namespace stablentk;

TEST(Ecf, TrivialCases) {
  const Matrix grid = cf_grid(1);
  EXPECT_EQ(grid.rows(), 61u);
  EXPECT_DOUBLE_EQ(grid(0, 0), -3.0);
  EXPECT_DOUBLE_EQ(grid(60, 0), 3.0);
  const Matrix zeros(100, 1);
  for (const auto& v : ecf_values(zeros, grid)) EXPECT_EQ(v, std::complex<double>(1.0, 0.0));
  Matrix pm(200, 1);
  for (std::size_t i = 0; i < 200; ++i) pm(i, 0) = i % 2 ? 1.0 : -1.0;
  const EcfReport rep = ecf(pm, grid, [](std::span<const double> z) { return std::complex<double>(std::cos(z[0])); });
  EXPECT_LT(rep.sup_distance, 1e-14);
  EXPECT_EQ(rep.samples, 200u);
  EXPECT_THROW(ecf_values(Matrix(10, 1), grid), std::invalid_argument);
  EXPECT_EQ(cf_grid(2).rows(), 196u);
  EXPECT_EQ(cf_grid(2).cols(), 2u);
}

TEST(Ecf, ModulusAtMostOne) {
  Rng rng(1);
  std::vector<double> v(1000);
  sample_symmetric_standard(0.8, rng, v);
  for (const auto& c : ecf_values(as_column(v), cf_grid(1))) EXPECT_LE(std::abs(c), 1.0 + 1e-15);
}

TEST(Hill, ParetoOracle) {
  Rng rng(2);
  std::vector<double> v(100000);
  for (double& x : v) x = std::pow(rng.uniform(), -1.0 / 1.5);
  const HillEstimate h = hill_tail_index(v, 0.05);
  EXPECT_EQ(h.tail_count, 5000u);
  EXPECT_NEAR(h.alpha, 1.5, 3.0 * h.standard_error);
  // Scale invariance.
  std::vector<double> scaled(v);
  for (double& x : scaled) x *= 7.5;
  EXPECT_NEAR(hill_tail_index(scaled, 0.05).alpha, h.alpha, 1e-12);
}

TEST(Hill, Preconditions) {
  std::vector<double> small(9999, 1.0);
  EXPECT_THROW(hill_tail_index(small, 0.05), std::invalid_argument);
  std::vector<double> v(10000, 1.0);
  EXPECT_THROW(hill_tail_index(v, 0.06), std::invalid_argument);
  EXPECT_THROW(hill_tail_index(v, 0.0), std::invalid_argument);
}

TEST(Ks, TrivialCases) {
  const std::vector<double> a{1, 2, 3, 4}, b{10, 11, 12};
  EXPECT_EQ(ks_two_sample(a, a).distance, 0.0);
  EXPECT_EQ(ks_two_sample(a, a).p_value, 1.0);
  EXPECT_EQ(ks_two_sample(a, b).distance, 1.0);
}

TEST(Ks, SameLawPassesMostOfTheTime) {
  int ok = 0;
  for (std::uint64_t rep = 0; rep < 100; ++rep) {
    Rng r1(10, {rep, 1}), r2(10, {rep, 2});
    std::vector<double> a(10000), b(10000);
    sample_symmetric_standard(1.2, r1, a);
    sample_symmetric_standard(1.2, r2, b);
    ok += ks_two_sample(a, b).p_value > 0.01;
  }
  EXPECT_GE(ok, 95);
}

TEST(Stats, SpearmanSlopeQuantile) {
  const std::vector<double> x{1, 2, 3, 4, 5}, y{2, 4, 8, 16, 32}, z{5, 4, 3, 2, 1};
  EXPECT_NEAR(spearman(x, y), 1.0, 1e-15);
  EXPECT_NEAR(spearman(x, z), -1.0, 1e-15);
  const std::vector<double> line{1, 3, 5, 7, 9};
  EXPECT_NEAR(regression_slope(x, line), 2.0, 1e-14);
  EXPECT_DOUBLE_EQ(quantile({3, 1, 2, 4, 5}, 0.5), 3.0);
  EXPECT_DOUBLE_EQ(quantile({1, 2}, 0.25), 1.25);
}

TEST(LevyTail, ExactlyStableHitsTarget) {
  const double a = 1.3;
  Rng rng(3);
  std::vector<double> v(1000000);
  sample_symmetric_standard(a, rng, v);
  const std::vector<double> grid{100, 1000, 10000};
  const LevyTailReport rep =
      levy_tail_check(as_column(v), a, [](std::span<const double> d) { return d[0] > 0.0; }, c_alpha(a) / 2.0, grid);
  EXPECT_TRUE(rep.all_within_3se);
  // A set carrying no spectral mass.
  Matrix two(20000, 2);
  for (std::size_t i = 0; i < two.rows(); ++i) two(i, 0) = v[i];
  const LevyTailReport none =
      levy_tail_check(two, a, [](std::span<const double> d) { return std::abs(d[1]) > 0.5; }, 0.0, grid);
  for (const auto& p : none.points) EXPECT_EQ(p.estimate, 0.0);
}

TEST(Theorem3, GuardsAndScalarCase) {
  const InputSet dup = explicit_inputs({{1.0, 0.0}, {1.0, 0.0}});
  EXPECT_THROW(theorem3_quantile(dup, 1.5, 64, 5, 1), std::invalid_argument);
  EXPECT_THROW(theorem3_quantile(InputSet::from_columns({{2.0, 0.0}}), 1.5, 64, 5, 1), std::invalid_argument);
  const EigenQuantileReport rep = theorem3_quantile(axis_aligned_inputs(1, 1), 1.5, 64, 30, 1);
  for (double l : rep.lambda_min) EXPECT_GT(l, 0.0);
  EXPECT_TRUE(rep.psd);
}

TEST(Sweeps, ReproducibleAcrossWorkers) {
  const InputSet x = axis_aligned_inputs(2, 2);
  SweepOptions opt;
  opt.samples = 500;
  opt.seed = 4;
  opt.workers = 1;
  const SweepResult a = theorem1_sweep(x, 1.0, {32, 64}, opt);
  opt.workers = 3;
  const SweepResult b = theorem1_sweep(x, 1.0, {32, 64}, opt);
  ASSERT_EQ(a.points.size(), 2u);
  EXPECT_EQ(a.points[1].statistic, b.points[1].statistic);
  EXPECT_EQ(a.slope, b.slope);
  EXPECT_THROW(theorem1_sweep(x, 1.0, {64, 32}, opt), std::invalid_argument);
}

TEST(Calibration, SelfTestSelectsGenerator) {
  const InputSet x = InputSet::from_columns({{1.0}});
  Rng prng(5);
  const auto probs = orthant_probs(x, 1.0, 10000, prng);
  for (PrefactorMode mode : {PrefactorMode::paper_literal, PrefactorMode::tail_consistent}) {
    const LimitKernelLaw law = make_limit_kernel_law(x, 1.0, probs, mode);
    const std::vector<Matrix> observed = limit_kernel_draws(law, 2000, 77);
    const CalibrationReport rep = calibrate_from_samples(observed, x, 1.0, probs, 78);
    EXPECT_EQ(rep.selected, mode);
    EXPECT_FALSE(rep.inconclusive);
  }
}
