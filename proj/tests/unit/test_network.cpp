#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "stablentk/inputs.hpp"
#include "stablentk/network.hpp"
#include "stablentk/stable.hpp"

using namespace stablentk;

namespace {

NetworkWeights small_net() {
  NetworkWeights w;
  w.inner = Matrix{{1.0, -2.0}, {0.5, 0.5}, {-1.0, 0.0}};
  w.outer = {2.0, -1.0, 3.0};
  return w;
}

double relu(double v) { return v > 0.0 ? v : 0.0; }

}  // namespace

TEST(Network, RescaleFactors) {
  EXPECT_DOUBLE_EQ(rescale_divisor(16, 1.0), 16.0 * std::log(16.0));
  EXPECT_DOUBLE_EQ(output_scale(16, 0.5), std::pow(16.0 * std::log(16.0), -2.0));
  EXPECT_DOUBLE_EQ(output_scale(16, 2.0), 0.25);
  EXPECT_THROW(rescale_divisor(1, 1.0), std::invalid_argument);
}

TEST(Network, ForwardByHand) {
  const NetworkWeights w = small_net();
  const InputSet x = InputSet::from_columns({{1.0, 0.0}, {0.0, 1.0}, {-1.0, -1.0}});
  // Pre-activations per neuron: (1, -2, 1), (0.5, 0.5, -1), (-1, 0, 1).
  const std::vector<double> f = forward_raw(w, x);
  EXPECT_DOUBLE_EQ(f[0], 2.0 * 1.0 - 1.0 * 0.5);
  EXPECT_DOUBLE_EQ(f[1], -1.0 * 0.5);
  EXPECT_DOUBLE_EQ(f[2], 2.0 * 1.0 + 3.0 * 1.0);
  const std::vector<double> fr = forward_rescaled(w, x, 1.5);
  for (std::size_t j = 0; j < 3; ++j) EXPECT_DOUBLE_EQ(fr[j], f[j] * output_scale(3, 1.5));
}

TEST(Network, GradientsMatchFiniteDifferences) {
  Rng rng(5);
  NetworkWeights w = init_weights(7, 3, 1.3, rng);
  const std::vector<double> xv{0.3, -0.8, 0.5};
  const InputSet x = InputSet::from_columns({xv});
  const double alpha = 1.3, h = 1e-6;
  const std::vector<double> go = grad_outer(w, xv, alpha);
  const Matrix gi = grad_inner(w, xv, alpha);
  for (std::size_t i = 0; i < w.width(); ++i) {
    const double pre = w.inner(i, 0) * xv[0] + w.inner(i, 1) * xv[1] + w.inner(i, 2) * xv[2];
    if (std::abs(pre) < 1e-3) continue;
    NetworkWeights p = w, m = w;
    p.outer[i] += h;
    m.outer[i] -= h;
    const double fd = (forward_rescaled(p, x, alpha)[0] - forward_rescaled(m, x, alpha)[0]) / (2 * h);
    EXPECT_NEAR(go[i], fd, 1e-6 * std::max(1.0, std::abs(fd)));
    for (std::size_t c = 0; c < 3; ++c) {
      NetworkWeights pi = w, mi = w;
      pi.inner(i, c) += h;
      mi.inner(i, c) -= h;
      const double fdi = (forward_rescaled(pi, x, alpha)[0] - forward_rescaled(mi, x, alpha)[0]) / (2 * h);
      EXPECT_NEAR(gi(i, c), fdi, 1e-6 * std::max(1.0, std::abs(fdi)));
    }
  }
}

TEST(Network, InactiveNeuronsHaveZeroGradient) {
  const NetworkWeights w = small_net();
  const std::vector<double> xv{1.0, 0.0};
  const std::vector<double> go = grad_outer(w, xv, 1.0);
  EXPECT_EQ(go[2], 0.0);
  const Matrix gi = grad_inner(w, xv, 1.0);
  EXPECT_EQ(gi(2, 0), 0.0);
  EXPECT_EQ(gi(2, 1), 0.0);
}

TEST(Network, InitDrawOrderIsNeuronByNeuron) {
  Rng a(77), b(77);
  const NetworkWeights w = init_weights(5, 3, 0.9, a);
  for (std::size_t i = 0; i < 5; ++i) {
    for (std::size_t c = 0; c < 3; ++c) EXPECT_EQ(w.inner(i, c), sample_symmetric_standard(0.9, b));
    EXPECT_EQ(w.outer[i], sample_symmetric_standard(0.9, b));
  }
}

TEST(Network, ValidateRejectsBadWeights) {
  NetworkWeights w = small_net();
  EXPECT_NO_THROW(w.validate());
  w.outer.pop_back();
  EXPECT_THROW(w.validate(), std::invalid_argument);
  w = small_net();
  w.inner(0, 0) = NAN;
  EXPECT_THROW(w.validate(), std::invalid_argument);
}

TEST(Network, BoundedForward) {
  const NetworkWeights w = small_net();
  const InputSet x = InputSet::from_columns({{1.0, 0.0}});
  const double expect = (2.0 * std::tanh(1.0) - std::tanh(0.5) + 3.0 * std::tanh(-1.0)) / std::pow(3.0, 1.0 / 0.5);
  EXPECT_NEAR(forward_bounded(w, x, 0.5)[0], expect, 1e-15);
}

TEST(Network, GaussianCovarianceMatchesQuadrature) {
  // 2 E[relu(<w,a>) relu(<w,b>)] for w ~ N(0, 2 I_2), by trapezoid rule in
  // polar coordinates (angle) and Simpson's rule (radius).
  const std::vector<std::vector<double>> cols{{1.0, 0.0}, {std::cos(1.0), std::sin(1.0)}, {-0.6, 0.3}};
  const InputSet x = InputSet::from_columns(cols);
  const Matrix sigma = gaussian_relu_covariance(x);
  const int nt = 20000, nr = 4000;
  const double rmax = 20.0, hr = rmax / nr;
  double radial = 0.0;
  for (int i = 0; i <= nr; ++i) {
    const double r = i * hr;
    const double wgt = (i == 0 || i == nr) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    radial += wgt * r * r * r * std::exp(-r * r / 4.0);
  }
  radial *= hr / 3.0;
  for (std::size_t a = 0; a < 3; ++a)
    for (std::size_t b = 0; b < 3; ++b) {
      double ang = 0.0;
      for (int t = 0; t < nt; ++t) {
        const double th = 2.0 * std::numbers::pi * t / nt;
        const double c = std::cos(th), s = std::sin(th);
        ang += relu(c * cols[a][0] + s * cols[a][1]) * relu(c * cols[b][0] + s * cols[b][1]);
      }
      ang *= 2.0 * std::numbers::pi / nt;
      const double expect = 2.0 * radial * ang / (4.0 * std::numbers::pi);
      EXPECT_NEAR(sigma(a, b), expect, 1e-6) << a << "," << b;
    }
}

TEST(Inputs, Generators) {
  Rng rng(3);
  const InputSet s = random_unit_sphere_inputs(5, 4, rng);
  EXPECT_TRUE(s.unit_norm());
  for (std::size_t j = 0; j < 4; ++j) {
    const auto c = s.column(j);
    double n = 0.0;
    for (double v : c) n += v * v;
    EXPECT_NEAR(n, 1.0, 1e-12);
  }
  const InputSet o = random_orthonormal_inputs(6, 4, rng);
  const Matrix g = o.gram();
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) EXPECT_NEAR(g(i, j), i == j ? 1.0 : 0.0, 1e-12);
  EXPECT_TRUE(o.linearly_independent());
  EXPECT_THROW(random_orthonormal_inputs(3, 4, rng), std::invalid_argument);
  const InputSet ax = axis_aligned_inputs(3, 2);
  EXPECT_EQ(ax.matrix(), (Matrix{{1, 0}, {0, 1}, {0, 0}}));
  EXPECT_TRUE(explicit_inputs({{0.6, 0.8}}).unit_norm());
  EXPECT_FALSE(explicit_inputs({{1.0, 1.0}}).unit_norm());
  EXPECT_FALSE(explicit_inputs({{1.0, 0.0}, {1.0, 0.0}}).linearly_independent());
  EXPECT_THROW(InputSet(Matrix{{2.0}}, true), std::invalid_argument);
}
