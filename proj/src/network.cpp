#include "stablentk/network.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "stablentk/stable.hpp"

namespace stablentk {

void NetworkWeights::validate() const {
  if (inner.rows() != outer.size())
    throw std::invalid_argument("NetworkWeights: inner has " + std::to_string(inner.rows()) +
                                " rows but outer has " + std::to_string(outer.size()) + " entries");
  if (outer.size() < 2) throw std::invalid_argument("NetworkWeights: width must be >= 2");
  if (inner.cols() < 1) throw std::invalid_argument("NetworkWeights: input dimension must be >= 1");
  for (double v : inner.data())
    if (!std::isfinite(v)) throw std::invalid_argument("NetworkWeights: non-finite inner weight");
  for (double v : outer)
    if (!std::isfinite(v)) throw std::invalid_argument("NetworkWeights: non-finite outer weight");
}

InputSet::InputSet(Matrix columns, bool unit_norm) : x_(std::move(columns)), unit_norm_(unit_norm) {
  if (x_.rows() == 0 || x_.cols() == 0) throw std::invalid_argument("InputSet: empty input matrix");
  if (unit_norm_) {
    for (std::size_t j = 0; j < x_.cols(); ++j) {
      double n2 = 0.0;
      for (std::size_t c = 0; c < x_.rows(); ++c) n2 += x_(c, j) * x_(c, j);
      if (std::abs(std::sqrt(n2) - 1.0) > 1e-12)
        throw std::invalid_argument("InputSet: column " + std::to_string(j) + " does not have unit norm");
    }
  }
}

InputSet InputSet::from_columns(const std::vector<std::vector<double>>& cols, bool unit_norm) {
  if (cols.empty()) throw std::invalid_argument("InputSet: no columns");
  Matrix x(cols.front().size(), cols.size());
  for (std::size_t j = 0; j < cols.size(); ++j) {
    if (cols[j].size() != x.rows()) throw std::invalid_argument("InputSet: columns have unequal lengths");
    for (std::size_t c = 0; c < x.rows(); ++c) x(c, j) = cols[j][c];
  }
  return InputSet(std::move(x), unit_norm);
}

std::vector<double> InputSet::column(std::size_t j) const {
  std::vector<double> c(x_.rows());
  for (std::size_t i = 0; i < x_.rows(); ++i) c[i] = x_(i, j);
  return c;
}

Matrix InputSet::gram() const { return matmul(x_.transpose(), x_); }

bool InputSet::linearly_independent(double tol) const {
  if (count() > dim()) return false;
  const Matrix g = gram();
  double scale = 0.0;
  for (std::size_t j = 0; j < g.rows(); ++j) scale = std::max(scale, g(j, j));
  return min_eigenvalue(g) > tol * std::max(scale, 1e-300);
}

double rescale_divisor(std::size_t m, double alpha) {
  if (m < 2) throw std::invalid_argument("rescale_divisor: width must be >= 2");
  const double md = static_cast<double>(m);
  return std::pow(md * std::log(md), 1.0 / alpha);
}

double output_scale(std::size_t m, double alpha) {
  if (m < 2) throw std::invalid_argument("output_scale: width must be >= 2");
  if (alpha == 2.0) return 1.0 / std::sqrt(static_cast<double>(m));
  return 1.0 / rescale_divisor(m, alpha);
}

NetworkWeights init_weights(std::size_t m, std::size_t d, double alpha, Rng& rng) {
  if (m < 2) throw std::invalid_argument("init_weights: width must be >= 2");
  if (d < 1) throw std::invalid_argument("init_weights: input dimension must be >= 1");
  StableParams{alpha, 0.0, 1.0}.validate();
  std::vector<double> draws(m * (d + 1));
  sample_symmetric_standard(alpha, rng, draws);
  NetworkWeights w{Matrix(m, d), std::vector<double>(m)};
  for (std::size_t i = 0; i < m; ++i) {
    const double* row = draws.data() + i * (d + 1);
    for (std::size_t c = 0; c < d; ++c) w.inner(i, c) = row[c];
    w.outer[i] = row[d];
  }
  return w;
}

namespace {

void check_dims(const NetworkWeights& w, std::size_t d) {
  if (w.inner.rows() != w.outer.size()) throw std::invalid_argument("network: inner/outer width mismatch");
  if (w.inner.cols() != d)
    throw std::invalid_argument("network: input dimension " + std::to_string(d) + " does not match weights (" +
                                std::to_string(w.inner.cols()) + ")");
}

double preactivation(const NetworkWeights& w, std::size_t i, std::span<const double> x) {
  return dot(w.inner.row(i), x);
}

}  // namespace

std::vector<double> forward_raw(const NetworkWeights& w, const InputSet& x) {
  check_dims(w, x.dim());
  std::vector<double> out(x.count(), 0.0);
  for (std::size_t j = 0; j < x.count(); ++j) {
    const std::vector<double> xj = x.column(j);
    double s = 0.0;
    for (std::size_t i = 0; i < w.width(); ++i) {
      const double a = preactivation(w, i, xj);
      if (a > 0.0) s += w.outer[i] * a;
    }
    out[j] = s;
  }
  return out;
}

std::vector<double> forward_rescaled(const NetworkWeights& w, const InputSet& x, double alpha) {
  const double scale = output_scale(w.width(), alpha);
  std::vector<double> out = forward_raw(w, x);
  for (double& v : out) v *= scale;
  return out;
}

std::vector<double> grad_outer(const NetworkWeights& w, std::span<const double> x, double alpha) {
  check_dims(w, x.size());
  const double scale = output_scale(w.width(), alpha);
  std::vector<double> g(w.width(), 0.0);
  for (std::size_t i = 0; i < w.width(); ++i) {
    const double a = preactivation(w, i, x);
    if (a > 0.0) g[i] = scale * a;
  }
  return g;
}

Matrix grad_inner(const NetworkWeights& w, std::span<const double> x, double alpha) {
  check_dims(w, x.size());
  const double scale = output_scale(w.width(), alpha);
  Matrix g(w.width(), x.size());
  for (std::size_t i = 0; i < w.width(); ++i) {
    if (preactivation(w, i, x) <= 0.0) continue;
    for (std::size_t c = 0; c < x.size(); ++c) g(i, c) = scale * w.outer[i] * x[c];
  }
  return g;
}

std::vector<double> forward_bounded(const NetworkWeights& w, const InputSet& x, double alpha) {
  check_dims(w, x.dim());
  if (w.width() < 1) throw std::invalid_argument("forward_bounded: width must be >= 1");
  const double scale = std::pow(static_cast<double>(w.width()), -1.0 / alpha);
  std::vector<double> out(x.count(), 0.0);
  for (std::size_t j = 0; j < x.count(); ++j) {
    const std::vector<double> xj = x.column(j);
    double s = 0.0;
    for (std::size_t i = 0; i < w.width(); ++i) s += w.outer[i] * std::tanh(preactivation(w, i, xj));
    out[j] = scale * s;
  }
  return out;
}

Matrix gaussian_relu_covariance(const InputSet& x) {
  const std::size_t k = x.count();
  const Matrix g = x.gram();
  Matrix sigma(k, k);
  for (std::size_t r = 0; r < k; ++r)
    for (std::size_t s = 0; s < k; ++s) {
      const double nr = std::sqrt(g(r, r)), ns = std::sqrt(g(s, s));
      if (nr == 0.0 || ns == 0.0) continue;
      const double cosine = std::clamp(g(r, s) / (nr * ns), -1.0, 1.0);
      const double theta = std::acos(cosine);
      sigma(r, s) = 2.0 * nr * ns * (std::sin(theta) + (std::numbers::pi - theta) * cosine) / std::numbers::pi;
    }
  return sigma;
}

}  // namespace stablentk
