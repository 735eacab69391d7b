#include "stablentk/kernel.hpp"

#include <cmath>
#include <stdexcept>

namespace stablentk {

double kernel_rescale(std::size_t m, double alpha) {
  if (alpha == 2.0) return 1.0;
  return std::pow(std::log(static_cast<double>(m)), 2.0 / alpha);
}

Matrix ntk(const NetworkWeights& w, const InputSet& x, double alpha) {
  const std::size_t k = x.count();
  std::vector<std::vector<double>> outer_grads(k);
  std::vector<Matrix> inner_grads(k);
  for (std::size_t j = 0; j < k; ++j) {
    const std::vector<double> xj = x.column(j);
    outer_grads[j] = grad_outer(w, xj, alpha);
    inner_grads[j] = grad_inner(w, xj, alpha);
  }
  Matrix h(k, k);
  for (std::size_t j = 0; j < k; ++j)
    for (std::size_t l = j; l < k; ++l) {
      const double v = dot(outer_grads[j], outer_grads[l]) + dot(inner_grads[j].data(), inner_grads[l].data());
      h(j, l) = h(l, j) = v;
    }
  return h;
}

Matrix rescaled_ntk(const NetworkWeights& w, const InputSet& x, double alpha) {
  return ntk(w, x, alpha) * kernel_rescale(w.width(), alpha);
}

KernelPair decompose(const NetworkWeights& w, const InputSet& x, double alpha) {
  const std::size_t k = x.count(), m = w.width();
  if (w.input_dim() != x.dim()) throw std::invalid_argument("decompose: input dimension mismatch");
  const Matrix gram = x.gram();
  KernelPair out{Matrix(k, k), Matrix(k, k)};
  std::vector<double> act(k);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      double a = 0.0;
      for (std::size_t c = 0; c < x.dim(); ++c) a += w.inner(i, c) * x(c, j);
      act[j] = a > 0.0 ? a : 0.0;
    }
    const double w2 = w.outer[i] * w.outer[i];
    for (std::size_t j = 0; j < k; ++j) {
      if (act[j] == 0.0) continue;
      for (std::size_t l = 0; l < k; ++l) {
        if (act[l] == 0.0) continue;
        out.h1(j, l) += w2 * gram(j, l);
        out.h2(j, l) += act[j] * act[l];
      }
    }
  }
  const double scale = std::pow(static_cast<double>(m), -2.0 / alpha);
  out.h1 *= scale;
  out.h2 *= scale;
  return out;
}

}  // namespace stablentk
