#include "stablentk/inputs.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace stablentk {

namespace {

void check_sizes(std::size_t d, std::size_t k) {
  if (d == 0 || k == 0) throw std::invalid_argument("inputs: d and k must be >= 1");
}

void normalize(std::vector<double>& v) {
  const double n = norm2(v);
  for (double& e : v) e /= n;
}

}  // namespace

InputSet axis_aligned_inputs(std::size_t d, std::size_t k) {
  check_sizes(d, k);
  if (k > d) throw std::invalid_argument("axis-aligned inputs need k <= d");
  Matrix x(d, k);
  for (std::size_t j = 0; j < k; ++j) x(j, j) = 1.0;
  return InputSet(std::move(x), true);
}

InputSet random_unit_sphere_inputs(std::size_t d, std::size_t k, Rng& rng) {
  check_sizes(d, k);
  std::vector<std::vector<double>> cols;
  while (cols.size() < k) {
    std::vector<double> v(d);
    for (double& e : v) e = rng.normal();
    if (norm2(v) < 1e-8) continue;
    normalize(v);
    cols.push_back(std::move(v));
  }
  return InputSet::from_columns(cols, true);
}

InputSet random_orthonormal_inputs(std::size_t d, std::size_t k, Rng& rng) {
  check_sizes(d, k);
  if (k > d) throw std::invalid_argument("orthonormal inputs need k <= d");
  std::vector<std::vector<double>> cols;
  while (cols.size() < k) {
    std::vector<double> v(d);
    for (double& e : v) e = rng.normal();
    // Two Gram-Schmidt passes keep the basis orthonormal to rounding.
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& c : cols) {
        const double p = dot(v, c);
        for (std::size_t i = 0; i < d; ++i) v[i] -= p * c[i];
      }
    if (norm2(v) < 1e-6) continue;
    normalize(v);
    cols.push_back(std::move(v));
  }
  return InputSet::from_columns(cols, true);
}

InputSet explicit_inputs(const std::vector<std::vector<double>>& columns) {
  bool unit = true;
  for (const auto& c : columns) unit = unit && std::abs(norm2(c) - 1.0) <= 1e-12;
  return InputSet::from_columns(columns, unit);
}

}  // namespace stablentk
