#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "stablentk/linalg.hpp"
#include "stablentk/rng.hpp"

namespace stablentk {

/// Parameters of the shallow ReLU network x -> sum_i w_i relu(<w_i^(0), x>).
struct NetworkWeights {
  Matrix inner;               ///< m x d, row i is w_i^(0)
  std::vector<double> outer;  ///< length m

  std::size_t width() const { return outer.size(); }
  std::size_t input_dim() const { return inner.cols(); }

  /// Throws std::invalid_argument on shape mismatch or non-finite entries.
  void validate() const;
};

/// The k training inputs, stored as the columns of a d x k matrix.
class InputSet {
 public:
  /// `columns` is d x k. With `unit_norm` set, every column must have norm
  /// 1 within 1e-12.
  explicit InputSet(Matrix columns, bool unit_norm = false);

  /// Builds from a list of column vectors.
  static InputSet from_columns(const std::vector<std::vector<double>>& cols, bool unit_norm = false);

  std::size_t dim() const { return x_.rows(); }
  std::size_t count() const { return x_.cols(); }
  bool unit_norm() const { return unit_norm_; }
  const Matrix& matrix() const { return x_; }

  double operator()(std::size_t coord, std::size_t j) const { return x_(coord, j); }
  std::vector<double> column(std::size_t j) const;

  /// k x k matrix of <x_j, x_j'>.
  Matrix gram() const;

  /// True when the columns are linearly independent (requires k <= d).
  bool linearly_independent(double tol = 1e-10) const;

 private:
  Matrix x_;
  bool unit_norm_;
};

/// Natural-log rescaling divisor (m log m)^{1/alpha}; requires m >= 2.
double rescale_divisor(std::size_t m, double alpha);

/// Output scaling used for a given alpha: (m log m)^{-1/alpha} for
/// alpha < 2, and the finite-variance m^{-1/2} for the alpha = 2 baseline.
double output_scale(std::size_t m, double alpha);

/// Draws all m*d + m weights i.i.d. St(alpha, 1). Draw order is neuron by
/// neuron: the d inner weights of row i, then w_i.
NetworkWeights init_weights(std::size_t m, std::size_t d, double alpha, Rng& rng);

/// f_m(W, x_j) = sum_i w_i <w_i^(0), x_j> I(<w_i^(0), x_j> > 0), j = 1..k.
std::vector<double> forward_raw(const NetworkWeights& w, const InputSet& x);

/// forward_raw divided by (m log m)^{1/alpha}.
std::vector<double> forward_rescaled(const NetworkWeights& w, const InputSet& x, double alpha);

/// Gradient of the rescaled output at input `x` with respect to the outer
/// weights. Zero where the pre-activation is <= 0.
std::vector<double> grad_outer(const NetworkWeights& w, std::span<const double> x, double alpha);

/// Gradient of the rescaled output at `x` with respect to the inner weights
/// (m x d). Rows of inactive neurons are zero.
Matrix grad_inner(const NetworkWeights& w, std::span<const double> x, double alpha);

/// Bounded-activation network sum_i w_i tanh(<w_i^(0), x_j>) / m^{1/alpha}.
std::vector<double> forward_bounded(const NetworkWeights& w, const InputSet& x, double alpha);

/// Covariance of the Gaussian limit of m^{-1/2} f_m when all weights are
/// St(2, 1) (variance 2): Sigma[r, s] = 2 E[relu(<w, x_r>) relu(<w, x_s>)]
/// with w ~ N(0, 2 I). Closed-form arc-cosine kernel.
Matrix gaussian_relu_covariance(const InputSet& x);

}  // namespace stablentk
