#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace stablentk {

/// Dense row-major matrix of doubles. Sized for the small k x k kernels and
/// m x d weight blocks this library handles; no expression templates.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  static Matrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool square() const { return rows_ == cols_; }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }

  Matrix transpose() const;

  Matrix& operator+=(const Matrix& other);
  Matrix& operator-=(const Matrix& other);
  Matrix& operator*=(double s);

  friend Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
  friend Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
  friend Matrix operator*(Matrix a, double s) { return a *= s; }
  friend Matrix operator*(double s, Matrix a) { return a *= s; }
  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

Matrix matmul(const Matrix& a, const Matrix& b);

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);

double frobenius_norm(const Matrix& a);

/// ||A - B||_F. Throws std::invalid_argument on shape mismatch.
double frobenius_distance(const Matrix& a, const Matrix& b);

/// Largest |A(i,j) - A(j,i)|.
double asymmetry(const Matrix& a);

/// Eigenvalues (ascending) and, optionally, eigenvectors (as columns) of a
/// symmetric matrix by the cyclic Jacobi method.
struct SymmetricEigen {
  std::vector<double> values;
  Matrix vectors;
};

/// Cyclic Jacobi eigendecomposition. The input is symmetrized as
/// (A + A^T)/2 first; inputs with asymmetry above `symmetry_tol` (relative to
/// the largest entry) are rejected with std::invalid_argument.
SymmetricEigen symmetric_eigen(const Matrix& a, double symmetry_tol = 1e-8);

/// Smallest eigenvalue of a symmetric matrix; same validation as
/// symmetric_eigen.
double min_eigenvalue(const Matrix& a, double symmetry_tol = 1e-8);
double max_eigenvalue(const Matrix& a, double symmetry_tol = 1e-8);

}  // namespace stablentk
