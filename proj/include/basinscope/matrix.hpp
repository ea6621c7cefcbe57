#pragma once

// Small dense matrices (n <= 6 in practice) with the handful of operations
// the spectral and Lyapunov steps need.

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <stdexcept>
#include <vector>

namespace basinscope {

template <typename T>
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, T fill = T{})
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  Matrix(std::initializer_list<std::initializer_list<T>> rows);

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = T{1};
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool is_square() const { return rows_ == cols_; }

  T& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const T& operator()(std::size_t i, std::size_t j) const {
    return data_[i * cols_ + j];
  }

  Matrix transpose() const {
    Matrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  friend Matrix operator*(const Matrix& a, const Matrix& b) {
    if (a.cols_ != b.rows_) throw std::invalid_argument("matrix shape mismatch");
    Matrix c(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i)
      for (std::size_t k = 0; k < a.cols_; ++k) {
        const T aik = a(i, k);
        for (std::size_t j = 0; j < b.cols_; ++j) c(i, j) += aik * b(k, j);
      }
    return c;
  }

  friend Matrix operator-(const Matrix& a, const Matrix& b) {
    if (a.rows_ != b.rows_ || a.cols_ != b.cols_)
      throw std::invalid_argument("matrix shape mismatch");
    Matrix c = a;
    for (std::size_t i = 0; i < c.data_.size(); ++i) c.data_[i] -= b.data_[i];
    return c;
  }

  friend Matrix operator+(const Matrix& a, const Matrix& b) {
    if (a.rows_ != b.rows_ || a.cols_ != b.cols_)
      throw std::invalid_argument("matrix shape mismatch");
    Matrix c = a;
    for (std::size_t i = 0; i < c.data_.size(); ++i) c.data_[i] += b.data_[i];
    return c;
  }

  const std::vector<T>& data() const { return data_; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

template <typename T>
Matrix<T>::Matrix(std::initializer_list<std::initializer_list<T>> rows)
    : rows_(rows.size()), cols_(rows.size() ? rows.begin()->size() : 0) {
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) throw std::invalid_argument("ragged matrix literal");
    data_.insert(data_.end(), r.begin(), r.end());
  }
}

using RMatrix = Matrix<double>;
using CMatrix = Matrix<std::complex<double>>;

CMatrix to_complex(const RMatrix& a);

/// Largest absolute entry.
double max_abs(const CMatrix& a);
double max_abs(const RMatrix& a);

/// Induced 1-norm.
double norm1(const CMatrix& a);

/// Inverse by Gauss-Jordan elimination with partial pivoting. Throws
/// std::runtime_error on an exactly singular pivot.
CMatrix inverse(const CMatrix& a);

/// Solves a x = b (real, square) by Gaussian elimination with partial
/// pivoting. Throws std::runtime_error when a pivot falls below tol * max|a|.
std::vector<double> solve(RMatrix a, std::vector<double> b, double tol = 1e-14);

struct NullSpace {
  std::vector<std::vector<std::complex<double>>> basis;
  /// Largest pivot that was discarded to reach the requested nullity; small
  /// relative to the matrix scale when the nullity is genuine.
  double discarded_pivot = 0.0;
};

/// Basis of a nullity-dimensional null space of a, from Gaussian elimination
/// with full pivoting stopped after cols - nullity pivots. Vectors come out in
/// the order of their (original) free-variable columns.
NullSpace null_space(CMatrix a, std::size_t nullity);

}  // namespace basinscope
