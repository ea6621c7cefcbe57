#include "basinscope/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <utility>

namespace basinscope {

using Complex = std::complex<double>;

CMatrix to_complex(const RMatrix& a) {
  CMatrix c(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) c(i, j) = a(i, j);
  return c;
}

double max_abs(const CMatrix& a) {
  double m = 0.0;
  for (const auto& v : a.data()) m = std::max(m, std::abs(v));
  return m;
}

double max_abs(const RMatrix& a) {
  double m = 0.0;
  for (double v : a.data()) m = std::max(m, std::abs(v));
  return m;
}

double norm1(const CMatrix& a) {
  double best = 0.0;
  for (std::size_t j = 0; j < a.cols(); ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i) s += std::abs(a(i, j));
    best = std::max(best, s);
  }
  return best;
}

CMatrix inverse(const CMatrix& a) {
  if (!a.is_square()) throw std::invalid_argument("inverse of non-square matrix");
  const std::size_t n = a.rows();
  CMatrix m = a;
  CMatrix inv = CMatrix::identity(n);
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(m(r, col)) > std::abs(m(piv, col))) piv = r;
    if (m(piv, col) == Complex{}) throw std::runtime_error("singular matrix");
    if (piv != col)
      for (std::size_t j = 0; j < n; ++j) {
        std::swap(m(piv, j), m(col, j));
        std::swap(inv(piv, j), inv(col, j));
      }
    const Complex d = m(col, col);
    for (std::size_t j = 0; j < n; ++j) {
      m(col, j) /= d;
      inv(col, j) /= d;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col) continue;
      const Complex f = m(r, col);
      if (f == Complex{}) continue;
      for (std::size_t j = 0; j < n; ++j) {
        m(r, j) -= f * m(col, j);
        inv(r, j) -= f * inv(col, j);
      }
    }
  }
  return inv;
}

std::vector<double> solve(RMatrix a, std::vector<double> b, double tol) {
  const std::size_t n = a.rows();
  if (!a.is_square() || b.size() != n)
    throw std::invalid_argument("solve: shape mismatch");
  const double scale = std::max(max_abs(a), 1e-300);
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(a(r, col)) > std::abs(a(piv, col))) piv = r;
    if (std::abs(a(piv, col)) <= tol * scale)
      throw std::runtime_error("solve: singular linear system");
    if (piv != col) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a(piv, j), a(col, j));
      std::swap(b[piv], b[col]);
    }
    for (std::size_t r = col + 1; r < n; ++r) {
      const double f = a(r, col) / a(col, col);
      if (f == 0.0) continue;
      for (std::size_t j = col; j < n; ++j) a(r, j) -= f * a(col, j);
      b[r] -= f * b[col];
    }
  }
  std::vector<double> x(n);
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t j = i + 1; j < n; ++j) s -= a(i, j) * x[j];
    x[i] = s / a(i, i);
  }
  return x;
}

NullSpace null_space(CMatrix a, std::size_t nullity) {
  const std::size_t rows = a.rows();
  const std::size_t cols = a.cols();
  std::vector<std::size_t> colperm(cols);
  std::iota(colperm.begin(), colperm.end(), 0);

  if (nullity > cols) throw std::invalid_argument("null_space: nullity exceeds columns");
  // Row echelon form with full pivoting; stops early on an exactly zero
  // remainder, in which case more than nullity vectors come back.
  const std::size_t target_rank = std::min(rows, cols - nullity);
  std::size_t rank = 0;
  for (; rank < target_rank; ++rank) {
    std::size_t pr = rank, pc = rank;
    double best = -1.0;
    for (std::size_t r = rank; r < rows; ++r)
      for (std::size_t c = rank; c < cols; ++c)
        if (std::abs(a(r, c)) > best) {
          best = std::abs(a(r, c));
          pr = r;
          pc = c;
        }
    if (best == 0.0) break;
    if (pr != rank)
      for (std::size_t c = 0; c < cols; ++c) std::swap(a(pr, c), a(rank, c));
    if (pc != rank) {
      for (std::size_t r = 0; r < rows; ++r) std::swap(a(r, pc), a(r, rank));
      std::swap(colperm[pc], colperm[rank]);
    }
    for (std::size_t r = rank + 1; r < rows; ++r) {
      const Complex f = a(r, rank) / a(rank, rank);
      for (std::size_t c = rank; c < cols; ++c) a(r, c) -= f * a(rank, c);
    }
  }

  // Free variables are the permuted columns rank..cols-1; visit them in the
  // order of the original column index for determinism.
  std::vector<std::size_t> free_cols;
  for (std::size_t c = rank; c < cols; ++c) free_cols.push_back(c);
  std::sort(free_cols.begin(), free_cols.end(),
            [&](std::size_t x, std::size_t y) { return colperm[x] < colperm[y]; });

  NullSpace result;
  for (std::size_t r = rank; r < rows; ++r)
    for (std::size_t c = rank; c < cols; ++c)
      result.discarded_pivot = std::max(result.discarded_pivot, std::abs(a(r, c)));

  for (std::size_t fc : free_cols) {
    std::vector<Complex> y(cols);
    y[fc] = 1.0;
    for (std::size_t i = rank; i-- > 0;) {
      Complex s = 0.0;
      for (std::size_t c = i + 1; c < cols; ++c) s -= a(i, c) * y[c];
      y[i] = s / a(i, i);
    }
    std::vector<Complex> v(cols);
    for (std::size_t c = 0; c < cols; ++c) v[colperm[c]] = y[c];
    result.basis.push_back(std::move(v));
  }
  return result;
}

}  // namespace basinscope
