#pragma once

// Sparse multivariate polynomials over complex doubles, keyed by exponent
// multi-index. Every symbolic step of the pipeline (the vector field, the
// diagonalized field, the Lyapunov polynomials) lives in this type.

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <map>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "basinscope/matrix.hpp"

namespace basinscope {

using Complex = std::complex<double>;

class DimensionMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Exponent vector j = (j_1, ..., j_n) of one monomial z_1^{j_1} ... z_n^{j_n}.
class MultiIndex {
 public:
  MultiIndex() = default;
  explicit MultiIndex(std::size_t dim) : exps_(dim, 0) {}
  MultiIndex(std::initializer_list<int> exps);
  explicit MultiIndex(std::vector<int> exps);

  /// The unit index e_i in dimension dim.
  static MultiIndex unit(std::size_t dim, std::size_t i);

  std::size_t dim() const { return exps_.size(); }
  int operator[](std::size_t i) const { return exps_[i]; }
  int& operator[](std::size_t i) { return exps_[i]; }
  int total_degree() const;
  const std::vector<int>& exponents() const { return exps_; }

  /// True when every entry of *this is <= the matching entry of other.
  bool divides(const MultiIndex& other) const;

  MultiIndex operator+(const MultiIndex& other) const;

  friend bool operator==(const MultiIndex&, const MultiIndex&) = default;

 private:
  std::vector<int> exps_;
};

/// Graded lexicographic order: lower total degree first, then larger
/// leading exponents first (x1^2 < x1 x2 < x2^2).
struct GradedLex {
  bool operator()(const MultiIndex& a, const MultiIndex& b) const;
};

std::ostream& operator<<(std::ostream& os, const MultiIndex& j);

/// All multi-indices of dimension dim and total degree exactly m, in graded
/// lexicographic order.
std::vector<MultiIndex> indices_of_degree(std::size_t dim, int m);

class Polynomial {
 public:
  using TermMap = std::map<MultiIndex, Complex, GradedLex>;

  Polynomial() = default;
  explicit Polynomial(std::size_t dim) : dim_(dim) {}

  /// The single-variable polynomial x_i in dimension dim.
  static Polynomial variable(std::size_t dim, std::size_t i);
  static Polynomial constant(std::size_t dim, Complex c);
  static Polynomial monomial(const MultiIndex& j, Complex c);

  std::size_t dim() const { return dim_; }
  const TermMap& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  bool is_zero() const { return terms_.empty(); }

  /// Max total degree among stored terms; -1 for the zero polynomial.
  int degree() const;
  /// Smallest total degree among stored terms; -1 for the zero polynomial.
  int min_degree() const;

  Complex coefficient(const MultiIndex& j) const;

  /// Adds c to the coefficient of z^j. A coefficient that becomes exactly 0
  /// is pruned.
  void add_term(const MultiIndex& j, Complex c);
  void set_term(const MultiIndex& j, Complex c);
  void erase_term(const MultiIndex& j) { terms_.erase(j); }

  /// Terms with total degree in [lo, hi].
  Polynomial degree_range(int lo, int hi) const;
  Polynomial truncated(int max_degree) const { return degree_range(0, max_degree); }
  Polynomial homogeneous_part(int m) const { return degree_range(m, m); }

  /// Largest |Im c| and |c| over all coefficients.
  double max_imag() const;
  double max_abs() const;
  /// Copy with imaginary parts dropped.
  Polynomial real_part() const;
  Polynomial conj() const;

  Complex evaluate(std::span<const Complex> x) const;
  /// Evaluates at a real point. Throws std::domain_error when the imaginary
  /// residue exceeds 1e-9 * (1 + |value|).
  double evaluate_real(std::span<const double> x) const;

  friend bool operator==(const Polynomial&, const Polynomial&) = default;

 private:
  std::size_t dim_ = 0;
  TermMap terms_;
};

Polynomial add(const Polynomial& a, const Polynomial& b);
Polynomial subtract(const Polynomial& a, const Polynomial& b);
Polynomial scale(const Polynomial& a, Complex s);
/// Product with all terms of total degree > trunc discarded.
Polynomial multiply(const Polynomial& a, const Polynomial& b, int trunc);
/// Untruncated product.
Polynomial multiply(const Polynomial& a, const Polynomial& b);

Polynomial operator+(const Polynomial& a, const Polynomial& b);
Polynomial operator-(const Polynomial& a, const Polynomial& b);
Polynomial operator*(Complex s, const Polynomial& a);

/// q(z) = p(M z), truncated to degree trunc (trunc < 0 means deg p).
Polynomial compose_linear(const Polynomial& p, const CMatrix& M, int trunc = -1);

Polynomial derivative(const Polynomial& p, std::size_t i);
std::vector<Polynomial> gradient(const Polynomial& p);

/// Sum_i a_i b_i over two polynomial vectors of equal length.
Polynomial dot(std::span<const Polynomial> a, std::span<const Polynomial> b);

/// q(y) = p(center + y), exact binomial re-expansion.
Polynomial recenter(const Polynomial& p, std::span<const Complex> center);
Polynomial recenter(const Polynomial& p, std::span<const double> center);

/// Drops coefficients with |c| < eps. Intended for report output only.
Polynomial clean(const Polynomial& p, double eps);

std::ostream& operator<<(std::ostream& os, const Polynomial& p);

/// Flattened real polynomial for fast repeated evaluation at real points.
/// Built from a polynomial whose imaginary parts are ignored.
class CompiledPolynomial {
 public:
  CompiledPolynomial() = default;
  explicit CompiledPolynomial(const Polynomial& p);

  std::size_t dim() const { return dim_; }
  double operator()(std::span<const double> x) const;

 private:
  std::size_t dim_ = 0;
  int max_exp_ = 0;
  std::vector<int> exps_;  // size() * dim_, row-major
  std::vector<double> coeffs_;
};

/// Evaluates several compiled polynomials sharing one power table.
class CompiledField {
 public:
  CompiledField() = default;
  explicit CompiledField(std::span<const Polynomial> components);

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return components_.size(); }
  void operator()(std::span<const double> x, std::span<double> out) const;

 private:
  std::size_t dim_ = 0;
  std::vector<CompiledPolynomial> components_;
};

}  // namespace basinscope
