#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include "basinscope/matrix.hpp"
#include "basinscope/series.hpp"

namespace basinscope {

/// Base for analysis failures that abort the pipeline with a diagnostic.
class AnalysisError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Some eigenvalue of the linearization has non-negative real part.
class NotHurwitz : public AnalysisError {
 public:
  using AnalysisError::AnalysisError;
};

/// The linearization has no well-conditioned eigenbasis.
class NotDiagonalizable : public AnalysisError {
 public:
  using AnalysisError::AnalysisError;
};

/// A numerical invariant that should hold structurally was violated.
class InternalError : public AnalysisError {
 public:
  using AnalysisError::AnalysisError;
};

/// Polynomial vector field x' = f(x) with f(0) = 0.
struct PolySystem {
  std::size_t dim = 0;
  std::vector<Polynomial> components;

  PolySystem() = default;
  explicit PolySystem(std::vector<Polynomial> f);

  /// Throws std::invalid_argument when dimensions disagree, a component has
  /// a constant term, or a component is identically zero.
  void validate() const;
  int degree() const;
};

struct SpectralData {
  std::vector<Complex> eigenvalues;
  CMatrix S;
  CMatrix S_inv;
  /// g = S^{-1} o f o S, with linear part exactly lambda_i z_i.
  std::vector<Polynomial> g;
};

RMatrix jacobian_at_origin(const PolySystem& sys);

/// Eigen-decomposition A = S diag(lambda) S^{-1} for small dense A (n <= 6).
/// Eigenvalues are sorted by (Re, Im) descending; each column of S has unit
/// norm with its first nonzero entry real and positive; conjugate eigenvalues
/// get conjugate columns.
SpectralData diagonalize(const RMatrix& A);

/// Completes spec with g_i(z) = sum_k (S^{-1})_{ik} f_k(S z).
SpectralData transform_system(const PolySystem& sys, SpectralData spec);

/// jacobian -> diagonalize -> transform_system.
SpectralData analyze(const PolySystem& sys);

namespace detail {
/// Coefficients c_0..c_n (c_n = 1) of det(lambda I - A), Faddeev-LeVerrier.
std::vector<double> characteristic_polynomial(const RMatrix& A);
/// All complex roots of sum_k c_k x^k by Aberth-Ehrlich iteration.
std::vector<Complex> polynomial_roots(const std::vector<double>& coeffs);
}  // namespace detail

}  // namespace basinscope
