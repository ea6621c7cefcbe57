#pragma once

// Taylor polynomials V_p of the optimal Lyapunov function, i.e. the analytic
// solution of <grad V(x), f(x)> = -|x|^2, V(0) = 0, computed order by order
// in the eigen-coordinates of the linearization.

#include <ostream>
#include <span>
#include <vector>

#include "basinscope/matrix.hpp"
#include "basinscope/series.hpp"
#include "basinscope/spectral.hpp"

namespace basinscope {

struct LyapunovOptions {
  /// Degree cap for dim >= 2 systems.
  int max_degree = 64;
  /// Degree cap for scalar systems, whose coefficients stay well scaled far
  /// longer (the continuation procedure works at p = 200).
  int max_degree_1d = 400;
  /// Abort when some |B_j| exceeds this.
  double coefficient_limit = 1e12;
};

/// Raised when coefficient growth makes the double-precision result useless.
class ConditioningError : public AnalysisError {
 public:
  using AnalysisError::AnalysisError;
};

struct LyapunovPoly {
  int degree = 0;
  /// W_p(z) in eigen-coordinates; coefficients B_j for 2 <= |j| <= p.
  Polynomial W;
  /// V_p(x) = W_p(S^{-1} x), real coefficients A_j.
  Polynomial V;
  SpectralData spec;
  /// Largest |Im A_j| seen before the coefficients were snapped to real.
  double imag_residue = 0.0;
};

/// V_2(x) = x^T P x with A^T P + P A = -I.
struct QuadraticForm {
  RMatrix P;
  double operator()(std::span<const double> x) const;
};

/// Runs the coefficient recurrence in increasing total degree.
Polynomial compute_B(const SpectralData& spec, int p, const LyapunovOptions& opts = {});

/// V_p(x) = W_p(S^{-1} x). Throws InternalError when the imaginary residue
/// exceeds 1e-9 * (1 + max |A_j|).
Polynomial back_transform(const Polynomial& W, const SpectralData& spec,
                          double* imag_residue = nullptr);

QuadraticForm solve_lyapunov(const RMatrix& A);

/// R = <grad V_p, f> + |x|^2 truncated to degree p; vanishes identically when
/// the recurrence is right.
Polynomial residual(const PolySystem& sys, const LyapunovPoly& L);

/// analyze + compute_B + back_transform.
LyapunovPoly compute_lyapunov(const PolySystem& sys, int p, const LyapunovOptions& opts = {});
LyapunovPoly compute_lyapunov(const SpectralData& spec, int p, const LyapunovOptions& opts = {});

/// <grad V, f> as an untruncated polynomial.
Polynomial lie_derivative(const Polynomial& V, const PolySystem& sys);

/// Text dump: one line per multi-index of degree 2..p (zeros included),
/// `j1 ... jn  re  im`, graded-lex order, 17 significant digits.
void write_coefficients(std::ostream& os, const Polynomial& V, int p);

}  // namespace basinscope
