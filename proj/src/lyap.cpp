#include "basinscope/lyap.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>
#include <utility>

namespace basinscope {

namespace {

struct FieldTerm {
  MultiIndex k;
  Complex b;
  int degree;
};

std::string describe(const MultiIndex& j) {
  std::ostringstream os;
  os << j;
  return os.str();
}

}  // namespace

double QuadraticForm::operator()(std::span<const double> x) const {
  double s = 0.0;
  for (std::size_t i = 0; i < P.rows(); ++i)
    for (std::size_t k = 0; k < P.cols(); ++k) s += x[i] * P(i, k) * x[k];
  return s;
}

Polynomial compute_B(const SpectralData& spec, int p, const LyapunovOptions& opts) {
  const std::size_t n = spec.eigenvalues.size();
  if (n == 0 || spec.g.size() != n || spec.S.rows() != n)
    throw std::invalid_argument("compute_B: incomplete spectral data");
  if (p < 2) throw std::invalid_argument("compute_B: degree must be >= 2");
  const int cap = n == 1 ? opts.max_degree_1d : opts.max_degree;
  if (p > cap)
    throw std::invalid_argument("compute_B: degree " + std::to_string(p) +
                                " exceeds the cap of " + std::to_string(cap));

  const auto& lambda = spec.eigenvalues;
  const CMatrix& S = spec.S;
  Polynomial W(n);

  // |j| = 2 from the quadratic identity <grad W_2, diag(lambda) z> = -|S z|^2.
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a; b < n; ++b) {
      Complex sum = 0.0;
      for (std::size_t i = 0; i < n; ++i) sum += S(i, a) * S(i, b);
      const Complex B = a == b ? -sum / (2.0 * lambda[a]) : -2.0 * sum / (lambda[a] + lambda[b]);
      MultiIndex j(n);
      j[a] += 1;
      j[b] += 1;
      W.add_term(j, B);
    }

  // Nonlinear parts of g, per component.
  std::vector<std::vector<FieldTerm>> field(n);
  for (std::size_t i = 0; i < n; ++i)
    for (const auto& [k, b] : spec.g[i].terms()) {
      const int d = k.total_degree();
      if (d >= 2) field[i].push_back({k, b, d});
    }

  for (int m = 3; m <= p; ++m) {
    for (const MultiIndex& j : indices_of_degree(n, m)) {
      Complex denom = 0.0;
      for (std::size_t i = 0; i < n; ++i) denom += static_cast<double>(j[i]) * lambda[i];
      if (std::abs(denom) < 1e-12)
        throw InternalError("resonant denominator at multi-index " + describe(j));

      // Coefficient of z^j in sum_i g_i^{nl}(z) dW/dz_i: the term b^i_k z^k
      // pairs with B_l where l = j - k + e_i, carrying the factor l_i.
      Complex sum = 0.0;
      for (std::size_t i = 0; i < n; ++i)
        for (const FieldTerm& t : field[i]) {
          if (t.degree > m - 1) continue;
          if (!t.k.divides(j)) continue;
          MultiIndex l = j;
          for (std::size_t r = 0; r < n; ++r) l[r] -= t.k[r];
          l[i] += 1;
          const Complex Bl = W.coefficient(l);
          if (Bl == Complex{}) continue;
          sum += static_cast<double>(l[i]) * t.b * Bl;
        }
      const Complex B = -sum / denom;
      if (!(std::abs(B) <= opts.coefficient_limit))
        throw ConditioningError("coefficient at multi-index " + describe(j) +
                                " exceeds the growth limit");
      W.add_term(j, B);
    }
  }
  return W;
}

Polynomial back_transform(const Polynomial& W, const SpectralData& spec,
                          double* imag_residue) {
  const Polynomial Vc = compose_linear(W, spec.S_inv, std::max(W.degree(), 0));
  const double resid = Vc.max_imag();
  if (imag_residue) *imag_residue = resid;
  if (resid >= 1e-9 * (1.0 + Vc.max_abs()))
    throw InternalError("back-transformed Lyapunov polynomial is not real (imaginary residue " +
                        std::to_string(resid) + ")");
  // Degree 0/1 terms are structurally absent; anything there is rounding.
  return Vc.degree_range(2, std::max(W.degree(), 2)).real_part();
}

QuadraticForm solve_lyapunov(const RMatrix& A) {
  const std::size_t n = A.rows();
  if (!A.is_square() || n == 0) throw std::invalid_argument("solve_lyapunov: square matrix required");
  const std::size_t N = n * n;
  RMatrix K(N, N);
  std::vector<double> rhs(N, 0.0);
  // Row (r, c) of A^T P + P A = -I; unknown P(a, b) sits at column a * n + b.
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) {
      const std::size_t row = r * n + c;
      for (std::size_t k = 0; k < n; ++k) {
        K(row, k * n + c) += A(k, r);
        K(row, r * n + k) += A(k, c);
      }
      if (r == c) rhs[row] = -1.0;
    }
  std::vector<double> sol;
  try {
    sol = solve(std::move(K), std::move(rhs), 1e-12);
  } catch (const std::runtime_error&) {
    throw NotHurwitz("Lyapunov equation A^T P + P A = -I is singular");
  }
  QuadraticForm q{RMatrix(n, n)};
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b)
      q.P(a, b) = 0.5 * (sol[a * n + b] + sol[b * n + a]);

  // Cholesky as the positive-definiteness test.
  RMatrix L(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k <= i; ++k) {
      double s = q.P(i, k);
      for (std::size_t m = 0; m < k; ++m) s -= L(i, m) * L(k, m);
      if (i == k) {
        if (!(s > 0.0)) throw NotHurwitz("Lyapunov solution is not positive definite");
        L(i, i) = std::sqrt(s);
      } else {
        L(i, k) = s / L(k, k);
      }
    }
  return q;
}

Polynomial lie_derivative(const Polynomial& V, const PolySystem& sys) {
  Polynomial r(sys.dim);
  for (std::size_t i = 0; i < sys.dim; ++i)
    r = add(r, multiply(derivative(V, i), sys.components[i]));
  return r;
}

Polynomial residual(const PolySystem& sys, const LyapunovPoly& L) {
  Polynomial r = lie_derivative(L.V, sys);
  for (std::size_t i = 0; i < sys.dim; ++i) {
    MultiIndex sq(sys.dim);
    sq[i] = 2;
    r.add_term(sq, 1.0);
  }
  return r.truncated(L.degree);
}

LyapunovPoly compute_lyapunov(const SpectralData& spec, int p, const LyapunovOptions& opts) {
  LyapunovPoly L;
  L.degree = p;
  L.W = compute_B(spec, p, opts);
  L.V = back_transform(L.W, spec, &L.imag_residue);
  L.spec = spec;
  return L;
}

LyapunovPoly compute_lyapunov(const PolySystem& sys, int p, const LyapunovOptions& opts) {
  return compute_lyapunov(analyze(sys), p, opts);
}

void write_coefficients(std::ostream& os, const Polynomial& V, int p) {
  char buf[96];
  for (int m = 2; m <= p; ++m)
    for (const MultiIndex& j : indices_of_degree(V.dim(), m)) {
      const Complex c = V.coefficient(j);
      for (std::size_t i = 0; i < j.dim(); ++i) os << (i ? " " : "") << j[i];
      std::snprintf(buf, sizeof buf, "  %.16e  %.16e\n", c.real(), c.imag());
      os << buf;
    }
}

}  // namespace basinscope
