#include "basinscope/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace basinscope {

PolySystem::PolySystem(std::vector<Polynomial> f)
    : dim(f.empty() ? 0 : f[0].dim()), components(std::move(f)) {}

void PolySystem::validate() const {
  if (dim == 0) throw std::invalid_argument("system dimension must be >= 1");
  if (components.size() != dim)
    throw std::invalid_argument("system needs exactly dim components");
  for (std::size_t i = 0; i < dim; ++i) {
    const Polynomial& fi = components[i];
    if (fi.dim() != dim)
      throw std::invalid_argument("component " + std::to_string(i + 1) +
                                  " has wrong dimension");
    if (fi.is_zero())
      throw std::invalid_argument("component " + std::to_string(i + 1) +
                                  " is identically zero");
    if (fi.coefficient(MultiIndex(dim)) != Complex{})
      throw std::invalid_argument("component " + std::to_string(i + 1) +
                                  " has a constant term; f(0) must be 0");
  }
}

int PolySystem::degree() const {
  int d = 0;
  for (const auto& c : components) d = std::max(d, c.degree());
  return d;
}

RMatrix jacobian_at_origin(const PolySystem& sys) {
  RMatrix A(sys.dim, sys.dim);
  for (std::size_t i = 0; i < sys.dim; ++i)
    for (std::size_t k = 0; k < sys.dim; ++k)
      A(i, k) = sys.components[i].coefficient(MultiIndex::unit(sys.dim, k)).real();
  return A;
}

namespace detail {

std::vector<double> characteristic_polynomial(const RMatrix& A) {
  const std::size_t n = A.rows();
  std::vector<double> c(n + 1, 0.0);
  c[n] = 1.0;
  RMatrix M(n, n);
  for (std::size_t k = 1; k <= n; ++k) {
    RMatrix next = A * M;
    for (std::size_t i = 0; i < n; ++i) next(i, i) += c[n - k + 1];
    M = next;
    const RMatrix AM = A * M;
    double tr = 0.0;
    for (std::size_t i = 0; i < n; ++i) tr += AM(i, i);
    c[n - k] = -tr / static_cast<double>(k);
  }
  return c;
}

namespace {

Complex horner(const std::vector<double>& c, Complex x, Complex* deriv) {
  Complex p = c.back(), dp = 0.0;
  for (std::size_t k = c.size() - 1; k-- > 0;) {
    dp = dp * x + p;
    p = p * x + c[k];
  }
  if (deriv) *deriv = dp;
  return p;
}

}  // namespace

std::vector<Complex> polynomial_roots(const std::vector<double>& coeffs) {
  std::vector<double> c = coeffs;
  while (c.size() > 1 && c.back() == 0.0) c.pop_back();
  const std::size_t n = c.size() - 1;
  if (n == 0) return {};
  for (double& v : c) v /= coeffs[n];

  // Zero roots are split off exactly.
  std::size_t zeros = 0;
  while (zeros < n && c[zeros] == 0.0) ++zeros;
  std::vector<double> q(c.begin() + zeros, c.end());
  const std::size_t m = q.size() - 1;

  std::vector<Complex> z(m);
  double bound = 0.0;
  for (std::size_t k = 0; k < m; ++k) bound = std::max(bound, std::abs(q[k]));
  const double radius = 1.0 + bound;
  for (std::size_t k = 0; k < m; ++k) {
    const double angle = 2.0 * std::numbers::pi * (k + 0.25) / m + 0.4;
    z[k] = std::polar(0.5 * radius, angle);
  }

  for (int iter = 0; iter < 500 && m > 0; ++iter) {
    double max_step = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
      Complex dp;
      const Complex p = horner(q, z[k], &dp);
      if (p == Complex{}) continue;
      const Complex ratio = p / dp;
      Complex s = 0.0;
      for (std::size_t l = 0; l < m; ++l)
        if (l != k) s += 1.0 / (z[k] - z[l]);
      const Complex w = ratio / (1.0 - ratio * s);
      z[k] -= w;
      max_step = std::max(max_step, std::abs(w) / (1.0 + std::abs(z[k])));
    }
    if (max_step < 1e-16) break;
  }

  // Newton polish; harmless on clustered roots where it simply stalls.
  for (auto& r : z)
    for (int it = 0; it < 5; ++it) {
      Complex dp;
      const Complex p = horner(q, r, &dp);
      if (dp == Complex{}) break;
      const Complex step = p / dp;
      if (!(std::abs(step) < 1e-6 * (1.0 + std::abs(r)))) break;
      r -= step;
    }

  z.insert(z.end(), zeros, Complex{});
  return z;
}

}  // namespace detail

namespace {

bool sort_desc(const Complex& a, const Complex& b) {
  if (a.real() != b.real()) return a.real() > b.real();
  return a.imag() > b.imag();
}

void normalize_column(std::vector<Complex>& v) {
  double norm = 0.0;
  for (const auto& x : v) norm += std::norm(x);
  norm = std::sqrt(norm);
  const double scale_tol = 1e-12 * norm;
  Complex phase = 1.0;
  for (const auto& x : v)
    if (std::abs(x) > scale_tol) {
      phase = std::conj(x) / std::abs(x);
      break;
    }
  for (auto& x : v) x *= phase / norm;
  // The leading entry is real and positive after the rotation; remove the
  // rounding residue in its imaginary part.
  for (auto& x : v)
    if (std::abs(x) > 1e-12) {
      x = Complex(x.real(), 0.0);
      break;
    }
}

std::string format_eigenvalues(const std::vector<Complex>& ev) {
  std::ostringstream os;
  os.precision(6);
  for (std::size_t i = 0; i < ev.size(); ++i)
    os << (i ? ", " : "") << ev[i].real() << (ev[i].imag() < 0 ? "-" : "+")
       << std::abs(ev[i].imag()) << "i";
  return os.str();
}

}  // namespace

SpectralData diagonalize(const RMatrix& A) {
  const std::size_t n = A.rows();
  if (!A.is_square() || n == 0) throw std::invalid_argument("diagonalize: matrix must be square");
  if (n > 6) throw std::invalid_argument("diagonalize: dimension above 6 is unsupported");

  const double scale = 1.0 + max_abs(A);
  std::vector<Complex> roots =
      detail::polynomial_roots(detail::characteristic_polynomial(A));

  // Restore exact conjugate symmetry and exact reality of real roots.
  const double imag_tol = 1e-10 * scale;
  for (auto& r : roots)
    if (std::abs(r.imag()) <= imag_tol) r = Complex(r.real(), 0.0);
  // Pair each upper-half-plane root with its nearest lower-half-plane copy
  // and make them exact conjugates, so the sort is not decided by rounding.
  std::vector<bool> paired(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(roots[i].imag() > 0.0)) continue;
    std::size_t best = n;
    for (std::size_t k = 0; k < n; ++k)
      if (!paired[k] && roots[k].imag() < 0.0 &&
          (best == n || std::abs(roots[k] - std::conj(roots[i])) <
                            std::abs(roots[best] - std::conj(roots[i]))))
        best = k;
    if (best == n) continue;
    paired[best] = true;
    const Complex m = 0.5 * (roots[i] + std::conj(roots[best]));
    roots[i] = m;
    roots[best] = std::conj(m);
  }
  std::sort(roots.begin(), roots.end(), sort_desc);

  for (const auto& r : roots)
    if (r.real() >= 0.0)
      throw NotHurwitz("Jacobian at the origin is not Hurwitz; eigenvalues: " +
                       format_eigenvalues(roots));

  // Group roots closer than the cluster tolerance; a repeated eigenvalue is
  // accepted only when its eigenspace has full dimension.
  const double cluster_tol = 1e-6 * scale;
  std::vector<std::vector<std::size_t>> clusters;
  std::vector<bool> used(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    if (used[i]) continue;
    std::vector<std::size_t> cl{i};
    used[i] = true;
    for (std::size_t k = i + 1; k < n; ++k)
      if (!used[k] && std::abs(roots[k] - roots[i]) < cluster_tol) {
        cl.push_back(k);
        used[k] = true;
      }
    clusters.push_back(std::move(cl));
  }

  std::vector<Complex> lambda(n);
  CMatrix S(n, n);
  std::vector<bool> done(n, false);
  std::vector<std::size_t> conj_of(n, n);
  const CMatrix Ac = to_complex(A);
  for (const auto& cl : clusters) {
    if (done[cl.front()]) continue;
    Complex mu = 0.0;
    for (std::size_t k : cl) mu += roots[k];
    mu /= static_cast<double>(cl.size());
    // A cluster this close to the real axis holds a real repeated root whose
    // computed copies need not be exact conjugates.
    if (mu.imag() != 0.0 && std::abs(mu.imag()) <= cluster_tol) mu = mu.real();
    if (mu.imag() < 0.0) continue;  // filled from its conjugate partner

    CMatrix shifted = Ac;
    for (std::size_t i = 0; i < n; ++i) shifted(i, i) -= mu;
    NullSpace ns = null_space(shifted, cl.size());
    if (ns.basis.size() != cl.size() || ns.discarded_pivot > 1e-6 * scale)
      throw NotDiagonalizable("eigenvalue " + format_eigenvalues({mu}) +
                              " of multiplicity " + std::to_string(cl.size()) +
                              " has a deficient eigenspace");
    // Orthonormalize inside the eigenspace (Gram-Schmidt, in order).
    auto& basis = ns.basis;
    for (std::size_t a = 0; a < basis.size(); ++a) {
      for (std::size_t b = 0; b < a; ++b) {
        Complex ip = 0.0;
        for (std::size_t i = 0; i < n; ++i) ip += std::conj(basis[b][i]) * basis[a][i];
        for (std::size_t i = 0; i < n; ++i) basis[a][i] -= ip * basis[b][i];
      }
      normalize_column(basis[a]);
    }
    for (std::size_t a = 0; a < cl.size(); ++a) {
      const std::size_t col = cl[a];
      lambda[col] = mu;
      for (std::size_t i = 0; i < n; ++i) S(i, col) = basis[a][i];
      done[col] = true;
    }

    if (mu.imag() > 0.0) {
      // Locate the conjugate cluster and give it conjugate columns.
      const Complex target = std::conj(mu);
      const std::vector<std::size_t>* partner = nullptr;
      double best = cluster_tol * 10.0;
      for (const auto& other : clusters) {
        if (done[other.front()] || other.size() != cl.size()) continue;
        const double d = std::abs(roots[other.front()] - target);
        if (d < best) {
          best = d;
          partner = &other;
        }
      }
      if (!partner)
        throw InternalError("complex eigenvalue without a conjugate partner");
      for (std::size_t a = 0; a < cl.size(); ++a) {
        const std::size_t col = (*partner)[a];
        lambda[col] = target;
        for (std::size_t i = 0; i < n; ++i) S(i, col) = std::conj(basis[a][i]);
        done[col] = true;
        conj_of[col] = cl[a];
      }
    }
  }

  CMatrix S_inv;
  try {
    S_inv = inverse(S);
  } catch (const std::runtime_error&) {
    throw NotDiagonalizable("eigenvector matrix is singular");
  }
  const double cond = norm1(S) * norm1(S_inv);
  if (!(cond <= 1e8))
    throw NotDiagonalizable("eigenvector matrix condition number " +
                            std::to_string(cond) + " exceeds 1e8");

  // Refine each eigenvalue with the diagonal of S^{-1} A S, keeping conjugate
  // pairs exactly conjugate.
  const CMatrix D = S_inv * Ac * S;
  for (std::size_t i = 0; i < n; ++i) {
    if (lambda[i].imag() == 0.0)
      lambda[i] = D(i, i).real();
    else if (lambda[i].imag() > 0.0)
      lambda[i] = D(i, i);
  }
  for (std::size_t i = 0; i < n; ++i)
    if (conj_of[i] < n) lambda[i] = std::conj(lambda[conj_of[i]]);

  double off = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k)
      off = std::max(off, std::abs(D(i, k) - (i == k ? lambda[i] : Complex{})));
  if (off >= 1e-8)
    throw NotDiagonalizable("S^{-1} A S deviates from diagonal by " + std::to_string(off));
  if (max_abs(S * S_inv - CMatrix::identity(n)) >= 1e-10)
    throw NotDiagonalizable("eigenvector inverse is inaccurate");
  for (const auto& l : lambda)
    if (l.real() >= 0.0)
      throw NotHurwitz("Jacobian at the origin is not Hurwitz; eigenvalues: " +
                       format_eigenvalues(lambda));

  SpectralData out;
  out.eigenvalues = std::move(lambda);
  out.S = std::move(S);
  out.S_inv = std::move(S_inv);
  return out;
}

SpectralData transform_system(const PolySystem& sys, SpectralData spec) {
  sys.validate();
  const std::size_t n = sys.dim;
  if (spec.S.rows() != n) throw DimensionMismatch("transform_system: spectral data dimension");

  std::vector<Polynomial> fs;
  fs.reserve(n);
  for (const auto& fk : sys.components) fs.push_back(compose_linear(fk, spec.S));

  double lam_scale = 1.0;
  for (const auto& l : spec.eigenvalues) lam_scale = std::max(lam_scale, std::abs(l));

  spec.g.clear();
  for (std::size_t i = 0; i < n; ++i) {
    Polynomial gi(n);
    for (std::size_t k = 0; k < n; ++k)
      if (spec.S_inv(i, k) != Complex{}) gi = add(gi, scale(fs[k], spec.S_inv(i, k)));
    for (std::size_t m = 0; m < n; ++m) {
      const MultiIndex e = MultiIndex::unit(n, m);
      const Complex expected = m == i ? spec.eigenvalues[i] : Complex{};
      const Complex got = gi.coefficient(e);
      if (std::abs(got - expected) > 1e-10 * lam_scale)
        throw InternalError("linear part of transformed field g_" + std::to_string(i + 1) +
                            " does not match the eigenvalues");
      gi.set_term(e, expected);
    }
    // Nothing of degree 0 can appear; drop rounding dust if it does.
    gi.erase_term(MultiIndex(n));
    spec.g.push_back(std::move(gi));
  }
  return spec;
}

SpectralData analyze(const PolySystem& sys) {
  sys.validate();
  return transform_system(sys, diagonalize(jacobian_at_origin(sys)));
}

}  // namespace basinscope
