#include "basinscope/series.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace basinscope {

MultiIndex::MultiIndex(std::initializer_list<int> exps) : exps_(exps) {
  for (int e : exps_)
    if (e < 0) throw std::invalid_argument("negative exponent in multi-index");
}

MultiIndex::MultiIndex(std::vector<int> exps) : exps_(std::move(exps)) {
  for (int e : exps_)
    if (e < 0) throw std::invalid_argument("negative exponent in multi-index");
}

MultiIndex MultiIndex::unit(std::size_t dim, std::size_t i) {
  MultiIndex j(dim);
  j.exps_.at(i) = 1;
  return j;
}

int MultiIndex::total_degree() const {
  return std::accumulate(exps_.begin(), exps_.end(), 0);
}

bool MultiIndex::divides(const MultiIndex& other) const {
  for (std::size_t i = 0; i < exps_.size(); ++i)
    if (exps_[i] > other.exps_[i]) return false;
  return true;
}

MultiIndex MultiIndex::operator+(const MultiIndex& other) const {
  if (dim() != other.dim()) throw DimensionMismatch("multi-index dimension mismatch");
  MultiIndex r = *this;
  for (std::size_t i = 0; i < exps_.size(); ++i) r.exps_[i] += other.exps_[i];
  return r;
}

bool GradedLex::operator()(const MultiIndex& a, const MultiIndex& b) const {
  const int da = a.total_degree();
  const int db = b.total_degree();
  if (da != db) return da < db;
  const std::size_t n = std::min(a.dim(), b.dim());
  for (std::size_t i = 0; i < n; ++i)
    if (a[i] != b[i]) return a[i] > b[i];
  return a.dim() < b.dim();
}

std::ostream& operator<<(std::ostream& os, const MultiIndex& j) {
  os << '(';
  for (std::size_t i = 0; i < j.dim(); ++i) os << (i ? "," : "") << j[i];
  return os << ')';
}

namespace {

void fill_indices(std::size_t pos, int remaining, MultiIndex& cur,
                  std::vector<MultiIndex>& out) {
  if (pos + 1 == cur.dim()) {
    cur[pos] = remaining;
    out.push_back(cur);
    return;
  }
  for (int e = remaining; e >= 0; --e) {
    cur[pos] = e;
    fill_indices(pos + 1, remaining - e, cur, out);
  }
  cur[pos] = 0;
}

void check_dims(const Polynomial& a, const Polynomial& b) {
  if (a.dim() != b.dim())
    throw DimensionMismatch("polynomial dimension mismatch: " +
                            std::to_string(a.dim()) + " vs " +
                            std::to_string(b.dim()));
}

double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace

std::vector<MultiIndex> indices_of_degree(std::size_t dim, int m) {
  std::vector<MultiIndex> out;
  if (dim == 0 || m < 0) return out;
  MultiIndex cur(dim);
  fill_indices(0, m, cur, out);
  return out;
}

Polynomial Polynomial::variable(std::size_t dim, std::size_t i) {
  return monomial(MultiIndex::unit(dim, i), 1.0);
}

Polynomial Polynomial::constant(std::size_t dim, Complex c) {
  return monomial(MultiIndex(dim), c);
}

Polynomial Polynomial::monomial(const MultiIndex& j, Complex c) {
  Polynomial p(j.dim());
  p.add_term(j, c);
  return p;
}

int Polynomial::degree() const {
  return terms_.empty() ? -1 : terms_.rbegin()->first.total_degree();
}

int Polynomial::min_degree() const {
  return terms_.empty() ? -1 : terms_.begin()->first.total_degree();
}

Complex Polynomial::coefficient(const MultiIndex& j) const {
  auto it = terms_.find(j);
  return it == terms_.end() ? Complex{} : it->second;
}

void Polynomial::add_term(const MultiIndex& j, Complex c) {
  if (j.dim() != dim_) throw DimensionMismatch("term dimension mismatch");
  if (c == Complex{}) return;
  auto [it, inserted] = terms_.try_emplace(j, c);
  if (!inserted) {
    it->second += c;
    if (it->second == Complex{}) terms_.erase(it);
  }
}

void Polynomial::set_term(const MultiIndex& j, Complex c) {
  if (j.dim() != dim_) throw DimensionMismatch("term dimension mismatch");
  if (c == Complex{})
    terms_.erase(j);
  else
    terms_[j] = c;
}

Polynomial Polynomial::degree_range(int lo, int hi) const {
  Polynomial r(dim_);
  for (const auto& [j, c] : terms_) {
    const int d = j.total_degree();
    if (d >= lo && d <= hi) r.terms_.emplace_hint(r.terms_.end(), j, c);
  }
  return r;
}

double Polynomial::max_imag() const {
  double m = 0.0;
  for (const auto& [j, c] : terms_) m = std::max(m, std::abs(c.imag()));
  return m;
}

double Polynomial::max_abs() const {
  double m = 0.0;
  for (const auto& [j, c] : terms_) m = std::max(m, std::abs(c));
  return m;
}

Polynomial Polynomial::real_part() const {
  Polynomial r(dim_);
  for (const auto& [j, c] : terms_)
    if (c.real() != 0.0) r.terms_.emplace_hint(r.terms_.end(), j, c.real());
  return r;
}

Polynomial Polynomial::conj() const {
  Polynomial r(dim_);
  for (const auto& [j, c] : terms_) r.terms_.emplace_hint(r.terms_.end(), j, std::conj(c));
  return r;
}

Complex Polynomial::evaluate(std::span<const Complex> x) const {
  if (x.size() != dim_) throw DimensionMismatch("evaluation point dimension mismatch");
  if (terms_.empty()) return 0.0;
  const int deg = degree();
  std::vector<Complex> pw(dim_ * (deg + 1));
  for (std::size_t i = 0; i < dim_; ++i) {
    pw[i * (deg + 1)] = 1.0;
    for (int e = 1; e <= deg; ++e)
      pw[i * (deg + 1) + e] = pw[i * (deg + 1) + e - 1] * x[i];
  }
  // Neumaier-compensated sums, per component: cancellation between large
  // terms is common near the edge of the convergence domain.
  double s[2] = {0.0, 0.0}, comp[2] = {0.0, 0.0};
  for (const auto& [j, c] : terms_) {
    Complex t = c;
    for (std::size_t i = 0; i < dim_; ++i) t *= pw[i * (deg + 1) + j[i]];
    const double parts[2] = {t.real(), t.imag()};
    for (int k = 0; k < 2; ++k) {
      const double u = s[k] + parts[k];
      comp[k] += std::abs(s[k]) >= std::abs(parts[k]) ? (s[k] - u) + parts[k] : (parts[k] - u) + s[k];
      s[k] = u;
    }
  }
  return {s[0] + comp[0], s[1] + comp[1]};
}

double Polynomial::evaluate_real(std::span<const double> x) const {
  std::vector<Complex> z(x.begin(), x.end());
  const Complex v = evaluate(z);
  if (std::abs(v.imag()) >= 1e-9 * (1.0 + std::abs(v))) {
    std::ostringstream os;
    os << "imaginary residue " << v.imag() << " in real evaluation";
    throw std::domain_error(os.str());
  }
  return v.real();
}

Polynomial add(const Polynomial& a, const Polynomial& b) {
  check_dims(a, b);
  Polynomial r = a;
  for (const auto& [j, c] : b.terms()) r.add_term(j, c);
  return r;
}

Polynomial subtract(const Polynomial& a, const Polynomial& b) {
  check_dims(a, b);
  Polynomial r = a;
  for (const auto& [j, c] : b.terms()) r.add_term(j, -c);
  return r;
}

Polynomial scale(const Polynomial& a, Complex s) {
  Polynomial r(a.dim());
  for (const auto& [j, c] : a.terms()) r.add_term(j, c * s);
  return r;
}

Polynomial multiply(const Polynomial& a, const Polynomial& b, int trunc) {
  check_dims(a, b);
  if (trunc < 0) throw std::invalid_argument("negative truncation degree");
  Polynomial r(a.dim());
  for (const auto& [ja, ca] : a.terms()) {
    const int da = ja.total_degree();
    if (da > trunc) break;
    for (const auto& [jb, cb] : b.terms()) {
      if (da + jb.total_degree() > trunc) break;
      r.add_term(ja + jb, ca * cb);
    }
  }
  return r;
}

Polynomial multiply(const Polynomial& a, const Polynomial& b) {
  if (a.is_zero() || b.is_zero()) {
    check_dims(a, b);
    return Polynomial(a.dim());
  }
  return multiply(a, b, a.degree() + b.degree());
}

Polynomial operator+(const Polynomial& a, const Polynomial& b) { return add(a, b); }
Polynomial operator-(const Polynomial& a, const Polynomial& b) { return subtract(a, b); }
Polynomial operator*(Complex s, const Polynomial& a) { return scale(a, s); }

Polynomial compose_linear(const Polynomial& p, const CMatrix& M, int trunc) {
  const std::size_t n = p.dim();
  if (M.rows() != n || M.cols() != n)
    throw DimensionMismatch("compose_linear: matrix must be n x n");
  if (trunc < 0) trunc = std::max(p.degree(), 0);
  Polynomial result(n);
  if (p.is_zero()) return result;

  // powers[i][e] = (sum_k M_ik z_k)^e; every power is homogeneous, so a term
  // of degree |j| <= trunc never needs truncation.
  int max_exp = 0;
  for (const auto& [j, c] : p.terms())
    for (std::size_t i = 0; i < n; ++i) max_exp = std::max(max_exp, j[i]);
  std::vector<std::vector<Polynomial>> powers(n);
  for (std::size_t i = 0; i < n; ++i) {
    Polynomial lin(n);
    for (std::size_t k = 0; k < n; ++k) lin.add_term(MultiIndex::unit(n, k), M(i, k));
    powers[i].push_back(Polynomial::constant(n, 1.0));
    for (int e = 1; e <= max_exp; ++e)
      powers[i].push_back(multiply(powers[i].back(), lin));
  }

  for (const auto& [j, c] : p.terms()) {
    if (j.total_degree() > trunc) break;
    Polynomial t = Polynomial::constant(n, c);
    for (std::size_t i = 0; i < n; ++i)
      if (j[i] > 0) t = multiply(t, powers[i][j[i]]);
    for (const auto& [k, v] : t.terms()) result.add_term(k, v);
  }
  return result;
}

Polynomial derivative(const Polynomial& p, std::size_t i) {
  if (i >= p.dim()) throw DimensionMismatch("derivative: variable index out of range");
  Polynomial r(p.dim());
  for (const auto& [j, c] : p.terms()) {
    if (j[i] == 0) continue;
    MultiIndex k = j;
    k[i] -= 1;
    r.add_term(k, c * static_cast<double>(j[i]));
  }
  return r;
}

std::vector<Polynomial> gradient(const Polynomial& p) {
  std::vector<Polynomial> g;
  g.reserve(p.dim());
  for (std::size_t i = 0; i < p.dim(); ++i) g.push_back(derivative(p, i));
  return g;
}

Polynomial dot(std::span<const Polynomial> a, std::span<const Polynomial> b) {
  if (a.size() != b.size() || a.empty())
    throw DimensionMismatch("dot: vector length mismatch");
  Polynomial r(a[0].dim());
  for (std::size_t i = 0; i < a.size(); ++i) r = add(r, multiply(a[i], b[i]));
  return r;
}

Polynomial recenter(const Polynomial& p, std::span<const Complex> center) {
  const std::size_t n = p.dim();
  if (center.size() != n) throw DimensionMismatch("recenter: center dimension mismatch");
  Polynomial result(n);
  if (p.is_zero()) return result;
  const int deg = p.degree();
  std::vector<std::vector<Complex>> cpow(n, std::vector<Complex>(deg + 1));
  for (std::size_t i = 0; i < n; ++i) {
    cpow[i][0] = 1.0;
    for (int e = 1; e <= deg; ++e) cpow[i][e] = cpow[i][e - 1] * center[i];
  }
  for (const auto& [j, c] : p.terms()) {
    // (c_i + y_i)^{j_i} = sum_k C(j_i, k) c_i^{j_i - k} y_i^k, multiplied out
    // over the variables.
    std::vector<std::pair<MultiIndex, Complex>> acc{{MultiIndex(n), c}};
    for (std::size_t i = 0; i < n; ++i) {
      if (j[i] == 0) continue;
      std::vector<std::pair<MultiIndex, Complex>> next;
      next.reserve(acc.size() * (j[i] + 1));
      for (const auto& [k, v] : acc)
        for (int e = 0; e <= j[i]; ++e) {
          const Complex w = binomial(j[i], e) * cpow[i][j[i] - e];
          if (w == Complex{}) continue;
          MultiIndex kk = k;
          kk[i] = e;
          next.emplace_back(std::move(kk), v * w);
        }
      acc = std::move(next);
    }
    for (const auto& [k, v] : acc) result.add_term(k, v);
  }
  return result;
}

Polynomial recenter(const Polynomial& p, std::span<const double> center) {
  std::vector<Complex> c(center.begin(), center.end());
  return recenter(p, c);
}

Polynomial clean(const Polynomial& p, double eps) {
  Polynomial r(p.dim());
  for (const auto& [j, c] : p.terms())
    if (std::abs(c) >= eps) r.set_term(j, c);
  return r;
}

std::ostream& operator<<(std::ostream& os, const Polynomial& p) {
  if (p.is_zero()) return os << "0";
  bool first = true;
  for (const auto& [j, c] : p.terms()) {
    if (!first) os << " + ";
    first = false;
    os << c;
    for (std::size_t i = 0; i < j.dim(); ++i)
      if (j[i] == 1)
        os << "*x" << i + 1;
      else if (j[i] > 1)
        os << "*x" << i + 1 << '^' << j[i];
  }
  return os;
}

CompiledPolynomial::CompiledPolynomial(const Polynomial& p) : dim_(p.dim()) {
  exps_.reserve(p.size() * dim_);
  coeffs_.reserve(p.size());
  for (const auto& [j, c] : p.terms()) {
    if (c.real() == 0.0) continue;
    for (std::size_t i = 0; i < dim_; ++i) {
      exps_.push_back(j[i]);
      max_exp_ = std::max(max_exp_, j[i]);
    }
    coeffs_.push_back(c.real());
  }
}

double CompiledPolynomial::operator()(std::span<const double> x) const {
  if (coeffs_.empty()) return 0.0;
  const int stride = max_exp_ + 1;
  thread_local std::vector<double> pw;
  pw.resize(dim_ * stride);
  for (std::size_t i = 0; i < dim_; ++i) {
    double* row = pw.data() + i * stride;
    row[0] = 1.0;
    for (int e = 1; e < stride; ++e) row[e] = row[e - 1] * x[i];
  }
  double sum = 0.0;
  const int* e = exps_.data();
  for (double c : coeffs_) {
    double t = c;
    for (std::size_t i = 0; i < dim_; ++i, ++e) t *= pw[i * stride + *e];
    sum += t;
  }
  return sum;
}

CompiledField::CompiledField(std::span<const Polynomial> components)
    : dim_(components.empty() ? 0 : components[0].dim()) {
  for (const auto& p : components) components_.emplace_back(p);
}

void CompiledField::operator()(std::span<const double> x, std::span<double> out) const {
  for (std::size_t i = 0; i < components_.size(); ++i) out[i] = components_[i](x);
}

}  // namespace basinscope
