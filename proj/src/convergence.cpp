#include "basinscope/convergence.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace basinscope {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Least-squares slope b of ln|A_n| = a + b n + c ln n. Columns are centered
// first, which leaves b unchanged and keeps the 3x3 system well scaled.
double regression_slope(const std::vector<double>& n, const std::vector<double>& y) {
  const double m = static_cast<double>(n.size());
  double mn = 0, ml = 0, my = 0;
  for (std::size_t k = 0; k < n.size(); ++k) {
    mn += n[k];
    ml += std::log(n[k]);
    my += y[k];
  }
  mn /= m;
  ml /= m;
  my /= m;
  double snn = 0, snl = 0, sll = 0, sny = 0, sly = 0;
  for (std::size_t k = 0; k < n.size(); ++k) {
    const double u = n[k] - mn, v = std::log(n[k]) - ml, w = y[k] - my;
    snn += u * u;
    snl += u * v;
    sll += v * v;
    sny += u * w;
    sly += v * w;
  }
  const double det = snn * sll - snl * snl;
  if (!(std::abs(det) > 1e-12 * snn * sll)) return sny / snn;
  return (sny * sll - sly * snl) / det;
}

}  // namespace

RadiusEstimate radius_root_test(std::span<const double> coeffs) {
  RadiusEstimate est;
  if (coeffs.size() < 2) return est;
  const std::size_t p = coeffs.size() - 1;
  const std::size_t tail = (p + 2) / 3;
  const std::size_t first = p + 1 - tail;

  std::vector<double> ns, logs;
  double limsup = 0.0;
  for (std::size_t n = std::max<std::size_t>(first, 1); n <= p; ++n) {
    const double a = std::abs(coeffs[n]);
    if (a == 0.0) continue;
    ns.push_back(static_cast<double>(n));
    logs.push_back(std::log(a));
    limsup = std::max(limsup, std::exp(std::log(a) / n));
  }
  if (ns.empty()) {
    est.kind = RadiusEstimate::Kind::Infinite;
    est.root_test = est.regression = kInf;
    return est;
  }
  if (ns.size() < 10) return est;
  est.kind = RadiusEstimate::Kind::Finite;
  est.root_test = 1.0 / limsup;
  est.regression = std::exp(-regression_slope(ns, logs));
  return est;
}

double SeriesEstimate::radius_est() const {
  switch (radius.kind) {
    case RadiusEstimate::Kind::Infinite: return kInf;
    case RadiusEstimate::Kind::Indeterminate: return 0.0;
    case RadiusEstimate::Kind::Finite:
      return std::isfinite(radius.regression) && radius.regression > 0 ? radius.regression
                                                                       : radius.root_test;
  }
  return 0.0;
}

std::pair<double, double> SeriesEstimate::interval() const {
  const double r = radius_est();
  return {center - r, center + r};
}

bool SeriesEstimate::contains(double x) const {
  const auto [lo, hi] = interval();
  return lo < x && x < hi;
}

double SeriesEstimate::evaluate(double x, int degree) const {
  const int top = degree < 0 ? static_cast<int>(coeffs.size()) - 1
                             : std::min(degree, static_cast<int>(coeffs.size()) - 1);
  const double y = x - center;
  double acc = 0.0;
  for (int n = top; n >= 0; --n) acc = acc * y + coeffs[n];
  return acc;
}

SeriesEstimate origin_series(const LyapunovPoly& L) {
  if (L.V.dim() != 1) throw DimensionMismatch("origin_series needs a scalar system");
  SeriesEstimate s;
  s.coeffs.assign(L.degree + 1, 0.0);
  for (const auto& [j, a] : L.V.terms()) s.coeffs[j[0]] = a.real();
  s.radius = radius_root_test(s.coeffs);
  return s;
}

SeriesEstimate recenter_series(const PolySystem& sys, const SeriesEstimate& current,
                               double center) {
  if (sys.dim != 1) throw DimensionMismatch("recenter_series needs a scalar system");
  if (center == current.center) return current;
  if (!current.contains(center))
    throw std::domain_error("recenter_series: center outside the current convergence interval");

  // f(x) = x h(x); expand h at the center.
  const auto& f = sys.components[0];
  std::vector<double> h(std::max(f.degree(), 1), 0.0);
  for (const auto& [j, a] : f.terms()) h[j[0] - 1] = a.real();
  std::vector<double> hc(h.size(), 0.0);
  for (std::size_t m = 0; m < h.size(); ++m) {
    double binom = 1.0;  // C(m, k)
    for (std::size_t k = 0; k <= m; ++k) {
      hc[k] += h[m] * binom * std::pow(center, static_cast<double>(m - k));
      binom = binom * static_cast<double>(m - k) / static_cast<double>(k + 1);
    }
  }
  if (!(std::abs(hc[0]) > 1e-12))
    throw std::domain_error("recenter_series: center is an equilibrium");

  // V'(center + y) = -(center + y) / h(center + y) by power-series division.
  const std::size_t p = current.coeffs.size() - 1;
  std::vector<double> d(p, 0.0);
  for (std::size_t k = 0; k < p; ++k) {
    double num = k == 0 ? -center : (k == 1 ? -1.0 : 0.0);
    for (std::size_t j = 1; j <= std::min(k, hc.size() - 1); ++j) num -= hc[j] * d[k - j];
    d[k] = num / hc[0];
  }

  SeriesEstimate s;
  s.center = center;
  s.coeffs.assign(p + 1, 0.0);
  s.coeffs[0] = current.evaluate(center);
  for (std::size_t k = 0; k < p; ++k) s.coeffs[k + 1] = d[k] / static_cast<double>(k + 1);
  s.radius = radius_root_test(s.coeffs);
  return s;
}

SeriesEstimate recenter_truncated(const SeriesEstimate& current, double center) {
  Polynomial poly(1);
  for (std::size_t n = 0; n < current.coeffs.size(); ++n)
    if (current.coeffs[n] != 0.0) poly.add_term(MultiIndex{static_cast<int>(n)}, current.coeffs[n]);
  if (poly.is_zero()) poly.add_term(MultiIndex{0}, 0.0);
  const double shift = center - current.center;
  const Polynomial q = recenter(poly, std::span<const double>(&shift, 1));
  SeriesEstimate s;
  s.center = center;
  s.coeffs.assign(current.coeffs.size(), 0.0);
  for (const auto& [j, a] : q.terms()) s.coeffs[j[0]] = a.real();
  s.radius = radius_root_test(s.coeffs);
  return s;
}

const char* to_string(EndpointVerdict v) {
  switch (v) {
    case EndpointVerdict::Bounded: return "BOUNDED";
    case EndpointVerdict::UnboundedLikely: return "UNBOUNDED-LIKELY";
    case EndpointVerdict::NotApplicable: return "N/A";
  }
  return "?";
}

BoundednessProbe probe_endpoint(const SeriesEstimate& s, double endpoint,
                                const ContinuationOptions& opts) {
  const int p = static_cast<int>(s.coeffs.size()) - 1;
  BoundednessProbe probe;
  probe.x = endpoint;
  probe.bounded = true;
  for (int k = 1; k <= opts.mesh_points + 1; ++k) {
    const double t = k > opts.mesh_points ? 1.0 : 1.0 - std::ldexp(1.0, -k);
    const double x = s.center + t * (endpoint - s.center);
    const double v = s.evaluate(x);
    if (!std::isfinite(v) || std::abs(v) >= opts.divergence_threshold) probe.bounded = false;
    probe.value = v;
  }
  const double half = s.evaluate(endpoint, p / 2);
  const double three = s.evaluate(endpoint, 3 * p / 4);
  const double full = s.evaluate(endpoint, p);
  const double scale = std::max(std::abs(half), std::numeric_limits<double>::min());
  probe.growth = std::max(std::abs(three - half), std::abs(full - half)) / scale;
  if (!(probe.growth < opts.growth_limit)) probe.bounded = false;
  return probe;
}

ContinuationReport continue_1d(const PolySystem& sys, int p, const ContinuationOptions& opts) {
  if (sys.dim != 1) throw DimensionMismatch("continue_1d needs a scalar system");
  const LyapunovPoly L = compute_lyapunov(sys, p);
  const SeriesEstimate s0 = origin_series(L);

  ContinuationReport rep;
  if (s0.radius.kind == RadiusEstimate::Kind::Indeterminate)
    throw AnalysisError("continue_1d: too few nonzero coefficients to estimate a radius");
  if (s0.radius.kind == RadiusEstimate::Kind::Infinite) {
    rep.steps.push_back({0, 0.0, kInf, {-opts.sweep_limit, opts.sweep_limit}});
    rep.union_interval = {-opts.sweep_limit, opts.sweep_limit};
    rep.left.x = -opts.sweep_limit;
    rep.right.x = opts.sweep_limit;
    return rep;
  }
  rep.steps.push_back({0, s0.center, s0.radius_est(), s0.interval()});
  rep.union_interval = s0.interval();

  int used = 0;
  for (int side : {-1, 1}) {
    SeriesEstimate cur = s0;
    auto& verdict = side < 0 ? rep.left_verdict : rep.right_verdict;
    auto& probe = side < 0 ? rep.left : rep.right;
    for (;;) {
      const double r = cur.radius_est();
      if (!std::isfinite(r)) {
        verdict = EndpointVerdict::NotApplicable;
        probe.x = side * opts.sweep_limit;
        break;
      }
      const double endpoint = cur.center + side * r;
      probe = probe_endpoint(cur, endpoint, opts);
      if (!probe.bounded) {
        verdict = EndpointVerdict::UnboundedLikely;
        break;
      }
      if (used >= opts.max_steps) {
        verdict = EndpointVerdict::Bounded;
        rep.partial = true;
        break;
      }
      const double c = cur.center + opts.recenter_fraction * (endpoint - cur.center);
      cur = recenter_series(sys, cur, c);
      ++used;
      if (cur.radius.kind == RadiusEstimate::Kind::Indeterminate)
        throw AnalysisError("continue_1d: recentered series has no usable tail");
      const double rn = cur.radius_est();
      const auto iv = std::isfinite(rn) ? cur.interval()
                                        : std::make_pair(-opts.sweep_limit, opts.sweep_limit);
      rep.steps.push_back({side, c, rn, iv});
      rep.union_interval.first = std::min(rep.union_interval.first, iv.first);
      rep.union_interval.second = std::max(rep.union_interval.second, iv.second);
    }
  }
  return rep;
}

nlohmann::json to_json(const ContinuationReport& r) {
  using nlohmann::json;
  auto num = [](double v) -> json { return std::isfinite(v) ? json(v) : json("inf"); };
  json steps = json::array();
  for (const auto& s : r.steps)
    steps.push_back({{"side", s.side == 0 ? "origin" : (s.side < 0 ? "left" : "right")},
                     {"center", s.center},
                     {"radius", num(s.radius)},
                     {"interval", {s.interval.first, s.interval.second}}});
  auto endpoint = [&](const BoundednessProbe& p, EndpointVerdict v) {
    return json{{"x", p.x}, {"verdict", to_string(v)}, {"growth", p.growth}};
  };
  return json{{"steps", steps},
              {"union", {r.union_interval.first, r.union_interval.second}},
              {"left", endpoint(r.left, r.left_verdict)},
              {"right", endpoint(r.right, r.right_verdict)},
              {"status", r.partial ? "PARTIAL" : "COMPLETE"}};
}

}  // namespace basinscope
