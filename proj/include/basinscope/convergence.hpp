#pragma once

// Radius of convergence of scalar Taylor series and the continuation of a
// one-dimensional Lyapunov series by re-expansion at shifted centers.

#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "basinscope/lyap.hpp"
#include "basinscope/spectral.hpp"

namespace basinscope {

struct RadiusEstimate {
  enum class Kind { Finite, Infinite, Indeterminate };
  Kind kind = Kind::Indeterminate;
  /// 1 / max |A_n|^{1/n} over the last third of the coefficients.
  double root_test = 0.0;
  /// exp(-b) from the least-squares fit ln|A_n| = a + b n + c ln n on the
  /// same tail; removes the sub-geometric factor the root test absorbs.
  double regression = 0.0;
};

/// coeffs[n] = A_n for n = 0..p. Infinite when the whole tail vanishes,
/// Indeterminate when it has fewer than 10 nonzero entries.
RadiusEstimate radius_root_test(std::span<const double> coeffs);

struct SeriesEstimate {
  double center = 0.0;
  /// coeffs[n] multiplies (x - center)^n, n = 0..p.
  std::vector<double> coeffs;
  RadiusEstimate radius;

  /// Radius used for intervals (the regression estimate, or the root test
  /// when the fit is unavailable); +inf for polynomial series.
  double radius_est() const;
  std::pair<double, double> interval() const;
  bool contains(double x) const;
  /// Partial sum through degree `degree` (all terms when negative).
  double evaluate(double x, int degree = -1) const;
};

/// The expansion of V_p at the origin (coefficients 0 and 1 are zero).
SeriesEstimate origin_series(const LyapunovPoly& L);

/// Re-expands the optimal Lyapunov function of the scalar system at `center`,
/// which must lie strictly inside current's interval. Derivatives come from
/// V'(x) = -x^2 / f(x) expanded at the center by series division, the value
/// V(center) from current. Keeps as many coefficients as current has.
SeriesEstimate recenter_series(const PolySystem& sys, const SeriesEstimate& current, double center);

/// Binomial re-expansion of the truncated polynomial itself. Exact for the
/// polynomial, but the dropped tail makes high coefficients meaningless.
SeriesEstimate recenter_truncated(const SeriesEstimate& current, double center);

enum class EndpointVerdict { Bounded, UnboundedLikely, NotApplicable };
const char* to_string(EndpointVerdict v);

struct ContinuationOptions {
  int max_steps = 4;
  /// Interval reported for series with infinite radius.
  double sweep_limit = 1e3;
  double divergence_threshold = 1e6;
  /// Partial sums at degrees p/2, 3p/4, p may vary by less than this.
  double growth_limit = 0.1;
  /// New centers are placed this fraction of the way to the endpoint.
  double recenter_fraction = 0.9;
  /// Probes at center + (1 - 2^-k) (endpoint - center), k = 1..mesh_points,
  /// plus the endpoint itself.
  int mesh_points = 10;
};

struct BoundednessProbe {
  double x = 0.0;
  bool bounded = false;
  double growth = 0.0;
  double value = 0.0;
};

/// Boundedness of current near `endpoint` as seen from finite truncations.
BoundednessProbe probe_endpoint(const SeriesEstimate& s, double endpoint,
                                const ContinuationOptions& opts = {});

struct ContinuationStep {
  int side = 0;  // -1 left, +1 right, 0 the origin expansion
  double center = 0.0;
  double radius = 0.0;
  std::pair<double, double> interval;
};

struct ContinuationReport {
  std::vector<ContinuationStep> steps;
  std::pair<double, double> union_interval;
  BoundednessProbe left, right;
  EndpointVerdict left_verdict = EndpointVerdict::NotApplicable;
  EndpointVerdict right_verdict = EndpointVerdict::NotApplicable;
  /// max_steps ran out with an endpoint still bounded.
  bool partial = false;
};

/// Extends the convergence interval of the origin expansion to the left and
/// right, recentering while the current series stays bounded at its
/// endpoint. Every recentering counts against max_steps.
ContinuationReport continue_1d(const PolySystem& sys, int p, const ContinuationOptions& opts = {});

nlohmann::json to_json(const ContinuationReport& r);

}  // namespace basinscope
