#include "basinscope/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "basinscope/parallel.hpp"

namespace basinscope {

void IntegratorConfig::validate() const {
  if (!(converge_radius > 0.0 && converge_radius < escape_radius))
    throw std::invalid_argument("integrator: need 0 < converge_radius < escape_radius");
  if (!(t_max > 0.0)) throw std::invalid_argument("integrator: t_max must be positive");
  if (!(step > 0.0) || !(max_step > 0.0)) throw std::invalid_argument("integrator: step must be positive");
  if (method == Method::RK45 && !(rtol > 0.0 && atol > 0.0))
    throw std::invalid_argument("integrator: tolerances must be positive");
}

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Converges: return "CONVERGES";
    case Verdict::Escapes: return "ESCAPES";
    case Verdict::Undecided: return "UNDECIDED";
  }
  return "?";
}

namespace {

double norm2(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s);
}

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
// b - b_hat
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

// Autonomous field, optionally time-reversed.
class Field {
 public:
  Field(const PolySystem& sys, double sign) : f_(sys.components), sign_(sign) {}
  void operator()(std::span<const double> x, std::span<double> out) const {
    f_(x, out);
    for (double& v : out) v *= sign_;
  }
  std::size_t dim() const { return f_.dim(); }

 private:
  CompiledField f_;
  double sign_;
};

// Step-by-step integrator shared by integrate() and the boundary tracer.
class Stepper {
 public:
  Stepper(const Field& f, const IntegratorConfig& cfg, std::span<const double> x0)
      : f_(f), cfg_(cfg), n_(f.dim()), x_(x0.begin(), x0.end()), k_(7, std::vector<double>(n_)),
        tmp_(n_), xnew_(n_) {
    h_ = cfg.step;
    f_(x_, k_[0]);
  }

  double t() const { return t_; }
  const std::vector<double>& x() const { return x_; }
  /// Derivative at the current state.
  const std::vector<double>& dx() const { return k_[0]; }
  bool underflow() const { return underflow_; }

  /// Advances one accepted step, never past t_end. False on step underflow.
  bool step(double t_end) {
    return cfg_.method == Method::RK4 ? step_rk4(t_end) : step_rk45(t_end);
  }

 private:
  void stage(std::size_t s, std::initializer_list<double> a, double h) {
    for (std::size_t i = 0; i < n_; ++i) {
      double acc = x_[i];
      std::size_t j = 0;
      for (double aj : a) acc += h * aj * k_[j++][i];
      tmp_[i] = acc;
    }
    f_(tmp_, k_[s]);
  }

  bool step_rk4(double t_end) {
    const double h = std::min(cfg_.step, t_end - t_);
    auto& k1 = k_[0];
    std::vector<double> k2(n_), k3(n_), k4(n_);
    for (std::size_t i = 0; i < n_; ++i) tmp_[i] = x_[i] + 0.5 * h * k1[i];
    f_(tmp_, k2);
    for (std::size_t i = 0; i < n_; ++i) tmp_[i] = x_[i] + 0.5 * h * k2[i];
    f_(tmp_, k3);
    for (std::size_t i = 0; i < n_; ++i) tmp_[i] = x_[i] + h * k3[i];
    f_(tmp_, k4);
    for (std::size_t i = 0; i < n_; ++i)
      x_[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    t_ += h;
    f_(x_, k_[0]);
    return true;
  }

  bool step_rk45(double t_end) {
    const double h_floor = 1e-14 * std::max(1.0, std::abs(t_));
    for (;;) {
      double h = std::min({h_, cfg_.max_step, t_end - t_});
      if (h < h_floor) {
        underflow_ = true;
        return false;
      }
      stage(1, {a21}, h);
      stage(2, {a31, a32}, h);
      stage(3, {a41, a42, a43}, h);
      stage(4, {a51, a52, a53, a54}, h);
      stage(5, {a61, a62, a63, a64, a65}, h);
      for (std::size_t i = 0; i < n_; ++i)
        xnew_[i] = x_[i] + h * (b1 * k_[0][i] + b3 * k_[2][i] + b4 * k_[3][i] + b5 * k_[4][i] +
                                b6 * k_[5][i]);
      f_(xnew_, k_[6]);
      double err = 0.0;
      bool finite = true;
      for (std::size_t i = 0; i < n_; ++i) {
        const double e = h * (e1 * k_[0][i] + e3 * k_[2][i] + e4 * k_[3][i] + e5 * k_[4][i] +
                              e6 * k_[5][i] + e7 * k_[6][i]);
        const double sc = cfg_.atol + cfg_.rtol * std::max(std::abs(x_[i]), std::abs(xnew_[i]));
        err += (e / sc) * (e / sc);
        finite = finite && std::isfinite(xnew_[i]);
      }
      err = std::sqrt(err / n_);
      if (!finite || !std::isfinite(err)) {
        h_ = 0.1 * h;
        continue;
      }
      // PI controller (Gustafsson), exponents for a fifth-order pair.
      constexpr double alpha = 0.7 / 5.0, beta = 0.4 / 5.0;
      if (err <= 1.0) {
        double fac = err == 0.0 ? 5.0 : 0.9 * std::pow(err, -alpha) * std::pow(err_prev_, beta);
        fac = std::clamp(fac, 0.2, 5.0);
        if (rejected_) fac = std::min(fac, 1.0);
        h_ = h * fac;
        err_prev_ = std::max(err, 1e-4);
        rejected_ = false;
        t_ += h;
        std::swap(x_, xnew_);
        std::swap(k_[0], k_[6]);
        return true;
      }
      h_ = h * std::max(0.2, 0.9 * std::pow(err, -alpha));
      rejected_ = true;
    }
  }

  const Field& f_;
  const IntegratorConfig& cfg_;
  std::size_t n_;
  std::vector<double> x_;
  std::vector<std::vector<double>> k_;
  std::vector<double> tmp_, xnew_;
  double t_ = 0.0;
  double h_ = 0.0;
  double err_prev_ = 1.0;
  bool rejected_ = false;
  bool underflow_ = false;
};

Trajectory run(const Field& field, std::span<const double> x0, const IntegratorConfig& cfg,
               bool record) {
  cfg.validate();
  if (x0.size() != field.dim()) throw DimensionMismatch("integrate: initial state dimension");
  Trajectory traj;
  Stepper st(field, cfg, x0);
  auto push = [&] {
    if (record || traj.t.empty()) {
      traj.t.push_back(st.t());
      traj.x.push_back(st.x());
    } else {
      traj.t.back() = st.t();
      traj.x.back() = st.x();
    }
  };
  push();
  for (;;) {
    const double r = norm2(st.x());
    if (r < cfg.converge_radius) {
      traj.verdict = Verdict::Converges;
      break;
    }
    if (r > cfg.escape_radius) {
      traj.verdict = Verdict::Escapes;
      break;
    }
    if (st.t() >= cfg.t_max) break;
    if (!st.step(cfg.t_max)) {
      traj.step_underflow = true;
      break;
    }
    push();
  }
  return traj;
}

}  // namespace

Trajectory integrate(const PolySystem& sys, std::span<const double> x0,
                     const IntegratorConfig& cfg, bool record) {
  return run(Field(sys, 1.0), x0, cfg, record);
}

BasinVerdict classify(const PolySystem& sys, std::span<const double> x0,
                      const IntegratorConfig& cfg) {
  const Trajectory tr = integrate(sys, x0, cfg, false);
  return BasinVerdict{tr.verdict, tr.t.back(), norm2(tr.x.back())};
}

std::vector<BasinVerdict> classify_batch(const PolySystem& sys,
                                         const std::vector<std::vector<double>>& points,
                                         const IntegratorConfig& cfg) {
  cfg.validate();
  const Field field(sys, 1.0);
  std::vector<BasinVerdict> out(points.size());
  parallel_for(points.size(), [&](std::size_t i) {
    const Trajectory tr = run(field, points[i], cfg, false);
    out[i] = BasinVerdict{tr.verdict, tr.t.back(), norm2(tr.x.back())};
  });
  return out;
}

namespace {

// Cubic Hermite interpolation of the state between two step endpoints.
std::array<double, 2> hermite(const std::array<double, 2>& x0, const std::array<double, 2>& d0,
                              const std::array<double, 2>& x1, const std::array<double, 2>& d1,
                              double h, double s) {
  const double h00 = (1 + 2 * s) * (1 - s) * (1 - s), h10 = s * (1 - s) * (1 - s);
  const double h01 = s * s * (3 - 2 * s), h11 = s * s * (s - 1);
  std::array<double, 2> r{};
  for (int i = 0; i < 2; ++i) r[i] = h00 * x0[i] + h10 * h * d0[i] + h01 * x1[i] + h11 * h * d1[i];
  return r;
}

// Parameter s in [0,1] where the Hermite interpolant has x2 = 0 (bisection).
double section_parameter(const std::array<double, 2>& x0, const std::array<double, 2>& d0,
                         const std::array<double, 2>& x1, const std::array<double, 2>& d1,
                         double h) {
  double lo = 0.0, hi = 1.0;
  const double sign_lo = x0[1];
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double v = hermite(x0, d0, x1, d1, h, mid)[1];
    if ((v < 0) == (sign_lo < 0) && v != 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

Polyline trace_boundary_2d(const PolySystem& sys, const IntegratorConfig& cfg,
                           const BoundaryOptions& opts) {
  if (sys.dim != 2) throw DimensionMismatch("trace_boundary_2d needs a planar system");
  cfg.validate();
  IntegratorConfig c = cfg;
  c.method = Method::RK45;
  c.max_step = std::min(c.max_step, 0.02);
  const Field reversed(sys, -1.0);
  Stepper st(reversed, c, opts.seed);

  // Crossings of x2 = 0 with x1 > 0 in the direction of the first one seen.
  int direction = 0;
  std::vector<double> crossings;
  Polyline loop;
  bool recording = false;
  for (;;) {
    const std::array<double, 2> xa{st.x()[0], st.x()[1]};
    const std::array<double, 2> da{st.dx()[0], st.dx()[1]};
    const double ta = st.t();
    if (ta >= opts.t_max) throw NoLimitCycle("no limit cycle reached within the time horizon");
    if (!st.step(opts.t_max)) throw NoLimitCycle("step size underflow while tracing the boundary");
    const std::array<double, 2> xb{st.x()[0], st.x()[1]};
    const std::array<double, 2> db{st.dx()[0], st.dx()[1]};
    const double r = std::hypot(xb[0], xb[1]);
    if (r > c.escape_radius || r < c.converge_radius)
      throw NoLimitCycle("reversed orbit left every bounded region; no limit cycle");
    if (recording) loop.push_back(xb);

    const bool crossed = (xa[1] < 0 && xb[1] >= 0) || (xa[1] > 0 && xb[1] <= 0);
    if (!crossed) continue;
    const int dir = xb[1] > xa[1] ? 1 : -1;
    const double s = section_parameter(xa, da, xb, db, st.t() - ta);
    const auto p = hermite(xa, da, xb, db, st.t() - ta, s);
    if (p[0] <= 0.0) continue;
    if (direction == 0) direction = dir;
    if (dir != direction) continue;

    if (recording) {
      loop.back() = p;
      return loop;
    }
    crossings.push_back(p[0]);
    const std::size_t m = crossings.size();
    if (m >= 2 && std::abs(crossings[m - 1] - crossings[m - 2]) < opts.section_tolerance) {
      recording = true;
      loop.push_back(p);
      loop.push_back(xb);
    }
  }
}

bool inside(const Polyline& poly, double x, double y) {
  bool in = false;
  const std::size_t n = poly.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const auto& a = poly[i];
    const auto& b = poly[j];
    if ((a[1] > y) != (b[1] > y) && x < (b[0] - a[0]) * (y - a[1]) / (b[1] - a[1]) + a[0])
      in = !in;
  }
  return in;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
  const std::size_t n = traj.x.empty() ? 0 : traj.x.front().size();
  os << 't';
  for (std::size_t i = 0; i < n; ++i) os << ",x" << i + 1;
  os << '\n';
  char buf[32];
  for (std::size_t k = 0; k < traj.t.size(); ++k) {
    std::snprintf(buf, sizeof buf, "%.17g", traj.t[k]);
    os << buf;
    for (double v : traj.x[k]) {
      std::snprintf(buf, sizeof buf, ",%.17g", v);
      os << buf;
    }
    os << '\n';
  }
}

void write_polyline_csv(std::ostream& os, const Polyline& poly) {
  os << "x1,x2\n";
  char buf[64];
  for (const auto& p : poly) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", p[0], p[1]);
    os << buf;
  }
}

}  // namespace basinscope
