// Acceptance gate: one [PASS]/[FAIL] line per criterion, nonzero exit if any
// criterion fails.

#include <sys/wait.h>

#include <algorithm>
#include <boost/multiprecision/cpp_int.hpp>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>

#include <json.hpp>

#include "basinscope/convergence.hpp"
#include "basinscope/pipeline.hpp"
#include "oracles.hpp"
#include "systems.hpp"

using namespace basinscope;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void check(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " FAILED: " << what << ';';
    }
  }
};

double coeff(const Polynomial& p, std::initializer_list<int> j) {
  return p.coefficient(MultiIndex(j)).real();
}

const RegionGrid& vdp_grid(int p, int resolution) {
  static std::map<std::pair<int, int>, RegionGrid> cache;
  const auto key = std::make_pair(p, resolution);
  auto it = cache.find(key);
  if (it == cache.end()) {
    const PolySystem sys = testsys::vanderpol();
    it = cache.emplace(key, compute_cp(estimate_gp(sys, compute_lyapunov(sys, p),
                                                   Window::cube(2, 3.0, resolution))))
             .first;
  }
  return it->second;
}

bool subset(const std::vector<std::uint8_t>& a, const std::vector<std::uint8_t>& b) {
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] && !b[i]) return false;
  return true;
}

void c1(Outcome& o) {
  const std::vector<std::pair<const char*, PolySystem>> systems{
      {"linear", testsys::linear1d()},       {"cubic", testsys::cubic1d()},
      {"example1", testsys::example1()},     {"example2", testsys::example2()},
      {"radial", testsys::radial()},         {"vanderpol", testsys::vanderpol()}};
  double worst10 = 0, worst20 = 0, slowest = 0;
  for (const auto& [name, sys] : systems) {
    const auto t0 = Clock::now();
    double r10 = 0;
    for (int p = 2; p <= 10; ++p) r10 = std::max(r10, residual(sys, compute_lyapunov(sys, p)).max_abs());
    const double r20 = residual(sys, compute_lyapunov(sys, 20)).max_abs();
    const double t = seconds_since(t0);
    o.check(r10 < 1e-10, std::string(name) + " residual at p<=10");
    o.check(r20 < 1e-8, std::string(name) + " residual at p=20");
    o.check(t < 10.0, std::string(name) + " runtime");
    worst10 = std::max(worst10, r10);
    worst20 = std::max(worst20, r20);
    slowest = std::max(slowest, t);
  }
  o.detail << " max residual p<=10 " << worst10 << ", p=20 " << worst20 << ", slowest " << slowest << " s";
}

void c2(Outcome& o) {
  const LyapunovPoly L = compute_lyapunov(testsys::radial(), 3);
  const std::pair<std::vector<int>, double> want[] = {
      {{2, 0}, 0.5}, {{0, 2}, 0.5}, {{1, 1}, 0.0}, {{1, 2}, 1.0 / 3}, {{2, 1}, -1.0 / 3}, {{3, 0}, 0.0}, {{0, 3}, 0.0}};
  double err3 = 0;
  for (const auto& [j, v] : want)
    err3 = std::max(err3, std::abs(L.V.coefficient(MultiIndex(j)).real() - v));
  o.check(err3 < 1e-12, "V3 coefficients");
  o.check(L.V.size() == 4, "V3 has exactly four terms");

  const LyapunovPoly C = compute_lyapunov(testsys::cubic1d(), 30);
  double rel = 0;
  for (int n = 2; n <= 30; ++n)
    rel = std::max(rel, std::abs(coeff(C.V, {n}) - oracle::cubic_origin(n)) / oracle::cubic_origin(n));
  o.check(rel < 1e-12, "scalar A_n");
  o.detail << " V3 max err " << err3 << ", A_n max rel err " << rel;
}

double dense_rel_error(const Polynomial& V, const oracle::Dense& want, int p) {
  double worst = 0, scale = 0;
  for (const auto& row : want)
    for (double v : row) scale = std::max(scale, std::abs(v));
  for (int a = 0; a <= p; ++a)
    for (int b = 0; a + b <= p; ++b) {
      const double ref = want[a][b] != 0 ? std::abs(want[a][b]) : scale;
      worst = std::max(worst, std::abs(coeff(V, {a, b}) - want[a][b]) / ref);
    }
  return worst;
}

void c3(Outcome& o) {
  double e1 = 0, e2 = 0;
  for (auto [l, r1, r2] : {std::tuple{1.0, 1.0, 0.0}, std::tuple{1.5, 0.7, -0.4}})
    e1 = std::max(e1, dense_rel_error(compute_lyapunov(testsys::example1(l, r1, r2), 10).V,
                                      oracle::example1(l, r1, r2, 10), 10));
  for (auto [l, r] : {std::pair{1.0, 1.0}, std::pair{2.0, 0.8}})
    e2 = std::max(e2, dense_rel_error(compute_lyapunov(testsys::example2(l, r), 10).V,
                                      oracle::example2(l, r, 10), 10));
  o.check(e1 < 1e-10, "Example 1 coefficients");
  o.check(e2 < 1e-10, "Example 2 coefficients");
  o.detail << " max rel err Example 1 " << e1 << ", Example 2 " << e2;
}

void c4(Outcome& o) {
  double entry = 0;
  for (const PolySystem& sys : {testsys::vanderpol(), testsys::example1(1.5, 0.7, -0.4), testsys::radial()}) {
    const LyapunovPoly L = compute_lyapunov(sys, 10);
    const QuadraticForm q = solve_lyapunov(jacobian_at_origin(sys));
    entry = std::max({entry, std::abs(coeff(L.V, {2, 0}) - q.P(0, 0)),
                      std::abs(coeff(L.V, {1, 1}) - 2 * q.P(0, 1)), std::abs(coeff(L.V, {0, 2}) - q.P(1, 1))});
  }
  o.check(entry < 1e-10, "quadratic part vs Lyapunov equation");

  const RMatrix A = jacobian_at_origin(testsys::vanderpol());
  const QuadraticForm q = solve_lyapunov(A);
  std::mt19937 rng(2024);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  double rel = 0;
  for (int k = 0; k < 10; ++k) {
    const std::vector<double> x{u(rng), u(rng)};
    const double integral = oracle::quadratic_integral(A, x, 80.0, 16000);
    rel = std::max(rel, std::abs(q(x) - integral) / integral);
  }
  o.check(rel < 1e-6, "quadrature");
  o.detail << " max entry err " << entry << ", quadrature rel err " << rel;
}

void c5(Outcome& o) {
  const auto t0 = Clock::now();
  const double c20 = vdp_grid(20, 600).c_star, c50 = vdp_grid(50, 600).c_star;
  const double elapsed = seconds_since(t0);
  const double d20 = std::abs(vdp_grid(20, 1200).c_star - c20) / vdp_grid(20, 1200).c_star;
  const double d50 = std::abs(vdp_grid(50, 1200).c_star - c50) / vdp_grid(50, 1200).c_star;
  o.check(std::abs(c20 - 8.8466) <= 0.05 * 8.8466, "c_20 within 5% of 8.8466");
  o.check(std::abs(c50 - 13.887) <= 0.05 * 13.887, "c_50 within 5% of 13.887");
  o.check(elapsed < 300.0, "runtime");
  o.check(d20 < 0.02 && d50 < 0.02, "resolution doubling");
  o.detail << " c_20 " << c20 << " (" << 100 * (c20 / 8.8466 - 1) << "%), c_50 " << c50 << " ("
           << 100 * (c50 / 13.887 - 1) << "%), " << elapsed << " s, doubling " << 100 * d20 << "% / "
           << 100 * d50 << "%";
}

void c6(Outcome& o) {
  const SystemSpec spec = load_system(std::string(BASINSCOPE_DATA_DIR) + "/vanderpol.json");
  const VerifyReport r = run_verify(spec, 50, Window::cube(2, 3.0, 600), 500, 42);
  o.check(r.sampled == 500, "500 samples");
  o.check(r.converges == 500, "all CONVERGES");
  o.check(r.escapes == 0, "no ESCAPES");
  o.detail << " CONVERGES " << r.converges << ", ESCAPES " << r.escapes << ", UNDECIDED " << r.undecided;
}

void c7(Outcome& o) {
  const PolySystem sys = testsys::vanderpol();
  std::size_t left = 0, increases = 0, points = 0;
  for (int p : {20, 50}) {
    const RegionGrid& g = vdp_grid(p, 600);
    const LyapunovPoly L = compute_lyapunov(sys, p);
    std::vector<std::size_t> nb;
    for (std::size_t c : sample_cells(g.in_npc, 50, 42)) {
      const Trajectory tr = integrate(sys, g.center(c));
      o.check(tr.verdict == Verdict::Converges, "trajectory converges");
      double prev = INFINITY;
      for (const auto& x : tr.x) {
        ++points;
        const std::size_t k = g.locate(x);
        bool ok = k < g.cell_count() && g.in_npc[k];
        if (!ok && k < g.cell_count()) {
          g.neighbors(k, nb);
          for (auto m : nb) ok = ok || g.in_npc[m];
        }
        left += !ok;
        if (std::hypot(x[0], x[1]) < 1e-6) break;
        const double v = L.V.evaluate_real(x);
        increases += !(v < prev);
        prev = v;
      }
    }
  }
  o.check(left == 0, "trajectories stay in N_p^c");
  o.check(increases == 0, "V_p strictly decreasing");
  o.detail << " 100 trajectories, " << points << " samples, " << left << " outside, " << increases
           << " non-decreasing steps";
}

void c8(Outcome& o) {
  const RegionGrid& g = vdp_grid(20, 600);
  std::mt19937 rng(8);
  std::uniform_real_distribution<double> u(1e-3, 1.0);
  int good = 0;
  for (int k = 0; k < 10; ++k) {
    double a = u(rng) * g.c_star, b = u(rng) * g.c_star;
    if (a > b) std::swap(a, b);
    good += subset(sublevel(g, a), sublevel(g, b));
  }
  o.check(good == 10, "nested sublevel sets");
  o.detail << " " << good << "/10 pairs nested";
}

void c9(Outcome& o) {
  const LyapunovPoly L = compute_lyapunov(testsys::radial(), 3);
  const double norm = 5 * std::sqrt(2.0);
  const std::vector<double> dir{3 * std::sqrt(5.0) / norm, std::sqrt(5.0) / norm};
  const RadialProfile prof = radial_profile(L, dir, norm, 2000);
  double err = INFINITY;
  if (prof.maxima.size() == 1) err = std::abs(prof.maxima[0] / norm - std::sqrt(5.0) / 3) / (std::sqrt(5.0) / 3);
  o.check(prof.maxima.size() == 1, "single interior maximum");
  o.check(err < 0.02, "maximum at sqrt(5)/3");

  const double v = L.V.evaluate_real(std::vector<double>{123.0 / 8, 41.0 / 24});
  using boost::multiprecision::cpp_rational;
  const cpp_rational x1(123, 8), x2(41, 24);
  const bool exact_zero = cpp_rational(1, 2) * (x1 * x1 + x2 * x2) + cpp_rational(1, 3) * (x1 * x2 * x2 - x2 * x1 * x1) == 0;
  o.check(std::abs(v) < 1e-9, "V3(123/8, 41/24) = 0");
  o.check(exact_zero, "exact rational zero");
  o.detail << " maximum rel err " << err << ", |V3| " << std::abs(v);
}

void c10(Outcome& o) {
  std::vector<double> a(201, 0.0), b(201, 0.0);
  for (int n = 2; n <= 200; ++n) a[n] = oracle::cubic_origin(n);
  for (int n = 1; n <= 200; ++n) b[n] = oracle::cubic_shifted(n);
  const RadiusEstimate r0 = radius_root_test(a), r1 = radius_root_test(b);
  o.check(std::abs(r0.root_test - 1.0) <= 0.05, "D_0 endpoints");
  o.check(std::abs(-0.9 - r1.root_test + 2.0) <= 0.05 && std::abs(-0.9 + r1.root_test - 0.2) <= 0.05, "D_1 endpoints");

  const PolySystem sys = testsys::cubic1d();
  const SeriesEstimate origin = origin_series(compute_lyapunov(sys, 200));
  const SeriesEstimate shifted = recenter_series(sys, origin, -0.9);
  double rel = 0;
  for (int n = 1; n <= 60; ++n)
    rel = std::max(rel, std::abs(shifted.coeffs[n] - oracle::cubic_shifted(n)) / std::abs(oracle::cubic_shifted(n)));
  o.check(rel < 1e-6, "recentered coefficients");

  const ContinuationReport rep = continue_1d(sys, 200);
  o.check(rep.union_interval.first <= -1.95 && rep.union_interval.second >= 0.95, "union covers (-1.95, 0.95)");
  o.check(rep.left_verdict == EndpointVerdict::UnboundedLikely &&
              rep.right_verdict == EndpointVerdict::UnboundedLikely,
          "both endpoints unbounded");

  const double v = origin.evaluate(-0.999), want = std::log(2.0) / 3;
  o.check(std::abs(v - want) / want < 0.05, "value at -0.999");
  o.detail << " D_0 radius " << r0.root_test << ", D_1 = (" << -0.9 - r1.root_test << ", " << -0.9 + r1.root_test
           << "), recenter rel err " << rel << ", union (" << rep.union_interval.first << ", "
           << rep.union_interval.second << "), V(-0.999) " << v << " vs " << want;
}

double agreement(const PolySystem& sys, const std::function<std::pair<bool, double>(double, double)>& member,
                 unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  std::vector<std::vector<double>> pts;
  std::vector<bool> inside;
  while (pts.size() < 500) {
    const double x = u(rng), y = u(rng);
    const auto [in, margin] = member(x, y);
    if (margin < 0.02) continue;
    pts.push_back({x, y});
    inside.push_back(in);
  }
  const auto v = classify_batch(sys, pts);
  int agree = 0;
  for (std::size_t i = 0; i < v.size(); ++i)
    agree += v[i].verdict == (inside[i] ? Verdict::Converges : Verdict::Escapes);
  return agree / 500.0;
}

void c11(Outcome& o) {
  const double a1 = agreement(
      testsys::example1(),
      [](double x, double) { return std::pair{x < 1.0, std::abs(x - 1.0)}; }, 11);
  const double a2 = agreement(
      testsys::example2(),
      [](double x, double y) {
        const double r = std::hypot(x, y);
        return std::pair{r < 1.0, std::abs(r - 1.0)};
      },
      12);
  o.check(a1 >= 0.98, "Example 1 agreement");
  o.check(a2 >= 0.98, "Example 2 agreement");
  o.detail << " Example 1 " << 100 * a1 << "%, Example 2 " << 100 * a2 << "%";
}

void c12(Outcome& o) {
  const std::string cmd = std::string(BASINSCOPE_CLI) + " verify " + BASINSCOPE_DATA_DIR +
                          "/vanderpol.json --degree 20 --debug-inflate-cstar 2 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  std::string out;
  char buf[4096];
  std::size_t n;
  while (pipe && (n = fread(buf, 1, sizeof buf, pipe)) > 0) out.append(buf, n);
  const int status = pipe ? pclose(pipe) : -1;
  const int code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  int escapes = 0;
  try {
    escapes = nlohmann::json::parse(out)["ESCAPES"].get<int>();
  } catch (const std::exception&) {
    o.check(false, "verify output is JSON");
  }
  o.check(escapes > 0, "ESCAPES > 0");
  o.check(code == 1, "exit code 1");
  o.detail << " ESCAPES " << escapes << ", exit " << code;
}

}  // namespace

int main() {
  const std::pair<const char*, void (*)(Outcome&)> criteria[] = {
      {"recurrence residual vanishes", c1},
      {"printed coefficients reproduced", c2},
      {"closed-form cross-check", c3},
      {"quadratic part solves the Lyapunov equation", c4},
      {"Van der Pol c_20 and c_50", c5},
      {"certified set converges under the oracle", c6},
      {"positive invariance and decrease", c7},
      {"sublevel sets are nested", c8},
      {"radial counterexample", c9},
      {"1D convergence and continuation", c10},
      {"oracle matches closed-form basins", c11},
      {"negative control escapes", c12},
  };
  int failed = 0, index = 0;
  for (const auto& [name, run] : criteria) {
    ++index;
    Outcome o;
    const auto t0 = Clock::now();
    try {
      run(o);
    } catch (const std::exception& e) {
      o.check(false, std::string("exception: ") + e.what());
    }
    failed += !o.pass;
    std::printf("[%s] %d %s:%s (%.1f s)\n", o.pass ? "PASS" : "FAIL", index, name, o.detail.str().c_str(),
                seconds_since(t0));
    std::fflush(stdout);
  }
  std::printf("%d/%d criteria passed\n", index - failed, index);
  return failed == 0 ? 0 : 1;
}
