#include <gtest/gtest.h>

#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <map>
#include <random>
#include <sstream>

#include "basinscope/oracle.hpp"
#include "basinscope/region.hpp"
#include "systems.hpp"

using namespace basinscope;

namespace {

// Van der Pol grids are expensive; build each (degree, resolution) once.
const RegionGrid& vdp_grid(int p, int resolution = 600) {
  static std::map<std::pair<int, int>, RegionGrid> cache;
  auto key = std::make_pair(p, resolution);
  auto it = cache.find(key);
  if (it == cache.end()) {
    const PolySystem sys = testsys::vanderpol();
    const LyapunovPoly L = compute_lyapunov(sys, p);
    it = cache.emplace(key, compute_cp(estimate_gp(sys, L, Window::cube(2, 3.0, resolution)))).first;
  }
  return it->second;
}

const LyapunovPoly& vdp_L(int p) {
  static std::map<int, LyapunovPoly> cache;
  auto it = cache.find(p);
  if (it == cache.end()) it = cache.emplace(p, compute_lyapunov(testsys::vanderpol(), p)).first;
  return it->second;
}

bool subset(const std::vector<std::uint8_t>& a, const std::vector<std::uint8_t>& b) {
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] && !b[i]) return false;
  return true;
}

std::size_t count(const std::vector<std::uint8_t>& a) {
  std::size_t n = 0;
  for (auto v : a) n += v;
  return n;
}

}  // namespace

TEST(Window, Validation) {
  EXPECT_NO_THROW(Window::cube(2, 3.0, 600).validate());
  EXPECT_THROW((Window{{-1, -1}, {1, 1}, 8}).validate(), std::invalid_argument);
  EXPECT_THROW((Window{{0.5, -1}, {1, 1}, 64}).validate(), std::invalid_argument);
  EXPECT_THROW((Window{{1, -1}, {-1, 1}, 64}).validate(), std::invalid_argument);
}

TEST(LyapStatus, Examples) {
  const PolySystem vdp = testsys::vanderpol();
  const std::vector<double> x{0.1, 0.1};
  EXPECT_EQ(lyap_status(vdp, vdp_L(20), x), LyapStatus::Ok);

  const PolySystem lin = testsys::linear1d(1.7);
  const LyapunovPoly L1 = compute_lyapunov(lin, 6);
  for (double v : {-100.0, -1e-3, 1e-3, 5.0, 1e4}) {
    const std::vector<double> p{v};
    EXPECT_EQ(lyap_status(lin, L1, p), LyapStatus::Ok) << v;
  }
}

TEST(LyapStatus, RadialExampleBoundaryPoint) {
  const PolySystem sys = testsys::radial();
  const LyapunovPoly L = compute_lyapunov(sys, 3);
  const double a = 3 * std::sqrt(5.0), b = std::sqrt(5.0);
  const std::vector<double> in{0.99 * a, 0.99 * b}, out{1.01 * a, 1.01 * b};
  EXPECT_EQ(lyap_status(sys, L, in), LyapStatus::Ok);
  EXPECT_NE(lyap_status(sys, L, out), LyapStatus::Ok);
}

TEST(EstimateGp, LinearScalarFillsWindow) {
  const PolySystem sys = testsys::linear1d();
  const LyapunovPoly L = compute_lyapunov(sys, 4);
  for (int res : {16, 101, 1000}) {
    const RegionGrid g = estimate_gp(sys, L, Window::cube(1, 1.0, res));
    EXPECT_EQ(g.count_gp(), g.cell_count());
    EXPECT_TRUE(g.gp_touches_window);
  }
}

TEST(EstimateGp, RadialExampleExcludesZeroOfV3) {
  const PolySystem sys = testsys::radial();
  const LyapunovPoly L = compute_lyapunov(sys, 3);

  // Exact rational evaluation of 1/2 (x1^2 + x2^2) + 1/3 (x1 x2^2 - x2 x1^2).
  using boost::multiprecision::cpp_rational;
  const cpp_rational x1(123, 8), x2(41, 24);
  const cpp_rational v = cpp_rational(1, 2) * (x1 * x1 + x2 * x2) +
                         cpp_rational(1, 3) * (x1 * x2 * x2 - x2 * x1 * x1);
  EXPECT_EQ(v, 0);
  const std::vector<double> bar{123.0 / 8, 41.0 / 24};
  EXPECT_LT(std::abs(L.V.evaluate_real(bar)), 1e-9);

  // The point lies on the boundary of G_3: within one cell of it the grid
  // holds both G_3 cells and excluded cells, and no cell with V_3 <= 0 is in G_3.
  const RegionGrid g = estimate_gp(sys, L, Window::cube(2, 20.0, 600));
  const std::size_t c = g.locate(bar);
  ASSERT_LT(c, g.cell_count());
  std::vector<std::size_t> nb;
  g.neighbors(c, nb);
  nb.push_back(c);
  int in = 0, out = 0;
  for (auto k : nb) (g.in_gp[k] ? in : out)++;
  EXPECT_GT(in, 0);
  EXPECT_GT(out, 0);
  for (std::size_t k = 0; k < g.cell_count(); ++k)
    if (g.V[k] <= 0.0) ASSERT_FALSE(g.in_gp[k]);
}

TEST(EstimateGp, VanDerPolContainsHalfBall) {
  for (int p : {20, 50}) {
    const RegionGrid& g = vdp_grid(p);
    for (std::size_t c = 0; c < g.cell_count(); ++c) {
      const auto x = g.center(c);
      if (std::hypot(x[0], x[1]) <= 0.5) ASSERT_TRUE(g.in_gp[c]) << "p=" << p;
    }
  }
  EXPECT_NE(vdp_grid(20).in_gp, vdp_grid(50).in_gp);
}

TEST(EstimateRp, Examples) {
  const PolySystem lin = testsys::linear1d();
  RadiusOptions opts;
  EXPECT_GE(estimate_rp(lin, compute_lyapunov(lin, 4), opts), 0.999 * opts.r_max);

  const PolySystem rad = testsys::radial();
  const double r3 = estimate_rp(rad, compute_lyapunov(rad, 3));
  EXPECT_GT(r3, 0.0);
  EXPECT_LE(r3, 5 * std::sqrt(2.0));

  const PolySystem vdp = testsys::vanderpol();
  const LyapunovPoly L2 = compute_lyapunov(vdp, 2);
  const double r2 = estimate_rp(vdp, L2);
  ASSERT_GT(r2, 0.0);
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> ang(0, 2 * M_PI), rad01(0, 1);
  for (int k = 0; k < 2000; ++k) {
    const double r = r2 * std::sqrt(rad01(rng)), t = ang(rng);
    const std::vector<double> x{r * std::cos(t), r * std::sin(t)};
    if (r == 0) continue;
    EXPECT_EQ(lyap_status(vdp, L2, x), LyapStatus::Ok);
  }
}

TEST(ComputeCp, VanDerPolDegree20) {
  const RegionGrid& g = vdp_grid(20);
  EXPECT_NEAR(g.c_star, 8.8466, 0.05 * 8.8466);
}

TEST(ComputeCp, VanDerPolDegree50) {
  const RegionGrid& g = vdp_grid(50);
  EXPECT_NEAR(g.c_star, 13.887, 0.05 * 13.887);
}

TEST(ComputeCp, ResolutionDoublingIsStable) {
  for (int p : {20, 50}) {
    const double a = vdp_grid(p, 600).c_star, b = vdp_grid(p, 1200).c_star;
    EXPECT_LT(std::abs(a - b) / b, 0.02) << "p=" << p;
  }
}

TEST(ComputeCp, Invariants) {
  for (int p : {20, 50}) {
    const RegionGrid& g = vdp_grid(p);
    EXPECT_TRUE(subset(g.in_npc, g.in_gp));
    EXPECT_TRUE(g.in_npc[g.origin_cell()]);
    std::size_t n = 0;
    for (std::size_t c = 0; c < g.cell_count(); ++c)
      if (g.in_npc[c]) {
        EXPECT_LT(g.V[c], g.c_star);
        EXPECT_FALSE(g.on_window_boundary(c));
        ++n;
      }
    // Face-connected: a fill inside in_npc from the origin reaches all of it.
    EXPECT_EQ(count(origin_component(g, g.c_star, g.in_npc)), n);
  }
}

TEST(ComputeCp, CubicScalarInsideBasin) {
  const PolySystem sys = testsys::cubic1d();
  const LyapunovPoly L = compute_lyapunov(sys, 30);
  const RegionGrid g = compute_cp(estimate_gp(sys, L, Window::cube(1, 3.0, 6000)));
  ASSERT_GT(g.count_npc(), 0u);
  for (std::size_t c = 0; c < g.cell_count(); ++c)
    if (g.in_npc[c]) {
      const double x = g.center(c)[0];
      EXPECT_GT(x, -2.0);
      EXPECT_LT(x, 1.0);
    }
}

TEST(Sublevel, RangeAndOrdering) {
  const RegionGrid& g = vdp_grid(20);
  EXPECT_EQ(sublevel(g, g.c_star), g.in_npc);
  EXPECT_THROW(sublevel(g, 0.0), std::out_of_range);
  EXPECT_THROW(sublevel(g, -1.0), std::out_of_range);
  EXPECT_THROW(sublevel(g, 1.01 * g.c_star), std::out_of_range);

  std::mt19937 rng(8);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 10; ++k) {
    double c1 = g.c_star * (1e-3 + 0.999 * u(rng)), c2 = g.c_star * (1e-3 + 0.999 * u(rng));
    if (c1 > c2) std::swap(c1, c2);
    EXPECT_TRUE(subset(sublevel(g, c1), sublevel(g, c2)));
  }
}

TEST(RadialProfile, RadialExampleSingleMaximum) {
  const LyapunovPoly L = compute_lyapunov(testsys::radial(), 3);
  const double norm = 5 * std::sqrt(2.0);
  const std::vector<double> dir{3 * std::sqrt(5.0) / norm, std::sqrt(5.0) / norm};
  const RadialProfile prof = radial_profile(L, dir, norm, 2000);
  ASSERT_EQ(prof.maxima.size(), 1u);
  // V3(mu (3 sqrt5, sqrt5)) = 25 mu^2 - 10 sqrt5 mu^3 peaks at mu = sqrt5 / 3.
  const double mu = prof.maxima[0] / norm;
  EXPECT_LT(std::abs(mu - std::sqrt(5.0) / 3) / (std::sqrt(5.0) / 3), 0.02);
  EXPECT_FALSE(prof.increasing());
}

TEST(RadialProfile, QuadraticAndScalarIncrease) {
  const LyapunovPoly L2 = compute_lyapunov(testsys::vanderpol(), 2);
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> ang(0, 2 * M_PI);
  for (int k = 0; k < 20; ++k) {
    const double t = ang(rng);
    const std::vector<double> dir{std::cos(t), std::sin(t)};
    const RadialProfile prof = radial_profile(L2, dir, 10.0, 500);
    EXPECT_TRUE(prof.increasing());
    EXPECT_TRUE(prof.maxima.empty());
  }

  const PolySystem cub = testsys::cubic1d();
  for (int p : {4, 11, 30}) {
    const LyapunovPoly L = compute_lyapunov(cub, p);
    const RegionGrid g = estimate_gp(cub, L, Window::cube(1, 3.0, 3000));
    double lo = 0, hi = 0;
    for (std::size_t c = 0; c < g.cell_count(); ++c)
      if (g.in_gp[c]) {
        lo = std::min(lo, g.center(c)[0]);
        hi = std::max(hi, g.center(c)[0]);
      }
    const std::vector<double> right{1.0}, left{-1.0};
    EXPECT_TRUE(radial_profile(L, right, hi, 400).increasing()) << p;
    EXPECT_TRUE(radial_profile(L, left, -lo, 400).increasing()) << p;
  }
}

TEST(StarCheck, Cases) {
  const PolySystem vdp = testsys::vanderpol();
  const RegionGrid q = compute_cp(estimate_gp(vdp, compute_lyapunov(vdp, 2), Window::cube(2, 3.0, 300)));
  const StarCheck s2 = star_check(q, 500);
  EXPECT_TRUE(s2.passed);
  EXPECT_TRUE(s2.witnesses.empty());

  // A single-cell region has nothing to test.
  RegionGrid g(Window::cube(2, 1.0, 17));
  g.in_npc.assign(g.cell_count(), 0);
  g.in_npc[g.origin_cell()] = 1;
  const StarCheck s = star_check(g, 100);
  EXPECT_TRUE(s.passed);
}

TEST(GridCsv, HeaderAndRows) {
  const PolySystem sys = testsys::vanderpol();
  const RegionGrid g = compute_cp(estimate_gp(sys, compute_lyapunov(sys, 4), Window::cube(2, 3.0, 16)));
  std::ostringstream os;
  write_grid_csv(os, g);
  std::istringstream in(os.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "x1,x2,Vp,Vdot,status,in_Gp,in_Npc");
  std::size_t rows = 0;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, g.cell_count());
}

// Trajectories from certified cells stay in the cell set and lose energy.
TEST(RegionOracle, PositiveInvarianceAndDecrease) {
  const RegionGrid& g = vdp_grid(20);
  const LyapunovPoly& L = vdp_L(20);
  std::vector<std::size_t> cells;
  for (std::size_t c = 0; c < g.cell_count(); ++c)
    if (g.in_npc[c]) cells.push_back(c);
  std::mt19937 rng(42);
  std::vector<std::size_t> pick;
  std::sample(cells.begin(), cells.end(), std::back_inserter(pick), 50, rng);

  std::vector<std::size_t> nb;
  for (auto c : pick) {
    const Trajectory tr = integrate(testsys::vanderpol(), g.center(c));
    EXPECT_EQ(tr.verdict, Verdict::Converges);
    double prev = INFINITY;
    for (const auto& x : tr.x) {
      const std::size_t k = g.locate(x);
      ASSERT_LT(k, g.cell_count());
      bool ok = g.in_npc[k];
      if (!ok) {
        g.neighbors(k, nb);
        for (auto m : nb) ok = ok || g.in_npc[m];
      }
      EXPECT_TRUE(ok) << "left N_p^c at (" << x[0] << ", " << x[1] << ")";
      if (std::hypot(x[0], x[1]) < 1e-6) break;
      const double v = L.V.evaluate_real(x);
      EXPECT_LT(v, prev);
      prev = v;
    }
  }
}
