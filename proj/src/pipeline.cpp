#include "basinscope/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <iterator>
#include <random>
#include <string>

#include "basinscope/parallel.hpp"

namespace basinscope {

using nlohmann::json;

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

json window_json(const Window& w) {
  json axes = json::array();
  for (std::size_t i = 0; i < w.dim(); ++i) axes.push_back({w.lo[i], w.hi[i]});
  return json{{"bounds", axes}, {"resolution", w.resolution}};
}

}  // namespace

CoeffsResult run_coeffs(const SystemSpec& spec, int p) {
  const auto t0 = std::chrono::steady_clock::now();
  CoeffsResult r;
  r.L = compute_lyapunov(spec.sys, p);
  r.residual_max = residual(spec.sys, r.L).max_abs();
  r.seconds = seconds_since(t0);
  return r;
}

json coeffs_summary(const CoeffsResult& r) {
  json eig = json::array();
  for (const auto& l : r.L.spec.eigenvalues) eig.push_back({l.real(), l.imag()});
  return json{{"degree", r.L.degree},
              {"dim", r.L.V.dim()},
              {"eigenvalues", eig},
              {"terms", r.L.V.size()},
              {"residual_max", r.residual_max},
              {"imag_residue", r.L.imag_residue}};
}

Window resolve_window(const SystemSpec& spec, const std::optional<Window>& override_window,
                      std::optional<int> override_resolution) {
  Window w = override_window ? *override_window
             : spec.window   ? *spec.window
                             : Window::cube(spec.sys.dim, 3.0, 600);
  if (override_resolution)
    w.resolution = *override_resolution;
  else if (!override_window && !spec.window && spec.resolution)
    w.resolution = *spec.resolution;
  if (w.dim() != spec.sys.dim) throw ParseError("window dimension differs from the system");
  try {
    w.validate();
  } catch (const std::invalid_argument& e) {
    throw ParseError(e.what());
  }
  return w;
}

RegionRun run_region(const SystemSpec& spec, int p, const Window& window, unsigned seed,
                     bool trace_boundary) {
  const auto t0 = std::chrono::steady_clock::now();
  RegionRun r;
  r.seed = seed;
  r.L = compute_lyapunov(spec.sys, p);
  r.grid = compute_cp(estimate_gp(spec.sys, r.L, window));
  r.grid.r_p = estimate_rp(spec.sys, r.L);
  r.star = star_check(r.grid, 1000, seed);
  if (trace_boundary) r.boundary = trace_boundary_2d(spec.sys, spec.oracle);
  r.seconds = seconds_since(t0);
  return r;
}

json region_summary(const RegionRun& r) {
  const auto& g = r.grid;
  return json{{"degree", r.L.degree},
              {"c_star", g.c_star},
              {"r_p", g.r_p},
              {"window", window_json(g.window())},
              {"cells", g.cell_count()},
              {"cells_Gp", g.count_gp()},
              {"cells_Npc", g.count_npc()},
              {"Gp_touches_window", g.gp_touches_window},
              {"star_check",
               {{"passed", r.star.passed},
                {"tested", r.star.tested},
                {"witnesses", r.star.witnesses.size()}}},
              {"oracle_boundary_points", r.boundary ? r.boundary->size() : 0},
              {"seed", r.seed}};
}

void write_svg(std::ostream& os, const RegionGrid& grid, const Polyline* boundary) {
  if (grid.dim() != 2) throw DimensionMismatch("SVG output needs a planar grid");
  const Window& w = grid.window();
  const int n = w.resolution;
  constexpr double size = 600.0, margin = 40.0;
  const double sx = size / (w.hi[0] - w.lo[0]), sy = size / (w.hi[1] - w.lo[1]);
  auto X = [&](double x) { return margin + (x - w.lo[0]) * sx; };
  auto Y = [&](double y) { return margin + (w.hi[1] - y) * sy; };
  char buf[256];
  auto put = [&](const char* fmt, auto... args) {
    std::snprintf(buf, sizeof buf, fmt, args...);
    os << buf;
  };

  const double total = size + 2 * margin;
  put("<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%.0f\" height=\"%.0f\" viewBox=\"0 0 %.0f %.0f\">\n",
      total, total, total, total);
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  const double cw = grid.cell_width(0), ch = grid.cell_width(1);
  std::vector<int> c(2);
  os << "<g fill=\"#b0b0b0\" stroke=\"none\">\n";
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n;) {
      c = {i, j};
      if (!grid.in_npc[grid.index(c)]) {
        ++i;
        continue;
      }
      int k = i;
      while (k < n) {
        c = {k, j};
        if (!grid.in_npc[grid.index(c)]) break;
        ++k;
      }
      const double x0 = w.lo[0] + i * cw, y1 = w.lo[1] + (j + 1) * ch;
      put("<rect x=\"%.3f\" y=\"%.3f\" width=\"%.3f\" height=\"%.3f\"/>\n", X(x0), Y(y1),
          (k - i) * cw * sx, ch * sy);
      i = k;
    }
  }
  os << "</g>\n";

  // G_p boundary: cell edges between a G_p cell and a non-G_p cell or the frame.
  os << "<path fill=\"none\" stroke=\"black\" stroke-width=\"0.8\" d=\"";
  auto in_gp = [&](int i, int j) {
    if (i < 0 || j < 0 || i >= n || j >= n) return false;
    c = {i, j};
    return grid.in_gp[grid.index(c)] != 0;
  };
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (!in_gp(i, j)) continue;
      const double xa = w.lo[0] + i * cw, xb = xa + cw, ya = w.lo[1] + j * ch, yb = ya + ch;
      if (!in_gp(i - 1, j)) put("M%.3f %.3fV%.3f", X(xa), Y(ya), Y(yb));
      if (!in_gp(i + 1, j)) put("M%.3f %.3fV%.3f", X(xb), Y(ya), Y(yb));
      if (!in_gp(i, j - 1)) put("M%.3f %.3fH%.3f", X(xa), Y(ya), X(xb));
      if (!in_gp(i, j + 1)) put("M%.3f %.3fH%.3f", X(xa), Y(yb), X(xb));
    }
  os << "\"/>\n";

  if (boundary && !boundary->empty()) {
    os << "<polyline fill=\"none\" stroke=\"black\" stroke-width=\"2.5\" points=\"";
    for (const auto& p : *boundary) put("%.3f,%.3f ", X(p[0]), Y(p[1]));
    os << "\"/>\n";
  }

  // Axes through the origin, frame and bound labels.
  os << "<g stroke=\"black\" stroke-width=\"1\" fill=\"none\">\n";
  put("<rect x=\"%.3f\" y=\"%.3f\" width=\"%.3f\" height=\"%.3f\"/>\n", margin, margin, size, size);
  put("<line x1=\"%.3f\" y1=\"%.3f\" x2=\"%.3f\" y2=\"%.3f\"/>\n", X(w.lo[0]), Y(0), X(w.hi[0]), Y(0));
  put("<line x1=\"%.3f\" y1=\"%.3f\" x2=\"%.3f\" y2=\"%.3f\"/>\n", X(0), Y(w.lo[1]), X(0), Y(w.hi[1]));
  os << "</g>\n<g font-family=\"sans-serif\" font-size=\"12\" fill=\"black\">\n";
  put("<text x=\"%.3f\" y=\"%.3f\">%g</text>\n", margin, margin + size + 16, w.lo[0]);
  put("<text x=\"%.3f\" y=\"%.3f\" text-anchor=\"end\">%g</text>\n", margin + size,
      margin + size + 16, w.hi[0]);
  put("<text x=\"%.3f\" y=\"%.3f\" text-anchor=\"end\">%g</text>\n", margin - 4, margin + size, w.lo[1]);
  put("<text x=\"%.3f\" y=\"%.3f\" text-anchor=\"end\">%g</text>\n", margin - 4, margin + 12, w.hi[1]);
  put("<text x=\"%.3f\" y=\"%.3f\" text-anchor=\"middle\">x1</text>\n", margin + size / 2,
      margin + size + 30);
  put("<text x=\"%.3f\" y=\"%.3f\" text-anchor=\"middle\">x2</text>\n", margin - 24, margin + size / 2);
  os << "</g>\n</svg>\n";
}

std::vector<std::size_t> sample_cells(const std::vector<std::uint8_t>& cells, std::size_t k,
                                      unsigned seed) {
  std::vector<std::size_t> members;
  for (std::size_t i = 0; i < cells.size(); ++i)
    if (cells[i]) members.push_back(i);
  if (k >= members.size()) return members;
  std::vector<std::size_t> out;
  std::mt19937 rng(seed);
  std::sample(members.begin(), members.end(), std::back_inserter(out), k, rng);
  return out;
}

VerifyReport run_verify(const SystemSpec& spec, int p, const Window& window, int samples,
                        unsigned seed, double inflate) {
  if (samples < 1) throw std::invalid_argument("verify: need at least one sample");
  if (!(inflate >= 1.0)) throw std::invalid_argument("verify: inflation factor must be >= 1");
  VerifyReport rep;
  rep.degree = p;
  rep.seed = seed;
  const LyapunovPoly L = compute_lyapunov(spec.sys, p);
  const RegionGrid grid = compute_cp(estimate_gp(spec.sys, L, window));
  rep.c_star = grid.c_star;
  rep.c_used = inflate * grid.c_star;
  const auto set = inflate == 1.0 ? grid.in_npc : origin_component(grid, rep.c_used);
  rep.population = static_cast<std::size_t>(std::count(set.begin(), set.end(), 1));
  const auto cells = sample_cells(set, static_cast<std::size_t>(samples), seed);
  rep.sampled = cells.size();

  std::vector<std::vector<double>> points;
  for (std::size_t c : cells) points.push_back(grid.center(c));
  const auto verdicts = classify_batch(spec.sys, points, spec.oracle);
  for (std::size_t i = 0; i < verdicts.size(); ++i) {
    switch (verdicts[i].verdict) {
      case Verdict::Converges: ++rep.converges; break;
      case Verdict::Escapes:
        ++rep.escapes;
        rep.escaping_points.push_back(points[i]);
        break;
      case Verdict::Undecided: ++rep.undecided; break;
    }
  }
  return rep;
}

json verify_summary(const VerifyReport& r) {
  json escaping = json::array();
  for (const auto& p : r.escaping_points) escaping.push_back(p);
  return json{{"degree", r.degree},
              {"seed", r.seed},
              {"c_star", r.c_star},
              {"c_used", r.c_used},
              {"population", r.population},
              {"sampled", r.sampled},
              {"CONVERGES", r.converges},
              {"ESCAPES", r.escapes},
              {"UNDECIDED", r.undecided},
              {"escaping_points", escaping}};
}

json run_bench(const SystemSpec& spec, int p, const Window& window, unsigned seed) {
  json out;
  auto t0 = std::chrono::steady_clock::now();
  const LyapunovPoly L = compute_lyapunov(spec.sys, p);
  out["coeffs_seconds"] = seconds_since(t0);

  t0 = std::chrono::steady_clock::now();
  RegionGrid grid = estimate_gp(spec.sys, L, window);
  out["grid_seconds"] = seconds_since(t0);

  t0 = std::chrono::steady_clock::now();
  grid = compute_cp(std::move(grid));
  out["level_search_seconds"] = seconds_since(t0);

  t0 = std::chrono::steady_clock::now();
  const auto cells = sample_cells(grid.in_npc, 100, seed);
  std::vector<std::vector<double>> points;
  for (std::size_t c : cells) points.push_back(grid.center(c));
  classify_batch(spec.sys, points, spec.oracle);
  out["classify_seconds"] = seconds_since(t0);
  out["classified_points"] = points.size();

  out["degree"] = p;
  out["c_star"] = grid.c_star;
  out["cells"] = grid.cell_count();
  out["threads"] = thread_count();
  return out;
}

}  // namespace basinscope
