#include "basinscope/region.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <limits>
#include <random>
#include <stdexcept>

#include "basinscope/parallel.hpp"

namespace basinscope {

void Window::validate() const {
  if (lo.empty() || lo.size() != hi.size())
    throw std::invalid_argument("window bounds must have one (min, max) pair per axis");
  if (resolution < 16) throw std::invalid_argument("window resolution must be >= 16");
  for (std::size_t i = 0; i < lo.size(); ++i) {
    if (!(lo[i] < hi[i])) throw std::invalid_argument("window min must be below max on every axis");
    if (!(lo[i] < 0.0 && 0.0 < hi[i]))
      throw std::invalid_argument("the origin must lie strictly inside the window");
  }
}

Window Window::cube(std::size_t dim, double half, int resolution) {
  return Window{std::vector<double>(dim, -half), std::vector<double>(dim, half), resolution};
}

const char* to_string(CellStatus s) {
  switch (s) {
    case CellStatus::LyapOk: return "LYAP_OK";
    case CellStatus::LyapFail: return "LYAP_FAIL";
    case CellStatus::Origin: return "ORIGIN";
  }
  return "?";
}

const char* to_string(LyapStatus s) {
  switch (s) {
    case LyapStatus::Ok: return "OK";
    case LyapStatus::FailPositivity: return "FAIL_POSITIVITY";
    case LyapStatus::FailDecrease: return "FAIL_DECREASE";
  }
  return "?";
}

LyapunovEvaluator::LyapunovEvaluator(const PolySystem& sys, const LyapunovPoly& L)
    : V_(L.V), Vdot_(lie_derivative(L.V, sys)) {}

LyapStatus LyapunovEvaluator::status(std::span<const double> x) const {
  if (!(V_(x) > 0.0)) return LyapStatus::FailPositivity;
  if (!(Vdot_(x) < 0.0)) return LyapStatus::FailDecrease;
  return LyapStatus::Ok;
}

LyapStatus lyap_status(const PolySystem& sys, const LyapunovPoly& L, std::span<const double> x) {
  return LyapunovEvaluator(sys, L).status(x);
}

RegionGrid::RegionGrid(Window w) : window_(std::move(w)) {
  window_.validate();
  const std::size_t n = window_.dim();
  const double total = std::pow(static_cast<double>(window_.resolution), static_cast<double>(n));
  if (total > 5e7) throw std::invalid_argument("grid too large; lower the resolution");
  cells_ = static_cast<std::size_t>(total);
  stride_.assign(n, 1);
  for (std::size_t i = n - 1; i-- > 0;) stride_[i] = stride_[i + 1] * window_.resolution;
  std::vector<double> zero(n, 0.0);
  origin_ = locate(zero);
  status.assign(cells_, CellStatus::LyapFail);
  V.assign(cells_, 0.0);
  Vdot.assign(cells_, 0.0);
  in_gp.assign(cells_, 0);
  in_npc.assign(cells_, 0);
}

double RegionGrid::cell_width(std::size_t axis) const {
  return (window_.hi[axis] - window_.lo[axis]) / window_.resolution;
}

std::vector<int> RegionGrid::coords(std::size_t cell) const {
  std::vector<int> c(dim());
  for (std::size_t i = 0; i < dim(); ++i) {
    c[i] = static_cast<int>(cell / stride_[i]);
    cell %= stride_[i];
  }
  return c;
}

std::size_t RegionGrid::index(std::span<const int> c) const {
  std::size_t idx = 0;
  for (std::size_t i = 0; i < dim(); ++i) idx += static_cast<std::size_t>(c[i]) * stride_[i];
  return idx;
}

std::vector<double> RegionGrid::center(std::size_t cell) const {
  const auto c = coords(cell);
  std::vector<double> x(dim());
  for (std::size_t i = 0; i < dim(); ++i)
    x[i] = window_.lo[i] + (c[i] + 0.5) * cell_width(i);
  return x;
}

std::size_t RegionGrid::locate(std::span<const double> x) const {
  std::vector<int> c(dim());
  for (std::size_t i = 0; i < dim(); ++i) {
    const double t = (x[i] - window_.lo[i]) / cell_width(i);
    if (!(t >= 0.0) || t >= window_.resolution) return cells_;
    c[i] = static_cast<int>(std::floor(t));
  }
  return index(c);
}

bool RegionGrid::on_window_boundary(std::size_t cell) const {
  for (std::size_t i = 0; i < dim(); ++i) {
    const std::size_t ci = (cell / stride_[i]) % window_.resolution;
    if (ci == 0 || ci + 1 == static_cast<std::size_t>(window_.resolution)) return true;
  }
  return false;
}

void RegionGrid::neighbors(std::size_t cell, std::vector<std::size_t>& out) const {
  out.clear();
  for (std::size_t i = 0; i < dim(); ++i) {
    const std::size_t ci = (cell / stride_[i]) % window_.resolution;
    if (ci > 0) out.push_back(cell - stride_[i]);
    if (ci + 1 < static_cast<std::size_t>(window_.resolution)) out.push_back(cell + stride_[i]);
  }
}

std::size_t RegionGrid::count_gp() const {
  return static_cast<std::size_t>(std::count(in_gp.begin(), in_gp.end(), 1));
}

std::size_t RegionGrid::count_npc() const {
  return static_cast<std::size_t>(std::count(in_npc.begin(), in_npc.end(), 1));
}

namespace {

// Breadth-first fill from seed over cells accepted by pred.
template <typename Pred>
std::vector<std::uint8_t> flood_fill(const RegionGrid& grid, std::size_t seed, Pred pred) {
  std::vector<std::uint8_t> reached(grid.cell_count(), 0);
  if (seed >= grid.cell_count() || !pred(seed)) return reached;
  std::deque<std::size_t> queue{seed};
  reached[seed] = 1;
  std::vector<std::size_t> nb;
  while (!queue.empty()) {
    const std::size_t c = queue.front();
    queue.pop_front();
    grid.neighbors(c, nb);
    for (std::size_t m : nb)
      if (!reached[m] && pred(m)) {
        reached[m] = 1;
        queue.push_back(m);
      }
  }
  return reached;
}

}  // namespace

RegionGrid estimate_gp(const PolySystem& sys, const LyapunovPoly& L, const Window& window) {
  if (window.dim() != sys.dim) throw DimensionMismatch("window dimension differs from system");
  RegionGrid grid(window);
  const LyapunovEvaluator eval(sys, L);
  parallel_for(grid.cell_count(), [&](std::size_t c) {
    const auto x = grid.center(c);
    grid.V[c] = eval.value(x);
    grid.Vdot[c] = eval.derivative(x);
    grid.status[c] = (grid.V[c] > 0.0 && grid.Vdot[c] < 0.0) ? CellStatus::LyapOk
                                                            : CellStatus::LyapFail;
  });
  grid.status[grid.origin_cell()] = CellStatus::Origin;
  grid.in_gp = flood_fill(grid, grid.origin_cell(),
                          [&](std::size_t c) { return grid.status[c] != CellStatus::LyapFail; });
  for (std::size_t c = 0; c < grid.cell_count(); ++c)
    if (grid.in_gp[c] && grid.on_window_boundary(c)) {
      grid.gp_touches_window = true;
      break;
    }
  return grid;
}

namespace {

std::vector<std::vector<double>> sphere_directions(std::size_t n, int samples) {
  std::vector<std::vector<double>> dirs;
  if (n == 1) return {{1.0}, {-1.0}};
  if (n == 2) {
    for (int k = 0; k < samples; ++k) {
      const double a = 2.0 * M_PI * k / samples;
      dirs.push_back({std::cos(a), std::sin(a)});
    }
    return dirs;
  }
  std::mt19937 rng(42);
  std::normal_distribution<double> gauss;
  const int count = samples * static_cast<int>(n);
  for (int k = 0; k < count; ++k) {
    std::vector<double> d(n);
    double norm = 0.0;
    do {
      norm = 0.0;
      for (auto& v : d) {
        v = gauss(rng);
        norm += v * v;
      }
    } while (norm < 1e-12);
    for (auto& v : d) v /= std::sqrt(norm);
    dirs.push_back(std::move(d));
  }
  // Axis directions are always included.
  for (std::size_t i = 0; i < n; ++i)
    for (double s : {1.0, -1.0}) {
      std::vector<double> d(n, 0.0);
      d[i] = s;
      dirs.push_back(std::move(d));
    }
  return dirs;
}

}  // namespace

double estimate_rp(const PolySystem& sys, const LyapunovPoly& L, const RadiusOptions& opts) {
  const LyapunovEvaluator eval(sys, L);
  const auto dirs = sphere_directions(sys.dim, opts.angular_samples);
  std::vector<double> x(sys.dim);
  auto sphere_ok = [&](double r) {
    for (const auto& d : dirs) {
      for (std::size_t i = 0; i < sys.dim; ++i) x[i] = r * d[i];
      if (eval.status(x) != LyapStatus::Ok) return false;
    }
    return true;
  };

  double good = 0.0;
  double bad = -1.0;
  for (int k = 0;; ++k) {
    const double r = opts.r0 * std::pow(2.0, k / 8.0);
    if (r > opts.r_max) return opts.r_max;
    if (!sphere_ok(r)) {
      bad = r;
      break;
    }
    good = r;
  }
  if (good == 0.0) return 0.0;
  // Every sphere below good passed during the sweep; refine the first failure.
  while ((bad - good) > 5e-4 * good) {
    const double mid = 0.5 * (good + bad);
    if (sphere_ok(mid))
      good = mid;
    else
      bad = mid;
  }
  return good;
}

std::vector<std::uint8_t> origin_component(const RegionGrid& grid, double c,
                                           std::span<const std::uint8_t> restrict_to) {
  if (restrict_to.empty())
    return flood_fill(grid, grid.origin_cell(), [&](std::size_t m) { return grid.V[m] < c; });
  return flood_fill(grid, grid.origin_cell(),
                    [&](std::size_t m) { return restrict_to[m] && grid.V[m] < c; });
}

RegionGrid compute_cp(RegionGrid grid, const LevelSearchOptions& opts) {
  if (grid.in_gp.size() != grid.cell_count() || !grid.in_gp[grid.origin_cell()])
    throw std::invalid_argument("compute_cp: run estimate_gp first");

  auto feasible = [&](double c, std::vector<std::uint8_t>* out) {
    auto comp = origin_component(grid, c);
    if (!comp[grid.origin_cell()]) return false;
    for (std::size_t m = 0; m < grid.cell_count(); ++m)
      if (comp[m] && (!grid.in_gp[m] || grid.on_window_boundary(m))) return false;
    if (out) *out = std::move(comp);
    return true;
  };

  double hi = 0.0;
  for (std::size_t m = 0; m < grid.cell_count(); ++m)
    if (grid.in_gp[m]) hi = std::max(hi, grid.V[m]);
  // The smallest meaningful level just admits the origin cell.
  const double v0 = std::max(grid.V[grid.origin_cell()], 0.0);
  double lo = std::nextafter(v0, std::numeric_limits<double>::infinity());
  if (!feasible(lo, nullptr))
    throw std::runtime_error("no feasible level above the origin cell value; refine the grid");

  if (feasible(hi, nullptr)) {
    lo = hi;
  } else {
    for (int it = 0; it < opts.max_iterations && (hi - lo) > opts.relative_tolerance * hi; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (feasible(mid, nullptr))
        lo = mid;
      else
        hi = mid;
    }
  }
  grid.c_star = lo;
  feasible(lo, &grid.in_npc);
  return grid;
}

std::vector<std::uint8_t> sublevel(const RegionGrid& grid, double c) {
  if (!(c > 0.0 && c <= grid.c_star))
    throw std::out_of_range("sublevel: level must lie in (0, c_star]");
  return origin_component(grid, c, grid.in_npc);
}

bool RadialProfile::increasing() const {
  for (std::size_t i = 1; i < value.size(); ++i)
    if (!(value[i] > value[i - 1])) return false;
  return true;
}

RadialProfile radial_profile(const LyapunovPoly& L, std::span<const double> direction,
                             double lam_max, int samples) {
  const std::size_t n = L.V.dim();
  if (direction.size() != n) throw DimensionMismatch("radial_profile: direction dimension");
  double norm = 0.0;
  for (double d : direction) norm += d * d;
  norm = std::sqrt(norm);
  if (norm == 0.0) throw std::invalid_argument("radial_profile: zero direction");
  if (samples < 3) throw std::invalid_argument("radial_profile: need at least 3 samples");

  const CompiledPolynomial V(L.V);
  RadialProfile prof;
  std::vector<double> x(n);
  for (int k = 0; k < samples; ++k) {
    const double lam = lam_max * k / (samples - 1);
    for (std::size_t i = 0; i < n; ++i) x[i] = lam * direction[i] / norm;
    prof.lambda.push_back(lam);
    prof.value.push_back(V(x));
  }
  for (int k = 1; k + 1 < samples; ++k) {
    const double a = prof.value[k - 1], b = prof.value[k], c = prof.value[k + 1];
    if (b > a && b > c) {
      // Vertex of the parabola through the three samples.
      const double h = prof.lambda[k] - prof.lambda[k - 1];
      const double denom = a - 2.0 * b + c;
      const double shift = denom != 0.0 ? 0.5 * h * (a - c) / denom : 0.0;
      prof.maxima.push_back(prof.lambda[k] + shift);
    }
  }
  return prof;
}

StarCheck star_check(const RegionGrid& grid, int samples, unsigned seed) {
  StarCheck result;
  std::vector<std::size_t> boundary;
  std::vector<std::size_t> nb;
  for (std::size_t c = 0; c < grid.cell_count(); ++c) {
    if (!grid.in_npc[c]) continue;
    grid.neighbors(c, nb);
    bool edge = nb.size() < 2 * grid.dim();
    for (std::size_t m : nb) edge = edge || !grid.in_npc[m];
    if (edge) boundary.push_back(c);
  }
  if (boundary.empty() || samples <= 0) return result;

  double diag = 0.0;
  for (std::size_t i = 0; i < grid.dim(); ++i) diag += grid.cell_width(i) * grid.cell_width(i);
  diag = std::sqrt(diag);

  std::mt19937 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, boundary.size() - 1);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> y(grid.dim());
  for (int s = 0; s < samples; ++s) {
    const std::size_t cell = boundary[pick(rng)];
    const double lam = unit(rng);
    const auto x = grid.center(cell);
    double norm = 0.0;
    for (double v : x) norm += v * v;
    norm = std::sqrt(norm);
    ++result.tested;
    // Points within one cell diagonal of the start are resolved by the grid
    // itself and are not informative.
    if ((1.0 - lam) * norm < diag) continue;
    for (std::size_t i = 0; i < grid.dim(); ++i) y[i] = lam * x[i];
    const std::size_t target = grid.locate(y);
    if (target >= grid.cell_count() || !grid.in_npc[target]) {
      result.passed = false;
      result.witnesses.emplace_back(cell, lam);
    }
  }
  return result;
}

void write_grid_csv(std::ostream& os, const RegionGrid& grid) {
  for (std::size_t i = 0; i < grid.dim(); ++i) os << 'x' << i + 1 << ',';
  os << "Vp,Vdot,status,in_Gp,in_Npc\n";
  char buf[64];
  for (std::size_t c = 0; c < grid.cell_count(); ++c) {
    const auto x = grid.center(c);
    for (double v : x) {
      std::snprintf(buf, sizeof buf, "%.17g,", v);
      os << buf;
    }
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,", grid.V[c], grid.Vdot[c]);
    os << buf << to_string(grid.status[c]) << ',' << int(grid.in_gp[c]) << ','
       << int(grid.in_npc[c]) << '\n';
  }
}

}  // namespace basinscope
