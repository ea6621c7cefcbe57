#pragma once

// Grid estimates of the Lyapunov region G_p, the certified sublevel set
// N_p^c and the level c_p, plus the radial and star-shape diagnostics.

#include <cstdint>
#include <ostream>
#include <span>
#include <vector>

#include "basinscope/lyap.hpp"
#include "basinscope/spectral.hpp"

namespace basinscope {

struct Window {
  std::vector<double> lo;
  std::vector<double> hi;
  int resolution = 600;

  std::size_t dim() const { return lo.size(); }
  /// Throws std::invalid_argument unless lo < hi per axis, resolution >= 16
  /// and the origin is strictly inside.
  void validate() const;
  /// Symmetric box [-half, half]^dim.
  static Window cube(std::size_t dim, double half, int resolution);
};

enum class CellStatus : std::uint8_t { LyapOk, LyapFail, Origin };
enum class LyapStatus { Ok, FailPositivity, FailDecrease };

const char* to_string(CellStatus s);
const char* to_string(LyapStatus s);

/// Evaluates V_p and its derivative along f at real points.
class LyapunovEvaluator {
 public:
  LyapunovEvaluator(const PolySystem& sys, const LyapunovPoly& L);

  double value(std::span<const double> x) const { return V_(x); }
  double derivative(std::span<const double> x) const { return Vdot_(x); }
  LyapStatus status(std::span<const double> x) const;

 private:
  CompiledPolynomial V_;
  CompiledPolynomial Vdot_;
};

/// Regular grid over a window; cells are addressed by a flat index with the
/// first axis varying slowest.
class RegionGrid {
 public:
  RegionGrid() = default;
  explicit RegionGrid(Window w);

  const Window& window() const { return window_; }
  std::size_t dim() const { return window_.dim(); }
  std::size_t cell_count() const { return cells_; }
  double cell_width(std::size_t axis) const;

  std::vector<double> center(std::size_t cell) const;
  std::vector<int> coords(std::size_t cell) const;
  std::size_t index(std::span<const int> coords) const;
  /// Cell containing x, or cell_count() when x is outside the window.
  std::size_t locate(std::span<const double> x) const;
  std::size_t origin_cell() const { return origin_; }
  bool on_window_boundary(std::size_t cell) const;
  /// Face neighbours (2n of them in the interior).
  void neighbors(std::size_t cell, std::vector<std::size_t>& out) const;

  std::vector<CellStatus> status;
  std::vector<double> V;
  std::vector<double> Vdot;
  std::vector<std::uint8_t> in_gp;
  std::vector<std::uint8_t> in_npc;
  double c_star = 0.0;
  double r_p = 0.0;
  /// G_p reached the window boundary; the window is probably too small.
  bool gp_touches_window = false;

  std::size_t count_gp() const;
  std::size_t count_npc() const;

 private:
  Window window_;
  std::size_t cells_ = 0;
  std::size_t origin_ = 0;
  std::vector<std::size_t> stride_;
};

LyapStatus lyap_status(const PolySystem& sys, const LyapunovPoly& L, std::span<const double> x);

/// Origin component of the cells whose centers satisfy both Lyapunov
/// conditions (face connectivity).
RegionGrid estimate_gp(const PolySystem& sys, const LyapunovPoly& L, const Window& window);

struct RadiusOptions {
  double r0 = 1e-3;
  double r_max = 1e3;
  int angular_samples = 256;
};

/// Largest r such that every sampled point with |x| <= r passes lyap_status.
double estimate_rp(const PolySystem& sys, const LyapunovPoly& L, const RadiusOptions& opts = {});

/// Origin component of {cells: V < c}. Empty when the origin cell itself has
/// V >= c. When restrict_to is non-empty the fill stays inside it.
std::vector<std::uint8_t> origin_component(const RegionGrid& grid, double c,
                                           std::span<const std::uint8_t> restrict_to = {});

struct LevelSearchOptions {
  int max_iterations = 40;
  double relative_tolerance = 1e-4;
};

/// Largest c whose origin component of {V < c} stays inside G_p without
/// touching the window boundary; fills in_npc and c_star.
RegionGrid compute_cp(RegionGrid grid, const LevelSearchOptions& opts = {});

/// Origin component of {V < c} inside in_npc; requires 0 < c <= c_star.
std::vector<std::uint8_t> sublevel(const RegionGrid& grid, double c);

struct RadialProfile {
  std::vector<double> lambda;
  std::vector<double> value;
  /// Parameters of strict interior local maxima, refined by a parabola fit.
  std::vector<double> maxima;
  bool increasing() const;
};

RadialProfile radial_profile(const LyapunovPoly& L, std::span<const double> direction,
                             double lam_max, int samples);

struct StarCheck {
  bool passed = true;
  std::size_t tested = 0;
  /// (boundary cell, lambda) pairs whose scaled point left in_npc.
  std::vector<std::pair<std::size_t, double>> witnesses;
};

StarCheck star_check(const RegionGrid& grid, int samples, unsigned seed = 42);

/// CSV with header x1,...,xn,Vp,Vdot,status,in_Gp,in_Npc.
void write_grid_csv(std::ostream& os, const RegionGrid& grid);

}  // namespace basinscope
