#pragma once

// End-to-end runs behind the command-line tool: coefficients, certified
// region, oracle verification, 1D continuation, timings.

#include <optional>
#include <ostream>
#include <vector>

#include <json.hpp>

#include "basinscope/convergence.hpp"
#include "basinscope/lyap.hpp"
#include "basinscope/oracle.hpp"
#include "basinscope/region.hpp"
#include "basinscope/system_file.hpp"

namespace basinscope {

struct CoeffsResult {
  LyapunovPoly L;
  /// Largest |coefficient| of <grad V_p, f> + |x|^2 through degree p.
  double residual_max = 0.0;
  double seconds = 0.0;
};

CoeffsResult run_coeffs(const SystemSpec& spec, int p);
nlohmann::json coeffs_summary(const CoeffsResult& r);

struct RegionRun {
  LyapunovPoly L;
  RegionGrid grid;
  StarCheck star;
  std::optional<Polyline> boundary;
  unsigned seed = 42;
  double seconds = 0.0;
};

/// Window resolution order: explicit argument, then the system file, then
/// [-3, 3]^n at 600 cells per axis.
Window resolve_window(const SystemSpec& spec, const std::optional<Window>& override_window,
                      std::optional<int> override_resolution);

RegionRun run_region(const SystemSpec& spec, int p, const Window& window, unsigned seed,
                     bool trace_boundary);
nlohmann::json region_summary(const RegionRun& r);

/// Layers: N_p^c cells (gray), G_p boundary (thin), oracle boundary (thick),
/// axes. Planar grids only.
void write_svg(std::ostream& os, const RegionGrid& grid, const Polyline* boundary);

struct VerifyReport {
  int degree = 0;
  unsigned seed = 42;
  double c_star = 0.0;
  /// Level actually sampled (c_star times the debug inflation factor).
  double c_used = 0.0;
  std::size_t population = 0;
  std::size_t sampled = 0;
  std::size_t converges = 0, escapes = 0, undecided = 0;
  std::vector<std::vector<double>> escaping_points;
};

/// Samples up to `samples` distinct cells of N_p^c and classifies their
/// centers. inflate > 1 replaces N_p^c by the origin component of
/// {V_p < inflate * c_star}, a deliberately uncertified set.
VerifyReport run_verify(const SystemSpec& spec, int p, const Window& window, int samples,
                        unsigned seed, double inflate = 1.0);
nlohmann::json verify_summary(const VerifyReport& r);

/// Uniform sample of k distinct members of cells (all of them when k is
/// larger), in increasing order.
std::vector<std::size_t> sample_cells(const std::vector<std::uint8_t>& cells, std::size_t k,
                                      unsigned seed);

nlohmann::json run_bench(const SystemSpec& spec, int p, const Window& window, unsigned seed);

}  // namespace basinscope
