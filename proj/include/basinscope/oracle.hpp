#pragma once

// Trajectory integration used as ground truth for every certified set:
// classifies initial states by whether their orbits reach the origin, and
// traces a limit-cycle basin boundary by running the flow backwards.

#include <array>
#include <ostream>
#include <span>
#include <stdexcept>
#include <vector>

#include "basinscope/spectral.hpp"

namespace basinscope {

enum class Method { RK45, RK4 };

struct IntegratorConfig {
  Method method = Method::RK45;
  double rtol = 1e-9;
  double atol = 1e-12;
  /// Fixed step for RK4; initial step guess for RK45.
  double step = 1e-2;
  /// Upper bound on an RK45 step (keeps recorded orbits smooth).
  double max_step = 0.1;
  double t_max = 200.0;
  double converge_radius = 1e-6;
  double escape_radius = 1e3;

  void validate() const;
};

enum class Verdict { Converges, Escapes, Undecided };
const char* to_string(Verdict v);

struct Trajectory {
  std::vector<double> t;
  std::vector<std::vector<double>> x;
  Verdict verdict = Verdict::Undecided;
  /// The adaptive step collapsed below resolution (stiffness, blow-up).
  bool step_underflow = false;
};

struct BasinVerdict {
  Verdict verdict = Verdict::Undecided;
  /// Time at which a radius threshold was crossed, or t_max.
  double exit_time = 0.0;
  double final_norm = 0.0;
};

/// Integrates x' = f(x) from x0 until a radius threshold or t_max. When
/// record is false only the final state is kept.
Trajectory integrate(const PolySystem& sys, std::span<const double> x0,
                     const IntegratorConfig& cfg = {}, bool record = true);

BasinVerdict classify(const PolySystem& sys, std::span<const double> x0,
                      const IntegratorConfig& cfg = {});

/// classify over many points, in parallel.
std::vector<BasinVerdict> classify_batch(const PolySystem& sys,
                                         const std::vector<std::vector<double>>& points,
                                         const IntegratorConfig& cfg = {});

class NoLimitCycle : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct BoundaryOptions {
  std::array<double, 2> seed{0.5, 0.0};
  /// Successive section crossings closer than this end the search.
  double section_tolerance = 1e-6;
  double t_max = 2000.0;
};

using Polyline = std::vector<std::array<double, 2>>;

/// One loop of the attracting cycle of x' = -f(x), reached from the seed
/// through the Poincare section {x2 = 0, x1 > 0}. The first and last points
/// coincide up to interpolation error.
Polyline trace_boundary_2d(const PolySystem& sys, const IntegratorConfig& cfg = {},
                           const BoundaryOptions& opts = {});

/// Even-odd point-in-polygon test.
bool inside(const Polyline& poly, double x, double y);

void write_trajectory_csv(std::ostream& os, const Trajectory& traj);
void write_polyline_csv(std::ostream& os, const Polyline& poly);

}  // namespace basinscope
