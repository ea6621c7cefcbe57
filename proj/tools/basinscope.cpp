// basinscope: Lyapunov-based domain of attraction estimates for polynomial
// systems, checked against trajectory integration.
//
//   basinscope coeffs     SYSTEM.json [--degree p] [--out file]
//   basinscope region     SYSTEM.json [--degree p] [--window ...] [--resolution n]
//                                     [--oracle-boundary] [--out dir]
//   basinscope verify     SYSTEM.json [--degree p] [--samples k] [--seed s]
//   basinscope continue1d SYSTEM.json [--degree p] [--max-steps m]
//   basinscope bench      SYSTEM.json [--degree p]
//
// Exit codes: 0 ok, 1 verification contradiction, 2 not Hurwitz,
// 3 not diagonalizable, 4 parse error, 5 internal error.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "basinscope/pipeline.hpp"

namespace fs = std::filesystem;
using namespace basinscope;

namespace {

enum Exit { kOk = 0, kContradiction = 1, kNotHurwitz = 2, kNotDiag = 3, kParse = 4, kInternal = 5 };

struct Options {
  std::string file;
  std::optional<int> degree;
  std::string window;
  std::optional<int> resolution;
  unsigned seed = 42;
  std::string out;
  bool oracle_boundary = false;
  int samples = 500;
  double inflate = 1.0;
  int max_steps = 4;
};

int fail(int code, const std::string& msg) {
  std::cerr << "ERROR " << code << ": " << msg << '\n';
  return code;
}

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  return f;
}

int degree_of(const Options& o, const SystemSpec& spec, int fallback) {
  const int p = o.degree.value_or(spec.degree.value_or(fallback));
  const int cap = spec.sys.dim == 1 ? 400 : 64;
  if (p < 2 || p > cap)
    throw ParseError("degree must lie in [2, " + std::to_string(cap) + "]");
  return p;
}

Window window_of(const Options& o, const SystemSpec& spec) {
  std::optional<Window> w;
  if (!o.window.empty()) w = parse_window(o.window, o.resolution.value_or(600));
  return resolve_window(spec, w, o.resolution);
}

void log_time(const char* what, double seconds) {
  std::fprintf(stderr, "%s: %.3f s\n", what, seconds);
}

int cmd_coeffs(const Options& o) {
  const SystemSpec spec = load_system(o.file);
  const int p = degree_of(o, spec, 20);
  const CoeffsResult r = run_coeffs(spec, p);
  const auto summary = coeffs_summary(r).dump(2);
  if (o.out.empty()) {
    write_coefficients(std::cout, r.L.V, p);
    std::cerr << summary << '\n';
  } else {
    auto dump = open_out(o.out);
    write_coefficients(dump, r.L.V, p);
    open_out(o.out + ".summary.json") << summary << '\n';
  }
  log_time("coeffs", r.seconds);
  return kOk;
}

int cmd_region(const Options& o) {
  const SystemSpec spec = load_system(o.file);
  const int p = degree_of(o, spec, 20);
  const Window w = window_of(o, spec);
  const RegionRun r = run_region(spec, p, w, o.seed, o.oracle_boundary);
  const auto summary = region_summary(r).dump(2);
  const fs::path dir = o.out.empty() ? fs::path(".") : fs::path(o.out);
  fs::create_directories(dir);
  {
    auto csv = open_out(dir / "grid.csv");
    write_grid_csv(csv, r.grid);
  }
  open_out(dir / "summary.json") << summary << '\n';
  if (r.grid.dim() == 2) {
    auto svg = open_out(dir / "region.svg");
    write_svg(svg, r.grid, r.boundary ? &*r.boundary : nullptr);
  }
  if (r.boundary) {
    auto b = open_out(dir / "boundary.csv");
    write_polyline_csv(b, *r.boundary);
  }
  if (r.grid.gp_touches_window)
    std::cerr << "warning: G_p reaches the window boundary; the window may be too small\n";
  std::cout << summary << '\n';
  log_time("region", r.seconds);
  return kOk;
}

int cmd_verify(const Options& o) {
  const SystemSpec spec = load_system(o.file);
  const int p = degree_of(o, spec, 20);
  const Window w = window_of(o, spec);
  const auto t0 = std::chrono::steady_clock::now();
  const VerifyReport r = run_verify(spec, p, w, o.samples, o.seed, o.inflate);
  const auto summary = verify_summary(r).dump(2);
  if (!o.out.empty()) open_out(o.out) << summary << '\n';
  std::cout << summary << '\n';
  log_time("verify", std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  if (r.escapes > 0)
    return fail(kContradiction, std::to_string(r.escapes) +
                                    " sampled points of the certified set escape");
  return kOk;
}

int cmd_continue1d(const Options& o) {
  const SystemSpec spec = load_system(o.file);
  if (spec.sys.dim != 1) throw ParseError("continue1d needs a scalar system");
  const int p = degree_of(o, spec, 200);
  ContinuationOptions opts;
  opts.max_steps = o.max_steps;
  const auto report = to_json(continue_1d(spec.sys, p, opts)).dump(2);
  if (!o.out.empty()) open_out(o.out) << report << '\n';
  std::cout << report << '\n';
  return kOk;
}

int cmd_bench(const Options& o) {
  const SystemSpec spec = load_system(o.file);
  const int p = degree_of(o, spec, 20);
  const Window w = window_of(o, spec);
  const auto report = run_bench(spec, p, w, o.seed).dump(2);
  if (!o.out.empty()) open_out(o.out) << report << '\n';
  std::cout << report << '\n';
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lyapunov-based domain of attraction estimates for polynomial systems"};
  app.require_subcommand(1);
  Options o;

  auto common = [&](CLI::App* sub) {
    sub->add_option("system", o.file, "system definition (JSON)")->required();
    sub->add_option("--degree", o.degree, "Taylor degree p");
    sub->add_option("--seed", o.seed, "random seed")->capture_default_str();
    sub->add_option("--out", o.out, "output file or directory");
  };
  auto grid_flags = [&](CLI::App* sub) {
    sub->add_option("--window", o.window, "x1min,x1max,x2min,x2max,...");
    sub->add_option("--resolution", o.resolution, "cells per axis");
  };

  auto* coeffs = app.add_subcommand("coeffs", "write the coefficients of V_p");
  common(coeffs);
  auto* region = app.add_subcommand("region", "estimate G_p, c_p and N_p^c on a grid");
  common(region);
  grid_flags(region);
  region->add_flag("--oracle-boundary", o.oracle_boundary, "trace the basin boundary cycle");
  auto* verify = app.add_subcommand("verify", "classify sampled N_p^c cells with the oracle");
  common(verify);
  grid_flags(verify);
  verify->add_option("--samples", o.samples, "cells to classify")->capture_default_str();
  verify->add_option("--debug-inflate-cstar", o.inflate,
                     "sample {V_p < factor * c_star} instead (negative control)");
  auto* cont = app.add_subcommand("continue1d", "continue the 1D series past its radius");
  common(cont);
  cont->add_option("--max-steps", o.max_steps, "recentering budget")->capture_default_str();
  auto* bench = app.add_subcommand("bench", "time the pipeline stages");
  common(bench);
  grid_flags(bench);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail(kParse, e.what());
  }

  try {
    if (*coeffs) return cmd_coeffs(o);
    if (*region) return cmd_region(o);
    if (*verify) return cmd_verify(o);
    if (*cont) return cmd_continue1d(o);
    if (*bench) return cmd_bench(o);
  } catch (const ParseError& e) {
    return fail(kParse, e.what());
  } catch (const NotHurwitz& e) {
    return fail(kNotHurwitz, e.what());
  } catch (const NotDiagonalizable& e) {
    return fail(kNotDiag, e.what());
  } catch (const std::exception& e) {
    return fail(kInternal, e.what());
  }
  return kInternal;
}
