#pragma once

// JSON system definitions:
//
//   {"dim": 2,
//    "equations": [[{"coeff": -1, "exps": [0, 1]}],
//                  [{"coeff": 1, "exps": [1, 0]}, ...]],
//    "window": [[-3, 3], [-3, 3]], "resolution": 600, "degree": 20,
//    "oracle": {"method": "rk45", "rtol": 1e-9, "atol": 1e-12, "t_max": 200}}
//
// Everything after "equations" is optional.

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "basinscope/oracle.hpp"
#include "basinscope/region.hpp"
#include "basinscope/spectral.hpp"

namespace basinscope {

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SystemSpec {
  PolySystem sys;
  std::optional<Window> window;
  std::optional<int> resolution;
  std::optional<int> degree;
  IntegratorConfig oracle;
};

/// Throws ParseError on any structural problem, including terms with all
/// exponents zero and degrees outside [2, 64].
SystemSpec parse_system(const nlohmann::json& doc);
SystemSpec load_system(const std::filesystem::path& path);

/// "x1min,x1max,x2min,x2max,..." into a window with the given resolution.
Window parse_window(const std::string& text, int resolution);

}  // namespace basinscope
