#include "basinscope/system_file.hpp"

#include <fstream>
#include <sstream>

namespace basinscope {

using nlohmann::json;

namespace {

double number(const json& v, const std::string& what) {
  if (!v.is_number()) throw ParseError(what + " must be a number");
  return v.get<double>();
}

int integer(const json& v, const std::string& what) {
  if (!v.is_number_integer()) throw ParseError(what + " must be an integer");
  return v.get<int>();
}

Window window_from(const json& w, std::size_t dim, int resolution) {
  if (!w.is_array() || w.size() != dim)
    throw ParseError("window must list one [min, max] pair per dimension");
  Window win;
  win.resolution = resolution;
  for (const auto& axis : w) {
    if (!axis.is_array() || axis.size() != 2) throw ParseError("window entries must be [min, max]");
    win.lo.push_back(number(axis[0], "window bound"));
    win.hi.push_back(number(axis[1], "window bound"));
  }
  try {
    win.validate();
  } catch (const std::invalid_argument& e) {
    throw ParseError(e.what());
  }
  return win;
}

IntegratorConfig oracle_from(const json& o) {
  if (!o.is_object()) throw ParseError("oracle must be an object");
  IntegratorConfig cfg;
  for (const auto& [key, v] : o.items()) {
    if (key == "method") {
      const std::string m = v.is_string() ? v.get<std::string>() : "";
      if (m == "rk45")
        cfg.method = Method::RK45;
      else if (m == "rk4")
        cfg.method = Method::RK4;
      else
        throw ParseError("oracle.method must be \"rk45\" or \"rk4\"");
    } else if (key == "rtol") {
      cfg.rtol = number(v, "oracle.rtol");
    } else if (key == "atol") {
      cfg.atol = number(v, "oracle.atol");
    } else if (key == "step") {
      cfg.step = number(v, "oracle.step");
    } else if (key == "max_step") {
      cfg.max_step = number(v, "oracle.max_step");
    } else if (key == "t_max") {
      cfg.t_max = number(v, "oracle.t_max");
    } else if (key == "converge_radius") {
      cfg.converge_radius = number(v, "oracle.converge_radius");
    } else if (key == "escape_radius") {
      cfg.escape_radius = number(v, "oracle.escape_radius");
    } else {
      throw ParseError("unknown oracle key \"" + key + "\"");
    }
  }
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw ParseError(e.what());
  }
  return cfg;
}

}  // namespace

SystemSpec parse_system(const json& doc) {
  if (!doc.is_object()) throw ParseError("system file must hold a JSON object");
  if (!doc.contains("dim")) throw ParseError("missing \"dim\"");
  if (!doc.contains("equations")) throw ParseError("missing \"equations\"");
  const int dim_i = integer(doc["dim"], "dim");
  if (dim_i < 1) throw ParseError("dim must be >= 1");
  const auto dim = static_cast<std::size_t>(dim_i);

  const json& eqs = doc["equations"];
  if (!eqs.is_array() || eqs.size() != dim)
    throw ParseError("equations must be an array with dim entries");
  std::vector<Polynomial> comps;
  for (std::size_t i = 0; i < dim; ++i) {
    const json& terms = eqs[i];
    if (!terms.is_array()) throw ParseError("each equation must be an array of terms");
    Polynomial fi(dim);
    for (const json& t : terms) {
      if (!t.is_object() || !t.contains("coeff") || !t.contains("exps"))
        throw ParseError("each term needs \"coeff\" and \"exps\"");
      const double c = number(t["coeff"], "coeff");
      const json& e = t["exps"];
      if (!e.is_array() || e.size() != dim) throw ParseError("exps must have dim entries");
      MultiIndex j(dim);
      for (std::size_t k = 0; k < dim; ++k) {
        j[k] = integer(e[k], "exponent");
        if (j[k] < 0) throw ParseError("exponents must be non-negative");
      }
      if (j.total_degree() == 0)
        throw ParseError("equation " + std::to_string(i + 1) +
                         " has a constant term; f(0) must be 0");
      fi.add_term(j, c);
    }
    comps.push_back(std::move(fi));
  }

  SystemSpec spec;
  spec.sys = PolySystem(std::move(comps));
  try {
    spec.sys.validate();
  } catch (const std::invalid_argument& e) {
    throw ParseError(e.what());
  }

  if (doc.contains("resolution")) {
    spec.resolution = integer(doc["resolution"], "resolution");
    if (*spec.resolution < 16) throw ParseError("resolution must be >= 16");
  }
  if (doc.contains("window"))
    spec.window = window_from(doc["window"], dim, spec.resolution.value_or(600));
  if (doc.contains("degree")) {
    spec.degree = integer(doc["degree"], "degree");
    if (*spec.degree < 2 || *spec.degree > 64) throw ParseError("degree must lie in [2, 64]");
  }
  if (doc.contains("oracle")) spec.oracle = oracle_from(doc["oracle"]);
  return spec;
}

SystemSpec load_system(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  return parse_system(doc);
}

Window parse_window(const std::string& text, int resolution) {
  std::vector<double> v;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      v.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ParseError("bad window value \"" + item + "\"");
    }
  }
  if (v.empty() || v.size() % 2 != 0) throw ParseError("window needs min,max pairs");
  Window w;
  w.resolution = resolution;
  for (std::size_t i = 0; i < v.size(); i += 2) {
    w.lo.push_back(v[i]);
    w.hi.push_back(v[i + 1]);
  }
  try {
    w.validate();
  } catch (const std::invalid_argument& e) {
    throw ParseError(e.what());
  }
  return w;
}

}  // namespace basinscope
