#include "lbs/study.hpp"

#include "lbs/error.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace lbs {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

[[noreturn]] void bad(const std::string& key, const std::string& value, const std::string& why) {
  throw Error(ErrorKind::ConfigError, key + " = '" + value + "': " + why);
}

double to_double(const std::string& key, const std::string& v) {
  double out = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size()) bad(key, v, "expected a number");
  return out;
}

long to_long(const std::string& key, const std::string& v) {
  long out = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size()) bad(key, v, "expected an integer");
  return out;
}

int to_int(const std::string& key, const std::string& v) { return static_cast<int>(to_long(key, v)); }

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  bad(key, v, "expected true or false");
}

CellKind to_cell(const std::string& key, const std::string& v) {
  if (v == "segment") return CellKind::Segment;
  if (v == "triangle" || v == "tri") return CellKind::Triangle;
  if (v == "quad" || v == "quadrilateral") return CellKind::Quad;
  bad(key, v, "expected segment, triangle or quad");
}

NodeFamily to_family(const std::string& key, const std::string& v) {
  if (v == "equispaced") return NodeFamily::Equispaced;
  if (v == "gauss_lobatto") return NodeFamily::GaussLobatto;
  bad(key, v, "expected equispaced or gauss_lobatto");
}

std::vector<int> to_int_list(const std::string& key, const std::string& v) {
  std::vector<int> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    // a..b ranges
    if (const auto dots = item.find(".."); dots != std::string::npos) {
      const int a = to_int(key, trim(item.substr(0, dots)));
      const int b = to_int(key, trim(item.substr(dots + 2)));
      for (int i = a; i <= b; ++i) out.push_back(i);
    } else {
      out.push_back(to_int(key, item));
    }
  }
  if (out.empty()) bad(key, v, "empty list");
  return out;
}

using Setter = std::function<void(StudyConfig&, const std::string& key, const std::string& value)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"name", [](StudyConfig& c, const auto&, const auto& v) { c.name = v; }},
      {"surface", [](StudyConfig& c, const auto&, const auto& v) { c.surface = v; }},
      {"surface.radius", [](StudyConfig& c, const auto& k, const auto& v) { c.radius = to_double(k, v); }},
      {"surface.major_radius",
       [](StudyConfig& c, const auto& k, const auto& v) { c.major_radius = to_double(k, v); }},
      {"surface.minor_radius",
       [](StudyConfig& c, const auto& k, const auto& v) { c.minor_radius = to_double(k, v); }},
      {"surface.strip", [](StudyConfig& c, const auto& k, const auto& v) { c.strip_halfwidth = to_double(k, v); }},
      {"cell_kind", [](StudyConfig& c, const auto& k, const auto& v) { c.cell_kind = to_cell(k, v); }},
      {"circle.segments", [](StudyConfig& c, const auto& k, const auto& v) { c.circle_segments = to_int(k, v); }},
      {"lift.k", [](StudyConfig& c, const auto& k, const auto& v) { c.k = to_int(k, v); }},
      {"lift.points",
       [](StudyConfig& c, const auto& k, const auto& v) {
         try {
           c.points = point_kind_from_string(v);
         } catch (const Error&) {
           bad(k, v, "expected equispaced, gauss_lobatto or perturbed");
         }
       }},
      {"lift.perturb.base", [](StudyConfig& c, const auto& k, const auto& v) { c.perturb_base = to_family(k, v); }},
      {"lift.perturb.center",
       [](StudyConfig& c, const auto& k, const auto& v) { c.perturbation.center = to_double(k, v); }},
      {"lift.perturb.width",
       [](StudyConfig& c, const auto& k, const auto& v) { c.perturbation.width = to_double(k, v); }},
      {"lift.perturb.seed",
       [](StudyConfig& c, const auto& k, const auto& v) {
         c.perturbation.seed = static_cast<std::uint64_t>(to_long(k, v));
       }},
      {"fe.r", [](StudyConfig& c, const auto& k, const auto& v) { c.r = to_int(k, v); }},
      {"levels.min", [](StudyConfig& c, const auto& k, const auto& v) { c.level_min = to_int(k, v); }},
      {"levels.max", [](StudyConfig& c, const auto& k, const auto& v) { c.level_max = to_int(k, v); }},
      {"targets", [](StudyConfig& c, const auto& k, const auto& v) { c.targets = to_int_list(k, v); }},
      {"target.function", [](StudyConfig& c, const auto& k, const auto& v) { c.target_function = to_int(k, v); }},
      {"assembly.degree", [](StudyConfig& c, const auto& k, const auto& v) { c.assembly_degree = to_int(k, v); }},
      {"reference",
       [](StudyConfig& c, const auto& k, const auto& v) {
         if (v == "analytic")
           c.reference = ReferencePolicy::Analytic;
         else if (v == "extrapolated")
           c.reference = ReferencePolicy::Extrapolated;
         else
           bad(k, v, "expected analytic or extrapolated");
       }},
      {"reference.r", [](StudyConfig& c, const auto& k, const auto& v) { c.reference_settings.r = to_int(k, v); }},
      {"reference.k", [](StudyConfig& c, const auto& k, const auto& v) { c.reference_settings.k = to_int(k, v); }},
      {"reference.levels.min",
       [](StudyConfig& c, const auto& k, const auto& v) { c.reference_settings.level_min = to_int(k, v); }},
      {"reference.levels.max",
       [](StudyConfig& c, const auto& k, const auto& v) { c.reference_settings.level_max = to_int(k, v); }},
      {"solver.method",
       [](StudyConfig& c, const auto& k, const auto& v) {
         try {
           c.solver.method = eigen_method_from_string(v);
         } catch (const Error&) {
           bad(k, v, "expected auto, dense or shift_invert_lanczos");
         }
       }},
      {"solver.dense_limit", [](StudyConfig& c, const auto& k, const auto& v) { c.solver.dense_limit = to_int(k, v); }},
      {"solver.shift", [](StudyConfig& c, const auto& k, const auto& v) { c.solver.shift = to_double(k, v); }},
      {"solver.seed",
       [](StudyConfig& c, const auto& k, const auto& v) { c.solver.seed = static_cast<std::uint64_t>(to_long(k, v)); }},
      {"solver.extra_eigs", [](StudyConfig& c, const auto& k, const auto& v) { c.extra_eigs = to_int(k, v); }},
      {"errors.eigenfunctions",
       [](StudyConfig& c, const auto& k, const auto& v) { c.eigenfunction_errors = to_bool(k, v); }},
      {"errors.consistency", [](StudyConfig& c, const auto& k, const auto& v) { c.consistency = to_bool(k, v); }},
      {"expect.eigenvalue", [](StudyConfig& c, const auto& k, const auto& v) { c.expect_eigenvalue = to_double(k, v); }},
      {"expect.l2", [](StudyConfig& c, const auto& k, const auto& v) { c.expect_l2 = to_double(k, v); }},
      {"expect.energy", [](StudyConfig& c, const auto& k, const auto& v) { c.expect_energy = to_double(k, v); }},
      {"expect.window", [](StudyConfig& c, const auto& k, const auto& v) { c.expect_window = to_double(k, v); }},
      {"output.dir", [](StudyConfig& c, const auto&, const auto& v) { c.output_dir = v; }},
      {"output.timing", [](StudyConfig& c, const auto& k, const auto& v) { c.output_timing = to_bool(k, v); }},
  };
  return table;
}

}  // namespace

StudyConfig parse_config(std::istream& in) {
  StudyConfig c;
  std::string line;
  int lineno = 0;
  std::set<std::string> seen;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw Error(ErrorKind::ConfigError, "line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const auto it = setters().find(key);
    if (it == setters().end())
      throw Error(ErrorKind::ConfigError, "line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    if (!seen.insert(key).second)
      throw Error(ErrorKind::ConfigError, "line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
    if (value.empty()) throw Error(ErrorKind::ConfigError, "line " + std::to_string(lineno) + ": empty value");
    it->second(c, key, value);
  }
  // the reference runs follow the study's mesh
  c.reference_settings.cell_kind = c.cell_kind;
  c.reference_settings.circle_segments = c.circle_segments;
  c.reference_settings.solver = c.solver;
  validate(c);
  return c;
}

StudyConfig parse_config_text(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

StudyConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::ConfigError, "cannot open config file '" + path + "'");
  return parse_config(in);
}

SurfaceDescription make_surface(const StudyConfig& c) {
  SurfaceDescription s = [&] {
    if (c.surface == "circle") return SurfaceDescription::circle(c.radius);
    if (c.surface == "sphere") return SurfaceDescription::sphere(c.radius);
    if (c.surface == "torus") return SurfaceDescription::torus(c.major_radius, c.minor_radius);
    std::string name = c.surface;
    if (name.rfind("implicit:", 0) == 0) name = name.substr(9);
    return SurfaceDescription::implicit(name);
  }();
  if (c.strip_halfwidth) s.set_strip_halfwidth(*c.strip_halfwidth);
  return s;
}

InterpolationPointSet make_point_set(const StudyConfig& c) {
  switch (c.points) {
    case PointKind::Equispaced: return InterpolationPointSet::equispaced(c.k);
    case PointKind::GaussLobatto: return InterpolationPointSet::gauss_lobatto(c.k);
    case PointKind::Perturbed:
      return InterpolationPointSet::perturbed(c.perturb_base.value_or(default_node_family(c.cell_kind)), c.k,
                                              c.perturbation);
  }
  return InterpolationPointSet::gauss_lobatto(c.k);
}

void validate(const StudyConfig& c) {
  auto fail = [](const std::string& why) { throw Error(ErrorKind::ConfigError, why); };
  try {
    (void)make_surface(c);
  } catch (const Error& e) {
    fail(std::string("surface: ") + e.what());
  }
  const bool curve = c.surface == "circle";
  if (curve != (c.cell_kind == CellKind::Segment))
    fail("cell_kind " + std::string(to_string(c.cell_kind)) + " does not fit surface " + c.surface);
  if (c.k < 1 || c.r < 1) fail("lift.k and fe.r must be >= 1");
  if (c.level_min < 0 || c.level_max < c.level_min) fail("need 0 <= levels.min <= levels.max");
  if (c.circle_segments < 3) fail("circle.segments must be >= 3");
  for (std::size_t i = 0; i < c.targets.size(); ++i) {
    if (c.targets[i] < 1) fail("targets must be >= 1");
    if (i > 0 && c.targets[i] <= c.targets[i - 1]) fail("targets must be strictly increasing");
  }
  const bool closed_form = c.surface == "circle" || c.surface == "sphere";
  if (c.reference == ReferencePolicy::Analytic && !closed_form)
    fail("surface " + c.surface + " has no closed-form spectrum; set reference = extrapolated");
  if (c.reference == ReferencePolicy::Extrapolated) {
    const auto& rs = c.reference_settings;
    if (rs.level_max - rs.level_min < 2) fail("reference levels must span at least three levels");
    if (rs.r < 1 || rs.k < 1) fail("reference.r and reference.k must be >= 1");
  }
  const NodeFamily fam = c.points == PointKind::Perturbed ? c.perturb_base.value_or(default_node_family(c.cell_kind))
                                                          : (c.points == PointKind::Equispaced ? NodeFamily::Equispaced
                                                                                               : NodeFamily::GaussLobatto);
  if (c.cell_kind == CellKind::Triangle && fam == NodeFamily::GaussLobatto)
    fail("Gauss-Lobatto points are not defined on triangles");
  if (c.points == PointKind::Perturbed && !(c.perturbation.width >= 0)) fail("lift.perturb.width must be >= 0");
  if (c.target_function < 0) fail("target.function must be >= 0");
  if (!(c.expect_window > 0)) fail("expect.window must be positive");
  if (c.extra_eigs < 1) fail("solver.extra_eigs must be >= 1");
}

}  // namespace lbs
