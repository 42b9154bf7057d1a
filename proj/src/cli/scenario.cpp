#include "holo/cli/scenario.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace holo::cli {

namespace {

using nlohmann::json;

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw ScenarioError(where + ": expected an object");
  for (const auto& [key, value] : j.items())
    if (!allowed.count(key)) throw ScenarioError(where + ": unknown field '" + key + "'");
}

template <typename T>
void read(const json& j, const char* key, T& out, const std::string& where) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ScenarioError(where + ": field '" + key + "' has the wrong type");
  }
}

void read_seed(const json& j, std::optional<std::uint64_t>& out, const std::string& where) {
  if (!j.contains("seed")) return;
  std::uint64_t v = 0;
  read(j, "seed", v, where);
  out = v;
}

template <typename T>
void require(const json& j, const char* key, T& out, const std::string& where) {
  if (!j.contains(key)) throw ScenarioError(where + ": missing field '" + key + "'");
  read(j, key, out, where);
}

void require_one_of(const std::string& value, const std::set<std::string>& options, const std::string& where) {
  if (!options.count(value)) throw ScenarioError(where + ": unknown preset '" + value + "'");
}

SetupSpec parse_setup(const json& j) {
  const std::string where = "setup";
  check_keys(j, {"preset", "group", "atlas", "xi", "charge", "seed", "degree", "scale"}, where);
  SetupSpec s;
  require(j, "preset", s.preset, where);
  require_one_of(s.preset, {"trivial", "flat-angle", "monopole", "random-polynomial"}, where);
  read(j, "group", s.group, where);
  read(j, "atlas", s.atlas, where);
  read(j, "xi", s.xi, where);
  read(j, "charge", s.charge, where);
  read_seed(j, s.seed, where);
  read(j, "degree", s.degree, where);
  read(j, "scale", s.scale, where);
  if (s.preset == "flat-angle" && s.xi.empty()) throw ScenarioError(where + ": flat-angle needs 'xi'");
  return s;
}

FormSpec parse_form(const json& j) {
  const std::string where = "form";
  check_keys(j, {"preset", "coefficients", "eta", "seed", "degree", "scale", "norm"}, where);
  FormSpec f;
  require(j, "preset", f.preset, where);
  require_one_of(f.preset, {"zero", "constant", "angle", "x-dy", "random-polynomial"}, where);
  read(j, "coefficients", f.coefficients, where);
  read(j, "eta", f.eta, where);
  read_seed(j, f.seed, where);
  read(j, "degree", f.degree, where);
  read(j, "scale", f.scale, where);
  read(j, "norm", f.norm, where);
  if ((f.preset == "angle" || f.preset == "x-dy") && f.eta.empty())
    throw ScenarioError(where + ": preset '" + f.preset + "' needs 'eta'");
  if (f.preset == "constant" && f.coefficients.empty())
    throw ScenarioError(where + ": constant form needs 'coefficients'");
  if (f.norm < 0.0) throw ScenarioError(where + ": 'norm' must be non-negative");
  return f;
}

LoopSpec parse_loop(const json& j, int index) {
  const std::string where = "loops[" + std::to_string(index) + "]";
  check_keys(j, {"id", "preset", "centre", "radius", "a", "b", "from", "to", "theta", "tilt", "phase", "winding",
                 "points"},
             where);
  LoopSpec l;
  l.id = index;
  read(j, "id", l.id, where);
  require(j, "preset", l.preset, where);
  require_one_of(l.preset, {"circle", "ellipse", "arc", "polygon", "latitude", "tilted", "circle-angle"}, where);
  read(j, "centre", l.centre, where);
  read(j, "radius", l.radius, where);
  read(j, "a", l.a, where);
  read(j, "b", l.b, where);
  read(j, "from", l.from, where);
  read(j, "to", l.to, where);
  read(j, "theta", l.theta, where);
  read(j, "tilt", l.tilt, where);
  read(j, "phase", l.phase, where);
  read(j, "winding", l.winding, where);
  read(j, "points", l.points, where);
  if (l.centre.size() != 2) throw ScenarioError(where + ": 'centre' needs two coordinates");
  if (l.preset == "polygon" && l.points.size() < 2) throw ScenarioError(where + ": polygon needs two points");
  return l;
}

FamilySpec parse_family(const json& j, int index) {
  const std::string where = "families[" + std::to_string(index) + "]";
  check_keys(j, {"id", "preset", "r0", "r1", "theta0", "theta1", "winding", "mode"}, where);
  FamilySpec f;
  f.id = index;
  read(j, "id", f.id, where);
  require(j, "preset", f.preset, where);
  require_one_of(f.preset, {"radial", "wobble", "crossing", "latitude"}, where);
  read(j, "r0", f.r0, where);
  read(j, "r1", f.r1, where);
  read(j, "theta0", f.theta0, where);
  read(j, "theta1", f.theta1, where);
  read(j, "winding", f.winding, where);
  read(j, "mode", f.mode, where);
  if (f.mode != "fixed" && f.mode != "moving") throw ScenarioError(where + ": mode must be 'fixed' or 'moving'");
  return f;
}

}  // namespace

const std::vector<std::string>& check_names() {
  static const std::vector<std::string> names{"transport",        "holonomy",          "curvature",
                                              "wilson-base-point", "wilson-gauge",      "gen-wilson-term0",
                                              "gen-wilson-oracle", "flatness",          "groupoid"};
  return names;
}

double default_tolerance(const std::string& check) {
  static const std::map<std::string, double> defaults{
      {"transport", 1e-7},         {"holonomy", 1e-7},          {"curvature", 1e-3},
      {"wilson-base-point", 1e-9}, {"wilson-gauge", 1e-7},      {"gen-wilson-term0", 1e-10},
      {"gen-wilson-oracle", 1e-6}, {"flatness", 1e-6},          {"groupoid", 0.0}};
  const auto it = defaults.find(check);
  if (it == defaults.end()) throw ScenarioError("unknown check '" + check + "'");
  return it->second;
}

Scenario parse_scenario(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ScenarioError(std::string("invalid JSON: ") + e.what());
  }
  check_keys(j, {"schema_version", "name", "seed", "setup", "representation", "form", "loops", "families",
                 "curvature", "groupoid", "integrator", "order", "samples", "checks"},
             "scenario");
  Scenario s;
  require(j, "schema_version", s.schema_version, "scenario");
  if (s.schema_version != kSchemaVersion)
    throw ScenarioError("unsupported schema_version " + std::to_string(s.schema_version));
  require(j, "seed", s.seed, "scenario");
  read(j, "name", s.name, "scenario");
  read(j, "representation", s.representation, "scenario");
  read(j, "order", s.order, "scenario");
  read(j, "samples", s.samples, "scenario");
  if (s.order < 0 || s.order > 8) throw ScenarioError("scenario: 'order' must lie in 0..8");
  if (s.samples < 1) throw ScenarioError("scenario: 'samples' must be positive");
  if (j.contains("setup")) {
    s.setup = parse_setup(j.at("setup"));
  } else {
    s.setup.preset = "trivial";
  }
  if (j.contains("form")) s.form = parse_form(j.at("form"));
  if (j.contains("loops")) {
    if (!j.at("loops").is_array()) throw ScenarioError("scenario: 'loops' must be an array");
    int i = 0;
    for (const auto& l : j.at("loops")) s.loops.push_back(parse_loop(l, i++));
  }
  if (j.contains("families")) {
    if (!j.at("families").is_array()) throw ScenarioError("scenario: 'families' must be an array");
    int i = 0;
    for (const auto& f : j.at("families")) s.families.push_back(parse_family(f, i++));
  }
  if (j.contains("curvature")) {
    const json& c = j.at("curvature");
    check_keys(c, {"points", "eps"}, "curvature");
    read(c, "eps", s.curvature_eps, "curvature");
    if (c.contains("points")) {
      if (!c.at("points").is_array()) throw ScenarioError("curvature: 'points' must be an array");
      int i = 0;
      for (const auto& p : c.at("points")) {
        const std::string where = "curvature.points[" + std::to_string(i++) + "]";
        check_keys(p, {"chart", "x"}, where);
        CurvaturePoint cp;
        read(p, "chart", cp.chart, where);
        require(p, "x", cp.x, where);
        s.curvature_points.push_back(cp);
      }
    }
    if (!(s.curvature_eps > 0.0)) throw ScenarioError("curvature: 'eps' must be positive");
  }
  if (j.contains("groupoid")) {
    const json& g = j.at("groupoid");
    check_keys(g, {"fixture", "seed", "order", "objects"}, "groupoid");
    GroupoidSpec spec;
    require(g, "fixture", spec.fixture, "groupoid");
    require_one_of(spec.fixture, {"random", "cyclic", "s3", "transitive"}, "groupoid");
    read_seed(g, spec.seed, "groupoid");
    read(g, "order", spec.order, "groupoid");
    read(g, "objects", spec.objects, "groupoid");
    if (spec.order < 1 || spec.objects < 1) throw ScenarioError("groupoid: 'order' and 'objects' must be positive");
    s.groupoid = spec;
  }
  if (j.contains("integrator")) {
    const json& in = j.at("integrator");
    check_keys(in, {"step", "panel_nodes", "panels_per_unit", "simplex_nodes"}, "integrator");
    read(in, "step", s.integrator.step, "integrator");
    read(in, "panel_nodes", s.integrator.panel_nodes, "integrator");
    read(in, "panels_per_unit", s.integrator.panels_per_unit, "integrator");
    read(in, "simplex_nodes", s.integrator.simplex_nodes, "integrator");
    if (!(s.integrator.step > 0.0)) throw ScenarioError("integrator: 'step' must be positive");
  }
  if (j.contains("checks")) {
    const json& c = j.at("checks");
    if (!c.is_object()) throw ScenarioError("checks: expected an object");
    for (const auto& [name, value] : c.items()) {
      double tol = default_tolerance(name);
      if (value.is_object()) {
        check_keys(value, {"tolerance"}, "checks." + name);
        read(value, "tolerance", tol, "checks." + name);
      } else if (!value.is_null()) {
        throw ScenarioError("checks." + name + ": expected an object");
      }
      s.checks[name] = tol;
    }
  }
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read scenario '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

}  // namespace holo::cli
