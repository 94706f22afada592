#include <cmath>
#include <cstdio>
#include <json.hpp>
#include <set>

#include "stadium/error.hpp"
#include "stadium/serialize.hpp"
#include "stadium_cli/cli.hpp"

namespace stadium::cli {

using nlohmann::json;

namespace {

void check_keys(const json& j, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw ConfigError(where + " must be an object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, value] : j.items()) {
    if (ok.count(key) == 0) throw ConfigError("unknown key '" + key + "' in " + where);
  }
}

template <class T>
T get(const json& j, const char* key, const std::string& where) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(where + "." + key + " has the wrong type or is missing");
  }
}

double number(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key) || !j.at(key).is_number()) throw ConfigError(where + "." + key + " must be a number");
  return j.at(key).get<double>();
}

std::size_t count(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key) || !j.at(key).is_number_unsigned()) {
    throw ConfigError(where + "." + key + " must be a non-negative integer");
  }
  return j.at(key).get<std::size_t>();
}

SymmetryClass symmetry(const std::string& text) {
  const auto cls = parse_symmetry_class(text);
  if (!cls || *cls == SymmetryClass::Ambiguous) throw ConfigError("unknown symmetry class '" + text + "'");
  return *cls;
}

}  // namespace

RunConfig parse_run_config(const std::string& json_text, RunConfig c) {
  json j = json::parse(json_text, nullptr, false);
  if (j.is_discarded()) throw ConfigError("config is not valid JSON");
  check_keys(j, "config", {"geometry", "grid", "solver", "classes", "sweep", "analysis", "output", "threads"});

  if (j.contains("geometry")) {
    const json& g = j["geometry"];
    check_keys(g, "geometry", {"shape", "a", "r", "lx", "ly"});
    const auto shape = g.contains("shape") ? get<std::string>(g, "shape", "geometry") : "stadium";
    try {
      if (shape == "stadium") {
        const double a = g.contains("a") ? number(g, "a", "geometry") : 1.0;
        const double r = g.contains("r") ? number(g, "r", "geometry") : 1.0;
        c.geometry = StadiumGeometry(a, r);
      } else if (shape == "rectangle") {
        c.geometry = RectangleGeometry(number(g, "lx", "geometry"), number(g, "ly", "geometry"));
      } else {
        throw ConfigError("geometry.shape must be 'stadium' or 'rectangle'");
      }
    } catch (const InvalidArgument& e) {
      throw ConfigError(e.what());
    }
  }
  if (j.contains("grid")) {
    const json& g = j["grid"];
    check_keys(g, "grid", {"h", "mode", "class"});
    if (g.contains("h")) c.h = number(g, "h", "grid");
    if (g.contains("mode")) {
      const auto mode = get<std::string>(g, "mode", "grid");
      if (mode == "full") {
        c.mode = GridMode::FullDomain;
      } else if (mode == "quadrant") {
        c.mode = GridMode::Quadrant;
      } else {
        throw ConfigError("grid.mode must be 'full' or 'quadrant'");
      }
    }
    if (g.contains("class")) c.classes = {symmetry(get<std::string>(g, "class", "grid"))};
  }
  if (j.contains("classes")) {
    if (!j["classes"].is_array()) throw ConfigError("classes must be an array of strings");
    c.classes.clear();
    for (const auto& s : j["classes"]) {
      if (!s.is_string()) throw ConfigError("classes must be an array of strings");
      c.classes.push_back(symmetry(s.get<std::string>()));
    }
  }
  if (j.contains("solver")) {
    const json& s = j["solver"];
    check_keys(s, "solver", {"k", "tol", "seed"});
    if (s.contains("k")) c.k = count(s, "k", "solver");
    if (s.contains("tol")) c.tol = number(s, "tol", "solver");
    if (s.contains("seed")) c.seed = get<std::uint64_t>(s, "seed", "solver");
  }
  if (j.contains("sweep")) {
    const json& s = j["sweep"];
    check_keys(s, "sweep", {"a_min", "a_max", "step", "a_values"});
    if (s.contains("a_values")) {
      if (s.contains("a_min") || s.contains("a_max") || s.contains("step")) {
        throw ConfigError("sweep takes either a_values or a_min/a_max/step");
      }
      c.a_values = get<std::vector<double>>(s, "a_values", "sweep");
    } else {
      try {
        c.a_values = a_range(number(s, "a_min", "sweep"), number(s, "a_max", "sweep"), number(s, "step", "sweep"));
      } catch (const InvalidArgument& e) {
        throw ConfigError(e.what());
      }
    }
  }
  if (j.contains("analysis")) {
    const json& a = j["analysis"];
    check_keys(a, "analysis", {"threshold", "min_prominence", "delta", "refine_width", "refine"});
    if (a.contains("threshold")) c.threshold = number(a, "threshold", "analysis");
    if (a.contains("min_prominence")) c.min_prominence = number(a, "min_prominence", "analysis");
    if (a.contains("delta")) c.delta = number(a, "delta", "analysis");
    if (a.contains("refine_width")) c.refine_width = number(a, "refine_width", "analysis");
    if (a.contains("refine")) {
      if (!a["refine"].is_boolean()) throw ConfigError("analysis.refine must be true or false");
      c.refine = a["refine"].get<bool>();
    }
  }
  if (j.contains("output")) c.output = get<std::string>(j, "output", "config");
  if (j.contains("threads")) c.threads = count(j, "threads", "config");
  return c;
}

namespace {

json science_json(const RunConfig& c) {
  json geometry;
  if (const auto* s = std::get_if<StadiumGeometry>(&c.geometry)) {
    geometry = {{"shape", "stadium"}, {"a", s->a()}, {"r", s->r()}};
  } else {
    const auto& r = std::get<RectangleGeometry>(c.geometry);
    geometry = {{"shape", "rectangle"}, {"lx", r.lx()}, {"ly", r.ly()}};
  }
  json classes = json::array();
  for (SymmetryClass cls : c.classes) classes.push_back(std::string(to_string(cls)));
  json j = {{"geometry", geometry},
            {"grid", {{"h", c.h}, {"mode", std::string(to_string(c.mode))}}},
            {"solver", {{"k", c.k}, {"tol", c.tol}, {"seed", c.seed}}},
            {"classes", classes},
            {"analysis",
             {{"threshold", c.threshold},
              {"min_prominence", c.min_prominence},
              {"delta", c.delta},
              {"refine_width", c.refine_width},
              {"refine", c.refine}}}};
  if (!c.a_values.empty()) j["sweep"] = {{"a_values", c.a_values}};
  return j;
}

}  // namespace

std::string run_config_to_json(const RunConfig& c) {
  json j = science_json(c);
  j["output"] = c.output.generic_string();
  j["threads"] = c.threads;
  return j.dump(2) + "\n";
}

std::string science_config_json(const RunConfig& c) { return science_json(c).dump(2) + "\n"; }

std::string run_hash(const RunConfig& config) { return hash_text(science_json(config).dump()); }

void validate_common(const RunConfig& c) {
  if (!(c.h > 0.0) || !std::isfinite(c.h)) throw ConfigError("h must be a positive number");
  if (c.k == 0) throw ConfigError("k must be >= 1");
  if (!(c.tol > 0.0) || c.tol > 1e-2) throw ConfigError("tol must be in (0, 1e-2]");
  if (!(c.threshold > 0.5 && c.threshold < 1.0)) throw ConfigError("threshold must be in (0.5, 1)");
  if (c.classes.empty()) throw ConfigError("at least one symmetry class is required");
  std::set<SymmetryClass> seen;
  for (SymmetryClass cls : c.classes) {
    if (!seen.insert(cls).second) throw ConfigError("duplicate symmetry class");
  }
  if (!(c.min_prominence >= 0.0)) throw ConfigError("min_prominence must be >= 0");
  if (!(c.delta > 0.0) || !std::isfinite(c.delta)) throw ConfigError("delta must be > 0");
  if (!(c.refine_width > 0.0)) throw ConfigError("refine_width must be > 0");
  if (c.threads == 0) throw ConfigError("threads must be >= 1");
  if (c.output.empty()) throw ConfigError("output directory is empty");
}

SpectrumOptions to_spectrum_options(const RunConfig& c) {
  SpectrumOptions o;
  if (const auto* s = std::get_if<StadiumGeometry>(&c.geometry)) o.r = s->r();
  o.h = c.h;
  o.mode = c.mode;
  o.k = c.k;
  o.tol = c.tol;
  o.seed = c.seed;
  o.threshold = c.threshold;
  return o;
}

SweepConfig to_sweep_config(const RunConfig& c) {
  if (!std::holds_alternative<StadiumGeometry>(c.geometry)) throw ConfigError("sweeps need a stadium geometry");
  SweepConfig s;
  s.a_values = c.a_values;
  s.classes = c.classes;
  s.spectrum = to_spectrum_options(c);
  s.threads = c.threads;
  try {
    s.validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what());
  }
  return s;
}

std::string format_a(double a) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.4f", a);
  std::string s(buf);
  while (!s.empty() && s.back() == '0') s.pop_back();
  if (!s.empty() && s.back() == '.') s.pop_back();
  if (s == "-0") s = "0";
  return s;
}

}  // namespace stadium::cli
