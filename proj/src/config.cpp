#include "thinhom/config.hpp"

#include "thinhom/errors.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace thinhom {

namespace {

using nlohmann::json;

template <typename T>
T get_field(const json& obj, const char* section, const char* key) {
  if (!obj.contains(key)) throw ConfigError(std::string("missing field '") + section + key + "'");
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string("field '") + section + key + "' has the wrong type");
  }
}

template <typename T>
T get_or(const json& obj, const char* section, const char* key, T fallback) {
  return obj.contains(key) ? get_field<T>(obj, section, key) : fallback;
}

const json& section_of(const json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_object()) throw ConfigError(std::string("missing section '") + key + "'");
  return j.at(key);
}

LoadSpec load_from_json(const json& l) {
  LoadSpec spec;
  const std::string type = get_field<std::string>(l, "load.", "type");
  if (type == "constant") {
    spec.kind = LoadSpec::Kind::constant;
    spec.value = get_field<double>(l, "load.", "value");
  } else if (type == "cos_x1" || type == "cos_x1_x2") {
    spec.kind = type == "cos_x1" ? LoadSpec::Kind::cos_x1 : LoadSpec::Kind::cos_x1_x2;
    spec.amplitude = get_or<double>(l, "load.", "amplitude", 1.0);
    spec.wavenumber = get_or<double>(l, "load.", "wavenumber", 1.0);
    if (spec.kind == LoadSpec::Kind::cos_x1_x2) spec.slope_x2 = get_field<double>(l, "load.", "slope_x2");
  } else if (type == "linear_x1") {
    spec.kind = LoadSpec::Kind::linear_x1;
    spec.a = get_field<double>(l, "load.", "a");
    spec.b = get_field<double>(l, "load.", "b");
  } else {
    throw ConfigError("field 'load.type': unknown load type '" + type + "'");
  }
  return spec;
}

nlohmann::ordered_json load_to_json(const LoadSpec& l) {
  nlohmann::ordered_json j;
  j["type"] = LoadSpec::kind_name(l.kind);
  switch (l.kind) {
  case LoadSpec::Kind::constant: j["value"] = l.value; break;
  case LoadSpec::Kind::cos_x1:
    j["amplitude"] = l.amplitude;
    j["wavenumber"] = l.wavenumber;
    break;
  case LoadSpec::Kind::cos_x1_x2:
    j["amplitude"] = l.amplitude;
    j["wavenumber"] = l.wavenumber;
    j["slope_x2"] = l.slope_x2;
    break;
  case LoadSpec::Kind::linear_x1:
    j["a"] = l.a;
    j["b"] = l.b;
    break;
  }
  return j;
}

} // namespace

StudyConfig config_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("configuration must be a JSON object");
  StudyConfig c;

  const json& prof = section_of(j, "profile");
  try {
    c.profile = ProfileSpec(get_or<double>(prof, "profile.", "period", 1.0), get_field<double>(prof, "profile.", "mean"),
                            get_or<std::vector<double>>(prof, "profile.", "cos", {}),
                            get_or<std::vector<double>>(prof, "profile.", "sin", {}));
  } catch (const MeshError& e) {
    throw ConfigError(std::string("invalid profile: ") + e.what());
  }

  c.p = get_field<double>(j, "", "p");
  if (!(c.p > 1.0)) throw ConfigError("p must exceed 1");
  c.load = load_from_json(section_of(j, "load"));
  c.eps = get_field<std::vector<double>>(j, "", "eps");
  c.nu = get_field<std::vector<int>>(j, "", "nu");

  if (j.contains("cell_mesh")) {
    const json& m = section_of(j, "cell_mesh");
    c.cell_nx = get_or<int>(m, "cell_mesh.", "nx", c.cell_nx);
    c.cell_ny = get_or<int>(m, "cell_mesh.", "ny", c.cell_ny);
  }
  if (j.contains("thin_mesh")) {
    const json& m = section_of(j, "thin_mesh");
    c.thin_nx_per_period = get_or<int>(m, "thin_mesh.", "nx_per_period", c.thin_nx_per_period);
    c.thin_ny = get_or<int>(m, "thin_mesh.", "ny", c.thin_ny);
  }
  if (j.contains("limit")) {
    const json& m = section_of(j, "limit");
    c.limit_elements = get_or<int>(m, "limit.", "elements", c.limit_elements);
    if (m.contains("q")) c.limit_q = get_field<double>(m, "limit.", "q");
  }
  c.flux_stations = get_or<int>(j, "", "flux_stations", c.flux_stations);
  if (j.contains("solver")) {
    const json& s = section_of(j, "solver");
    SolveOptions& o = c.solver;
    o.residual_tol = get_or<double>(s, "solver.", "residual_tol", o.residual_tol);
    o.stage_tol = get_or<double>(s, "solver.", "stage_tol", o.stage_tol);
    o.max_newton = get_or<int>(s, "solver.", "max_newton", o.max_newton);
    o.backtrack = get_or<double>(s, "solver.", "backtrack", o.backtrack);
    o.sufficient_decrease = get_or<double>(s, "solver.", "sufficient_decrease", o.sufficient_decrease);
    o.max_halvings = get_or<int>(s, "solver.", "max_halvings", o.max_halvings);
    o.continuation_deltas = get_or<std::vector<double>>(s, "solver.", "continuation_deltas", o.continuation_deltas);
    o.linear_tol = get_or<double>(s, "solver.", "linear_tol", o.linear_tol);
    o.step_tol = get_or<double>(s, "solver.", "step_tol", o.step_tol);
  }
  c.output = get_or<std::string>(j, "", "output", c.output);
  c.record_timing = get_or<bool>(j, "", "record_timing", c.record_timing);
  c.validate();
  if (c.limit_q && !(*c.limit_q > 0.0)) throw ConfigError("field 'limit.q' must be positive");
  return c;
}

StudyConfig parse_config_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    const std::size_t upto = std::min(e.byte, text.size());
    const auto line = 1 + std::count(text.begin(), text.begin() + std::ptrdiff_t(upto > 0 ? upto - 1 : 0), '\n');
    std::ostringstream msg;
    msg << "config parse error at line " << line << ": " << e.what();
    throw ConfigError(msg.str());
  }
  return config_from_json(j);
}

StudyConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

nlohmann::ordered_json config_to_json(const StudyConfig& c) {
  nlohmann::ordered_json j;
  j["profile"] = {{"period", c.profile.period()},
                  {"mean", c.profile.mean()},
                  {"cos", c.profile.cos_coeffs()},
                  {"sin", c.profile.sin_coeffs()}};
  j["p"] = c.p;
  j["load"] = load_to_json(c.load);
  j["eps"] = c.eps;
  j["nu"] = c.nu;
  j["cell_mesh"] = {{"nx", c.cell_nx}, {"ny", c.cell_ny}};
  j["thin_mesh"] = {{"nx_per_period", c.thin_nx_per_period}, {"ny", c.thin_ny}};
  j["limit"] = {{"elements", c.limit_elements}};
  if (c.limit_q) j["limit"]["q"] = *c.limit_q;
  j["flux_stations"] = c.flux_stations;
  const SolveOptions& o = c.solver;
  j["solver"] = {{"residual_tol", o.residual_tol},     {"stage_tol", o.stage_tol},
                 {"max_newton", o.max_newton},         {"backtrack", o.backtrack},
                 {"sufficient_decrease", o.sufficient_decrease},
                 {"max_halvings", o.max_halvings},     {"continuation_deltas", o.continuation_deltas},
                 {"linear_tol", o.linear_tol},         {"step_tol", o.step_tol}};
  j["output"] = c.output;
  j["record_timing"] = c.record_timing;
  return j;
}

} // namespace thinhom
