#pragma once

// Flat `key = value` configuration files. '#' starts a comment; keys are
// dotted (grid.L, time.dt, ic.params.U, ...). Unknown keys are rejected.

#include <cstdlib>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "cylflow/dynamics.hpp"
#include "cylflow/energetics.hpp"
#include "cylflow/kernel.hpp"

namespace cylflow {

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct AppConfig {
  SimConfig sim;
  std::string output_dir = "out";
  double dist_R = 2.0;
  std::vector<Window> windows;
  std::vector<double> dissipation_R;
  double epsilon = 0.05;
  QuadratureSpec quad;
  std::optional<double> M;  // overrides sup |omega(.,0)|
  std::string sweep_parameter;
  std::vector<double> sweep_values;
  std::map<std::string, std::string> raw;  // every key as read, for echoing
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline double parse_double(const std::string& key, const std::string& v) {
  char* end = nullptr;
  const double d = std::strtod(v.c_str(), &end);
  if (v.empty() || end == v.c_str() || *end != '\0') throw ConfigError("config: key '" + key + "': '" + v + "' is not a number");
  return d;
}

inline long parse_int(const std::string& key, const std::string& v) {
  const double d = parse_double(key, v);
  if (d != double(long(d))) throw ConfigError("config: key '" + key + "': '" + v + "' is not an integer");
  return long(d);
}

inline bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "on") return true;
  if (v == "false" || v == "0" || v == "off") return false;
  throw ConfigError("config: key '" + key + "': '" + v + "' is not a boolean");
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream is(s);
  while (std::getline(is, item, sep)) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

inline std::vector<double> parse_list(const std::string& key, const std::string& v) {
  std::vector<double> out;
  for (const auto& item : split(v, ',')) out.push_back(parse_double(key, item));
  return out;
}

}  // namespace detail

// "a:b,a:b,..." -> windows.
inline std::vector<Window> parse_windows(const std::string& spec) {
  std::vector<Window> out;
  for (const auto& item : detail::split(spec, ',')) {
    const auto colon = item.find(':');
    if (colon == std::string::npos) throw ConfigError("windows: expected a:b, got '" + item + "'");
    const double a = detail::parse_double("windows", detail::trim(item.substr(0, colon)));
    const double b = detail::parse_double("windows", detail::trim(item.substr(colon + 1)));
    if (!(a < b)) throw ConfigError("windows: require a < b in '" + item + "'");
    out.push_back({a, b});
  }
  return out;
}

inline void apply_key(AppConfig& c, const std::string& key, const std::string& v) {
  using namespace detail;
  SimConfig& s = c.sim;
  if (key == "grid.L") s.grid.L = parse_double(key, v);
  else if (key == "grid.N1") s.grid.n1 = int(parse_int(key, v));
  else if (key == "grid.N2") s.grid.n2 = int(parse_int(key, v));
  else if (key == "time.dt") s.dt = parse_double(key, v);
  else if (key == "time.T") s.T_final = parse_double(key, v);
  else if (key == "time.cfl_safety") s.cfl_safety = parse_double(key, v);
  else if (key == "time.dealias") s.dealias = parse_bool(key, v);
  else if (key == "time.scheme") {
    if (v == "rk2") s.scheme = Scheme::rk2;
    else if (v == "rk4") s.scheme = Scheme::rk4;
    else throw ConfigError("config: key 'time.scheme': expected rk2 or rk4, got '" + v + "'");
  } else if (key == "ic.kind") s.initial_condition.kind = v;
  else if (key == "ic.seed") s.initial_condition.seed = std::uint64_t(parse_int(key, v));
  else if (key.rfind("ic.params.", 0) == 0 && key.size() > 10) s.initial_condition.params[key.substr(10)] = parse_double(key, v);
  else if (key == "output.cadence") s.snapshot_interval = parse_double(key, v);
  else if (key == "output.dir") c.output_dir = v;
  else if (key == "output.checkpoints") s.checkpoints = parse_list(key, v);
  else if (key == "output.dist_R") c.dist_R = parse_double(key, v);
  else if (key == "output.windows") c.windows = parse_windows(v);
  else if (key == "verify.dissipation_R") c.dissipation_R = parse_list(key, v);
  else if (key == "verify.epsilon") c.epsilon = parse_double(key, v);
  else if (key == "quad.X") c.quad.X = parse_double(key, v);
  else if (key == "quad.panels_per_unit") c.quad.panels_per_unit = int(parse_int(key, v));
  else if (key == "quad.corner_panels") c.quad.corner_panels = int(parse_int(key, v));
  else if (key == "constants.M") c.M = parse_double(key, v);
  else if (key == "sweep.parameter") {
    if (v != "T" && v != "U" && v != "seed") throw ConfigError("config: key 'sweep.parameter': expected T, U or seed");
    c.sweep_parameter = v;
  } else if (key == "sweep.values") c.sweep_values = parse_list(key, v);
  else throw ConfigError("config: unknown key '" + key + "'");
  c.raw[key] = v;
}

inline void validate(const AppConfig& c) {
  try {
    c.sim.validate();
    c.quad.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (c.M && !(*c.M > 0.0)) throw ConfigError("config: constants.M must be positive");
  if (!(c.dist_R > 0.0) || 2.0 * c.dist_R > c.sim.grid.L) throw ConfigError("config: output.dist_R must satisfy 0 < 2R <= L");
  for (const Window& w : c.windows)
    if (w.a < 0.0 || w.b > c.sim.grid.L) throw ConfigError("config: output.windows must lie inside [0, L]");
  for (double R : c.dissipation_R)
    if (!(R > 0.0) || 2.0 * R > c.sim.grid.L) throw ConfigError("config: verify.dissipation_R must satisfy 0 < 2R <= L");
  if (!(c.epsilon > 0.0)) throw ConfigError("config: verify.epsilon must be positive");
}

inline AppConfig parse_config(std::istream& in, const std::string& source = "<config>") {
  AppConfig c;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(source + ":" + std::to_string(lineno) + ": expected key = value");
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string value = detail::trim(line.substr(eq + 1));
    if (c.raw.count(key)) throw ConfigError(source + ":" + std::to_string(lineno) + ": duplicate key '" + key + "'");
    try {
      apply_key(c, key, value);
    } catch (const ConfigError& e) {
      throw ConfigError(source + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  validate(c);
  return c;
}

inline AppConfig parse_config_string(const std::string& text) {
  std::istringstream is(text);
  return parse_config(is);
}

inline AppConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  return parse_config(in, path);
}

// Canonical text form, one key per line in sorted order.
inline std::string echo_config(const AppConfig& c) {
  std::string out;
  for (const auto& [k, v] : c.raw) out += k + " = " + v + "\n";
  return out;
}

}  // namespace cylflow
