#pragma once

#include <array>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "tbg/immersions.hpp"
#include "tbg/rng.hpp"
#include "tbg/tangentlift.hpp"

namespace tbg {

struct GridSpec {
  int points = 30;
  double fiber_bound = 2.0;  // cap on the g-norm of sampled fiber vectors
  std::uint64_t seed = 42;
};

/// One bundled verification setup: which immersion into which target, which
/// generator functions, and how to sample. Everything a report needs to be
/// reproduced is in here.
struct Scenario {
  std::string name;

  std::string target_preset = "round-sphere";  // round-sphere | euclidean | warped
  int target_dim = 2;
  double radius = 1.0;
  std::string warp = "parabolic";  // warped targets: parabolic | cosh

  std::string immersion_preset;  // equator | small-circle | linear-subspace |
                                 // saddle-graph | warped-axis
  double theta0 = std::numbers::pi / 3;  // small-circle latitude
  int source_dim = 1;                    // linear-subspace

  std::string generator_preset = "sasaki";  // sasaki | cheeger-gromoll | constant | polynomial
  std::array<std::vector<double>, 6> coeffs{};  // ascending powers of t
  double t_max = 16.0;

  GridSpec grid;
  double tol_scale = 1.0;
};

namespace detail {

struct ConfigValue {
  std::string text;
  int line = 0;
  mutable bool used = false;
};

struct ConfigTable {
  std::string path;
  std::map<std::string, std::map<std::string, ConfigValue>> sections;

  [[noreturn]] void fail(int line, const std::string& msg) const {
    throw ConfigError(path + ":" + std::to_string(line) + ": " + msg);
  }

  const ConfigValue* find(const std::string& section, const std::string& key) const {
    auto s = sections.find(section);
    if (s == sections.end()) return nullptr;
    auto k = s->second.find(key);
    if (k == s->second.end()) return nullptr;
    k->second.used = true;
    return &k->second;
  }

  std::string get_string(const std::string& section, const std::string& key,
                         const std::string& fallback) const {
    const ConfigValue* v = find(section, key);
    return v ? v->text : fallback;
  }

  double parse_double(const ConfigValue& v) const {
    double out = 0.0;
    const char* first = v.text.data();
    const char* last = first + v.text.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    if (ec != std::errc{} || ptr != last) fail(v.line, "expected a decimal number, got '" + v.text + "'");
    return out;
  }

  double get_double(const std::string& section, const std::string& key, double fallback) const {
    const ConfigValue* v = find(section, key);
    return v ? parse_double(*v) : fallback;
  }

  long long get_int(const std::string& section, const std::string& key, long long fallback) const {
    const ConfigValue* v = find(section, key);
    if (!v) return fallback;
    long long out = 0;
    const char* first = v->text.data();
    const char* last = first + v->text.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    if (ec != std::errc{} || ptr != last) fail(v->line, "expected an integer, got '" + v->text + "'");
    return out;
  }

  std::uint64_t get_u64(const std::string& section, const std::string& key,
                        std::uint64_t fallback) const {
    const ConfigValue* v = find(section, key);
    if (!v) return fallback;
    std::uint64_t out = 0;
    const char* first = v->text.data();
    const char* last = first + v->text.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    if (ec != std::errc{} || ptr != last)
      fail(v->line, "expected an unsigned integer, got '" + v->text + "'");
    return out;
  }

  std::vector<double> get_coeffs(const std::string& section, const std::string& key) const {
    const ConfigValue* v = find(section, key);
    std::vector<double> out;
    if (!v) return out;
    std::istringstream is(v->text);
    std::string tok;
    while (is >> tok) {
      double c = 0.0;
      const char* first = tok.data();
      const char* last = first + tok.size();
      auto [ptr, ec] = std::from_chars(first, last, c);
      if (ec != std::errc{} || ptr != last)
        fail(v->line, "coefficient list has a bad entry '" + tok + "'");
      out.push_back(c);
    }
    return out;
  }
};

inline std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline ConfigTable parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open configuration file");
  ConfigTable tab;
  tab.path = path;
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') tab.fail(lineno, "unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty()) tab.fail(lineno, "empty section name");
      tab.sections[section];
      continue;
    }
    size_t eq = line.find('=');
    if (eq == std::string::npos) tab.fail(lineno, "expected 'key = value'");
    if (section.empty()) tab.fail(lineno, "key outside of any [section]");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty()) tab.fail(lineno, "empty key");
    if (value.empty()) tab.fail(lineno, "empty value for key '" + key + "'");
    auto [it, fresh] = tab.sections[section].emplace(key, ConfigValue{value, lineno});
    if (!fresh) tab.fail(lineno, "duplicate key '" + key + "' in [" + section + "]");
  }
  return tab;
}

}  // namespace detail

inline Scenario load_scenario(const std::string& path) {
  detail::ConfigTable tab = detail::parse_config(path);
  Scenario sc;
  sc.name = tab.get_string("scenario", "name", "");
  if (sc.name.empty()) throw ConfigError(path + ": [scenario] name is required");

  sc.target_preset = tab.get_string("target", "preset", sc.target_preset);
  sc.target_dim = static_cast<int>(tab.get_int("target", "dim", sc.target_dim));
  sc.radius = tab.get_double("target", "radius", sc.radius);
  sc.warp = tab.get_string("target", "warp", sc.warp);

  sc.immersion_preset = tab.get_string("immersion", "preset", "");
  if (sc.immersion_preset.empty()) throw ConfigError(path + ": [immersion] preset is required");
  sc.theta0 = tab.get_double("immersion", "theta0", sc.theta0);
  sc.source_dim = static_cast<int>(tab.get_int("immersion", "source-dim", sc.source_dim));

  sc.generator_preset = tab.get_string("generators", "preset", sc.generator_preset);
  sc.t_max = tab.get_double("generators", "t-max", sc.t_max);
  const char* keys[6] = {"a1", "a2", "a3", "b1", "b2", "b3"};
  for (int j = 0; j < 6; ++j) sc.coeffs[static_cast<size_t>(j)] = tab.get_coeffs("generators", keys[j]);

  sc.grid.points = static_cast<int>(tab.get_int("grid", "points", sc.grid.points));
  sc.grid.fiber_bound = tab.get_double("grid", "fiber-bound", sc.grid.fiber_bound);
  sc.grid.seed = tab.get_u64("grid", "seed", sc.grid.seed);
  sc.tol_scale = tab.get_double("tolerances", "scale", sc.tol_scale);
  if (sc.grid.points < 1) throw ConfigError(path + ": [grid] points must be positive");
  if (sc.tol_scale <= 0.0) throw ConfigError(path + ": [tolerances] scale must be positive");

  for (const auto& [section, keysmap] : tab.sections)
    for (const auto& [key, value] : keysmap)
      if (!value.used)
        tab.fail(value.line, "unknown key '" + key + "' in [" + section + "]");
  return sc;
}

inline ImmersionData make_immersion(const Scenario& sc) {
  auto expect_target = [&](const std::string& preset) {
    if (sc.target_preset != preset)
      throw ConfigError(sc.name + ": immersion '" + sc.immersion_preset + "' needs target preset '" +
                        preset + "', got '" + sc.target_preset + "'");
  };
  if (sc.immersion_preset == "equator") {
    expect_target("round-sphere");
    return equator_immersion(sc.target_dim, sc.radius);
  }
  if (sc.immersion_preset == "small-circle") {
    expect_target("round-sphere");
    if (sc.target_dim != 2 || sc.radius != 1.0)
      throw ConfigError(sc.name + ": small-circle lives in the unit 2-sphere");
    return small_circle_immersion(sc.theta0);
  }
  if (sc.immersion_preset == "linear-subspace") {
    expect_target("euclidean");
    return linear_subspace_immersion(sc.source_dim, sc.target_dim);
  }
  if (sc.immersion_preset == "saddle-graph") {
    expect_target("euclidean");
    if (sc.target_dim != 3) throw ConfigError(sc.name + ": saddle-graph needs a 3-dim target");
    return saddle_graph_immersion();
  }
  if (sc.immersion_preset == "warped-axis") {
    expect_target("warped");
    if (sc.warp == "parabolic")
      return warped_axis_immersion([](const Jet& t) { return 1.0 + t * t; }, "parabolic-warp");
    if (sc.warp == "cosh")
      return warped_axis_immersion([](const Jet& t) { return cosh(t); }, "cosh-warp");
    throw ConfigError(sc.name + ": unknown warp preset '" + sc.warp + "'");
  }
  throw ConfigError(sc.name + ": unknown immersion preset '" + sc.immersion_preset + "'");
}

inline GNaturalGenerators make_generators(const Scenario& sc) {
  if (sc.generator_preset == "sasaki") return sasaki_generators(sc.t_max);
  if (sc.generator_preset == "cheeger-gromoll") return cheeger_gromoll_generators(sc.t_max);
  if (sc.generator_preset == "constant") {
    std::array<double, 6> c{};
    for (size_t j = 0; j < 6; ++j) {
      if (sc.coeffs[j].size() > 1)
        throw ConfigError(sc.name + ": constant generators take a single value per entry");
      c[j] = sc.coeffs[j].empty() ? 0.0 : sc.coeffs[j][0];
    }
    return constant_generators(c, sc.name + "-generators", sc.t_max);
  }
  if (sc.generator_preset == "polynomial")
    return polynomial_generators(sc.coeffs, sc.name + "-generators", sc.t_max);
  throw ConfigError(sc.name + ": unknown generator preset '" + sc.generator_preset + "'");
}

/// Generators with a1 and a2 constant admit the per-index normal relations.
inline bool constant_a1_a2(const Scenario& sc) {
  if (sc.generator_preset == "sasaki" || sc.generator_preset == "constant") return true;
  if (sc.generator_preset == "polynomial")
    return sc.coeffs[0].size() <= 1 && sc.coeffs[1].size() <= 1;
  return false;
}

/// Deterministic sample plan shared by the verification suites: base points
/// from the source chart box, fiber vectors capped at the configured g-norm.
inline std::vector<LiftedPoint> sample_plan(const ImmersionData& imm, const GridSpec& grid) {
  Rng rng(grid.seed);
  std::vector<LiftedPoint> pts;
  pts.reserve(static_cast<size_t>(grid.points));
  const int m = imm.source.dim;
  for (int i = 0; i < grid.points; ++i) {
    std::vector<double> y = sample_point(imm.source, rng);
    std::vector<double> v(static_cast<size_t>(m));
    for (double& c : v) c = rng.uniform(-grid.fiber_bound, grid.fiber_bound);
    Mat<double> gi = induced_metric(imm, y);
    double nv = 0.0;
    for (int a = 0; a < m; ++a)
      for (int b = 0; b < m; ++b)
        nv += gi(a, b) * v[static_cast<size_t>(a)] * v[static_cast<size_t>(b)];
    nv = std::sqrt(std::max(nv, 0.0));
    if (nv > grid.fiber_bound)
      for (double& c : v) c *= 0.95 * grid.fiber_bound / nv;
    pts.push_back(lifted_point(imm, y, v));
  }
  return pts;
}

}  // namespace tbg
