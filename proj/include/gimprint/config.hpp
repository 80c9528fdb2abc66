// Scenario configuration: a flat, ordered key = value store.
//
// Every scenario has a fixed key table with defaults. Values are kept as the
// text they were given in, so emit() followed by parse() reproduces a
// configuration exactly. Keys accept dashes or underscores.
#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <regex>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "gimprint/core.hpp"

namespace gimprint::config {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

inline std::string normalize_key(std::string key) {
  key = trim(key);
  while (key.starts_with('-')) key.erase(0, 1);
  std::replace(key.begin(), key.end(), '-', '_');
  return key;
}

/// A decimal number, or a multiple of pi written as "pi", "-pi/2", "3pi/2",
/// "0.25*pi" and similar.
inline double parse_number(std::string_view text) {
  const std::string s = trim(text);
  double v = 0.0;
  const char* end = s.data() + s.size();
  if (auto res = std::from_chars(s.data(), end, v); res.ec == std::errc{} && res.ptr == end && !s.empty())
    return v;
  static const std::regex pi_form(R"(^([+-]?)([0-9]*\.?[0-9]*(?:[eE][+-]?[0-9]+)?)\*?pi(?:/([0-9]*\.?[0-9]+))?$)");
  std::smatch m;
  if (std::regex_match(s, m, pi_form)) {
    double coef = 1.0;
    if (m[2].length() > 0) coef = parse_number(m[2].str());
    double den = 1.0;
    if (m[3].matched) den = parse_number(m[3].str());
    if (den == 0.0) throw ValidationError("division by zero in '" + s + "'");
    const double sign = m[1].str() == "-" ? -1.0 : 1.0;
    return sign * coef * std::numbers::pi / den;
  }
  throw ValidationError("not a number: '" + s + "'");
}

inline std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

struct KeySpec {
  std::string key;
  std::string value;  // default
  std::string doc;
};

inline const std::vector<std::string>& scenario_names() {
  static const std::vector<std::string> names = {"chirp", "abelian-rotation", "tripod-translation",
                                                 "tripod-rotation", "custom"};
  return names;
}

inline bool is_tripod(const std::string& scenario) {
  return scenario == "tripod-translation" || scenario == "tripod-rotation" || scenario == "custom";
}

/// Ordered key table with defaults for a scenario.
inline std::vector<KeySpec> key_table(const std::string& scenario) {
  if (std::find(scenario_names().begin(), scenario_names().end(), scenario) == scenario_names().end())
    throw ValidationError("unknown scenario '" + scenario + "'");
  std::vector<KeySpec> t = {
      {"scenario", scenario, "scenario name"},
      {"output_dir", "out/" + scenario, "directory receiving all artifacts"},
      {"seed", "0", "seed of the optional initial-noise perturbation"},
      {"noise", "0", "amplitude of complex Gaussian noise added to the initial state (0 = off)"},
  };
  auto add = [&t](std::vector<KeySpec> more) { t.insert(t.end(), more.begin(), more.end()); };

  if (scenario == "chirp") {
    add({{"nx", "256", "grid points along x (power of two)"},
         {"nz", "256", "grid points along z (power of two)"},
         {"lx", "128", "grid extent along x"},
         {"lz", "128", "grid extent along z"},
         {"sigma", "6", "Gaussian envelope width"},
         {"center", "0,0", "envelope centre x,z"},
         {"carrier", "0,0", "initial carrier wavevector x,z"},
         {"omega0", "1", "Rabi frequency"},
         {"delta1", "20", "initial detuning"},
         {"delta2", "-20", "final detuning"},
         {"k1", "1.2", "laser wavevector magnitude at delta1"},
         {"k2", "0.8", "laser wavevector magnitude at delta2"},
         {"k_hat", "1,0", "laser propagation direction x,z"},
         {"quadrature_panels", "10000", "Simpson panels for the phase integral"},
         {"t_end", "10", "free evolution time after the sweep"},
         {"snapshots", "0,10", "snapshot times"},
         {"metrics_dt", "1", "spacing of metrics rows"}});
  } else if (scenario == "abelian-rotation") {
    add({{"nx", "256", "grid points along x (power of two)"},
         {"nz", "256", "grid points along z (power of two)"},
         {"lx", "128", "grid extent along x"},
         {"lz", "128", "grid extent along z"},
         {"sigma", "6", "Gaussian envelope width"},
         {"center", "0,0", "envelope centre x,z"},
         {"carrier", "0,0", "initial carrier wavevector x,z"},
         {"omega0", "1", "Rabi frequency"},
         {"k_r_l", "1", "laser wavevector magnitude"},
         {"alpha", "pi/2", "beam rotation angle (clockwise)"},
         {"t_end", "10", "free evolution time after switch-off"},
         {"snapshots", "0,10", "snapshot times"},
         {"metrics_dt", "1", "spacing of metrics rows"}});
  } else {
    const bool translation = scenario == "tripod-translation";
    const bool rotation = scenario == "tripod-rotation";
    add({{"engine", "effective",
          "effective (analytic imprint maps) | full (four-level Hamiltonian imprints) | both"},
         {"nx", translation ? "512" : "256", "grid points along x (power of two)"},
         {"nz", "256", "grid points along z (power of two)"},
         {"lx", translation ? "256" : "64", "grid extent along x"},
         {"lz", translation ? "128" : "64", "grid extent along z"},
         {"sigma", "5", "Gaussian packet width"},
         {"center", translation ? "-64,0" : "0,0", "packet centre x,z"},
         {"branch", "-", "initial dark branch, + or -"},
         {"k", "1", "carrier wavevector magnitude"},
         {"phi_k", rotation ? "-pi/2" : "0", "carrier direction in the beam frame"},
         {"omega0", rotation ? "2.4e6" : "1200", "Rabi frequency (full engine only)"},
         {"k_r_l", "2.414213562373095", "laser wavevector magnitude; kappa = k_r_l (sqrt2 - 1)"},
         {"imprint_duration", rotation ? "6.3e-4" : "0.063", "sweep duration of each full-engine imprint"},
         {"imprint_dt", rotation ? "4e-8" : "7.875e-5", "split-step time step of full-engine imprints"},
         {"rotation_steps", "64000", "RK4 steps of the rotation imprint"}});
    if (translation)
      add({{"d_z", "pi/4", "beam displacement of the imprint at t = 0"},
           {"second_imprint", "none", "time of a second imprint moving the beams back (none or t=<time>)"}});
    if (rotation) add({{"alpha", "3pi/2", "beam rotation angle of the imprint at t = 0"}});
    if (scenario == "custom")
      add({{"imprints", "translate:pi/4@0",
            "semicolon list of translate:<d_z>@<t>, translate-back:<d_z>@<t> or rotate:<alpha>@<t>"}});
    add({{"t_end", translation ? "40" : "10", "final time of the dark evolution"},
         {"snapshots", translation ? "0,10,20,40" : "0,2,5,10", "snapshot times"},
         {"metrics_dt", "1", "spacing of metrics rows"},
         {"packet_threshold", "0.05", "packet detection level relative to the peak density"}});
  }
  return t;
}

class ScenarioConfig {
 public:
  ScenarioConfig() : ScenarioConfig(preset("tripod-translation")) {}

  static ScenarioConfig preset(const std::string& scenario) {
    ScenarioConfig c(0);
    for (const KeySpec& k : key_table(scenario)) {
      c.order_.push_back(k.key);
      c.values_[k.key] = k.value;
    }
    return c;
  }

  /// Reads "key = value" lines; '#' starts a comment. The scenario line may
  /// appear anywhere; every other key overrides that scenario's preset.
  static ScenarioConfig parse(const std::string& text) {
    std::vector<std::pair<std::string, std::string>> entries;
    std::string scenario;
    std::istringstream is(text);
    std::string line;
    for (std::size_t ln = 1; std::getline(is, line); ++ln) {
      if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
      if (trim(line).empty()) continue;
      const auto eq = line.find('=');
      if (eq == std::string::npos)
        throw ValidationError("config line " + std::to_string(ln) + ": expected key = value");
      const std::string key = normalize_key(line.substr(0, eq));
      const std::string value = trim(line.substr(eq + 1));
      if (key == "scenario")
        scenario = value;
      else
        entries.emplace_back(key, value);
    }
    if (scenario.empty()) throw ValidationError("config: missing 'scenario' key");
    ScenarioConfig c = preset(scenario);
    for (const auto& [k, v] : entries) c.set(k, v);
    return c;
  }

  std::string emit() const {
    std::ostringstream os;
    for (const std::string& k : order_) os << k << " = " << values_.at(k) << '\n';
    return os.str();
  }

  /// emit() with each key's documentation as a preceding comment.
  std::string emit_documented() const {
    std::ostringstream os;
    const auto table = key_table(scenario());
    for (const KeySpec& k : table) os << "# " << k.doc << '\n' << k.key << " = " << values_.at(k.key) << '\n';
    return os.str();
  }

  void set(const std::string& raw_key, const std::string& value) {
    const std::string key = normalize_key(raw_key);
    if (key == "scenario" && value != scenario())
      throw ValidationError("config: scenario cannot be changed by an override");
    auto it = values_.find(key);
    if (it == values_.end())
      throw ValidationError("config: unknown key '" + key + "' for scenario " + scenario());
    it->second = trim(value);
  }

  bool has(const std::string& key) const { return values_.contains(normalize_key(key)); }

  const std::string& text(const std::string& key) const {
    auto it = values_.find(normalize_key(key));
    if (it == values_.end()) throw ValidationError("config: missing key '" + key + "'");
    return it->second;
  }

  const std::string& scenario() const { return values_.at("scenario"); }

  double number(const std::string& key) const {
    try {
      return parse_number(text(key));
    } catch (const ValidationError& e) {
      throw ValidationError("config key '" + key + "': " + e.what());
    }
  }

  std::int64_t integer(const std::string& key) const {
    const double v = number(key);
    if (v != std::floor(v) || std::abs(v) > 9.0e15)
      throw ValidationError("config key '" + key + "' must be an integer");
    return static_cast<std::int64_t>(v);
  }

  std::size_t count(const std::string& key) const {
    const auto v = integer(key);
    if (v < 0) throw ValidationError("config key '" + key + "' must be non-negative");
    return static_cast<std::size_t>(v);
  }

  std::vector<double> list(const std::string& key) const {
    std::vector<double> out;
    const std::string& t = text(key);
    if (trim(t).empty()) return out;
    for (const std::string& item : split(t, ',')) {
      try {
        out.push_back(parse_number(item));
      } catch (const ValidationError& e) {
        throw ValidationError("config key '" + key + "': " + e.what());
      }
    }
    return out;
  }

  Vec2 vec2(const std::string& key) const {
    const auto v = list(key);
    if (v.size() != 2) throw ValidationError("config key '" + key + "' needs two values x,z");
    return {v[0], v[1]};
  }

  const std::vector<std::string>& keys() const { return order_; }

  bool operator==(const ScenarioConfig& o) const { return order_ == o.order_ && values_ == o.values_; }

 private:
  explicit ScenarioConfig(int) {}
  std::vector<std::string> order_;
  std::map<std::string, std::string> values_;
};

}  // namespace gimprint::config
