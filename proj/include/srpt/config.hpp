#pragma once

// Run configuration for the command-line driver. The file format is one
// `key = value [unit]` per line; '#' starts a comment. Dimensioned keys must
// carry a unit, lists are comma separated.

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "srpt/circuit.hpp"
#include "srpt/units.hpp"

namespace srpt::config {

enum class Dimension { none, inductance, capacitance, frequency };

struct Range {
  double min = 0.0;
  double max = 0.0;
  int points = 1;

  std::vector<double> values() const {
    std::vector<double> v(points);
    for (int i = 0; i < points; ++i)
      v[i] = points == 1 ? min : min + (max - min) * static_cast<double>(i) / static_cast<double>(points - 1);
    return v;
  }

  void validate(const std::string& name) const {
    if (points < 1) throw ConfigError(name + ": a range needs at least one point");
    if (!(max >= min)) throw ConfigError(name + ": range maximum is below its minimum");
    if (points > 1 && max == min) throw ConfigError(name + ": several points need a non-empty range");
  }
};

struct RunConfig {
  // Circuit (SI units). L_g = 0.6 L_J by default.
  double L_J = 0.75 * units::nH;
  double L_g = 0.45 * units::nH;
  double C_J = 24.0 * units::fF;
  double C_R0 = 2.0 * units::fF;
  double L_R0 = 0.45 * units::nH;  // single-point value for commands without a scan

  // Scan axes; unset means "command default".
  std::optional<Range> lr0;         // henry
  std::optional<Range> temperature; // kB T / h in hertz
  std::vector<int> N_list{1, 2, 3};

  // classical
  std::vector<double> lr0_ratios{0.2, 0.4, 0.6, 0.8, 1.0};  // L_R0 / L_J
  Range phase{-std::numbers::pi, std::numbers::pi, 201};  // 2 pi phi / Phi0

  // module options
  int M = 60;
  int per_mode_cutoff = 24;
  int total_cutoff = 48;
  bool quartic = true;
  bool coupling = true;
  int n_even = 2;
  std::size_t max_dimension = 5'000'000;
  double critical_tol = 1e-3 * units::nH;

  // output
  std::string out;
  std::string format = "csv";
  std::uint64_t seed = 0x5eed5eedULL;
  unsigned threads = 1;

  CircuitParams circuit() const { return {L_J, L_g, C_J, C_R0, L_R0, 1}; }

  void validate() const {
    circuit().validate();
    if (lr0) {
      lr0->validate("L_R0 range");
      if (!(lr0->min > 0.0)) throw ConfigError("L_R0 range must be positive");
    }
    if (temperature) {
      temperature->validate("temperature range");
      if (temperature->min < 0.0) throw ConfigError("temperatures must be non-negative");
    }
    phase.validate("phase range");
    if (N_list.empty()) throw ConfigError("N list must not be empty");
    if (!std::is_sorted(N_list.begin(), N_list.end())) throw ConfigError("N list must be ascending");
    for (int n : N_list)
      if (n < 1) throw ConfigError("N values must be positive");
    if (lr0_ratios.empty()) throw ConfigError("L_R0/L_J ratio list must not be empty");
    for (double r : lr0_ratios)
      if (!(r > 0.0)) throw ConfigError("L_R0/L_J ratios must be positive");
    if (M < 1) throw ConfigError("M must be at least 1");
    if (per_mode_cutoff < 0 || total_cutoff < per_mode_cutoff)
      throw ConfigError("cutoffs must satisfy 0 <= per_mode <= total");
    if (n_even < 2) throw ConfigError("at least two even eigenvalues are needed");
    if (format != "csv" && format != "json") throw ConfigError("format must be csv or json");
    if (!(critical_tol > 0.0)) throw ConfigError("critical_tol must be positive");
  }
};

namespace detail {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) out.push_back(trim(item));
  return out;
}

inline double parse_number(const std::string& key, const std::string& text) {
  double v = 0.0;
  const char* first = text.data();
  const char* last = first + text.size();
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || text.empty())
    throw ConfigError(key + ": '" + text + "' is not a number");
  return v;
}

inline long parse_integer(const std::string& key, const std::string& text) {
  long v = 0;
  const char* first = text.data();
  const char* last = first + text.size();
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || text.empty())
    throw ConfigError(key + ": '" + text + "' is not an integer");
  return v;
}

inline double unit_factor(const std::string& key, const std::string& unit, Dimension dim) {
  static const std::map<std::string, std::pair<Dimension, double>> table = {
      {"H", {Dimension::inductance, 1.0}},    {"mH", {Dimension::inductance, 1e-3}},
      {"uH", {Dimension::inductance, 1e-6}},  {"nH", {Dimension::inductance, 1e-9}},
      {"pH", {Dimension::inductance, 1e-12}}, {"F", {Dimension::capacitance, 1.0}},
      {"uF", {Dimension::capacitance, 1e-6}}, {"nF", {Dimension::capacitance, 1e-9}},
      {"pF", {Dimension::capacitance, 1e-12}}, {"fF", {Dimension::capacitance, 1e-15}},
      {"Hz", {Dimension::frequency, 1.0}},    {"kHz", {Dimension::frequency, 1e3}},
      {"MHz", {Dimension::frequency, 1e6}},   {"GHz", {Dimension::frequency, 1e9}},
  };
  if (dim == Dimension::none) {
    if (!unit.empty()) throw ConfigError(key + ": dimensionless value must not carry a unit");
    return 1.0;
  }
  if (unit.empty()) throw ConfigError(key + ": a unit is required");
  const auto it = table.find(unit);
  if (it == table.end()) throw ConfigError(key + ": unknown unit '" + unit + "'");
  if (it->second.first != dim) throw ConfigError(key + ": unit '" + unit + "' has the wrong dimension");
  return it->second.second;
}

/// "0.75 nH", "0.75nH" or "0.75" (dimensionless).
inline double parse_quantity(const std::string& key, const std::string& text, Dimension dim) {
  const std::string t = trim(text);
  std::size_t split_at = t.size();
  while (split_at > 0 && std::isalpha(static_cast<unsigned char>(t[split_at - 1]))) --split_at;
  const std::string number = trim(t.substr(0, split_at));
  const std::string unit = trim(t.substr(split_at));
  return parse_number(key, number) * unit_factor(key, unit, dim);
}

/// "min:max:points unit", e.g. "0.1:1.0:19 nH" or "0:200:20 GHz".
inline Range parse_range(const std::string& key, const std::string& text, Dimension dim) {
  std::string t = trim(text);
  std::string unit;
  std::size_t end = t.size();
  while (end > 0 && std::isalpha(static_cast<unsigned char>(t[end - 1]))) --end;
  unit = trim(t.substr(end));
  t = trim(t.substr(0, end));
  const auto parts = split(t, ':');
  if (parts.size() != 3) throw ConfigError(key + ": expected min:max:points");
  Range r;
  const double f = unit_factor(key, unit, dim);
  r.min = parse_number(key, parts[0]) * f;
  r.max = parse_number(key, parts[1]) * f;
  r.points = static_cast<int>(parse_integer(key, parts[2]));
  r.validate(key);
  return r;
}

inline bool parse_bool(const std::string& key, const std::string& text) {
  std::string t = trim(text);
  std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return std::tolower(c); });
  if (t == "true" || t == "yes" || t == "1" || t == "on") return true;
  if (t == "false" || t == "no" || t == "0" || t == "off") return false;
  throw ConfigError(key + ": '" + text + "' is not a boolean");
}

}  // namespace detail

/// Applies one `key = value` assignment.
inline void apply(RunConfig& c, const std::string& key_in, const std::string& value) {
  using detail::parse_quantity;
  const std::string key = detail::trim(key_in);
  auto integer = [&](long lo) {
    const long v = detail::parse_integer(key, detail::trim(value));
    if (v < lo) throw ConfigError(key + " must be at least " + std::to_string(lo));
    return v;
  };
  if (key == "L_J") c.L_J = parse_quantity(key, value, Dimension::inductance);
  else if (key == "L_g") c.L_g = parse_quantity(key, value, Dimension::inductance);
  else if (key == "C_J") c.C_J = parse_quantity(key, value, Dimension::capacitance);
  else if (key == "C_R0") c.C_R0 = parse_quantity(key, value, Dimension::capacitance);
  else if (key == "L_R0") c.L_R0 = parse_quantity(key, value, Dimension::inductance);
  else if (key == "E_J") c.L_J = units::josephson_inductance(units::energy_from_GHz(
                             parse_quantity(key, value, Dimension::frequency) / 1e9));
  else if (key == "L_R0_range") c.lr0 = detail::parse_range(key, value, Dimension::inductance);
  else if (key == "kT_range") c.temperature = detail::parse_range(key, value, Dimension::frequency);
  else if (key == "phase_range") c.phase = detail::parse_range(key, value, Dimension::none);
  else if (key == "N") {
    c.N_list.clear();
    for (const auto& item : detail::split(value, ','))
      c.N_list.push_back(static_cast<int>(detail::parse_integer(key, item)));
  } else if (key == "L_R0_ratios") {
    c.lr0_ratios.clear();
    for (const auto& item : detail::split(value, ',')) c.lr0_ratios.push_back(detail::parse_number(key, item));
  } else if (key == "M") c.M = static_cast<int>(integer(1));
  else if (key == "per_mode_cutoff") c.per_mode_cutoff = static_cast<int>(integer(0));
  else if (key == "total_cutoff") c.total_cutoff = static_cast<int>(integer(0));
  else if (key == "quartic") c.quartic = detail::parse_bool(key, value);
  else if (key == "coupling") c.coupling = detail::parse_bool(key, value);
  else if (key == "n_even") c.n_even = static_cast<int>(integer(2));
  else if (key == "max_dimension") c.max_dimension = static_cast<std::size_t>(integer(1));
  else if (key == "critical_tol") c.critical_tol = parse_quantity(key, value, Dimension::inductance);
  else if (key == "seed") c.seed = static_cast<std::uint64_t>(integer(0));
  else if (key == "threads") c.threads = static_cast<unsigned>(integer(0));
  else if (key == "format") c.format = detail::trim(value);
  else if (key == "out") c.out = detail::trim(value);
  else throw ConfigError("unknown configuration key '" + key + "'");
}

/// Applies "key = value" (or "key=value").
inline void apply_assignment(RunConfig& c, const std::string& line) {
  const auto eq = line.find('=');
  if (eq == std::string::npos) throw ConfigError("expected 'key = value', got '" + line + "'");
  apply(c, line.substr(0, eq), line.substr(eq + 1));
}

inline void parse_text(RunConfig& c, const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    if (detail::trim(line).empty()) continue;
    try {
      apply_assignment(c, line);
    } catch (const ConfigError& e) {
      throw ConfigError("line " + std::to_string(number) + ": " + e.what());
    }
  }
}

inline void parse_file(RunConfig& c, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    parse_text(c, buf.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

}  // namespace srpt::config
