#pragma once

// Run configuration: a flat `key = value` text format with dotted section
// prefixes (packet.l0 = 50). '#' starts a comment. Command-line overrides go
// through the same setters, so both paths share one set of diagnostics.
//
// All values are in the physical units fixed by hbar and mass (with the
// defaults hbar = m = 1 and v0 = 0.5, kappa0 = 1).

#include <charconv>
#include <cmath>
#include <functional>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "stepscatter/packet.hpp"

namespace stepscatter::cli {

class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, int line, const std::string& message)
      : std::runtime_error(describe(field, line, message)), field_(std::move(field)), line_(line) {}

  const std::string& field() const { return field_; }
  int line() const { return line_; }  // 0 when the value did not come from a file

 private:
  static std::string describe(const std::string& field, int line, const std::string& message) {
    std::string out = "config error";
    if (line > 0) out += " at line " + std::to_string(line);
    if (!field.empty()) out += " (" + field + ")";
    return out + ": " + message;
  }

  std::string field_;
  int line_;
};

enum class KSpacing { Linear, Log };
enum class OutputFormat { Csv, Json };

struct KGridSpec {
  std::optional<double> single;  // `k = ...` replaces the grid
  double min = 0.05;
  double max = 5.0;
  int count = 200;
  KSpacing spacing = KSpacing::Log;
};

struct RunConfig {
  double v0 = 0.5;
  double a = 500.0;
  double hbar = 1.0;
  double mass = 1.0;
  double interval_l = 500.0;
  KGridSpec k;
  double l0 = 50.0;
  double k_bar = 1.5;
  double window_sigmas = 8.0;
  int nodes = 513;
  double x_min = -600.0;
  double x_max = 1400.0;
  int n_points = 16001;
  double t_min = 0.0;
  double t_max = 800.0;
  int t_count = 81;
  int figure_points = 401;
  unsigned threads = 0;
  std::string output_path;  // empty: stdout
  OutputFormat format = OutputFormat::Csv;

  PhysicalConfig units() const { return {hbar, mass}; }
  StepPotential step() const { return StepPotential(v0, a, units()); }
  SpectralProfile profile() const { return SpectralProfile::gaussian(l0, k_bar, window_sigmas, nodes); }
  SpatialGrid grid() const { return SpatialGrid::make(x_min, x_max, static_cast<std::size_t>(n_points)); }

  std::vector<double> k_values() const {
    if (k.single) return {*k.single};
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(std::max(k.count, 0)));
    for (int i = 0; i < k.count; ++i) {
      const double f = k.count == 1 ? 0.0 : static_cast<double>(i) / (k.count - 1);
      out.push_back(k.spacing == KSpacing::Log ? std::exp(std::log(k.min) + f * (std::log(k.max) - std::log(k.min)))
                                               : k.min + f * (k.max - k.min));
    }
    return out;
  }

  std::vector<double> times() const {
    std::vector<double> out;
    for (int i = 0; i < t_count; ++i) {
      out.push_back(t_count == 1 ? t_min : t_min + (t_max - t_min) * i / (t_count - 1));
    }
    return out;
  }
};

namespace detail {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

inline double parse_real(const std::string& key, const std::string& text, int line) {
  double v = 0.0;
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end || !std::isfinite(v)) throw ConfigError(key, line, "expected a real number, got '" + text + "'");
  return v;
}

inline int parse_int(const std::string& key, const std::string& text, int line) {
  int v = 0;
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end) throw ConfigError(key, line, "expected an integer, got '" + text + "'");
  return v;
}

using Setter = std::function<void(RunConfig&, const std::string& key, const std::string& value, int line)>;

inline Setter real_field(double RunConfig::*member) {
  return [member](RunConfig& c, const std::string& k, const std::string& v, int line) { c.*member = parse_real(k, v, line); };
}

inline Setter int_field(int RunConfig::*member) {
  return [member](RunConfig& c, const std::string& k, const std::string& v, int line) { c.*member = parse_int(k, v, line); };
}

inline const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"v0", real_field(&RunConfig::v0)},
      {"a", real_field(&RunConfig::a)},
      {"hbar", real_field(&RunConfig::hbar)},
      {"mass", real_field(&RunConfig::mass)},
      {"l_interval", real_field(&RunConfig::interval_l)},
      {"k", [](RunConfig& c, const std::string& k, const std::string& v, int line) { c.k.single = parse_real(k, v, line); }},
      {"k.min", [](RunConfig& c, const std::string& k, const std::string& v, int line) { c.k.min = parse_real(k, v, line); }},
      {"k.max", [](RunConfig& c, const std::string& k, const std::string& v, int line) { c.k.max = parse_real(k, v, line); }},
      {"k.count", [](RunConfig& c, const std::string& k, const std::string& v, int line) { c.k.count = parse_int(k, v, line); }},
      {"k.spacing",
       [](RunConfig& c, const std::string& k, const std::string& v, int line) {
         if (v == "log") {
           c.k.spacing = KSpacing::Log;
         } else if (v == "linear") {
           c.k.spacing = KSpacing::Linear;
         } else {
           throw ConfigError(k, line, "expected 'linear' or 'log', got '" + v + "'");
         }
       }},
      {"packet.l0", real_field(&RunConfig::l0)},
      {"packet.k_bar", real_field(&RunConfig::k_bar)},
      {"packet.window_sigmas", real_field(&RunConfig::window_sigmas)},
      {"packet.nodes", int_field(&RunConfig::nodes)},
      {"grid.x_min", real_field(&RunConfig::x_min)},
      {"grid.x_max", real_field(&RunConfig::x_max)},
      {"grid.n_points", int_field(&RunConfig::n_points)},
      {"times.t_min", real_field(&RunConfig::t_min)},
      {"times.t_max", real_field(&RunConfig::t_max)},
      {"times.count", int_field(&RunConfig::t_count)},
      {"figure.points", int_field(&RunConfig::figure_points)},
      {"threads",
       [](RunConfig& c, const std::string& k, const std::string& v, int line) {
         const int n = parse_int(k, v, line);
         if (n < 0) throw ConfigError(k, line, "thread count must be >= 0");
         c.threads = static_cast<unsigned>(n);
       }},
      {"output.path", [](RunConfig& c, const std::string&, const std::string& v, int) { c.output_path = v; }},
      {"output.format",
       [](RunConfig& c, const std::string& k, const std::string& v, int line) {
         if (v == "csv") {
           c.format = OutputFormat::Csv;
         } else if (v == "json") {
           c.format = OutputFormat::Json;
         } else {
           throw ConfigError(k, line, "expected 'csv' or 'json', got '" + v + "'");
         }
       }},
  };
  return table;
}

}  // namespace detail

/// Sets one field by key; `line` is only used in diagnostics.
inline void set_field(RunConfig& cfg, const std::string& key, const std::string& value, int line = 0) {
  const auto& table = detail::setters();
  const auto it = table.find(key);
  if (it == table.end()) throw ConfigError(key, line, "unknown key");
  it->second(cfg, key, detail::trim(value), line);
}

inline std::vector<std::string> known_keys() {
  std::vector<std::string> keys;
  for (const auto& [k, _] : detail::setters()) keys.push_back(k);
  return keys;
}

/// Parses a config file body on top of `base`.
inline RunConfig parse_config(std::istream& in, RunConfig base = {}) {
  std::string raw;
  std::set<std::string> seen;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string text = detail::trim(std::string_view(raw).substr(0, hash));
    if (text.empty()) continue;
    const auto eq = text.find('=');
    if (eq == std::string::npos) throw ConfigError("", line, "expected 'key = value'");
    const std::string key = detail::trim(std::string_view(text).substr(0, eq));
    const std::string value = detail::trim(std::string_view(text).substr(eq + 1));
    if (key.empty()) throw ConfigError("", line, "missing key before '='");
    if (value.empty()) throw ConfigError(key, line, "missing value");
    if (!seen.insert(key).second) throw ConfigError(key, line, "key given twice");
    set_field(base, key, value, line);
  }
  return base;
}

inline RunConfig parse_config_text(const std::string& text, RunConfig base = {}) {
  std::istringstream in(text);
  return parse_config(in, base);
}

/// Rejects configurations that would violate a precondition downstream.
/// Checks that need the packet (spectral guard) are left to the commands.
inline void validate(const RunConfig& c) {
  auto require = [](bool ok, const char* field, const std::string& msg) {
    if (!ok) throw ConfigError(field, 0, msg);
  };
  require(c.hbar > 0.0, "hbar", "must be positive");
  require(c.mass > 0.0, "mass", "must be positive");
  require(c.v0 != 0.0, "v0", "step height must be nonzero");
  require(c.a > 0.0, "a", "step position must be positive");
  require(c.interval_l > 0.0, "l_interval", "must be positive");
  if (!c.k.single) {
    require(c.k.count > 0, "k.count", "k grid is empty");
    require(c.k.min > 0.0, "k.min", "must be positive");
    require(c.k.max >= c.k.min, "k.max", "must be >= k.min");
    require(c.k.count == 1 || c.k.max > c.k.min, "k.max", "must exceed k.min when k.count > 1");
  }
  require(c.l0 > 0.0, "packet.l0", "must be positive");
  require(c.k_bar > 0.0, "packet.k_bar", "must be positive");
  require(c.window_sigmas > 0.0, "packet.window_sigmas", "must be positive");
  require(c.nodes >= 2, "packet.nodes", "need at least 2 nodes");
  require(c.x_max > c.x_min, "grid.x_max", "must exceed grid.x_min");
  require(c.n_points >= 16, "grid.n_points", "need at least 16 points");
  require(c.t_count >= 1, "times.count", "need at least one time");
  require(c.t_max >= c.t_min, "times.t_max", "must be >= times.t_min");
  require(c.figure_points >= 2, "figure.points", "need at least 2 points");

  const StepPotential step(c.v0, c.a, c.units());
  for (double k : c.k_values()) {
    const char* field = c.k.single ? "k" : "k.min";
    require(std::isfinite(k) && k > 0.0, field, "wavenumbers must be positive");
    require(!is_degenerate(step, k), field, "k grid hits k = kappa0, where the step quantities diverge");
  }
}

}  // namespace stepscatter::cli
