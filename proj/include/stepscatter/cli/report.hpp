#pragma once

// Tabular reports with unit-tagged columns and an optional key/value footer,
// rendered as CSV (17 significant digits) or JSON with the same field names.

#include <cstdio>
#include <cstdlib>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

namespace stepscatter::cli {

namespace unit {
inline constexpr const char* wavenumber = "kappa0";
inline constexpr const char* length = "1/kappa0";
inline constexpr const char* time = "m/(hbar*kappa0^2)";
inline constexpr const char* velocity = "hbar*kappa0/m";
inline constexpr const char* none = "1";
inline constexpr const char* text = "";  // non-numeric column
}  // namespace unit

/// Empty cells stand for quantities that do not exist in a row's regime.
using Cell = std::variant<std::monostate, double, std::string>;

struct Column {
  std::string name;
  std::string unit;

  std::string header() const { return unit.empty() ? name : name + "[" + unit + "]"; }
};

struct FooterEntry {
  std::string key;
  std::string unit;
  Cell value;
};

struct Table {
  std::string title;
  std::vector<Column> columns;
  std::vector<std::vector<Cell>> rows;
  std::vector<FooterEntry> footer;

  void add_footer(std::string key, std::string unit_tag, Cell value) {
    footer.push_back({std::move(key), std::move(unit_tag), std::move(value)});
  }
};

inline std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string format_cell(const Cell& c) {
  if (const double* d = std::get_if<double>(&c)) return format_number(*d);
  if (const std::string* s = std::get_if<std::string>(&c)) return *s;
  return {};
}

inline void write_csv(const Table& t, std::ostream& out) {
  for (std::size_t i = 0; i < t.columns.size(); ++i) out << (i ? "," : "") << t.columns[i].header();
  out << '\n';
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << format_cell(row[i]);
    out << '\n';
  }
  for (const FooterEntry& f : t.footer) {
    out << "# " << f.key;
    if (!f.unit.empty()) out << '[' << f.unit << ']';
    out << " = " << format_cell(f.value) << '\n';
  }
}

inline nlohmann::ordered_json cell_json(const Cell& c) {
  if (const double* d = std::get_if<double>(&c)) return *d;
  if (const std::string* s = std::get_if<std::string>(&c)) return *s;
  return nullptr;
}

inline nlohmann::ordered_json to_json(const Table& t) {
  nlohmann::ordered_json j;
  j["title"] = t.title;
  j["columns"] = nlohmann::ordered_json::array();
  for (const Column& c : t.columns) j["columns"].push_back({{"name", c.name}, {"unit", c.unit}});
  j["rows"] = nlohmann::ordered_json::array();
  for (const auto& row : t.rows) {
    nlohmann::ordered_json r = nlohmann::ordered_json::object();
    for (std::size_t i = 0; i < row.size(); ++i) r[t.columns[i].name] = cell_json(row[i]);
    j["rows"].push_back(std::move(r));
  }
  j["footer"] = nlohmann::ordered_json::array();
  for (const FooterEntry& f : t.footer) {
    j["footer"].push_back({{"key", f.key}, {"unit", f.unit}, {"value", cell_json(f.value)}});
  }
  return j;
}

inline void write_json(const Table& t, std::ostream& out) { out << to_json(t).dump(2) << '\n'; }

namespace detail {

inline std::vector<std::string> split_commas(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

inline Cell parse_cell(const std::string& s, bool numeric) {
  if (s.empty()) return {};
  if (!numeric) return s;
  // strtod rather than stod: subnormals set ERANGE but parse exactly.
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size()) throw std::invalid_argument("not a number: '" + s + "'");
  return v;
}

inline Column parse_header(const std::string& h) {
  const auto open = h.find('[');
  if (open == std::string::npos || h.back() != ']') return {h, ""};
  return {h.substr(0, open), h.substr(open + 1, h.size() - open - 2)};
}

}  // namespace detail

/// Reads back a table written by write_csv. Columns without a unit tag hold text.
inline Table read_csv(std::istream& in) {
  Table t;
  std::string line;
  if (!std::getline(in, line)) return t;
  for (const std::string& h : detail::split_commas(line)) t.columns.push_back(detail::parse_header(h));
  while (std::getline(in, line)) {
    if (line.rfind("# ", 0) == 0) {
      const auto eq = line.find(" = ");
      const Column key = detail::parse_header(line.substr(2, eq - 2));
      const std::string value = line.substr(eq + 3);
      t.add_footer(key.name, key.unit, detail::parse_cell(value, !key.unit.empty()));
      continue;
    }
    const std::vector<std::string> fields = detail::split_commas(line);
    std::vector<Cell> row;
    for (std::size_t i = 0; i < t.columns.size(); ++i) {
      row.push_back(detail::parse_cell(i < fields.size() ? fields[i] : std::string{}, !t.columns[i].unit.empty()));
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

inline Table from_json(const nlohmann::ordered_json& j) {
  auto cell = [](const nlohmann::ordered_json& v) -> Cell {
    if (v.is_null()) return {};
    if (v.is_string()) return v.get<std::string>();
    return v.get<double>();
  };
  Table t;
  t.title = j.at("title").get<std::string>();
  for (const auto& c : j.at("columns")) t.columns.push_back({c.at("name"), c.at("unit")});
  for (const auto& r : j.at("rows")) {
    std::vector<Cell> row;
    for (const Column& c : t.columns) row.push_back(cell(r.at(c.name)));
    t.rows.push_back(std::move(row));
  }
  for (const auto& f : j.at("footer")) t.add_footer(f.at("key"), f.at("unit"), cell(f.at("value")));
  return t;
}

}  // namespace stepscatter::cli
