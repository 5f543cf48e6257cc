#pragma once

// Tabular output shared by the CLI subcommands: self-describing CSV (leading
// "# key=value" comment lines) or JSON.

#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "contest/distributions.hpp"

namespace contest::cli {

using Json = nlohmann::ordered_json;

inline constexpr int kFormatVersion = 1;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Json>> rows;
  // Extra "# key=value" lines after format/seed/config.
  std::vector<std::pair<std::string, std::string>> meta;

  void add(std::vector<Json> row) { rows.push_back(std::move(row)); }
};

inline std::string csv_cell(const Json& v) {
  if (v.is_string()) {
    const auto& s = v.get_ref<const std::string&>();
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string quoted = "\"";
    for (char c : s) {
      if (c == '"') quoted += '"';
      quoted += c;
    }
    return quoted + "\"";
  }
  if (v.is_number_float()) return detail::format_number(v.get<double>());
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_null()) return "";
  return v.dump();
}

inline void write_csv(std::ostream& os, const Table& t, std::uint64_t seed, const std::string& config) {
  os << "# format=" << kFormatVersion << '\n';
  os << "# seed=" << seed << '\n';
  os << "# config=" << config << '\n';
  for (const auto& [k, v] : t.meta) os << "# " << k << '=' << v << '\n';
  for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << t.columns[i];
  os << '\n';
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << csv_cell(row[i]);
    os << '\n';
  }
}

inline void write_json(std::ostream& os, const Table& t, std::uint64_t seed, const std::string& config) {
  Json doc;
  doc["format"] = kFormatVersion;
  doc["seed"] = seed;
  doc["config"] = config;
  Json meta = Json::object();
  for (const auto& [k, v] : t.meta) meta[k] = v;
  doc["meta"] = meta;
  doc["columns"] = t.columns;
  Json rows = Json::array();
  for (const auto& row : t.rows) {
    Json obj = Json::object();
    for (std::size_t i = 0; i < row.size() && i < t.columns.size(); ++i) obj[t.columns[i]] = row[i];
    rows.push_back(std::move(obj));
  }
  doc["rows"] = std::move(rows);
  os << doc.dump(2) << '\n';
}

}  // namespace contest::cli
