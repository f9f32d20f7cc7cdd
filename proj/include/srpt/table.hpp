#pragma once

// Tabular output for the command-line driver. CSV rows are written and flushed
// as soon as they are final; the JSON form mirrors the same columns and is
// written once the table is complete.

#include <cmath>
#include <cstdio>
#include <map>
#include <mutex>
#include <optional>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"
#include "srpt/units.hpp"

namespace srpt::table {

using Cell = std::variant<double, long long, std::string>;

/// Shortest round-trip-safe text is not needed for plotting; 12 significant
/// digits keeps output deterministic across platforms with IEEE doubles.
inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

inline std::string to_text(const Cell& c) {
  if (const auto* d = std::get_if<double>(&c)) return format_double(*d);
  if (const auto* i = std::get_if<long long>(&c)) return std::to_string(*i);
  const auto& s = std::get<std::string>(c);
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string quoted = "\"";
  for (char ch : s) {
    if (ch == '"') quoted += '"';
    quoted += ch;
  }
  return quoted + '"';
}

inline nlohmann::json to_json(const Cell& c) {
  if (const auto* d = std::get_if<double>(&c)) {
    if (std::isfinite(*d)) return *d;
    return format_double(*d);  // JSON has no inf/nan literals
  }
  if (const auto* i = std::get_if<long long>(&c)) return *i;
  return std::get<std::string>(c);
}

class Writer {
 public:
  Writer(std::ostream& out, std::string format, std::string command, std::vector<std::string> columns)
      : out_(out), json_(format == "json"), columns_(std::move(columns)) {
    if (format != "csv" && format != "json") throw ConfigError("format must be csv or json");
    doc_["command"] = std::move(command);
    doc_["columns"] = columns_;
    doc_["rows"] = nlohmann::json::array();
    if (!json_) {
      for (std::size_t i = 0; i < columns_.size(); ++i) out_ << (i ? "," : "") << columns_[i];
      out_ << '\n' << std::flush;
    }
  }

  Writer(const Writer&) = delete;
  Writer& operator=(const Writer&) = delete;

  const std::vector<std::string>& columns() const { return columns_; }

  void row(const std::vector<Cell>& cells) {
    if (cells.size() != columns_.size()) throw std::logic_error("row width does not match the header");
    if (json_) {
      nlohmann::json r = nlohmann::json::object();
      for (std::size_t i = 0; i < cells.size(); ++i) r[columns_[i]] = to_json(cells[i]);
      doc_["rows"].push_back(std::move(r));
      return;
    }
    for (std::size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << to_text(cells[i]);
    out_ << '\n' << std::flush;
  }

  /// Extra JSON member (ignored for CSV, which carries only the table).
  void extra(const std::string& key, nlohmann::json value) {
    if (key == "command" || key == "columns" || key == "rows") throw std::logic_error("reserved JSON key " + key);
    doc_[key] = std::move(value);
  }

  void finish() {
    if (finished_) return;
    finished_ = true;
    if (json_) out_ << doc_.dump(2) << '\n' << std::flush;
  }

 private:
  std::ostream& out_;
  bool json_;
  std::vector<std::string> columns_;
  nlohmann::json doc_;
  bool finished_ = false;
};

/// Accepts rows from parallel workers in any order and forwards them in index
/// order as soon as the prefix is complete.
class OrderedRows {
 public:
  OrderedRows(Writer& w, std::size_t count) : writer_(w), pending_(count) {}

  void put(std::size_t index, std::vector<std::vector<Cell>> rows) {
    std::lock_guard lock(mutex_);
    pending_.at(index) = std::move(rows);
    while (next_ < pending_.size() && pending_[next_]) {
      for (const auto& r : *pending_[next_]) writer_.row(r);
      pending_[next_].reset();
      ++next_;
    }
  }

 private:
  Writer& writer_;
  std::vector<std::optional<std::vector<std::vector<Cell>>>> pending_;
  std::size_t next_ = 0;
  std::mutex mutex_;
};

}  // namespace srpt::table
