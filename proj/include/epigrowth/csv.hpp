#pragma once

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "epigrowth/error.hpp"

// Minimal comma-separated I/O shared by every file format in the project.
// No quoting: none of the formats carry commas inside fields.
namespace epigrowth::csv {

inline constexpr std::string_view na = "NA";

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline std::vector<std::string> split(std::string_view line, char sep = ',') {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (true) {
    auto comma = line.find(sep, pos);
    out.emplace_back(trim(line.substr(pos, comma == std::string_view::npos ? comma : comma - pos)));
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return out;
}

struct Row {
  std::size_t line = 0;
  std::vector<std::string> fields;
};

// Reads a header line plus data rows. Blank lines are skipped; a UTF-8 BOM is tolerated.
struct Table {
  std::vector<std::string> header;
  std::vector<Row> rows;

  std::optional<std::size_t> column(std::string_view name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return i;
    return std::nullopt;
  }
};

inline Table read_table(std::istream& in) {
  Table t;
  std::string line;
  std::size_t lineno = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view view = line;
    if (lineno == 1 && view.substr(0, 3) == "\xEF\xBB\xBF") view.remove_prefix(3);
    if (trim(view).empty()) continue;
    if (!have_header) {
      t.header = split(view);
      have_header = true;
      continue;
    }
    t.rows.push_back({lineno, split(view)});
  }
  if (!have_header) throw ParseError(lineno == 0 ? 1 : lineno, "missing header");
  return t;
}

// Exact-match header check; reports the expected layout.
inline void expect_header(const Table& t, const std::vector<std::string_view>& cols) {
  bool ok = t.header.size() == cols.size();
  for (std::size_t i = 0; ok && i < cols.size(); ++i) ok = t.header[i] == cols[i];
  if (!ok) {
    std::string want;
    for (auto c : cols) want += (want.empty() ? "" : ",") + std::string(c);
    throw ParseError(1, "expected header '" + want + "'");
  }
}

inline void expect_width(const Row& r, std::size_t n) {
  if (r.fields.size() != n)
    throw ParseError(r.line, "expected " + std::to_string(n) + " fields, got " +
                                 std::to_string(r.fields.size()));
}

inline double parse_double(const Row& r, std::size_t col, std::string_view what) {
  const std::string& s = r.fields.at(col);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v))
    throw ParseError(r.line, "column '" + std::string(what) + "': not a number '" + s + "'");
  return v;
}

inline std::optional<double> parse_optional(const Row& r, std::size_t col, std::string_view what) {
  if (r.fields.at(col) == na) return std::nullopt;
  return parse_double(r, col, what);
}

inline long parse_long(const Row& r, std::size_t col, std::string_view what) {
  const std::string& s = r.fields.at(col);
  long v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size())
    throw ParseError(r.line, "column '" + std::string(what) + "': not an integer '" + s + "'");
  return v;
}

// Shortest representation that parses back to the same double.
inline std::string format(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

inline std::string format(const std::optional<double>& v) { return v ? format(*v) : std::string(na); }

inline std::ifstream open_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::io, "cannot open '" + path + "' for reading");
  return in;
}

inline std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::io, "cannot open '" + path + "' for writing");
  return out;
}

}  // namespace epigrowth::csv
