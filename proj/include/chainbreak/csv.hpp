#pragma once

// Minimal CSV tables: comma separated, one header row, no quoting (every
// field the library emits is numeric or a bare identifier).

#include <algorithm>
#include <charconv>
#include <cstddef>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

namespace chainbreak {

/// Shortest representation that reads back to the same double.
inline std::string format_double(double x) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

inline double parse_double(std::string_view s) {
  std::string tmp(s);
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(tmp, &used);
  } catch (const std::exception&) {
    throw std::invalid_argument("not a number: '" + tmp + "'");
  }
  if (used != tmp.size()) throw std::invalid_argument("trailing characters in number: '" + tmp + "'");
  return v;
}

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(std::string_view name) const {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw std::invalid_argument("CSV has no column '" + std::string(name) + "'");
    return static_cast<std::size_t>(it - header.begin());
  }

  bool has_column(std::string_view name) const {
    return std::find(header.begin(), header.end(), name) != header.end();
  }

  std::vector<double> numeric_column(std::string_view name) const {
    const auto c = column(name);
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& r : rows) out.push_back(parse_double(r.at(c)));
    return out;
  }

  void add_row(std::vector<std::string> row) {
    if (row.size() != header.size())
      throw std::invalid_argument("CSV row has " + std::to_string(row.size()) + " fields, header has " +
                                  std::to_string(header.size()));
    rows.push_back(std::move(row));
  }

  template <class... Ts>
  void add(const Ts&... values) {
    add_row({cell(values)...});
  }

 private:
  static std::string cell(const std::string& s) { return s; }
  static std::string cell(const char* s) { return s; }
  static std::string cell(double x) { return format_double(x); }
  template <class T>
    requires std::is_integral_v<T>
  static std::string cell(T x) {
    return std::to_string(x);
  }
};

inline std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    auto field = line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start);
    while (!field.empty() && (field.back() == '\r' || field.back() == ' ')) field.remove_suffix(1);
    while (!field.empty() && field.front() == ' ') field.remove_prefix(1);
    fields.emplace_back(field);
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return fields;
}

inline void write_csv(std::ostream& os, const CsvTable& t) {
  auto line = [&os](const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) os << (i ? "," : "") << fields[i];
    os << '\n';
  };
  line(t.header);
  for (const auto& r : t.rows) line(r);
}

inline std::string to_csv_string(const CsvTable& t) {
  std::ostringstream os;
  write_csv(os, t);
  return os.str();
}

/// Blank lines and lines starting with '#' are skipped.
inline CsvTable read_csv(std::istream& is) {
  CsvTable t;
  std::string line;
  bool have_header = false;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty() || line == "\r" || line.front() == '#') continue;
    auto fields = split_csv_line(line);
    if (!have_header) {
      t.header = std::move(fields);
      have_header = true;
      continue;
    }
    if (fields.size() != t.header.size())
      throw std::invalid_argument("CSV line " + std::to_string(lineno) + ": expected " +
                                  std::to_string(t.header.size()) + " fields, got " + std::to_string(fields.size()));
    t.rows.push_back(std::move(fields));
  }
  if (!have_header) throw std::invalid_argument("CSV input has no header row");
  return t;
}

inline CsvTable read_csv_string(const std::string& text) {
  std::istringstream is(text);
  return read_csv(is);
}

}  // namespace chainbreak
