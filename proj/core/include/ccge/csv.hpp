#pragma once

// Minimal CSV helpers shared by the table reader/writer and the command-line tool.

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

#include "ccge/errors.hpp"

namespace ccge::csv {

struct Row {
  std::size_t line = 0;
  std::vector<std::string> cells;
};

inline std::vector<std::string> split(std::string_view line) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    auto cell = line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
    while (!cell.empty() && (cell.front() == ' ' || cell.front() == '\t')) cell.remove_prefix(1);
    while (!cell.empty() && (cell.back() == ' ' || cell.back() == '\t' || cell.back() == '\r')) cell.remove_suffix(1);
    cells.emplace_back(cell);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return cells;
}

/// Reads a header + data rows file; checks the header matches `columns` exactly.
inline std::vector<Row> read(const std::filesystem::path& path, const std::vector<std::string>& columns) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::string line;
  std::size_t line_no = 0;
  std::vector<Row> rows;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r" || line[0] == '#') continue;
    auto cells = split(line);
    if (!header_seen) {
      if (cells != columns) {
        std::string expected;
        for (const auto& c : columns) expected += (expected.empty() ? "" : ",") + c;
        throw ValidationError(path.string() + ": malformed header, expected '" + expected + "'");
      }
      header_seen = true;
      continue;
    }
    if (cells.size() != columns.size()) {
      throw ValidationError(path.string() + ":" + std::to_string(line_no) + ": expected " +
                            std::to_string(columns.size()) + " columns");
    }
    rows.push_back({line_no, std::move(cells)});
  }
  if (!header_seen) throw ValidationError(path.string() + ": empty file");
  return rows;
}

inline double to_double(const std::string& cell, const std::filesystem::path& path, std::size_t line) {
  double value = 0.0;
  const auto* first = cell.data();
  const auto* last = cell.data() + cell.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) {
    throw ValidationError(path.string() + ":" + std::to_string(line) + ": not a number '" + cell + "'");
  }
  return value;
}

inline long to_int(const std::string& cell, const std::filesystem::path& path, std::size_t line) {
  long value = 0;
  auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
  if (ec != std::errc() || ptr != cell.data() + cell.size()) {
    throw ValidationError(path.string() + ":" + std::to_string(line) + ": not an integer '" + cell + "'");
  }
  return value;
}

/// Shortest-exact decimal rendering (17 significant digits).
inline std::string exact(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace ccge::csv
