#pragma once

#include <charconv>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace oldroyd {

/// Shortest decimal text that parses back to exactly the same double.
inline std::string format_number(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline std::string format_number(std::int64_t v) { return std::to_string(v); }

/// Joins already formatted cells with commas and a trailing newline.
inline std::string csv_row(std::span<const std::string> cells) {
  std::string line;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) line += ',';
    line += cells[i];
  }
  line += '\n';
  return line;
}

inline std::string csv_row(std::initializer_list<std::string> cells) {
  return csv_row(std::span<const std::string>(cells.begin(), cells.size()));
}

}  // namespace oldroyd
