#include "sleeperloc/csv.hpp"

#include <charconv>
#include <string>

#include <fmt/format.h>

#include "sleeperloc/error.hpp"

namespace sleeperloc::csv {

std::vector<std::string_view> split(std::string_view line, char sep) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  for (;;) {
    const auto pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      cells.push_back(line.substr(start));
      break;
    }
    cells.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return cells;
}

double parse_double(std::string_view cell, std::string_view what) {
  double v = 0.0;
  const auto* end = cell.data() + cell.size();
  const auto [ptr, ec] = std::from_chars(cell.data(), end, v);
  if (ec != std::errc() || ptr != end) {
    throw Error(ErrorKind::ConfigInvalid, "bad number '" + std::string(cell) + "' in " + std::string(what));
  }
  return v;
}

long long parse_int(std::string_view cell, std::string_view what) {
  long long v = 0;
  const auto* end = cell.data() + cell.size();
  const auto [ptr, ec] = std::from_chars(cell.data(), end, v);
  if (ec != std::errc() || ptr != end) {
    throw Error(ErrorKind::ConfigInvalid, "bad integer '" + std::string(cell) + "' in " + std::string(what));
  }
  return v;
}

std::string format_double(double v) { return fmt::format("{}", v); }

}  // namespace sleeperloc::csv
