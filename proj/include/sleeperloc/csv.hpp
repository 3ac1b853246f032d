#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace sleeperloc::csv {

std::vector<std::string_view> split(std::string_view line, char sep = ',');

/// Strict parse of a whole cell; throws ConfigInvalid naming `what` on failure.
double parse_double(std::string_view cell, std::string_view what);
long long parse_int(std::string_view cell, std::string_view what);

/// Shortest representation that round-trips to the same double.
std::string format_double(double v);

}  // namespace sleeperloc::csv
