#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sleeperloc/track_model.hpp"

namespace sleeperloc {

struct IntervalError {
  std::string label;
  double me_m = 0.0;   // max |estimate - truth|
  double mpe = 0.0;    // mean |estimate - truth| / truth, as a fraction
  std::size_t n = 0;   // points falling in the interval
};

struct ErrorReport {
  std::vector<IntervalError> per_interval;
  IntervalError whole_route;
  std::size_t n_points = 0;
};

/// Truths below this are left out of the relative-error mean.
inline constexpr double kMpeMinTruthM = 1.0;

ErrorReport compute_errors(std::span<const double> estimates, std::span<const double> truths, const Route& route);

/// "table", "csv" or "json"; anything else throws UnknownFormat.
std::string emit_report(const ErrorReport& report, std::string_view format);

ErrorReport parse_report_json(std::string_view text);

/// Direct vs visual, one row per interval plus the whole route.
std::string emit_comparison_table(const ErrorReport& direct, const ErrorReport& visual);

}  // namespace sleeperloc
