#include "sleeperloc/report.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>
#include <json.hpp>

#include "sleeperloc/csv.hpp"
#include "sleeperloc/error.hpp"

namespace sleeperloc {

namespace {

struct Accumulator {
  double max_abs = 0.0;
  double rel_sum = 0.0;
  std::size_t rel_n = 0;
  std::size_t n = 0;

  void add(double err, double truth) {
    max_abs = std::max(max_abs, std::abs(err));
    ++n;
    if (truth >= kMpeMinTruthM) {
      rel_sum += std::abs(err) / truth;
      ++rel_n;
    }
  }

  IntervalError finish(std::string label) const {
    return {std::move(label), max_abs, rel_n > 0 ? rel_sum / static_cast<double>(rel_n) : 0.0, n};
  }
};

nlohmann::json to_json(const IntervalError& e) {
  return {{"label", e.label}, {"me_m", e.me_m}, {"mpe", e.mpe}, {"n", e.n}};
}

IntervalError from_json(const nlohmann::json& j) {
  return {j.at("label").get<std::string>(), j.at("me_m").get<double>(), j.at("mpe").get<double>(),
          j.at("n").get<std::size_t>()};
}

}  // namespace

ErrorReport compute_errors(std::span<const double> estimates, std::span<const double> truths, const Route& route) {
  if (estimates.empty() || truths.empty()) throw Error(ErrorKind::EmptySeries, "no points to evaluate");
  if (estimates.size() != truths.size()) throw Error(ErrorKind::LengthMismatch, "estimate and truth lengths differ");

  std::vector<Accumulator> per(route.interval_count());
  Accumulator whole;
  for (std::size_t i = 0; i < truths.size(); ++i) {
    const double err = estimates[i] - truths[i];
    per[interval_of(route, truths[i])].add(err, truths[i]);
    whole.add(err, truths[i]);
  }

  ErrorReport rep;
  for (std::size_t i = 0; i < per.size(); ++i) rep.per_interval.push_back(per[i].finish(route.interval_label(i)));
  rep.whole_route = whole.finish("Whole Route");
  rep.n_points = truths.size();
  return rep;
}

std::string emit_report(const ErrorReport& report, std::string_view format) {
  if (format == "table") {
    std::string out = fmt::format("{:<14} {:>10} {:>9}\n", "Interval", "ME (m)", "MPE");
    auto row = [&](const IntervalError& e) {
      out += fmt::format("{:<14} {:>10.2f} {:>8.2f}%\n", e.label, e.me_m, e.mpe * 100.0);
    };
    for (const auto& e : report.per_interval) row(e);
    row(report.whole_route);
    return out;
  }
  if (format == "csv") {
    std::string out = "interval,me_m,mpe,n\n";
    auto row = [&](const IntervalError& e) {
      out += e.label + ',' + csv::format_double(e.me_m) + ',' + csv::format_double(e.mpe) + ',' +
             std::to_string(e.n) + '\n';
    };
    for (const auto& e : report.per_interval) row(e);
    row(report.whole_route);
    return out;
  }
  if (format == "json") {
    nlohmann::json j;
    j["intervals"] = nlohmann::json::array();
    for (const auto& e : report.per_interval) j["intervals"].push_back(to_json(e));
    j["whole_route"] = to_json(report.whole_route);
    j["n_points"] = report.n_points;
    return j.dump(2) + "\n";
  }
  throw Error(ErrorKind::UnknownFormat, "unknown report format '" + std::string(format) + "'");
}

ErrorReport parse_report_json(std::string_view text) {
  try {
    const auto j = nlohmann::json::parse(text);
    ErrorReport rep;
    for (const auto& e : j.at("intervals")) rep.per_interval.push_back(from_json(e));
    rep.whole_route = from_json(j.at("whole_route"));
    rep.n_points = j.at("n_points").get<std::size_t>();
    return rep;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::ConfigInvalid, std::string("bad report JSON: ") + e.what());
  }
}

std::string emit_comparison_table(const ErrorReport& direct, const ErrorReport& visual) {
  std::string out = fmt::format("{:<14} {:>14} {:>11} {:>14} {:>11}\n", "Interval", "Direct ME (m)", "Direct MPE",
                                "Visual ME (m)", "Visual MPE");
  auto row = [&](const IntervalError& d, const IntervalError& v) {
    out += fmt::format("{:<14} {:>14.2f} {:>10.2f}% {:>14.2f} {:>10.2f}%\n", d.label, d.me_m, d.mpe * 100.0, v.me_m,
                       v.mpe * 100.0);
  };
  const std::size_t n = std::min(direct.per_interval.size(), visual.per_interval.size());
  for (std::size_t i = 0; i < n; ++i) row(direct.per_interval[i], visual.per_interval[i]);
  row(direct.whole_route, visual.whole_route);
  return out;
}

}  // namespace sleeperloc
