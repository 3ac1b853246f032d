#include "sleeperloc/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <memory>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "sleeperloc/config.hpp"
#include "sleeperloc/csv.hpp"
#include "sleeperloc/detector.hpp"
#include "sleeperloc/error.hpp"
#include "sleeperloc/estimator.hpp"
#include "sleeperloc/report.hpp"
#include "sleeperloc/simulator.hpp"

namespace sleeperloc {

namespace fs = std::filesystem;

namespace {

constexpr int kUsageError = 1;
constexpr int kDataError = 2;

std::ofstream open_out(const fs::path& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(ErrorKind::Io, "cannot write '" + path.string() + "'");
  return os;
}

std::ifstream open_in(const fs::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error(ErrorKind::Io, "cannot open '" + path.string() + "'");
  return is;
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::Io, "cannot create directory '" + dir.string() + "': " + ec.message());
}

std::unique_ptr<Detector> make_detector(const ScenarioConfig& cfg) {
  if (cfg.detector == DetectorKind::Peak) return std::make_unique<PeakDetector>(cfg.peak);
  return std::make_unique<OracleDetector>();
}

std::string trace_text(const SimRun& run, const std::vector<PositionEstimate>& est, EstimatorKind kind) {
  std::ostringstream ss;
  write_trace_csv(ss, run, est, kind);
  return ss.str();
}

ErrorReport report_from_trace(const std::string& trace, const Route& route) {
  std::istringstream ss(trace);
  const TraceSeries s = read_trace_csv(ss);
  return compute_errors(s.estimate, s.truth, route);
}

void write_file(const fs::path& path, const std::string& text) {
  auto os = open_out(path);
  os << text;
}

int cmd_simulate(const std::string& config, const std::string& out_dir, std::ostream& out) {
  const ScenarioConfig cfg = load_scenario(config);
  const SimRun run = generate_run(cfg.scenario);
  const fs::path dir(out_dir);
  ensure_dir(dir);
  {
    auto os = open_out(dir / "run.csv");
    write_run_csv(os, run);
  }
  std::vector<std::vector<Detection>> oracle;
  std::vector<std::vector<Detection>> truth;
  for (const auto& f : run.frames) {
    oracle.push_back(f.oracle_detections);
    auto& t = truth.emplace_back();
    for (double y : f.truth_px) t.push_back({{0.0, y}, cfg.scenario.box_side_px, 1.0});
  }
  {
    auto os = open_out(dir / "detections_oracle.csv");
    write_detection_csv(os, oracle);
  }
  {
    auto os = open_out(dir / "detections_truth.csv");
    write_detection_csv(os, truth);
  }
  if (cfg.scenario.render_raster) {
    const PeakDetector peak(cfg.peak);
    std::vector<std::vector<Detection>> found;
    for (std::size_t k = 0; k < run.frames.size(); ++k) {
      const Raster& r = *run.frames[k].aerial_raster;
      auto os = open_out(dir / fmt::format("frame_{:06d}.pgm", k));
      write_pgm(os, r);
      found.push_back(peak.detect({&r, nullptr}));
    }
    auto os = open_out(dir / "detections_peak.csv");
    write_detection_csv(os, found);
  }
  out << "wrote " << run.frames.size() << " frames to " << dir.string() << '\n';
  return 0;
}

int cmd_estimate(const std::string& run_csv, const std::string& method, const std::string& config,
                 const std::string& out_csv) {
  const ScenarioConfig cfg = load_scenario(config);
  auto is = open_in(run_csv);
  const SimRun run = read_run_csv(is, cfg.scenario);
  const EstimatorKind kind = method == "visual" ? EstimatorKind::Visual : EstimatorKind::Direct;
  const auto est = run_estimator(run, kind, cfg.correction_context(), OracleDetector());
  write_file(out_csv, trace_text(run, est, kind));
  return 0;
}

int cmd_evaluate(const std::string& estimates, const std::string& config, const std::string& format,
                 std::ostream& out) {
  const ScenarioConfig cfg = load_scenario(config);
  auto is = open_in(estimates);
  const TraceSeries s = read_trace_csv(is);
  out << emit_report(compute_errors(s.estimate, s.truth, cfg.scenario.route), format);
  return 0;
}

int cmd_detect_eval(const std::string& pred, const std::string& truth, double tol, std::ostream& out) {
  auto pi = open_in(pred);
  auto ti = open_in(truth);
  auto p = read_detection_csv(pi);
  auto t = read_detection_csv(ti);
  const std::size_t n = std::max(p.size(), t.size());
  p.resize(n);
  t.resize(n);
  const DetectionScore s = score_detections(p, t, tol);
  out << fmt::format("precision {:.6f}\nrecall {:.6f}\nf1 {:.6f}\ntp {}\nfp {}\nfn {}\n", s.precision, s.recall,
                     s.f1, s.true_positives, s.false_positives, s.false_negatives);
  return 0;
}

int cmd_calibrate(const std::string& points, std::ostream& out) {
  const Calibration c = load_calibration(points);
  out << "H =\n";
  for (const auto& row : c.homography.matrix()) {
    out << fmt::format("  {:>16.9g} {:>16.9g} {:>16.9g}\n", row[0], row[1], row[2]);
  }
  out << fmt::format("r = {:.9g} px/m\n", c.scale.px_per_m());
  return 0;
}

int cmd_compare(const std::string& config, const std::string& out_dir, std::ostream& out) {
  const ScenarioConfig cfg = load_scenario(config);
  const SimRun run = generate_run(cfg.scenario);
  const auto detector = make_detector(cfg);
  const auto ctx = cfg.correction_context();
  const auto direct = run_estimator(run, EstimatorKind::Direct, ctx, *detector);
  const auto visual = run_estimator(run, EstimatorKind::Visual, ctx, *detector);

  const fs::path dir(out_dir);
  ensure_dir(dir);
  std::ostringstream run_csv;
  write_run_csv(run_csv, run);
  write_file(dir / "run.csv", run_csv.str());
  const std::string direct_trace = trace_text(run, direct, EstimatorKind::Direct);
  const std::string visual_trace = trace_text(run, visual, EstimatorKind::Visual);
  write_file(dir / "estimates_direct.csv", direct_trace);
  write_file(dir / "estimates_visual.csv", visual_trace);

  // Reports go through the serialized traces so they match `evaluate`.
  const ErrorReport direct_rep = report_from_trace(direct_trace, run.route);
  const ErrorReport visual_rep = report_from_trace(visual_trace, run.route);
  write_file(dir / "report_direct.json", emit_report(direct_rep, "json"));
  write_file(dir / "report_visual.json", emit_report(visual_rep, "json"));
  const std::string table = emit_comparison_table(direct_rep, visual_rep);
  write_file(dir / "comparison.txt", table);

  std::string curve = "t_s,err_direct_m,err_visual_m\n";
  const double length = run.route.total_length();
  for (std::size_t k = 0; k < run.frames.size(); ++k) {
    const double truth = run.frames[k].true_mileage;
    curve += csv::format_double(run.frames[k].t) + ',' +
             csv::format_double(reported_mileage(direct[k], length) - truth) + ',' +
             csv::format_double(reported_mileage(visual[k], length) - truth) + '\n';
  }
  write_file(dir / "error_curve.csv", curve);

  out << table;
  return 0;
}

}  // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Sleeper-anchored subway localization toolkit", "sleeperloc"};
  app.require_subcommand(1);

  std::string config, out_dir, run_csv, method, out_csv, estimates, format = "table", pred, truth, points;
  double tol = 15.0;

  auto* simulate = app.add_subcommand("simulate", "Generate a seeded run (CSV, detections, optional PGM frames)");
  simulate->add_option("--config", config, "Scenario JSON")->required();
  simulate->add_option("--out", out_dir, "Output directory")->required();

  auto* estimate = app.add_subcommand("estimate", "Run an estimator over a run CSV");
  estimate->add_option("--run", run_csv, "Run CSV from simulate")->required();
  estimate->add_option("--method", method, "visual or direct")
      ->required()
      ->check(CLI::IsMember({"visual", "direct"}));
  estimate->add_option("--config", config, "Scenario JSON")->required();
  estimate->add_option("--out", out_csv, "Estimate trace CSV")->required();

  auto* evaluate = app.add_subcommand("evaluate", "ME/MPE per station interval");
  evaluate->add_option("--estimates", estimates, "Estimate trace CSV")->required();
  evaluate->add_option("--config", config, "Scenario JSON")->required();
  evaluate->add_option("--format", format, "table, csv or json");

  auto* detect_eval = app.add_subcommand("detect-eval", "Precision/recall/F1 of a detection dump");
  detect_eval->add_option("--pred", pred, "Predicted detections CSV")->required();
  detect_eval->add_option("--truth", truth, "Ground-truth detections CSV")->required();
  detect_eval->add_option("--tol", tol, "Match tolerance in pixels")->required()->check(CLI::PositiveNumber);

  auto* calibrate = app.add_subcommand("calibrate", "Estimate H and r from a calibration file");
  calibrate->add_option("--points", points, "Calibration JSON")->required();

  auto* compare = app.add_subcommand("compare", "Simulate, run both estimators and report side by side");
  compare->add_option("--config", config, "Scenario JSON")->required();
  compare->add_option("--out", out_dir, "Output directory")->default_val("compare_out");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    err << app.help();
    return kUsageError;
  }

  try {
    if (*simulate) return cmd_simulate(config, out_dir, out);
    if (*estimate) return cmd_estimate(run_csv, method, config, out_csv);
    if (*evaluate) return cmd_evaluate(estimates, config, format, out);
    if (*detect_eval) return cmd_detect_eval(pred, truth, tol, out);
    if (*calibrate) return cmd_calibrate(points, out);
    if (*compare) return cmd_compare(config, out_dir, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kDataError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kDataError;
  }
  err << app.help();
  return kUsageError;
}

}  // namespace sleeperloc
