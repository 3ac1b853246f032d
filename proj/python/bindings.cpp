#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <array>
#include <optional>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "sleeperloc/cli.hpp"
#include "sleeperloc/config.hpp"
#include "sleeperloc/detector.hpp"
#include "sleeperloc/error.hpp"
#include "sleeperloc/estimator.hpp"
#include "sleeperloc/geometry.hpp"
#include "sleeperloc/report.hpp"
#include "sleeperloc/simulator.hpp"
#include "sleeperloc/track_model.hpp"

namespace py = pybind11;
using namespace pybind11::literals;
using namespace sleeperloc;

namespace {

using XY = std::pair<double, double>;

XY to_xy(PixelPoint p) { return {p.x, p.y}; }

py::array_t<double> raster_to_array(const Raster& r) {
  py::array_t<double> a({r.height, r.width});
  auto m = a.mutable_unchecked<2>();
  for (std::size_t y = 0; y < r.height; ++y) {
    for (std::size_t x = 0; x < r.width; ++x) m(y, x) = r.at(x, y);
  }
  return a;
}

Raster array_to_raster(const py::array_t<double, py::array::c_style | py::array::forcecast>& a) {
  if (a.ndim() != 2) throw py::value_error("expected a 2-D intensity array");
  const auto h = static_cast<std::size_t>(a.shape(0));
  const auto w = static_cast<std::size_t>(a.shape(1));
  Raster r(w, h);
  auto v = a.unchecked<2>();
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) r.at(x, y) = v(y, x);
  }
  return r;
}

py::dict report_to_dict(const ErrorReport& rep) {
  py::list rows;
  for (const auto& e : rep.per_interval) rows.append(py::dict("label"_a = e.label, "me_m"_a = e.me_m, "mpe"_a = e.mpe, "n"_a = e.n));
  const auto& w = rep.whole_route;
  return py::dict("intervals"_a = rows,
                  "whole_route"_a = py::dict("label"_a = w.label, "me_m"_a = w.me_m, "mpe"_a = w.mpe, "n"_a = w.n),
                  "n_points"_a = rep.n_points);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Sleeper-anchored subway localization core";

  static py::exception<Error> error_type(m, "SleeperlocError");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      error_type(e.what());
    }
  });

  py::class_<Homography>(m, "Homography")
      .def(py::init<>())
      .def_static("from_matrix", &Homography::from_matrix, "m"_a)
      .def_property_readonly("matrix", &Homography::matrix)
      .def("determinant", &Homography::determinant)
      .def("__repr__", [](const Homography& h) {
        std::ostringstream ss;
        ss << "Homography(";
        for (const auto& row : h.matrix()) ss << '[' << row[0] << ", " << row[1] << ", " << row[2] << ']';
        ss << ')';
        return ss.str();
      });

  m.def(
      "estimate_homography",
      [](const std::vector<std::array<double, 4>>& pairs) {
        std::vector<PointPair> pp;
        for (const auto& p : pairs) pp.push_back({{p[0], p[1]}, {p[2], p[3]}});
        return estimate_homography(pp);
      },
      "pairs"_a, "Four (xf, yf, xa, ya) correspondences -> Homography");
  m.def(
      "apply_homography", [](const Homography& h, XY p) { return to_xy(apply_homography(h, {p.first, p.second})); },
      "h"_a, "point"_a);
  m.def("invert_homography", &invert_homography, "h"_a);
  m.def(
      "calibrate_pixel_scale",
      [](XY a, XY b, double world_m) {
        return calibrate_pixel_scale({a.first, a.second}, {b.first, b.second}, world_m).px_per_m();
      },
      "a"_a, "b"_a, "world_distance_m"_a, "Returns r in pixels per meter");
  m.def(
      "pixel_to_world", [](double r, double theta_px) { return pixel_to_world(PixelScale(r), theta_px); }, "r"_a,
      "theta_px"_a);

  m.def(
      "nearest_sleeper_phase",
      [](double tau, double phase, double front) { return nearest_sleeper_phase(SleeperLattice(tau, phase), front); },
      "tau"_a, "phase"_a, "front_mileage"_a);
  m.def(
      "visible_sleepers",
      [](double tau, double phase, double d_b, double visible_m, double r, std::size_t strip_px, double front) {
        std::vector<XY> out;
        for (const auto& s : visible_sleepers(SleeperLattice(tau, phase), CameraGeometry(d_b, visible_m, PixelScale(r), strip_px), front)) {
          out.emplace_back(s.world_mileage, s.strip_offset_m);
        }
        return out;
      },
      "tau"_a, "phase"_a, "d_b"_a, "visible_m"_a, "r"_a, "strip_px"_a, "front_mileage"_a,
      "List of (world_mileage, strip_offset_m), nearest first");

  py::class_<CorrectionFactor>(m, "CorrectionFactor")
      .def_readonly("theta", &CorrectionFactor::theta)
      .def_readonly("fallback_used", &CorrectionFactor::fallback_used);
  m.def(
      "correction_factor",
      [](double tau, double d_b, double r, double xi, std::optional<double> nearest_px) {
        return correction_factor(CorrectionContext(tau, d_b, PixelScale(r), xi), nearest_px);
      },
      "tau"_a, "d_b"_a, "r"_a, "xi"_a, "nearest_px"_a = py::none());
  m.def("sensor_distance", &sensor_distance, "v1"_a, "v2"_a, "interval_s"_a);
  m.def("sleeper_count", &sleeper_count, "d_vt"_a, "tau"_a);
  m.def("remainder_gamma", &remainder_gamma, "theta1"_a, "theta2"_a, "tau"_a);

  m.def(
      "render_aerial_strip",
      [](double tau, double phase, double d_b, double visible_m, double r, std::size_t strip_px, double front,
         double noise_sigma, std::uint64_t seed) {
        std::mt19937_64 rng(seed);
        return raster_to_array(render_aerial_strip(SleeperLattice(tau, phase),
                                                   CameraGeometry(d_b, visible_m, PixelScale(r), strip_px), front,
                                                   noise_sigma, rng));
      },
      "tau"_a, "phase"_a, "d_b"_a, "visible_m"_a, "r"_a, "strip_px"_a, "front_mileage"_a, "noise_sigma"_a = 0.0,
      "seed"_a = 0);
  m.def(
      "peak_detect",
      [](const py::array_t<double, py::array::c_style | py::array::forcecast>& strip, double threshold,
         double min_gap_px) {
        std::vector<std::pair<double, double>> out;
        for (const auto& d : peak_detect(array_to_raster(strip), threshold, min_gap_px)) {
          out.emplace_back(d.center.y, d.confidence);
        }
        return out;
      },
      "strip"_a, "threshold"_a = 0.5, "min_gap_px"_a = 20.0, "List of (row, confidence), nearest first");

  py::class_<DetectionScore>(m, "DetectionScore")
      .def_readonly("precision", &DetectionScore::precision)
      .def_readonly("recall", &DetectionScore::recall)
      .def_readonly("f1", &DetectionScore::f1)
      .def_readonly("true_positives", &DetectionScore::true_positives)
      .def_readonly("false_positives", &DetectionScore::false_positives)
      .def_readonly("false_negatives", &DetectionScore::false_negatives);
  m.def(
      "score_detections",
      [](const std::vector<std::vector<double>>& pred, const std::vector<std::vector<double>>& truth, double tol) {
        return score_detections(pred, truth, tol);
      },
      "predicted"_a, "truth"_a, "match_tol_px"_a);

  m.def(
      "compare_scenario",
      [](const std::string& config_path) {
        const ScenarioConfig cfg = load_scenario(config_path);
        const SimRun run = generate_run(cfg.scenario);
        const OracleDetector oracle;
        const PeakDetector peak(cfg.peak);
        const Detector& det = cfg.detector == DetectorKind::Peak ? static_cast<const Detector&>(peak) : oracle;
        py::dict out("frames"_a = run.frames.size());
        const double length = run.route.total_length();
        std::vector<double> truth;
        for (const auto& f : run.frames) truth.push_back(f.true_mileage);
        for (auto [kind, name] : {std::pair{EstimatorKind::Direct, "direct"}, std::pair{EstimatorKind::Visual, "visual"}}) {
          const auto est = run_estimator(run, kind, cfg.correction_context(), det);
          std::vector<double> rep;
          for (const auto& e : est) rep.push_back(reported_mileage(e, length));
          out[name] = report_to_dict(compute_errors(rep, truth, run.route));
        }
        return out;
      },
      "config_path"_a, "Simulate a scenario and report direct vs visual errors");

  m.def(
      "cli_main",
      [](const std::vector<std::string>& args) {
        std::vector<const char*> argv{"sleeperloc"};
        for (const auto& a : args) argv.push_back(a.c_str());
        std::ostringstream out, err;
        const int code = cli_main(static_cast<int>(argv.size()), argv.data(), out, err);
        return std::make_tuple(code, out.str(), err.str());
      },
      "args"_a, "Run the command-line tool in-process; returns (exit_code, stdout, stderr)");
}
