#include "sleeperloc/config.hpp"

#include <fstream>
#include <sstream>
#include <vector>

#include <json.hpp>

#include "sleeperloc/error.hpp"

namespace sleeperloc {

namespace {

using nlohmann::json;

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
  return j.contains(key) ? j.at(key).get<T>() : fallback;
}

Calibration calibration_from_json(const json& j) {
  const auto& pairs = j.at("pairs");
  std::vector<PointPair> pp;
  for (const auto& p : pairs) {
    if (!p.is_array() || p.size() != 4) throw Error(ErrorKind::ConfigInvalid, "each pair must be [xf, yf, xa, ya]");
    pp.push_back({{p[0].get<double>(), p[1].get<double>()}, {p[2].get<double>(), p[3].get<double>()}});
  }
  const auto& axis = j.at("axis_points");
  if (!axis.is_array() || axis.size() != 2 || axis[0].size() != 2 || axis[1].size() != 2) {
    throw Error(ErrorKind::ConfigInvalid, "axis_points must be [[x1, y1], [x2, y2]]");
  }
  const PixelPoint a{axis[0][0].get<double>(), axis[0][1].get<double>()};
  const PixelPoint b{axis[1][0].get<double>(), axis[1][1].get<double>()};
  return {estimate_homography(pp), calibrate_pixel_scale(a, b, j.at("axis_world_m").get<double>())};
}

template <typename F>
auto translating_json_errors(F&& f) {
  try {
    return f();
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ConfigInvalid, e.what());
  }
}

}  // namespace

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Calibration parse_calibration(std::string_view json_text) {
  return translating_json_errors([&] { return calibration_from_json(json::parse(json_text)); });
}

Calibration load_calibration(const std::filesystem::path& path) { return parse_calibration(read_text_file(path)); }

CorrectionContext ScenarioConfig::correction_context() const {
  return CorrectionContext(scenario.lattice.tau, scenario.camera.blind_distance_m, scenario.camera.scale, xi);
}

ScenarioConfig parse_scenario(std::string_view json_text, const std::filesystem::path& base_dir) {
  return translating_json_errors([&] {
    const json j = json::parse(json_text);

    std::optional<Calibration> calib;
    if (j.contains("calibration")) {
      const auto& c = j.at("calibration");
      calib = c.is_string() ? load_calibration(base_dir / c.get<std::string>()) : calibration_from_json(c);
    }

    const auto& rj = j.at("route");
    auto stations = rj.at("stations_m").get<std::vector<double>>();
    if (stations.empty()) throw Error(ErrorKind::ConfigInvalid, "stations_m is empty");
    const double total = get_or<double>(rj, "total_m", stations.back());
    auto tunnels = get_or<std::vector<std::pair<double, double>>>(rj, "tunnels_m", {});
    Route route(std::move(stations), total, std::move(tunnels));
    SleeperLattice lattice(rj.at("tau_m").get<double>(), get_or<double>(rj, "phase_m", 0.0));

    double r = 0.0;
    if (rj.contains("r_px_per_m")) {
      r = rj.at("r_px_per_m").get<double>();
    } else if (calib) {
      r = calib->scale.px_per_m();
    } else {
      throw Error(ErrorKind::ConfigInvalid, "need a calibration or route.r_px_per_m");
    }
    CameraGeometry cam(rj.at("d_B_m").get<double>(), rj.at("visible_m").get<double>(), PixelScale(r),
                       rj.at("strip_px").get<std::size_t>());

    const auto& pj = j.at("profile");
    SpeedProfile profile{pj.at("cruise_mps").get<std::vector<double>>(), pj.at("accel_mps2").get<double>(),
                         pj.at("decel_mps2").get<double>(), get_or<double>(pj, "dwell_s", 0.0)};

    SensorModel sensor;
    if (j.contains("sensor")) {
      const auto& sj = j.at("sensor");
      sensor.speed_bias = get_or<double>(sj, "speed_bias", 0.0);
      sensor.speed_noise_sigma = get_or<double>(sj, "speed_noise_sigma", 0.0);
      sensor.detect_miss_prob = get_or<double>(sj, "detect_miss_prob", 0.0);
      sensor.detect_pixel_sigma = get_or<double>(sj, "detect_pixel_sigma", 0.0);
      sensor.false_positive_rate = get_or<double>(sj, "false_positive_rate", 0.0);
    }
    sensor.seed = get_or<std::uint64_t>(j, "seed", 0);
    sensor.validate();

    double dt = 0.0;
    if (j.contains("dt_s")) {
      dt = j.at("dt_s").get<double>();
    } else {
      const double fps = get_or<double>(j, "fps", 15.0);
      if (!(fps > 0.0)) throw Error(ErrorKind::ConfigInvalid, "fps must be positive");
      dt = 1.0 / fps;
    }
    if (!(dt > 0.0)) throw Error(ErrorKind::ConfigInvalid, "dt_s must be positive");

    ScenarioConfig cfg{Scenario{std::move(route), lattice, cam, std::move(profile), sensor, dt}, 0.5,
                       DetectorKind::Oracle, PeakDetectorParams{}, std::nullopt};
    cfg.calibration = calib;
    cfg.scenario.render_raster = get_or<bool>(j, "render_raster", false);
    cfg.scenario.raster_noise_sigma = get_or<double>(j, "raster_noise_sigma", 0.0);
    if (!(cfg.scenario.raster_noise_sigma >= 0.0)) throw Error(ErrorKind::ConfigInvalid, "raster noise must be >= 0");

    if (j.contains("detector")) {
      const auto& dj = j.at("detector");
      const auto kind = get_or<std::string>(dj, "kind", "oracle");
      if (kind == "oracle") {
        cfg.detector = DetectorKind::Oracle;
      } else if (kind == "peak") {
        cfg.detector = DetectorKind::Peak;
      } else {
        throw Error(ErrorKind::ConfigInvalid, "detector.kind must be oracle or peak");
      }
      cfg.peak.box_side_px = get_or<double>(dj, "box_side_px", cfg.peak.box_side_px);
      cfg.peak.threshold = get_or<double>(dj, "threshold", cfg.peak.threshold);
      cfg.peak.min_gap_px = get_or<double>(dj, "min_gap_px", cfg.peak.min_gap_px);
    }
    cfg.scenario.box_side_px = cfg.peak.box_side_px;
    if (j.contains("estimator")) cfg.xi = get_or<double>(j.at("estimator"), "xi", cfg.xi);
    (void)cfg.correction_context();  // validates xi
    if (cfg.detector == DetectorKind::Peak) {
      PeakDetector validate(cfg.peak);
      if (!cfg.scenario.render_raster) {
        throw Error(ErrorKind::ConfigInvalid, "the peak detector needs render_raster = true");
      }
    }
    return cfg;
  });
}

ScenarioConfig load_scenario(const std::filesystem::path& path) {
  return parse_scenario(read_text_file(path), path.parent_path());
}

}  // namespace sleeperloc
