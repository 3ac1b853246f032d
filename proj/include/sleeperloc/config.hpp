#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "sleeperloc/detector.hpp"
#include "sleeperloc/estimator.hpp"
#include "sleeperloc/geometry.hpp"
#include "sleeperloc/simulator.hpp"

namespace sleeperloc {

/// Front-to-aerial homography plus the aerial pixel scale, from
/// `{"pairs": [[xf,yf,xa,ya] x4], "axis_points": [[x1,y1],[x2,y2]], "axis_world_m": d}`.
struct Calibration {
  Homography homography;
  PixelScale scale;
};

Calibration parse_calibration(std::string_view json_text);
Calibration load_calibration(const std::filesystem::path& path);

enum class DetectorKind { Oracle, Peak };

/// Everything one scenario JSON document configures.
struct ScenarioConfig {
  Scenario scenario;
  double xi = 0.5;
  DetectorKind detector = DetectorKind::Oracle;
  PeakDetectorParams peak;
  std::optional<Calibration> calibration;

  CorrectionContext correction_context() const;
};

/// `base_dir` resolves a calibration given as a relative file path.
ScenarioConfig parse_scenario(std::string_view json_text, const std::filesystem::path& base_dir = {});
ScenarioConfig load_scenario(const std::filesystem::path& path);

std::string read_text_file(const std::filesystem::path& path);

}  // namespace sleeperloc
