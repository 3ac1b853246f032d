#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <random>
#include <vector>

#include "sleeperloc/detector.hpp"
#include "sleeperloc/raster.hpp"
#include "sleeperloc/track_model.hpp"

namespace sleeperloc {

/// Trapezoidal speed plan: accelerate, cruise, brake to a stop at every station.
struct SpeedProfile {
  std::vector<double> cruise_mps;  // one per station interval
  double accel_mps2 = 0.8;
  double decel_mps2 = 1.0;
  double dwell_s = 30.0;  // stop time at every intermediate station
};

struct SensorModel {
  double speed_bias = 0.0;         // multiplicative
  double speed_noise_sigma = 0.0;  // m/s per reading
  double detect_miss_prob = 0.0;
  double detect_pixel_sigma = 0.0;
  double false_positive_rate = 0.0;  // expected spurious detections per frame
  std::uint64_t seed = 0;

  void validate() const;
};

struct Scenario {
  Route route;
  SleeperLattice lattice;
  CameraGeometry camera;
  SpeedProfile profile;
  SensorModel sensor;
  double dt_s = 1.0 / 15.0;
  double box_side_px = 30.0;
  bool render_raster = false;
  double raster_noise_sigma = 0.0;
};

struct KinematicSample {
  double t;
  double mileage;
  double speed;
};

struct SimFrame {
  double t = 0.0;
  double true_mileage = 0.0;
  double true_speed = 0.0;
  double measured_speed = 0.0;
  std::optional<Raster> aerial_raster;
  /// What an ideal-but-noisy detector reports, nearest first.
  std::vector<Detection> oracle_detections;
  /// Parallel to oracle_detections; marks injected false positives. Only the
  /// scoring code reads this.
  std::vector<bool> spurious;
  /// Ground-truth sleeper rows (visible_sleepers offsets times r).
  std::vector<double> truth_px;
};

struct SimRun {
  std::vector<SimFrame> frames;
  Route route;
  SleeperLattice lattice;
  CameraGeometry cam;
  double dt;
};

/// Samples the closed-form trapezoidal motion at t_k = k * dt until the train
/// has stopped at the last station.
std::vector<KinematicSample> generate_kinematics(const Route& route, const SpeedProfile& profile, double dt);

/// max(0, v * (1 + bias) + N(0, sigma)). Always consumes exactly one normal draw.
double corrupt_speed(const SensorModel& model, double true_speed, std::mt19937_64& rng);

/// Synthetic single-sided aerial crop: background 0.2, one 0.9 band per
/// visible sleeper, additive Gaussian noise, clamped to [0, 1].
Raster render_aerial_strip(const SleeperLattice& lattice, const CameraGeometry& cam, double front_mileage,
                           double noise_sigma, std::mt19937_64& rng);

SimRun generate_run(const Scenario& scenario);

/// `t_s,true_mileage_m,true_speed_mps,measured_speed_mps,det_count,det_px_0,...`
void write_run_csv(std::ostream& os, const SimRun& run);

/// Restores frames from the CSV; geometry comes from the scenario. Detections
/// get the scenario's box side and confidence 1.
SimRun read_run_csv(std::istream& is, const Scenario& scenario);

/// Binary 8-bit PGM.
void write_pgm(std::ostream& os, const Raster& raster);

}  // namespace sleeperloc
