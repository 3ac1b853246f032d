#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "sleeperloc/geometry.hpp"

namespace sleeperloc {

/// Linear route with stations at cumulative mileages (meters from station 1).
class Route {
 public:
  Route(std::vector<double> station_mileages, double total_length,
        std::vector<std::pair<double, double>> tunnel_segments = {});

  const std::vector<double>& station_mileages() const { return stations_; }
  double total_length() const { return total_; }
  const std::vector<std::pair<double, double>>& tunnel_segments() const { return tunnels_; }

  std::size_t interval_count() const { return stations_.size() - 1; }
  /// "1-2", "2-3", ... using 1-based station numbers.
  std::string interval_label(std::size_t index) const;

 private:
  std::vector<double> stations_;
  double total_;
  std::vector<std::pair<double, double>> tunnels_;
};

/// Perfectly periodic sleepers at phase + k * tau for k >= 0.
struct SleeperLattice {
  double tau;
  double phase;

  SleeperLattice(double tau_m, double phase_m);
};

struct CameraGeometry {
  double blind_distance_m;  // d_B: train front to start of the visible strip
  double visible_length_m;  // strip length beyond the blind distance
  PixelScale scale;
  std::size_t strip_pixels;

  CameraGeometry(double d_b, double visible_m, PixelScale r, std::size_t strip_px);
};

struct VisibleSleeper {
  double world_mileage;
  double strip_offset_m;
};

/// Distance from the train front to the first sleeper at or beyond it, in [0, tau).
double nearest_sleeper_phase(const SleeperLattice& lattice, double front_mileage);

/// Sleepers within [front + d_B, front + d_B + visible_length], nearest first.
std::vector<VisibleSleeper> visible_sleepers(const SleeperLattice& lattice, const CameraGeometry& cam,
                                             double front_mileage);

/// Half-open station interval containing `mileage`; the last interval is closed.
std::size_t interval_of(const Route& route, double mileage);

/// Reduces x into [0, period).
double wrap_to_period(double x, double period);

}  // namespace sleeperloc
