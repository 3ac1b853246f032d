#include "sleeperloc/track_model.hpp"

#include <algorithm>
#include <cmath>

#include "sleeperloc/error.hpp"

namespace sleeperloc {

namespace {
constexpr double kEdgeTol = 1e-9;
}

Route::Route(std::vector<double> station_mileages, double total_length,
             std::vector<std::pair<double, double>> tunnel_segments)
    : stations_(std::move(station_mileages)), total_(total_length), tunnels_(std::move(tunnel_segments)) {
  if (stations_.size() < 2) throw Error(ErrorKind::ConfigInvalid, "route needs at least two stations");
  if (stations_.front() != 0.0) throw Error(ErrorKind::ConfigInvalid, "first station must be at mileage 0");
  for (std::size_t i = 1; i < stations_.size(); ++i) {
    if (!(stations_[i] > stations_[i - 1])) {
      throw Error(ErrorKind::ConfigInvalid, "station mileages must be strictly increasing");
    }
  }
  if (!std::isfinite(total_) || stations_.back() > total_) {
    throw Error(ErrorKind::ConfigInvalid, "last station lies beyond the route length");
  }
  std::sort(tunnels_.begin(), tunnels_.end());
  for (std::size_t i = 0; i < tunnels_.size(); ++i) {
    const auto [a, b] = tunnels_[i];
    if (!(a >= 0.0 && b > a && b <= total_)) {
      throw Error(ErrorKind::ConfigInvalid, "tunnel segment outside the route or empty");
    }
    if (i > 0 && a < tunnels_[i - 1].second) throw Error(ErrorKind::ConfigInvalid, "tunnel segments overlap");
  }
}

std::string Route::interval_label(std::size_t index) const {
  return std::to_string(index + 1) + "-" + std::to_string(index + 2);
}

SleeperLattice::SleeperLattice(double tau_m, double phase_m) : tau(tau_m), phase(phase_m) {
  if (!(tau > 0.0) || !std::isfinite(tau)) throw Error(ErrorKind::ConfigInvalid, "sleeper spacing must be positive");
  if (!(phase >= 0.0 && phase < tau)) throw Error(ErrorKind::ConfigInvalid, "sleeper phase must lie in [0, tau)");
}

CameraGeometry::CameraGeometry(double d_b, double visible_m, PixelScale r, std::size_t strip_px)
    : blind_distance_m(d_b), visible_length_m(visible_m), scale(r), strip_pixels(strip_px) {
  if (!(d_b >= 0.0)) throw Error(ErrorKind::ConfigInvalid, "blind distance must be non-negative");
  if (!(visible_m > 0.0)) throw Error(ErrorKind::ConfigInvalid, "visible length must be positive");
  if (strip_px < 1) throw Error(ErrorKind::ConfigInvalid, "strip must be at least one pixel");
  if (std::abs(visible_m * r.px_per_m() - static_cast<double>(strip_px)) > 1.0) {
    throw Error(ErrorKind::ConfigInvalid, "visible length times pixel scale must match the strip height");
  }
}

double wrap_to_period(double x, double period) {
  double w = std::fmod(x, period);
  if (w < 0.0) w += period;
  if (w >= period) w -= period;
  return w + 0.0;  // folds -0.0
}

double nearest_sleeper_phase(const SleeperLattice& lattice, double front_mileage) {
  return wrap_to_period(lattice.phase - front_mileage, lattice.tau);
}

std::vector<VisibleSleeper> visible_sleepers(const SleeperLattice& lattice, const CameraGeometry& cam,
                                             double front_mileage) {
  const double start = front_mileage + cam.blind_distance_m;
  const double end = start + cam.visible_length_m;
  double k = std::ceil((start - lattice.phase) / lattice.tau - kEdgeTol);
  k = std::max(k, 0.0);

  std::vector<VisibleSleeper> out;
  for (;; k += 1.0) {
    const double m = lattice.phase + k * lattice.tau;
    if (m > end + kEdgeTol) break;
    if (m < start - kEdgeTol) continue;
    const double offset = std::clamp(m - start, 0.0, cam.visible_length_m);
    out.push_back({m, offset});
  }
  return out;
}

std::size_t interval_of(const Route& route, double mileage) {
  const auto& st = route.station_mileages();
  if (!(mileage >= 0.0 && mileage <= route.total_length())) {
    throw Error(ErrorKind::OutOfRoute, "mileage " + std::to_string(mileage) + " outside the route");
  }
  const auto it = std::upper_bound(st.begin(), st.end(), mileage);
  const auto idx = static_cast<std::size_t>(it - st.begin());
  return std::min(idx == 0 ? 0 : idx - 1, route.interval_count() - 1);
}

}  // namespace sleeperloc
