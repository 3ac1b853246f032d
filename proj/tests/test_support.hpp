#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <random>
#include <vector>

#include "sleeperloc/estimator.hpp"
#include "sleeperloc/geometry.hpp"
#include "sleeperloc/simulator.hpp"

namespace sleeperloc::testing {

/// Jittered corners of an axis-aligned square: always a convex quad, so no
/// three points are collinear.
inline std::array<PixelPoint, 4> random_quad(std::mt19937_64& rng, double size = 256.0) {
  std::uniform_real_distribution<double> jitter(-size / 5.0, size / 5.0);
  const std::array<PixelPoint, 4> base{{{0.0, 0.0}, {size, 0.0}, {size, size}, {0.0, size}}};
  std::array<PixelPoint, 4> out{};
  for (std::size_t i = 0; i < 4; ++i) out[i] = {base[i].x + jitter(rng), base[i].y + jitter(rng)};
  return out;
}

inline double dist(PixelPoint a, PixelPoint b) { return std::hypot(a.x - b.x, a.y - b.y); }

// Exact strip row of the first sleeper past the blind zone.
inline double true_nearest_px(const SleeperLattice& lat, const CorrectionContext& ctx, double front) {
  const double ahead = lat.phase - front - ctx.blind_distance_m;
  const double off = ahead - std::floor(ahead / lat.tau) * lat.tau;
  return off * ctx.scale.px_per_m();
}

// Independent re-evaluation of the visual update on raw frames.
inline std::vector<double> brute_force_visual(const SimRun& run, const CorrectionContext& ctx) {
  const double tau = ctx.tau;
  auto theta_of = [&](const SimFrame& f) {
    if (f.oracle_detections.empty()) return ctx.xi * tau;
    double px = 1e300;
    for (const auto& d : f.oracle_detections) px = std::min(px, d.center.y);
    const double tr = std::max(px, 0.0) / ctx.scale.px_per_m();
    if (tr >= tau) return ctx.xi * tau;
    return std::fmod(tr + ctx.blind_distance_m, tau);
  };
  auto is_fallback = [&](const SimFrame& f) {
    if (f.oracle_detections.empty()) return true;
    double px = 1e300;
    for (const auto& d : f.oracle_detections) px = std::min(px, d.center.y);
    return std::max(px, 0.0) / ctx.scale.px_per_m() >= tau;
  };
  std::vector<double> out{0.0};
  double anchor_m = 0.0, anchor_theta = theta_of(run.frames[0]), acc = 0.0;
  for (std::size_t k = 1; k < run.frames.size(); ++k) {
    const auto& a = run.frames[k - 1];
    const auto& b = run.frames[k];
    acc += (a.measured_speed + b.measured_speed) / 2.0 * (b.t - a.t);
    const double theta = theta_of(b);
    double gamma = std::fmod(anchor_theta - theta + 2.0 * tau, tau);
    if (gamma >= tau) gamma -= tau;
    const double count = std::round((acc - gamma) / tau);
    const double m = anchor_m + count * tau + gamma;
    out.push_back(m);
    if (!is_fallback(b)) {
      anchor_m = m;
      anchor_theta = theta;
      acc = 0.0;
    }
  }
  return out;
}

}  // namespace sleeperloc::testing
