#pragma once

#include <array>
#include <cstddef>
#include <span>

#include "sleeperloc/raster.hpp"

namespace sleeperloc {

struct PixelPoint {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const PixelPoint&, const PixelPoint&) = default;
};

/// A front-view pixel and the aerial-view pixel it must land on.
struct PointPair {
  PixelPoint source;
  PixelPoint target;
};

using Matrix3 = std::array<std::array<double, 3>, 3>;

/// Projective map between two image planes, stored with m[2][2] == 1.
class Homography {
 public:
  Homography();

  /// Normalizes by the bottom-right entry. Throws DegenerateConfiguration if
  /// that entry vanishes or the normalized matrix is singular.
  static Homography from_matrix(const Matrix3& m);
  static Homography identity() { return Homography(); }

  const Matrix3& matrix() const { return m_; }
  double operator()(std::size_t row, std::size_t col) const { return m_[row][col]; }
  double determinant() const;

  friend bool operator==(const Homography&, const Homography&) = default;

 private:
  explicit Homography(const Matrix3& m) : m_(m) {}
  Matrix3 m_;
};

/// Solves the 8-unknown direct linear system for exactly four correspondences.
Homography estimate_homography(std::span<const PointPair> pairs);

/// Throws PointAtInfinity when the mapped homogeneous coordinate is ~0.
PixelPoint apply_homography(const Homography& h, PixelPoint p);

Homography invert_homography(const Homography& h);

/// Returns the normalized product `second * first` (apply `first`, then `second`).
Homography compose(const Homography& second, const Homography& first);

/// Inverse-maps every output pixel into `src` and samples bilinearly; samples
/// outside the source read as 0.
Raster warp_raster(const Homography& h, const Raster& src, std::size_t out_width, std::size_t out_height);

/// Pixels per meter along the track (y) axis of the aerial view.
class PixelScale {
 public:
  explicit PixelScale(double px_per_m);
  double px_per_m() const { return r_; }

  friend bool operator==(const PixelScale&, const PixelScale&) = default;

 private:
  double r_;
};

PixelScale calibrate_pixel_scale(PixelPoint a, PixelPoint b, double world_distance_m);

/// Converts a pixel distance along the track axis into meters.
double pixel_to_world(PixelScale scale, double theta_px);

}  // namespace sleeperloc
