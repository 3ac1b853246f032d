#include "sleeperloc/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sleeperloc/error.hpp"

namespace sleeperloc {

namespace {

constexpr double kDegenerateTol = 1e-12;

double det3(const Matrix3& m) {
  return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
         m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
         m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}

// True when some three of the four points are (numerically) collinear.
bool has_collinear_triple(const std::array<PixelPoint, 4>& pts) {
  double extent = 1.0;
  for (const auto& p : pts) extent = std::max({extent, std::abs(p.x), std::abs(p.y)});
  const double tol = kDegenerateTol * extent * extent;
  for (int i = 0; i < 4; ++i) {
    for (int j = i + 1; j < 4; ++j) {
      for (int k = j + 1; k < 4; ++k) {
        const double cross = (pts[j].x - pts[i].x) * (pts[k].y - pts[i].y) -
                             (pts[j].y - pts[i].y) * (pts[k].x - pts[i].x);
        if (std::abs(cross) <= tol) return true;
      }
    }
  }
  return false;
}

}  // namespace

Homography::Homography() : m_{{{1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}, {0.0, 0.0, 1.0}}} {}

Homography Homography::from_matrix(const Matrix3& m) {
  const double w = m[2][2];
  if (!std::isfinite(w) || std::abs(w) <= kDegenerateTol) {
    throw Error(ErrorKind::DegenerateConfiguration, "cannot normalize matrix with m[2][2] ~ 0");
  }
  Matrix3 n{};
  for (std::size_t r = 0; r < 3; ++r) {
    for (std::size_t c = 0; c < 3; ++c) {
      n[r][c] = m[r][c] / w;
      if (!std::isfinite(n[r][c])) throw Error(ErrorKind::DegenerateConfiguration, "non-finite matrix entry");
    }
  }
  n[2][2] = 1.0;
  if (std::abs(det3(n)) <= kDegenerateTol) {
    throw Error(ErrorKind::DegenerateConfiguration, "matrix is singular");
  }
  return Homography(n);
}

double Homography::determinant() const { return det3(m_); }

Homography estimate_homography(std::span<const PointPair> pairs) {
  if (pairs.size() != 4) {
    throw Error(ErrorKind::WrongArity, "expected exactly 4 point pairs, got " + std::to_string(pairs.size()));
  }
  std::array<PixelPoint, 4> src{};
  std::array<PixelPoint, 4> dst{};
  for (std::size_t i = 0; i < 4; ++i) {
    const auto& pr = pairs[i];
    if (!std::isfinite(pr.source.x) || !std::isfinite(pr.source.y) || !std::isfinite(pr.target.x) ||
        !std::isfinite(pr.target.y)) {
      throw Error(ErrorKind::DegenerateConfiguration, "non-finite point coordinate");
    }
    src[i] = pr.source;
    dst[i] = pr.target;
  }
  if (has_collinear_triple(src) || has_collinear_triple(dst)) {
    throw Error(ErrorKind::DegenerateConfiguration, "three of the four points are collinear or coincide");
  }

  // Unknowns h00 h01 h02 h10 h11 h12 h20 h21, with h22 fixed at 1.
  std::array<std::array<double, 9>, 8> a{};
  for (std::size_t i = 0; i < 4; ++i) {
    const double x = src[i].x, y = src[i].y, u = dst[i].x, v = dst[i].y;
    a[2 * i] = {x, y, 1.0, 0.0, 0.0, 0.0, -u * x, -u * y, u};
    a[2 * i + 1] = {0.0, 0.0, 0.0, x, y, 1.0, -v * x, -v * y, v};
  }

  for (std::size_t col = 0; col < 8; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < 8; ++r) {
      if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
    }
    if (std::abs(a[pivot][col]) <= kDegenerateTol) {
      throw Error(ErrorKind::DegenerateConfiguration, "singular 8x8 system");
    }
    std::swap(a[col], a[pivot]);
    for (std::size_t r = col + 1; r < 8; ++r) {
      const double f = a[r][col] / a[col][col];
      if (f == 0.0) continue;
      for (std::size_t c = col; c < 9; ++c) a[r][c] -= f * a[col][c];
    }
  }
  std::array<double, 8> h{};
  for (std::size_t i = 8; i-- > 0;) {
    double s = a[i][8];
    for (std::size_t c = i + 1; c < 8; ++c) s -= a[i][c] * h[c];
    h[i] = s / a[i][i];
  }

  return Homography::from_matrix({{{h[0], h[1], h[2]}, {h[3], h[4], h[5]}, {h[6], h[7], 1.0}}});
}

PixelPoint apply_homography(const Homography& h, PixelPoint p) {
  const auto& m = h.matrix();
  const double w = m[2][0] * p.x + m[2][1] * p.y + m[2][2];
  if (std::abs(w) <= kDegenerateTol) {
    throw Error(ErrorKind::PointAtInfinity, "point maps to infinity");
  }
  return {(m[0][0] * p.x + m[0][1] * p.y + m[0][2]) / w, (m[1][0] * p.x + m[1][1] * p.y + m[1][2]) / w};
}

Homography invert_homography(const Homography& h) {
  const auto& m = h.matrix();
  const double det = det3(m);
  if (std::abs(det) <= kDegenerateTol) {
    throw Error(ErrorKind::DegenerateConfiguration, "homography is not invertible");
  }
  Matrix3 adj{};
  adj[0][0] = m[1][1] * m[2][2] - m[1][2] * m[2][1];
  adj[0][1] = m[0][2] * m[2][1] - m[0][1] * m[2][2];
  adj[0][2] = m[0][1] * m[1][2] - m[0][2] * m[1][1];
  adj[1][0] = m[1][2] * m[2][0] - m[1][0] * m[2][2];
  adj[1][1] = m[0][0] * m[2][2] - m[0][2] * m[2][0];
  adj[1][2] = m[0][2] * m[1][0] - m[0][0] * m[1][2];
  adj[2][0] = m[1][0] * m[2][1] - m[1][1] * m[2][0];
  adj[2][1] = m[0][1] * m[2][0] - m[0][0] * m[2][1];
  adj[2][2] = m[0][0] * m[1][1] - m[0][1] * m[1][0];
  for (auto& row : adj) {
    for (double& v : row) v /= det;
  }
  return Homography::from_matrix(adj);
}

Homography compose(const Homography& second, const Homography& first) {
  Matrix3 p{};
  for (std::size_t r = 0; r < 3; ++r) {
    for (std::size_t c = 0; c < 3; ++c) {
      double s = 0.0;
      for (std::size_t k = 0; k < 3; ++k) s += second(r, k) * first(k, c);
      p[r][c] = s;
    }
  }
  return Homography::from_matrix(p);
}

Raster warp_raster(const Homography& h, const Raster& src, std::size_t out_width, std::size_t out_height) {
  if (src.empty()) throw Error(ErrorKind::DegenerateConfiguration, "source raster is empty");
  if (out_width == 0 || out_height == 0) {
    throw Error(ErrorKind::DegenerateConfiguration, "output raster must be at least 1x1");
  }
  const Homography inv = invert_homography(h);
  const double max_x = static_cast<double>(src.width - 1);
  const double max_y = static_cast<double>(src.height - 1);

  Raster out(out_width, out_height, 0.0);
  for (std::size_t y = 0; y < out_height; ++y) {
    for (std::size_t x = 0; x < out_width; ++x) {
      PixelPoint s;
      try {
        s = apply_homography(inv, {static_cast<double>(x), static_cast<double>(y)});
      } catch (const Error&) {
        continue;
      }
      if (!(s.x >= 0.0 && s.x <= max_x && s.y >= 0.0 && s.y <= max_y)) continue;
      const auto x0 = static_cast<std::size_t>(std::floor(s.x));
      const auto y0 = static_cast<std::size_t>(std::floor(s.y));
      const std::size_t x1 = std::min(x0 + 1, src.width - 1);
      const std::size_t y1 = std::min(y0 + 1, src.height - 1);
      const double fx = s.x - static_cast<double>(x0);
      const double fy = s.y - static_cast<double>(y0);
      const double top = src.at(x0, y0) * (1.0 - fx) + src.at(x1, y0) * fx;
      const double bottom = src.at(x0, y1) * (1.0 - fx) + src.at(x1, y1) * fx;
      out.at(x, y) = top * (1.0 - fy) + bottom * fy;
    }
  }
  return out;
}

PixelScale::PixelScale(double px_per_m) : r_(px_per_m) {
  if (!std::isfinite(px_per_m) || px_per_m <= 0.0) {
    throw Error(ErrorKind::ZeroBaseline, "pixel scale must be positive and finite");
  }
}

PixelScale calibrate_pixel_scale(PixelPoint a, PixelPoint b, double world_distance_m) {
  const double dy = std::abs(b.y - a.y);
  if (!(world_distance_m > 0.0) || !std::isfinite(world_distance_m)) {
    throw Error(ErrorKind::ZeroBaseline, "world baseline must be positive");
  }
  if (!(dy > kDegenerateTol) || !std::isfinite(dy)) {
    throw Error(ErrorKind::ZeroBaseline, "axis points coincide along the track axis");
  }
  return PixelScale(dy / world_distance_m);
}

double pixel_to_world(PixelScale scale, double theta_px) {
  if (theta_px < 0.0) throw Error(ErrorKind::NegativeDistance, "pixel distance must be non-negative");
  return theta_px / scale.px_per_m();
}

}  // namespace sleeperloc
