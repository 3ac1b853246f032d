#pragma once

#include <cstddef>
#include <vector>

namespace sleeperloc {

/// Row-major single-channel intensity image. Row 0 is the strip edge nearest
/// to the train.
struct Raster {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<double> pixels;

  Raster() = default;
  Raster(std::size_t w, std::size_t h, double fill = 0.0) : width(w), height(h), pixels(w * h, fill) {}

  bool empty() const { return width == 0 || height == 0; }
  double& at(std::size_t x, std::size_t y) { return pixels[y * width + x]; }
  double at(std::size_t x, std::size_t y) const { return pixels[y * width + x]; }

  friend bool operator==(const Raster&, const Raster&) = default;
};

}  // namespace sleeperloc
