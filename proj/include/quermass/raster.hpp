#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "quermass/geom.hpp"

namespace quermass {

// Row-major binary mask. Pixel (ix, iy) has world-coordinate centre
// (origin_x + (ix+0.5)*pixel_size, origin_y + (iy+0.5)*pixel_size); iy grows
// upward. PGM files store rows top-down, so file row 0 is iy = height-1.
struct BinaryRaster {
  std::size_t width = 0, height = 0;
  double pixel_size = 1.0;
  double origin_x = 0.0, origin_y = 0.0;
  std::vector<std::uint8_t> bits;  // 0 background, 1 foreground

  bool at(std::size_t ix, std::size_t iy) const { return bits[iy * width + ix] != 0; }
  void set(std::size_t ix, std::size_t iy, bool v) {
    bits[iy * width + ix] = v ? 1 : 0;
  }
  std::size_t pixel_count() const { return width * height; }
  std::size_t foreground_count() const;
  double centre_x(std::size_t ix) const { return origin_x + (static_cast<double>(ix) + 0.5) * pixel_size; }
  double centre_y(std::size_t iy) const { return origin_y + (static_cast<double>(iy) + 0.5) * pixel_size; }
  Window world_window() const {
    return Window{origin_x, origin_y, origin_x + static_cast<double>(width) * pixel_size,
                  origin_y + static_cast<double>(height) * pixel_size};
  }
};

// Pixel foreground iff its centre lies in some closed disc; the raster spans
// config.window exactly (last row/column may overhang by under one pixel).
BinaryRaster rasterize(const MarkedConfiguration& config, double pixel_size);

// Exact squared Euclidean distance transform (two-pass parabola envelope).
// Output, in squared pixel units, is the distance from each pixel centre to
// the nearest pixel centre with mask != 0; pixels of the mask itself get 0.
// A mask with no set pixel yields a large finite sentinel everywhere.
std::vector<double> squared_distance_transform(const std::vector<std::uint8_t>& mask,
                                               std::size_t width, std::size_t height);

struct ApproxReport {
  std::size_t n_discs = 0;
  double achieved = 0.0;  // symmetric-difference area / foreground area
  bool tol_met = false;
};

// Greedy medial-axis covering: repeatedly place a disc at the uncovered
// foreground pixel of largest distance-to-background (centre refined to the
// centroid of the local equal-distance plateau; radius in [r_min, r_max]
// chosen to maximize newly covered foreground minus newly covered background,
// skipping placements that cannot improve the covering) until the symmetric
// difference drops below coverage_tol * foreground area, max_discs is hit,
// or no improving placement remains (then report the achieved coverage).
MarkedConfiguration approximate(const BinaryRaster& raster, double r_min, double r_max,
                                double coverage_tol, std::size_t max_discs,
                                ApproxReport* report = nullptr);

// P5 PGM, foreground = 255; threshold >= 128 on read. Geometry metadata
// (pixel_size, origin) lives in a "<path>.meta" key=value sidecar; a missing
// sidecar reads as pixel_size 1, origin (0,0).
void write_pgm(const BinaryRaster& raster, const std::string& path);
BinaryRaster read_pgm(const std::string& path);

}  // namespace quermass
