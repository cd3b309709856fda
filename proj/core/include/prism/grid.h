// Copyright 2026 The PRISM Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Feature-map container and the geometric transforms used by the stress
// experiments.
//
// Coordinates: `u` is the column (x axis, 0..W-1), `v` is the row (y axis,
// 0..H-1). Values are stored row-major by (v, u, c).

#ifndef PRISM_GRID_H_
#define PRISM_GRID_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace prism {

/// Seed for deterministic generators.
struct Seed {
  std::uint64_t value = 0;
};

struct GridCenter {
  double x = 0.0;  // c_x, column units
  double y = 0.0;  // c_y, row units
  friend bool operator==(const GridCenter&, const GridCenter&) = default;
};

struct Pixel {
  int u = 0;
  int v = 0;
  friend bool operator==(const Pixel&, const Pixel&) = default;
};

/// Dense H x W x C grid of doubles with a per-pixel validity mask.
/// A mask entry of 0 marks padding introduced by rotation or occlusion.
class FeatureMap {
 public:
  FeatureMap() = default;
  /// Throws ShapeError if any dimension is zero.
  FeatureMap(std::size_t height, std::size_t width, std::size_t channels,
             double fill = 0.0);

  std::size_t height() const { return height_; }
  std::size_t width() const { return width_; }
  std::size_t channels() const { return channels_; }
  std::size_t pixel_count() const { return height_ * width_; }

  double& at(std::size_t v, std::size_t u, std::size_t c) {
    return values_[(v * width_ + u) * channels_ + c];
  }
  double at(std::size_t v, std::size_t u, std::size_t c) const {
    return values_[(v * width_ + u) * channels_ + c];
  }

  std::span<double> pixel(std::size_t v, std::size_t u) {
    return {values_.data() + (v * width_ + u) * channels_, channels_};
  }
  std::span<const double> pixel(std::size_t v, std::size_t u) const {
    return {values_.data() + (v * width_ + u) * channels_, channels_};
  }
  std::span<double> pixel(Pixel p) { return pixel(p.v, p.u); }
  std::span<const double> pixel(Pixel p) const { return pixel(p.v, p.u); }

  bool valid(std::size_t v, std::size_t u) const {
    return mask_[v * width_ + u] != 0;
  }
  bool valid(Pixel p) const { return valid(p.v, p.u); }
  void set_valid(std::size_t v, std::size_t u, bool valid) {
    mask_[v * width_ + u] = valid ? 1 : 0;
  }

  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }
  std::span<std::uint8_t> mask() { return mask_; }
  std::span<const std::uint8_t> mask() const { return mask_; }

  bool SameShape(const FeatureMap& other) const {
    return height_ == other.height_ && width_ == other.width_ &&
           channels_ == other.channels_;
  }

  friend bool operator==(const FeatureMap&, const FeatureMap&) = default;

 private:
  std::size_t height_ = 0;
  std::size_t width_ = 0;
  std::size_t channels_ = 0;
  std::vector<double> values_;
  std::vector<std::uint8_t> mask_;
};

/// Constant-filled map with an all-true mask.
FeatureMap MakeMap(std::size_t height, std::size_t width, std::size_t channels,
                   double fill);
/// Map filled with uniform(-1, 1) draws; bit-identical for equal seeds.
FeatureMap MakeMap(std::size_t height, std::size_t width, std::size_t channels,
                   Seed seed);

/// ((W-1)/2, (H-1)/2).
GridCenter DefaultCenter(std::size_t height, std::size_t width);

/// Per-channel mean over all H*W positions. The mask is ignored.
std::vector<double> GlobalAveragePool(const FeatureMap& map);

/// Position that pixel `p` moves to under `quarter_turns` counterclockwise
/// quarter turns of an n x n grid (as displayed with row 0 on top).
Pixel RotatePixel(Pixel p, std::size_t n, int quarter_turns);

/// Exact rotation by multiples of 90 degrees. Requires a square map.
FeatureMap RotateExact(const FeatureMap& map, int quarter_turns);

enum class Resample { kNearest, kBilinear };

/// Rotation by an arbitrary angle about DefaultCenter on the same canvas.
/// Positive angles turn the content the same way as RotateExact. Output
/// pixels whose source falls outside the grid become 0 with mask false.
FeatureMap RotateResampled(const FeatureMap& map, double angle_degrees,
                           Resample mode = Resample::kNearest);

/// Zeroes tile (tile_row, tile_col) of a grid_div x grid_div tiling and
/// clears its mask.
FeatureMap Occlude(const FeatureMap& map, std::size_t tile_row,
                   std::size_t tile_col, std::size_t grid_div);

/// ||a - b||_2 / ||b||_2 over all values (0 when both are zero).
double RelativeL2(std::span<const double> a, std::span<const double> b);

}  // namespace prism

#endif  // PRISM_GRID_H_
