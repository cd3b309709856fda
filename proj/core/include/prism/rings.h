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

// Concentric-ring partition of a grid.
//
// Pixel (u, v) belongs to ring floor(||(u - c_x, v - c_y)|| / delta_r). Each
// ring is turned into a closed loop by sorting its pixels on the angle
// atan2(v - c_y, u - c_x) in [-pi, pi), ties broken by radius. Even rings are
// traversed in that (counterclockwise) order and odd rings in reverse
// (clockwise). Angles are compared exactly with half-plane tests and cross
// products rather than through atan2, so a quarter-turn of a square grid
// about its symmetric center maps every loop onto itself with a pure cyclic
// shift.

#ifndef PRISM_RINGS_H_
#define PRISM_RINGS_H_

#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <tuple>
#include <vector>

#include "prism/grid.h"
#include "prism/linalg.h"
#include "prism/ssm.h"

namespace prism {

enum class Direction { kCounterclockwise, kClockwise };

struct RingLoop {
  int index = 0;
  Direction direction = Direction::kCounterclockwise;
  std::vector<Pixel> pixels;  // sigma_r, length L_r

  std::size_t length() const { return pixels.size(); }
};

class RingPartition {
 public:
  /// Throws ParameterError if delta_r <= 0 (or is not finite) and ShapeError
  /// for a zero dimension.
  static RingPartition Build(std::size_t height, std::size_t width,
                             GridCenter center, double delta_r);

  std::size_t height() const { return height_; }
  std::size_t width() const { return width_; }
  GridCenter center() const { return center_; }
  double delta_r() const { return delta_r_; }

  int ring_of(Pixel p) const { return ring_index_[p.v * width_ + p.u]; }
  const std::vector<int>& ring_index() const { return ring_index_; }

  /// R* + 1 loops, innermost first. Empty rings are kept with length 0.
  const std::vector<RingLoop>& rings() const { return rings_; }
  std::size_t ring_count() const { return rings_.size(); }
  /// R*.
  int max_ring() const { return static_cast<int>(rings_.size()) - 1; }
  const RingLoop& ring(int r) const;

 private:
  std::size_t height_ = 0;
  std::size_t width_ = 0;
  GridCenter center_;
  double delta_r_ = 1.0;
  std::vector<int> ring_index_;
  std::vector<RingLoop> rings_;
};

/// true when `a` precedes `b` in counterclockwise loop order around the
/// origin (angle ascending from -pi, then radius ascending).
bool AngleLess(double ax, double ay, double bx, double by);

/// x_{r,k} = projector * X[sigma_r(k)]. Throws ParameterError if r > R*.
TokenSequence RingTokens(const FeatureMap& map, const RingPartition& part,
                         int r, const Matrix& projector);

/// Shift s such that rotating the grid by `quarter_turns` moves the k-th
/// pixel of loop r onto position (k + s) mod L_r of the same loop. Returns
/// nullopt when no pure cyclic shift exists: with a non-symmetric center,
/// or when a loop of length > 1 contains the center pixel itself (odd n and
/// delta_r > 1). Throws ShapeError for non-square grids and ParameterError for
/// an out-of-range ring.
std::optional<std::size_t> CyclicShiftOf(const RingPartition& part,
                                         int quarter_turns, int r);

/// Signed area of the loop polygon (positive for counterclockwise in the
/// (u, v) frame).
double LoopSignedArea(const RingLoop& loop);

/// Memoizes partitions by geometry. Safe for concurrent use.
class RingPartitionCache {
 public:
  std::shared_ptr<const RingPartition> Get(std::size_t height,
                                           std::size_t width,
                                           GridCenter center, double delta_r);
  std::size_t size() const;

 private:
  using Key = std::tuple<std::size_t, std::size_t, double, double, double>;
  mutable std::mutex mutex_;
  std::map<Key, std::shared_ptr<const RingPartition>> entries_;
};

/// Process-wide cache used by the PRISM block.
RingPartitionCache& GlobalRingCache();

}  // namespace prism

#endif  // PRISM_RINGS_H_
