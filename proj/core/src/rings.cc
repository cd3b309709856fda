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

#include "prism/rings.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "prism/errors.h"

namespace prism {
namespace {

// 0 for angles in [-pi, 0), 1 for [0, pi). The origin counts as angle 0.
int HalfPlane(double x, double y) {
  return (y < 0.0 || (y == 0.0 && x < 0.0)) ? 0 : 1;
}

}  // namespace

bool AngleLess(double ax, double ay, double bx, double by) {
  const int ha = HalfPlane(ax, ay);
  const int hb = HalfPlane(bx, by);
  if (ha != hb) return ha < hb;
  const double cross = ax * by - ay * bx;
  if (cross != 0.0) return cross > 0.0;
  // Same ray (or one of them is the origin): nearer first.
  return ax * ax + ay * ay < bx * bx + by * by;
}

RingPartition RingPartition::Build(std::size_t height, std::size_t width,
                                   GridCenter center, double delta_r) {
  if (!(delta_r > 0.0) || !std::isfinite(delta_r)) {
    throw ParameterError("delta_r must be a positive finite number");
  }
  if (height == 0 || width == 0) throw ShapeError("ring grid must be nonempty");
  if (!std::isfinite(center.x) || !std::isfinite(center.y)) {
    throw ParameterError("ring center must be finite");
  }

  RingPartition part;
  part.height_ = height;
  part.width_ = width;
  part.center_ = center;
  part.delta_r_ = delta_r;
  part.ring_index_.resize(height * width);

  int max_ring = 0;
  for (std::size_t v = 0; v < height; ++v) {
    for (std::size_t u = 0; u < width; ++u) {
      const double dx = static_cast<double>(u) - center.x;
      const double dy = static_cast<double>(v) - center.y;
      const int r = static_cast<int>(std::floor(std::sqrt(dx * dx + dy * dy) / delta_r));
      part.ring_index_[v * width + u] = r;
      max_ring = std::max(max_ring, r);
    }
  }

  part.rings_.resize(static_cast<std::size_t>(max_ring) + 1);
  for (int r = 0; r <= max_ring; ++r) {
    part.rings_[r].index = r;
    part.rings_[r].direction =
        r % 2 == 1 ? Direction::kClockwise : Direction::kCounterclockwise;
  }
  for (std::size_t v = 0; v < height; ++v) {
    for (std::size_t u = 0; u < width; ++u) {
      part.rings_[part.ring_index_[v * width + u]].pixels.push_back(
          {static_cast<int>(u), static_cast<int>(v)});
    }
  }

  for (RingLoop& loop : part.rings_) {
    std::sort(loop.pixels.begin(), loop.pixels.end(), [&](Pixel a, Pixel b) {
      const double ax = a.u - center.x, ay = a.v - center.y;
      const double bx = b.u - center.x, by = b.v - center.y;
      if (AngleLess(ax, ay, bx, by)) return true;
      if (AngleLess(bx, by, ax, ay)) return false;
      return std::tie(a.v, a.u) < std::tie(b.v, b.u);
    });
    if (loop.direction == Direction::kClockwise) {
      std::reverse(loop.pixels.begin(), loop.pixels.end());
    }
  }
  return part;
}

const RingLoop& RingPartition::ring(int r) const {
  if (r < 0 || r > max_ring()) {
    throw ParameterError("ring index " + std::to_string(r) + " out of range 0.." +
                         std::to_string(max_ring()));
  }
  return rings_[r];
}

TokenSequence RingTokens(const FeatureMap& map, const RingPartition& part, int r,
                         const Matrix& projector) {
  if (map.height() != part.height() || map.width() != part.width()) {
    throw ShapeError("ring partition does not match the map");
  }
  if (projector.cols() != map.channels()) {
    throw ShapeError("projector must be m x C");
  }
  const RingLoop& loop = part.ring(r);
  TokenSequence seq(loop.length(), projector.rows());
  for (std::size_t k = 0; k < loop.length(); ++k) {
    MatVec(projector, map.pixel(loop.pixels[k]), seq.tokens.row(k));
    seq.mask[k] = map.valid(loop.pixels[k]) ? 1 : 0;
  }
  return seq;
}

std::optional<std::size_t> CyclicShiftOf(const RingPartition& part,
                                         int quarter_turns, int r) {
  if (part.height() != part.width()) {
    throw ShapeError("cyclic shifts are defined for square grids only");
  }
  const RingLoop& loop = part.ring(r);
  const std::size_t len = loop.length();
  if (len == 0) return 0;

  const std::size_t n = part.width();
  std::vector<long> position(n * n, -1);
  for (std::size_t k = 0; k < len; ++k) {
    position[loop.pixels[k].v * n + loop.pixels[k].u] = static_cast<long>(k);
  }
  auto position_of = [&](Pixel p) { return position[p.v * n + p.u]; };

  const long first = position_of(RotatePixel(loop.pixels[0], n, quarter_turns));
  if (first < 0) return std::nullopt;
  const auto shift = static_cast<std::size_t>(first);
  for (std::size_t k = 0; k < len; ++k) {
    const Pixel moved = RotatePixel(loop.pixels[k], n, quarter_turns);
    if (!(moved == loop.pixels[(k + shift) % len])) return std::nullopt;
  }
  return shift;
}

double LoopSignedArea(const RingLoop& loop) {
  const std::size_t len = loop.length();
  double twice_area = 0.0;
  for (std::size_t k = 0; k < len; ++k) {
    const Pixel a = loop.pixels[k];
    const Pixel b = loop.pixels[(k + 1) % len];
    twice_area += static_cast<double>(a.u) * b.v - static_cast<double>(b.u) * a.v;
  }
  return twice_area / 2.0;
}

std::shared_ptr<const RingPartition> RingPartitionCache::Get(
    std::size_t height, std::size_t width, GridCenter center, double delta_r) {
  const Key key{height, width, center.x, center.y, delta_r};
  {
    std::lock_guard lock(mutex_);
    if (auto it = entries_.find(key); it != entries_.end()) return it->second;
  }
  auto built = std::make_shared<const RingPartition>(
      RingPartition::Build(height, width, center, delta_r));
  std::lock_guard lock(mutex_);
  return entries_.emplace(key, std::move(built)).first->second;
}

std::size_t RingPartitionCache::size() const {
  std::lock_guard lock(mutex_);
  return entries_.size();
}

RingPartitionCache& GlobalRingCache() {
  static RingPartitionCache cache;
  return cache;
}

}  // namespace prism
