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

#include <cmath>
#include <optional>
#include <thread>
#include <vector>

#include <gmock/gmock.h>
#include <gtest/gtest.h>

#include "prism/errors.h"

namespace {

using ::prism::DefaultCenter;
using ::prism::Direction;
using ::prism::GridCenter;
using ::prism::Pixel;
using ::prism::RingPartition;

RingPartition Symmetric(std::size_t n, double delta_r) {
  return RingPartition::Build(n, n, DefaultCenter(n, n), delta_r);
}

TEST(RingPartitionTest, HistogramEightByEight) {
  const auto part = Symmetric(8, 1.0);
  std::vector<std::size_t> sizes;
  for (const auto& ring : part.rings()) sizes.push_back(ring.length());
  EXPECT_THAT(sizes, ::testing::ElementsAre(4, 8, 20, 20, 12));
  EXPECT_EQ(part.max_ring(), 4);
}

TEST(RingPartitionTest, ThreeByThreeLoops) {
  const auto part = Symmetric(3, 1.0);
  ASSERT_EQ(part.ring_count(), 2u);
  EXPECT_THAT(part.ring(0).pixels, ::testing::ElementsAre(Pixel{1, 1}));
  EXPECT_EQ(part.ring(1).direction, Direction::kClockwise);
  EXPECT_THAT(part.ring(1).pixels,
              ::testing::ElementsAre(Pixel{0, 2}, Pixel{1, 2}, Pixel{2, 2},
                                     Pixel{2, 1}, Pixel{2, 0}, Pixel{1, 0},
                                     Pixel{0, 0}, Pixel{0, 1}));
  EXPECT_EQ(prism::CyclicShiftOf(part, 1, 1), std::optional<std::size_t>(2));
  EXPECT_EQ(prism::CyclicShiftOf(part, 2, 1), std::optional<std::size_t>(4));
  EXPECT_EQ(prism::CyclicShiftOf(part, 0, 1), std::optional<std::size_t>(0));
}

TEST(RingPartitionTest, EveryPixelInExactlyOneRing) {
  for (auto [h, w] : {std::pair<std::size_t, std::size_t>{1, 1}, {5, 9}, {16, 16}, {7, 3}}) {
    for (double dr : {0.5, 1.0, 2.5}) {
      const auto part =
          RingPartition::Build(h, w, DefaultCenter(h, w), dr);
      std::vector<int> hits(h * w, 0);
      for (const auto& ring : part.rings()) {
        for (Pixel p : ring.pixels) {
          ++hits[p.v * w + p.u];
          EXPECT_EQ(part.ring_of(p), ring.index);
          const double dist = std::hypot(p.u - (w - 1) / 2.0, p.v - (h - 1) / 2.0);
          EXPECT_EQ(static_cast<int>(std::floor(dist / dr)), ring.index);
        }
        EXPECT_EQ(ring.direction, ring.index % 2 == 0 ? Direction::kCounterclockwise
                                                      : Direction::kClockwise);
      }
      EXPECT_THAT(hits, ::testing::Each(1));
    }
  }
}

TEST(RingPartitionTest, LoopOrientationFollowsParity) {
  const auto part = Symmetric(12, 1.0);
  for (const auto& ring : part.rings()) {
    if (ring.length() < 3) continue;
    const double area = prism::LoopSignedArea(ring);
    if (ring.index % 2 == 0) {
      EXPECT_GT(area, 0.0) << ring.index;
    } else {
      EXPECT_LT(area, 0.0) << ring.index;
    }
  }
}

TEST(RingPartitionTest, EmptyRingsAreKept) {
  // Center far in a corner with a fine spacing leaves gaps between rings.
  const auto part = RingPartition::Build(2, 2, GridCenter{0, 0}, 0.25);
  std::size_t total = 0;
  for (const auto& ring : part.rings()) total += ring.length();
  EXPECT_EQ(total, 4u);
  EXPECT_EQ(part.ring_count(), static_cast<std::size_t>(std::floor(std::sqrt(2.0) / 0.25)) + 1);
  EXPECT_EQ(part.ring(1).length(), 0u);
}

TEST(RingPartitionTest, InvalidArguments) {
  EXPECT_THROW(Symmetric(4, 0.0), prism::ParameterError);
  EXPECT_THROW(Symmetric(4, -1.0), prism::ParameterError);
  EXPECT_THROW(Symmetric(4, std::nan("")), prism::ParameterError);
  EXPECT_THROW(RingPartition::Build(0, 3, GridCenter{}, 1.0), prism::ShapeError);
  EXPECT_THROW(Symmetric(4, 1.0).ring(99), prism::ParameterError);
}

TEST(AngleLessTest, OrdersFromNegativePi) {
  // (-1, 0) sits at -pi and comes first; (0, -1) at -pi/2; (1, 0) at 0.
  EXPECT_TRUE(prism::AngleLess(-1, 0, 0, -1));
  EXPECT_TRUE(prism::AngleLess(0, -1, 1, 0));
  EXPECT_TRUE(prism::AngleLess(1, 0, 0, 1));
  EXPECT_TRUE(prism::AngleLess(0, 1, -1, 0.5));
  EXPECT_FALSE(prism::AngleLess(1, 0, 1, 0));
  // Same angle: radius breaks the tie.
  EXPECT_TRUE(prism::AngleLess(1, 1, 2, 2));
}

// Independent check: rotate every loop pixel and search for the shift.
std::optional<std::size_t> BruteShift(const RingPartition& part, int turns, int r) {
  const auto& px = part.ring(r).pixels;
  const std::size_t n = part.width();
  const std::size_t len = px.size();
  if (len == 0) return 0;
  for (std::size_t s = 0; s < len; ++s) {
    bool ok = true;
    for (std::size_t k = 0; k < len && ok; ++k) {
      ok = prism::RotatePixel(px[k], n, turns) == px[(k + s) % len];
    }
    if (ok) return s;
  }
  return std::nullopt;
}

TEST(CyclicShiftTest, MatchesBruteForceOnSymmetricGrids) {
  for (std::size_t n = 2; n <= 14; ++n) {
    for (double dr : {0.5, 1.0}) {
      const auto part = Symmetric(n, dr);
      for (int turns = 1; turns <= 3; ++turns) {
        for (int r = 0; r <= part.max_ring(); ++r) {
          const auto brute = BruteShift(part, turns, r);
          ASSERT_TRUE(brute.has_value()) << n << " " << dr << " " << r;
          EXPECT_EQ(prism::CyclicShiftOf(part, turns, r), brute);
          const std::size_t len = part.ring(r).length();
          if (len > 0) {
            // Shifts compose: t quarter turns move by t times one turn.
            EXPECT_EQ(*brute, turns * *BruteShift(part, 1, r) % len);
          }
        }
      }
    }
  }
}

TEST(CyclicShiftTest, CenterPixelInsideLoopBreaksShift) {
  // delta_r = 2 on 5x5 puts the center and its neighbours in ring 0.
  const auto part = Symmetric(5, 2.0);
  EXPECT_EQ(prism::CyclicShiftOf(part, 1, 0), std::nullopt);
  EXPECT_EQ(BruteShift(part, 1, 0), std::nullopt);
}

TEST(CyclicShiftTest, OffCenterAndShapeErrors) {
  const auto off = RingPartition::Build(6, 6, GridCenter{1.0, 2.0}, 1.0);
  bool any_missing = false;
  for (int r = 0; r <= off.max_ring(); ++r) {
    any_missing |= !prism::CyclicShiftOf(off, 1, r).has_value();
  }
  EXPECT_TRUE(any_missing);
  EXPECT_THROW(prism::CyclicShiftOf(RingPartition::Build(4, 5, DefaultCenter(4, 5), 1.0), 1, 0),
               prism::ShapeError);
  EXPECT_THROW(prism::CyclicShiftOf(Symmetric(4, 1.0), 1, 50), prism::ParameterError);
}

TEST(RingTokensTest, ProjectsLoopPixels) {
  prism::FeatureMap map = prism::MakeMap(3, 3, 2, prism::Seed{1});
  map.set_valid(0, 2, false);  // (u, v) = (2, 0)
  const auto part = Symmetric(3, 1.0);
  const auto seq = prism::RingTokens(map, part, 1, prism::Matrix::Identity(2));
  ASSERT_EQ(seq.length(), 8u);
  EXPECT_EQ(seq.tokens(0, 0), map.at(2, 0, 0));
  EXPECT_EQ(seq.tokens(4, 1), map.at(0, 2, 1));
  EXPECT_EQ(seq.mask[4], 0);
  EXPECT_THROW(prism::RingTokens(map, part, 2, prism::Matrix::Identity(2)),
               prism::ParameterError);
  EXPECT_THROW(prism::RingTokens(map, part, 1, prism::Matrix(2, 3)), prism::ShapeError);
}

TEST(RingPartitionCacheTest, ReusesAndIsThreadSafe) {
  prism::RingPartitionCache cache;
  const auto a = cache.Get(8, 8, DefaultCenter(8, 8), 1.0);
  const auto b = cache.Get(8, 8, DefaultCenter(8, 8), 1.0);
  EXPECT_EQ(a.get(), b.get());
  std::vector<std::thread> threads;
  for (int i = 0; i < 4; ++i) {
    threads.emplace_back([&cache, i] { cache.Get(10 + i % 2, 10, GridCenter{4, 4}, 1.0); });
  }
  for (auto& t : threads) t.join();
  EXPECT_EQ(cache.size(), 3u);
}

}  // namespace
