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

#include "prism/experiments.h"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <vector>

#include <gmock/gmock.h>
#include <gtest/gtest.h>

#include "prism/errors.h"
#include "prism/parallel.h"
#include "prism/synthetic.h"

namespace {

using ::prism::Method;
using ::prism::ModelOptions;

ModelOptions SmallModel() {
  ModelOptions m;
  m.channels = 4;
  m.token_width = 4;
  m.state_width = 3;
  return m;
}

TEST(ParseMethodsTest, ListsAndErrors) {
  const auto methods = prism::ParseMethods("s1,ring,S13");
  ASSERT_EQ(methods.size(), 3u);
  EXPECT_EQ(methods[0].name(), "s1");
  EXPECT_TRUE(methods[1].ring);
  EXPECT_EQ(methods[1].name(), "ring");
  EXPECT_EQ(methods[2].name(), "s13");
  EXPECT_THROW(prism::ParseMethods(""), prism::ParameterError);
  EXPECT_THROW(prism::ParseMethods("s1,"), prism::ParameterError);
  EXPECT_THROW(prism::ParseMethods("s1,s99"), prism::ParameterError);
}

TEST(SyntheticTest, SmoothImageSpansUnitRange) {
  const auto image = prism::SmoothImage(16, 12, 3, prism::Seed{1});
  for (std::size_t c = 0; c < 3; ++c) {
    double lo = 1e9, hi = -1e9;
    for (std::size_t v = 0; v < 16; ++v) {
      for (std::size_t u = 0; u < 12; ++u) {
        lo = std::min(lo, image.at(v, u, c));
        hi = std::max(hi, image.at(v, u, c));
      }
    }
    EXPECT_NEAR(lo, -1.0, 1e-12);
    EXPECT_NEAR(hi, 1.0, 1e-12);
  }
  EXPECT_EQ(image, prism::SmoothImage(16, 12, 3, prism::Seed{1}));
}

TEST(SyntheticTest, KillChannels) {
  const auto image = prism::SmoothImage(4, 4, 4, prism::Seed{2});
  const auto dead = prism::KillChannels(image, 2);
  for (std::size_t i = 0; i < 16; ++i) {
    EXPECT_EQ(dead.values()[i * 4 + 0], image.values()[i * 4 + 0]);
    EXPECT_EQ(dead.values()[i * 4 + 3], 0.0);
  }
  EXPECT_THROW(prism::KillChannels(image, 5), prism::ParameterError);
}

TEST(ParallelForTest, CoversRangeAndRethrows) {
  std::vector<std::atomic<int>> hits(100);
  prism::ParallelFor(100, [&](std::size_t i) { hits[i]++; });
  for (auto& h : hits) EXPECT_EQ(h.load(), 1);
  EXPECT_THROW(prism::ParallelFor(10,
                                  [](std::size_t i) {
                                    if (i == 7) throw std::runtime_error("boom");
                                  }),
               std::runtime_error);
  prism::ParallelFor(0, [](std::size_t) { FAIL(); });
  EXPECT_GE(prism::WorkerCount(), 1u);
}

TEST(OcclusionTileTest, FinerTilesNestInCoarser) {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const auto [r2, c2] = prism::OcclusionTile(seed, 2);
    const auto [r4, c4] = prism::OcclusionTile(seed, 4);
    const auto [r1, c1] = prism::OcclusionTile(seed, 1);
    EXPECT_EQ(r1, 0u);
    EXPECT_EQ(c1, 0u);
    EXPECT_LT(r4, 4u);
    EXPECT_EQ(r4 / 2, r2);
    EXPECT_EQ(c4 / 2, c2);
  }
}

TEST(RotationStressTest, RowsAndIdentityAngle) {
  prism::RotationStressOptions options;
  options.size = 8;
  options.angles = {0, 90};
  options.seeds = 3;
  options.model = SmallModel();
  options.model.memoryless_angular = true;
  const auto result = prism::RotationStress(options);
  ASSERT_EQ(result.rows.size(), 3u * 2 * 2);
  // (seed, angle, method) ordering.
  EXPECT_EQ(result.rows[0].method, "s1");
  EXPECT_EQ(result.rows[1].method, "ring");
  EXPECT_EQ(result.rows[2].setting, 90.0);
  EXPECT_EQ(result.rows[4].seed, 1u);
  for (const auto& row : result.rows) {
    if (row.setting == 0.0) EXPECT_EQ(row.deviation, 0.0);
    if (row.setting == 90.0 && row.method == "ring") EXPECT_LE(row.deviation, 1e-10);
    if (row.setting == 90.0 && row.method == "s1") EXPECT_GT(row.deviation, 0.0);
  }
  ASSERT_EQ(result.summary.size(), 2u);
  EXPECT_EQ(result.summary[1].reference, "s1");
  EXPECT_EQ(result.summary[1].stats.win_fraction, 1.0);
}

TEST(RotationStressTest, DeterministicAcrossRuns) {
  prism::RotationStressOptions options;
  options.size = 8;
  options.angles = {30};
  options.seeds = 4;
  options.methods = prism::ParseMethods("s3,s13,ring");
  options.model = SmallModel();
  const auto a = prism::RotationStress(options);
  const auto b = prism::RotationStress(options);
  ASSERT_EQ(a.rows.size(), b.rows.size());
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    EXPECT_EQ(a.rows[i].deviation, b.rows[i].deviation);
  }
  options.angles.clear();
  EXPECT_THROW(prism::RotationStress(options), prism::ParameterError);
}

TEST(OcclusionStressTest, RowsAndSummaries) {
  prism::OcclusionStressOptions options;
  options.size = 8;
  options.grid_divs = {4, 2};
  options.seeds = 2;
  options.model = SmallModel();
  const auto result = prism::OcclusionStress(options);
  EXPECT_EQ(result.rows.size(), 2u * 2 * 2);
  for (const auto& row : result.rows) EXPECT_GT(row.deviation, 0.0);
  ASSERT_EQ(result.summary.size(), 3u);
  EXPECT_EQ(result.summary.back().reference, "ring@grid_div=2");
  EXPECT_EQ(result.summary.back().setting, 4.0);

  options.grid_divs = {3};
  EXPECT_THROW(prism::OcclusionStress(options), prism::ParameterError);
  options.grid_divs = {0};
  EXPECT_THROW(prism::OcclusionStress(options), prism::ParameterError);
}

TEST(MethodDeviationTest, ZeroForIdenticalInputs) {
  const auto models = prism::StressModels::Build(SmallModel());
  const auto image = prism::SmoothImage(6, 6, 4, prism::Seed{3});
  for (const auto& m : prism::ParseMethods("s1,s21,ring")) {
    EXPECT_EQ(prism::MethodDeviation(m, models, image, image), 0.0);
  }
}

TEST(ScanBenchTest, RowsTokensAndMacs) {
  prism::ScanBenchOptions options;
  options.methods = prism::ParseMethods("s1,s19,ring");
  options.size = 8;
  options.seeds = 2;
  options.model = SmallModel();
  const auto rows = prism::ScanBench(options);
  ASSERT_EQ(rows.size(), 6u);
  EXPECT_EQ(rows[0].tokens, 64u);
  EXPECT_EQ(rows[1].tokens, 256u);
  EXPECT_EQ(rows[2].tokens, 64u + 5u);  // 5 rings on 8x8
  EXPECT_EQ(rows[1].macs, 4 * rows[0].macs);
  for (const auto& row : rows) EXPECT_GT(row.wall_ns_median, 0.0);
  EXPECT_EQ(rows[3].seed, 1u);
}

TEST(ScanBenchTest, ChannelFilterCutsRingMacs) {
  prism::ScanBenchOptions options;
  options.methods = prism::ParseMethods("ring");
  options.size = 16;
  options.seeds = 1;
  options.model.channels = 16;
  options.dead_channels = 8;
  const auto off = prism::ScanBench(options);
  options.model.pcf = prism::PcfMode::kMean;
  const auto mean = prism::ScanBench(options);
  EXPECT_LT(mean[0].macs, off[0].macs);
}

TEST(ScanBenchTest, InvalidOptions) {
  prism::ScanBenchOptions options;
  options.size = 0;
  EXPECT_THROW(prism::ScanBench(options), prism::ParameterError);
  options.size = 4;
  options.dead_channels = 99;
  EXPECT_THROW(prism::ScanBench(options), prism::ParameterError);
}

TEST(MedianWallNsTest, CallsAndMedian) {
  int calls = 0;
  EXPECT_GE(prism::MedianWallNs(5, [&] { ++calls; }), 0.0);
  EXPECT_EQ(calls, 5);
  EXPECT_EQ(prism::MedianWallNs(0, [] {}), 0.0);
}

}  // namespace
