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

#include "prism/pcf.h"

#include <cmath>
#include <span>
#include <vector>

#include <gmock/gmock.h>
#include <gtest/gtest.h>

#include "prism/errors.h"

namespace {

using ::prism::FeatureMap;
using ::prism::PcfMode;
using ::testing::ElementsAre;

FeatureMap OnePixel(const std::vector<double>& channels) {
  FeatureMap map(1, 1, channels.size());
  std::copy(channels.begin(), channels.end(), map.values().begin());
  return map;
}

// Each output channel mixes the retained inputs with weights keyed by their
// original index, so zeroed channels contribute nothing.
FeatureMap MixBranch(const FeatureMap& in, std::span<const std::size_t> channels) {
  FeatureMap out(in.height(), in.width(), in.channels());
  for (std::size_t v = 0; v < in.height(); ++v) {
    for (std::size_t u = 0; u < in.width(); ++u) {
      for (std::size_t o = 0; o < in.channels(); ++o) {
        double acc = 0.0;
        for (std::size_t i = 0; i < in.channels(); ++i) {
          acc += std::sin(1.0 + channels[o] * 7.0 + channels[i]) * in.at(v, u, i);
        }
        out.at(v, u, o) = std::tanh(acc);
      }
    }
  }
  return out;
}

TEST(PcfModeTest, Parse) {
  EXPECT_EQ(prism::ParsePcfMode("mean"), PcfMode::kMean);
  EXPECT_EQ(prism::ParsePcfMode("median"), PcfMode::kMedian);
  EXPECT_EQ(prism::ParsePcfMode("off"), PcfMode::kOff);
  EXPECT_THROW(prism::ParsePcfMode("max"), prism::ParameterError);
  EXPECT_EQ(prism::ToString(PcfMode::kMedian), "median");
}

TEST(PartitionTest, MeanThresholdExample) {
  const auto part = prism::PartitionChannels(OnePixel({0.5, -0.1, 0.2, 0.0}));
  EXPECT_DOUBLE_EQ(part.threshold, 0.2);
  EXPECT_THAT(part.retained, ElementsAre(0, 2));
  EXPECT_THAT(part.bypassed, ElementsAre(1, 3));
}

TEST(PartitionTest, MagnitudeDecides) {
  const auto part = prism::PartitionChannels(OnePixel({-3.0, 1.0, 0.5, 2.5}));
  EXPECT_DOUBLE_EQ(part.threshold, 1.75);
  EXPECT_THAT(part.retained, ElementsAre(0, 3));
}

TEST(PartitionTest, MedianAndOff) {
  const auto median =
      prism::PartitionChannels(OnePixel({0.5, -0.1, 0.2, 0.0}), PcfMode::kMedian);
  EXPECT_DOUBLE_EQ(median.threshold, 0.15);
  EXPECT_THAT(median.retained, ElementsAre(0, 2));
  const auto odd =
      prism::PartitionChannels(OnePixel({4, 1, -2}), PcfMode::kMedian);
  EXPECT_THAT(odd.retained, ElementsAre(0, 2));

  const auto off = prism::PartitionChannels(OnePixel({0.0, 0.0, 9.0}), PcfMode::kOff);
  EXPECT_THAT(off.retained, ElementsAre(0, 1, 2));
  EXPECT_TRUE(off.bypassed.empty());
}

TEST(PartitionTest, LargestChannelAlwaysRetained) {
  for (std::uint64_t s = 0; s < 50; ++s) {
    const FeatureMap map = prism::MakeMap(3, 3, 1 + s % 9, prism::Seed{s});
    for (PcfMode mode : {PcfMode::kMean, PcfMode::kMedian}) {
      const auto part = prism::PartitionChannels(map, mode);
      ASSERT_FALSE(part.retained.empty());
      EXPECT_EQ(part.retained.size() + part.bypassed.size(), map.channels());
      std::size_t best = 0;
      for (std::size_t c = 1; c < part.channels(); ++c) {
        if (std::abs(part.salience[c]) > std::abs(part.salience[best])) best = c;
      }
      EXPECT_THAT(part.retained, ::testing::Contains(best));
    }
  }
}

TEST(PartitionTest, AllZeroRetainsEverything) {
  const auto part = prism::PartitionChannels(prism::MakeMap(2, 2, 3, 0.0));
  EXPECT_THAT(part.retained, ElementsAre(0, 1, 2));
}

TEST(GatherMergeTest, RoundTrip) {
  FeatureMap map = prism::MakeMap(2, 3, 4, prism::Seed{3});
  map.set_valid(1, 1, false);
  prism::PcfPartition part;
  part.salience.assign(4, 0.0);
  part.retained = {1, 3};
  part.bypassed = {0, 2};
  const FeatureMap gathered = prism::Gather(map, part);
  EXPECT_EQ(gathered.channels(), 2u);
  EXPECT_EQ(gathered.at(1, 2, 1), map.at(1, 2, 3));
  EXPECT_FALSE(gathered.valid(1, 1));
  EXPECT_EQ(prism::Merge(gathered, map, part), map);

  EXPECT_THROW(prism::Merge(map, map, part), prism::ShapeError);
  prism::PcfPartition empty;
  EXPECT_THROW(prism::Gather(map, empty), prism::ShapeError);
  part.retained = {7};
  EXPECT_THROW(prism::Gather(map, part), prism::ShapeError);
}

TEST(GatherPathTest, BypassedChannelsPassThrough) {
  const FeatureMap map = prism::MakeMap(3, 3, 5, prism::Seed{4});
  const auto part = prism::PartitionChannels(map);
  const FeatureMap out = prism::GatherPath(map, part, MixBranch);
  for (std::size_t c : part.bypassed) {
    for (std::size_t v = 0; v < 3; ++v) {
      for (std::size_t u = 0; u < 3; ++u) EXPECT_EQ(out.at(v, u, c), map.at(v, u, c));
    }
  }
}

TEST(GatherPathTest, MatchesMaskedEquivalent) {
  for (std::uint64_t s = 0; s < 30; ++s) {
    const FeatureMap map = prism::MakeMap(4, 5, 2 + s % 7, prism::Seed{s});
    for (PcfMode mode : {PcfMode::kMean, PcfMode::kMedian, PcfMode::kOff}) {
      const auto part = prism::PartitionChannels(map, mode);
      const auto a = prism::GatherPath(map, part, MixBranch);
      const auto b = prism::MaskedEquivalent(map, part, MixBranch);
      for (std::size_t i = 0; i < a.values().size(); ++i) {
        EXPECT_NEAR(a.values()[i], b.values()[i], 1e-12);
      }
    }
  }
}

}  // namespace
