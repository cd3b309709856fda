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

#include <algorithm>
#include <cmath>

#include "prism/errors.h"

namespace prism {

PcfMode ParsePcfMode(std::string_view text) {
  if (text == "mean") return PcfMode::kMean;
  if (text == "median") return PcfMode::kMedian;
  if (text == "off") return PcfMode::kOff;
  throw ParameterError("pcf mode must be mean, median, or off");
}

std::string ToString(PcfMode mode) {
  switch (mode) {
    case PcfMode::kMean: return "mean";
    case PcfMode::kMedian: return "median";
    case PcfMode::kOff: return "off";
  }
  return "?";
}

PcfPartition RetainAll(std::size_t channels) {
  PcfPartition part;
  part.salience.assign(channels, 0.0);
  part.retained.resize(channels);
  for (std::size_t i = 0; i < channels; ++i) part.retained[i] = i;
  return part;
}

PcfPartition PartitionChannels(const FeatureMap& map, PcfMode mode) {
  PcfPartition part;
  part.salience = GlobalAveragePool(map);
  const std::size_t n = part.salience.size();

  if (mode == PcfMode::kOff) {
    part.retained.resize(n);
    for (std::size_t i = 0; i < n; ++i) part.retained[i] = i;
    return part;
  }

  if (mode == PcfMode::kMean) {
    double sum = 0.0;
    for (double s : part.salience) sum += std::abs(s);
    part.threshold = sum / static_cast<double>(n);
  } else {
    std::vector<double> magnitudes(n);
    for (std::size_t i = 0; i < n; ++i) magnitudes[i] = std::abs(part.salience[i]);
    std::sort(magnitudes.begin(), magnitudes.end());
    part.threshold = n % 2 == 1
                         ? magnitudes[n / 2]
                         : 0.5 * (magnitudes[n / 2 - 1] + magnitudes[n / 2]);
  }

  for (std::size_t i = 0; i < n; ++i) {
    if (std::abs(part.salience[i]) >= part.threshold) {
      part.retained.push_back(i);
    } else {
      part.bypassed.push_back(i);
    }
  }
  return part;
}

FeatureMap Gather(const FeatureMap& map, const PcfPartition& part) {
  if (part.retained.empty()) throw ShapeError("partition retains no channels");
  for (std::size_t c : part.retained) {
    if (c >= map.channels()) throw ShapeError("retained channel out of range");
  }
  FeatureMap out(map.height(), map.width(), part.retained.size());
  for (std::size_t v = 0; v < map.height(); ++v) {
    for (std::size_t u = 0; u < map.width(); ++u) {
      auto src = map.pixel(v, u);
      auto dst = out.pixel(v, u);
      for (std::size_t j = 0; j < part.retained.size(); ++j) {
        dst[j] = src[part.retained[j]];
      }
    }
  }
  std::copy(map.mask().begin(), map.mask().end(), out.mask().begin());
  return out;
}

FeatureMap Merge(const FeatureMap& branch_out, const FeatureMap& original,
                 const PcfPartition& part) {
  if (branch_out.channels() != part.retained.size()) {
    throw ShapeError("branch output must have one channel per retained channel");
  }
  if (branch_out.height() != original.height() ||
      branch_out.width() != original.width()) {
    throw ShapeError("branch output and original differ in spatial size");
  }
  for (std::size_t c : part.retained) {
    if (c >= original.channels()) throw ShapeError("retained channel out of range");
  }
  FeatureMap out = original;
  for (std::size_t v = 0; v < original.height(); ++v) {
    for (std::size_t u = 0; u < original.width(); ++u) {
      auto src = branch_out.pixel(v, u);
      auto dst = out.pixel(v, u);
      for (std::size_t j = 0; j < part.retained.size(); ++j) {
        dst[part.retained[j]] = src[j];
      }
    }
  }
  return out;
}

FeatureMap GatherPath(const FeatureMap& map, const PcfPartition& part,
                      const ChannelBranch& branch) {
  const FeatureMap out = branch(Gather(map, part), part.retained);
  return Merge(out, map, part);
}

FeatureMap MaskedEquivalent(const FeatureMap& map, const PcfPartition& part,
                            const ChannelBranch& branch) {
  FeatureMap zeroed = map;
  for (std::size_t v = 0; v < map.height(); ++v) {
    for (std::size_t u = 0; u < map.width(); ++u) {
      auto px = zeroed.pixel(v, u);
      for (std::size_t c : part.bypassed) px[c] = 0.0;
    }
  }
  std::vector<std::size_t> all(map.channels());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  const FeatureMap full = branch(zeroed, all);
  return Merge(Gather(full, part), map, part);
}

}  // namespace prism
