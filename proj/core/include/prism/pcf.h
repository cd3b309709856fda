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

// Partial channel filtering: hard routing of channels by mean salience.

#ifndef PRISM_PCF_H_
#define PRISM_PCF_H_

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "prism/grid.h"

namespace prism {

enum class PcfMode { kMean, kMedian, kOff };

/// Parses "mean", "median", or "off". Throws ParameterError otherwise.
PcfMode ParsePcfMode(std::string_view text);
std::string ToString(PcfMode mode);

struct PcfPartition {
  std::vector<double> salience;       // mu_i, one per channel
  double threshold = 0.0;             // mu
  std::vector<std::size_t> retained;  // ascending
  std::vector<std::size_t> bypassed;  // ascending

  std::size_t channels() const { return salience.size(); }
};

/// Salience is the per-channel global average. With kMean the threshold is
/// mean(|mu_i|) and channel i is retained when |mu_i| >= threshold, so the
/// channel of largest magnitude is always kept. kMedian uses the median of
/// |mu_i| instead. kOff retains every channel.
PcfPartition PartitionChannels(const FeatureMap& map,
                               PcfMode mode = PcfMode::kMean);

/// Partition with every channel retained.
PcfPartition RetainAll(std::size_t channels);

/// Copy of the retained channels, in ascending channel order.
FeatureMap Gather(const FeatureMap& map, const PcfPartition& part);

/// Channel i of the result is branch_out's channel rank(i) when i is
/// retained and original's channel i otherwise.
FeatureMap Merge(const FeatureMap& branch_out, const FeatureMap& original,
                 const PcfPartition& part);

/// A per-channel branch. `channels` names the original channel index of
/// each input channel; the output has the same channel count as the input.
using ChannelBranch = std::function<FeatureMap(
    const FeatureMap& input, std::span<const std::size_t> channels)>;

/// gather -> branch -> merge.
FeatureMap GatherPath(const FeatureMap& map, const PcfPartition& part,
                      const ChannelBranch& branch);

/// Runs the branch at full width with bypassed channels zeroed, then keeps
/// the retained outputs. Equals GatherPath for branches that ignore zeroed
/// channels.
FeatureMap MaskedEquivalent(const FeatureMap& map, const PcfPartition& part,
                            const ChannelBranch& branch);

}  // namespace prism

#endif  // PRISM_PCF_H_
