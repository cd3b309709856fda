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

// Four-stage toy backbone built from PRISM blocks, forward pass only.

#ifndef PRISM_BACKBONE_H_
#define PRISM_BACKBONE_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "prism/grid.h"
#include "prism/linalg.h"
#include "prism/pcf.h"
#include "prism/prism_block.h"

namespace prism {

struct BackboneConfig {
  std::vector<std::size_t> blocks{1, 1, 1, 1};
  std::vector<std::size_t> channels{8, 16, 32, 64};
  std::size_t patchify = 4;
  std::size_t downsample = 2;
  std::size_t classes = 10;
  std::size_t state_width = 4;
  double delta_r = 1.0;
  PcfMode pcf = PcfMode::kMean;
  std::uint64_t seed = 42;
  bool ffn = false;
  bool memoryless_angular = false;
};

/// Parses flat `key = value` text. Recognized keys: stages.blocks,
/// stages.channels, patchify, downsample, classes, state_width, delta_r,
/// pcf, seed, ffn, angular (default|memoryless). '#' starts a comment.
/// Unknown keys and malformed values raise FormatError.
BackboneConfig ParseBackboneConfig(std::string_view text);
BackboneConfig LoadBackboneConfig(const std::filesystem::path& path);
std::string FormatBackboneConfig(const BackboneConfig& config);

struct Backbone {
  BackboneConfig config;
  std::size_t in_channels = 0;
  Matrix patch_projection;               // C_1 x (p*p*C_in)
  std::vector<std::vector<PrismBlock>> stages;
  std::vector<Matrix> downsample_projection;  // C_{i+1} x C_i
  Matrix head;                           // classes x C_4

  /// Throws ParameterError unless the config has four stages with positive
  /// sizes.
  static Backbone Build(const BackboneConfig& config, std::size_t in_channels);
};

struct StageTrace {
  std::size_t height = 0;
  std::size_t width = 0;
  std::size_t channels = 0;
  std::vector<double> pooled;               // GAP of the stage output
  std::vector<std::size_t> retained;        // C' per block
};

struct BackboneOutput {
  std::vector<double> scores;
  std::vector<StageTrace> stages;
};

/// patchify -> 4 stages (2x2 mean pool + channel projection between) ->
/// GAP -> linear head. Throws ShapeError when the input dims are not
/// divisible by the patch size and every downsample step.
BackboneOutput BackboneForward(const FeatureMap& image, const Backbone& net);
BackboneOutput BackboneForward(const FeatureMap& image,
                               const BackboneConfig& config);

/// Analytic MAC count for one forward pass given the realized retained
/// channel counts (`trace` from BackboneForward).
std::uint64_t CountBackboneMacs(const Backbone& net, std::size_t height,
                                std::size_t width,
                                const std::vector<StageTrace>& trace);

}  // namespace prism

#endif  // PRISM_BACKBONE_H_
