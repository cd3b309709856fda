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

// The PRISM block: channel filtering, per-ring angular SSMs, a radial SSM
// over ring descriptors, ring-wise write-back, and residual fusion.

#ifndef PRISM_PRISM_BLOCK_H_
#define PRISM_PRISM_BLOCK_H_

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "prism/grid.h"
#include "prism/linalg.h"
#include "prism/pcf.h"
#include "prism/rings.h"
#include "prism/ssm.h"

namespace prism {

struct RingConfig {
  double delta_r = 1.0;
  std::optional<GridCenter> center;  // default: DefaultCenter(H, W)

  GridCenter CenterFor(std::size_t height, std::size_t width) const {
    return center ? *center : DefaultCenter(height, width);
  }
};

struct PrismBlockOptions {
  std::size_t channels = 8;     // C
  std::size_t token_width = 4;  // m
  std::size_t state_width = 4;  // d
  PcfMode pcf = PcfMode::kMean;
  RingConfig rings;
  bool ffn = false;
  bool memoryless_angular = false;
  /// Bound of the uniform init for the SSM weights.
  double ssm_weight_bound = 0.1;
};

/// Parameters and configuration of one block. Also used as the container
/// for parameter gradients.
struct PrismBlock {
  std::size_t channels = 0;
  std::size_t token_width = 0;
  std::size_t state_width = 0;
  PcfMode pcf = PcfMode::kMean;
  RingConfig rings;

  Matrix projector;          // P, m x C (columns sliced to retained channels)
  SsmParams angular;         // (m, d)
  SsmParams radial;          // (d, d)
  Matrix writeback;          // Psi, C x d (rows sliced to retained channels)
  Matrix fuse;               // C x C
  std::vector<double> fuse_bias;
  bool has_ffn = false;
  Matrix ffn_in;             // 2C x C
  std::vector<double> ffn_in_bias;
  Matrix ffn_out;            // C x 2C
  std::vector<double> ffn_out_bias;

  /// Seeded random init. Projections use uniform(-1/sqrt(fan_in), ...),
  /// biases start at zero (b_A = 1 in both SSMs).
  static PrismBlock Random(const PrismBlockOptions& options, Seed seed);
  /// Same shape and configuration with every parameter zero.
  PrismBlock ZerosLike() const;

  std::size_t ParameterCount() const;
  std::vector<double> Flatten() const;
  void Unflatten(std::span<const double> flat);
};

/// Intermediate values of one forward pass, needed by PrismBackward.
struct PrismCache {
  bool filled = false;
  FeatureMap input;
  PcfPartition partition;
  std::shared_ptr<const RingPartition> rings;
  FeatureMap gathered;               // retained channels of the input
  Matrix sub_projector;              // m x C'
  Matrix sub_writeback;              // C' x d
  std::vector<SsmRun> angular_runs;  // one per ring (empty rings: T = 0)
  Matrix descriptors;                // (R*+1) x d
  SsmRun radial_run;
  Matrix ring_writeback;             // (R*+1) x C', Psi' y_rad per ring
  FeatureMap mixed;                  // Y after merge, C channels
  FeatureMap fused;                  // X_in + Fuse(Y), before the FFN
  Matrix ffn_pre;                    // N x 2C, FFN hidden pre-activation
};

/// Forward pass. When `partition` is given it is used instead of the
/// block's own channel filter (the backward pass treats it as a constant).
/// Throws ShapeError on a channel mismatch.
FeatureMap PrismForward(const FeatureMap& input, const PrismBlock& block,
                        PrismCache* cache = nullptr,
                        const PcfPartition* partition = nullptr);

struct PrismGradients {
  FeatureMap input;
  PrismBlock params;
};

/// Reverse-mode gradient of PrismForward. Throws StateError if the cache is
/// empty and ShapeError if the gradient shape differs from the output.
PrismGradients PrismBackward(const PrismCache& cache, const PrismBlock& block,
                             const FeatureMap& output_grad);

/// The ring pathway up to the merge with the bypassed channels: the map Y
/// that PrismForward passes to the fusion projection.
FeatureMap RingBranchForward(const FeatureMap& input, const PrismBlock& block,
                             const PcfPartition* partition = nullptr);

/// Ring descriptors z_r (rows, innermost first) of the angular pathway.
Matrix ComputeRingDescriptors(const FeatureMap& input, const PrismBlock& block,
                              const PcfPartition* partition = nullptr);

struct MacBreakdown {
  std::uint64_t projection = 0;  // P
  std::uint64_t angular = 0;     // per-token projector, recurrence, mixing
  std::uint64_t radial = 0;
  std::uint64_t writeback = 0;   // Psi, once per ring
  std::uint64_t fuse = 0;
  std::uint64_t ffn = 0;

  std::uint64_t ring_branch() const {
    return projection + angular + radial + writeback;
  }
  std::uint64_t total() const { return ring_branch() + fuse + ffn; }
};

/// Per-token cost of one SSM step: 2dm + m (projector) + d (recurrence) +
/// d^2 (mixing).
std::uint64_t SsmStepMacs(std::size_t token_width, std::size_t state_width);

/// Analytic MAC count of PrismForward on an H x W input with `retained`
/// channels passing the filter.
MacBreakdown CountMacs(const PrismBlock& block, std::size_t height,
                       std::size_t width, std::size_t retained);

}  // namespace prism

#endif  // PRISM_PRISM_BLOCK_H_
