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

// Stress experiments and the scan benchmark behind the command-line tool.
// Every function is deterministic given its options, apart from the timing
// column of the benchmark.

#ifndef PRISM_EXPERIMENTS_H_
#define PRISM_EXPERIMENTS_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "prism/grid.h"
#include "prism/numerics.h"
#include "prism/pcf.h"
#include "prism/prism_block.h"
#include "prism/scans.h"

namespace prism {

/// A method under test: a fixed-path scan or the ring pathway.
struct Method {
  bool ring = false;
  ScanId scan;  // ignored when ring

  std::string name() const { return ring ? "ring" : ToString(scan); }
};

/// Parses a comma-separated list of `s1`..`s21` and `ring`.
std::vector<Method> ParseMethods(const std::string& list);

struct ModelOptions {
  std::size_t channels = 8;
  std::size_t token_width = 8;
  std::size_t state_width = 4;
  // Off by default: the fixed-path pipelines have no channel filter, so the
  // comparison isolates the traversal.
  PcfMode pcf = PcfMode::kOff;
  double delta_r = 1.0;
  std::optional<GridCenter> center;  // default: DefaultCenter(H, W)
  bool memoryless_angular = false;
  std::uint64_t seed = 7;
};

/// The models shared by all images of one experiment.
struct StressModels {
  ScanKernel fixed_path;
  PrismBlock ring;

  static StressModels Build(const ModelOptions& options);
};

struct DeviationRow {
  std::string method;
  double setting = 0.0;  // angle in degrees or grid_div
  std::uint64_t seed = 0;
  double deviation = 0.0;
};

struct SummaryRow {
  std::string method;
  std::string reference;
  double setting = 0.0;
  PairedDeviation stats;
};

struct StressResult {
  std::vector<DeviationRow> rows;
  std::vector<SummaryRow> summary;
};

/// Per-method deviation between an input and its perturbed copy: relative
/// L2 of written maps for fixed-path scans, of ring descriptors for `ring`.
double MethodDeviation(const Method& method, const StressModels& models,
                       const FeatureMap& clean, const FeatureMap& perturbed);

struct RotationStressOptions {
  std::size_t size = 32;
  std::vector<double> angles{0, 30, 60, 90};
  std::vector<Method> methods;  // default: s1, ring
  std::size_t seeds = 30;
  std::uint64_t base_seed = 0;
  Resample resample = Resample::kNearest;
  ModelOptions model;
};

/// Rows ordered by (seed, angle, method). Summary rows compare `ring`
/// against every fixed-path method at every angle.
StressResult RotationStress(const RotationStressOptions& options);

struct OcclusionStressOptions {
  std::size_t size = 32;
  std::vector<std::size_t> grid_divs{2, 4};
  std::vector<Method> methods;  // default: s1, ring
  std::size_t seeds = 30;
  std::uint64_t base_seed = 0;
  ModelOptions model;
};

/// Tile (row, col) hit by the seeded hole point for a grid_div tiling. The
/// same point is used for every grid_div, so finer tiles nest inside
/// coarser ones.
std::pair<std::size_t, std::size_t> OcclusionTile(std::uint64_t seed,
                                                  std::size_t grid_div);

/// Rows ordered by (seed, grid_div, method). Summary rows compare ring
/// against fixed paths per grid_div, and finer against coarser grid_divs
/// for the ring.
StressResult OcclusionStress(const OcclusionStressOptions& options);

struct ScanBenchOptions {
  std::vector<Method> methods;
  std::size_t size = 64;
  std::size_t seeds = 3;
  std::uint64_t base_seed = 0;
  std::size_t repetitions = 5;
  std::size_t dead_channels = 0;
  ModelOptions model;
};

struct ScanBenchRow {
  std::string method;
  std::uint64_t seed = 0;
  std::size_t height = 0;
  std::size_t width = 0;
  std::size_t channels = 0;
  std::size_t tokens = 0;
  std::uint64_t macs = 0;
  double wall_ns_median = 0.0;
};

/// One row per (seed, method). Fixed paths run projection -> SSM ->
/// write-back; `ring` runs the ring branch of the PRISM block.
std::vector<ScanBenchRow> ScanBench(const ScanBenchOptions& options);

/// Median wall time in nanoseconds of `repetitions` calls to fn.
double MedianWallNs(std::size_t repetitions, const std::function<void()>& fn);

}  // namespace prism

#endif  // PRISM_EXPERIMENTS_H_
