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

#include <algorithm>
#include <chrono>
#include <random>

#include "prism/errors.h"
#include "prism/parallel.h"
#include "prism/synthetic.h"

namespace prism {
namespace {

std::vector<Method> DefaultMethods() { return {Method{false, ScanId{1}}, Method{true, {}}}; }

// What each method exposes downstream: the written map for fixed paths, the
// ring descriptors for the ring pathway.
std::vector<double> MethodOutput(const Method& method, const StressModels& models,
                                 const FeatureMap& map) {
  if (method.ring) {
    const Matrix z = ComputeRingDescriptors(map, models.ring);
    return {z.data().begin(), z.data().end()};
  }
  const ScanOrder order = ScanOrder::Build(method.scan, map.height(), map.width());
  const FeatureMap out = RunAnyScan(map, order, models.fixed_path);
  return {out.values().begin(), out.values().end()};
}

std::vector<double> Column(const std::vector<DeviationRow>& rows,
                           const std::string& method, double setting) {
  std::vector<double> out;
  for (const auto& row : rows) {
    if (row.method == method && row.setting == setting) out.push_back(row.deviation);
  }
  return out;
}

template <typename Setting, typename Perturb>
std::vector<DeviationRow> RunSeeds(std::size_t size, std::size_t seeds,
                                   std::uint64_t base_seed,
                                   const std::vector<Setting>& settings,
                                   const std::vector<Method>& methods,
                                   const StressModels& models, Perturb perturb) {
  std::vector<std::vector<DeviationRow>> per_seed(seeds);
  ParallelFor(seeds, [&](std::size_t i) {
    const std::uint64_t seed = base_seed + i;
    const FeatureMap clean =
        SmoothImage(size, size, models.ring.channels, Seed{seed});
    std::vector<std::vector<double>> clean_out;
    for (const Method& method : methods) {
      clean_out.push_back(MethodOutput(method, models, clean));
    }
    for (const Setting& setting : settings) {
      const FeatureMap perturbed = perturb(clean, seed, setting);
      for (std::size_t j = 0; j < methods.size(); ++j) {
        const auto out = MethodOutput(methods[j], models, perturbed);
        per_seed[i].push_back({methods[j].name(), static_cast<double>(setting), seed,
                               RelativeL2(out, clean_out[j])});
      }
    }
  });
  std::vector<DeviationRow> rows;
  for (auto& chunk : per_seed) rows.insert(rows.end(), chunk.begin(), chunk.end());
  return rows;
}

template <typename Setting>
std::vector<SummaryRow> RingVersusFixed(const std::vector<DeviationRow>& rows,
                                        const std::vector<Setting>& settings,
                                        const std::vector<Method>& methods) {
  std::vector<SummaryRow> summary;
  const bool has_ring = std::any_of(methods.begin(), methods.end(),
                                    [](const Method& m) { return m.ring; });
  if (!has_ring) return summary;
  for (const Setting& setting : settings) {
    const auto ring = Column(rows, "ring", static_cast<double>(setting));
    for (const Method& method : methods) {
      if (method.ring) continue;
      const auto other = Column(rows, method.name(), static_cast<double>(setting));
      summary.push_back({"ring", method.name(), static_cast<double>(setting),
                         PairedDeviationOf(ring, other)});
    }
  }
  return summary;
}

}  // namespace

std::vector<Method> ParseMethods(const std::string& list) {
  std::vector<Method> methods;
  if (list.empty()) throw ParameterError("empty method list");
  std::string_view rest(list);
  for (;;) {
    const auto comma = rest.find(',');
    const std::string_view item = rest.substr(0, comma);
    if (item.empty()) throw ParameterError("empty entry in method list '" + list + "'");
    if (item == "ring") {
      methods.push_back(Method{true, {}});
    } else {
      methods.push_back(Method{false, ParseScanId(item)});
    }
    if (comma == std::string_view::npos) break;
    rest.remove_prefix(comma + 1);
  }
  return methods;
}

StressModels StressModels::Build(const ModelOptions& options) {
  PrismBlockOptions block;
  block.channels = options.channels;
  block.token_width = options.token_width;
  block.state_width = options.state_width;
  block.pcf = options.pcf;
  block.rings.delta_r = options.delta_r;
  block.rings.center = options.center;
  block.memoryless_angular = false;

  StressModels models;
  models.ring = PrismBlock::Random(block, Seed{options.seed});
  // The fixed paths share P, the angular SSM (always with its default
  // decay), and Psi with the ring pathway.
  models.fixed_path.projector = models.ring.projector;
  models.fixed_path.ssm = models.ring.angular;
  models.fixed_path.writeback = models.ring.writeback;
  if (options.memoryless_angular) MakeMemoryless(models.ring.angular);
  return models;
}

double MethodDeviation(const Method& method, const StressModels& models,
                       const FeatureMap& clean, const FeatureMap& perturbed) {
  return RelativeL2(MethodOutput(method, models, perturbed),
                    MethodOutput(method, models, clean));
}

StressResult RotationStress(const RotationStressOptions& options) {
  if (options.angles.empty()) throw ParameterError("no rotation angles given");
  if (options.seeds == 0) throw ParameterError("need at least one seed");
  const auto methods = options.methods.empty() ? DefaultMethods() : options.methods;
  const StressModels models = StressModels::Build(options.model);

  StressResult result;
  result.rows = RunSeeds(
      options.size, options.seeds, options.base_seed, options.angles, methods, models,
      [&](const FeatureMap& clean, std::uint64_t, double angle) {
        return RotateResampled(clean, angle, options.resample);
      });
  result.summary = RingVersusFixed(result.rows, options.angles, methods);
  return result;
}

std::pair<std::size_t, std::size_t> OcclusionTile(std::uint64_t seed,
                                                  std::size_t grid_div) {
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double fx = unit(rng);
  const double fy = unit(rng);
  const auto row = static_cast<std::size_t>(fy * static_cast<double>(grid_div));
  const auto col = static_cast<std::size_t>(fx * static_cast<double>(grid_div));
  return {std::min(row, grid_div - 1), std::min(col, grid_div - 1)};
}

StressResult OcclusionStress(const OcclusionStressOptions& options) {
  if (options.grid_divs.empty()) throw ParameterError("no grid_div given");
  if (options.seeds == 0) throw ParameterError("need at least one seed");
  for (std::size_t div : options.grid_divs) {
    if (div == 0 || options.size % div != 0) {
      throw ParameterError("grid_div " + std::to_string(div) +
                           " must divide the image size " +
                           std::to_string(options.size));
    }
  }
  const auto methods = options.methods.empty() ? DefaultMethods() : options.methods;
  const StressModels models = StressModels::Build(options.model);

  StressResult result;
  result.rows = RunSeeds(
      options.size, options.seeds, options.base_seed, options.grid_divs, methods,
      models, [](const FeatureMap& clean, std::uint64_t seed, std::size_t div) {
        const auto [row, col] = OcclusionTile(seed, div);
        return Occlude(clean, row, col, div);
      });
  result.summary = RingVersusFixed(result.rows, options.grid_divs, methods);

  const bool has_ring = std::any_of(methods.begin(), methods.end(),
                                    [](const Method& m) { return m.ring; });
  if (has_ring) {
    auto divs = options.grid_divs;
    std::sort(divs.begin(), divs.end());
    for (std::size_t i = 0; i + 1 < divs.size(); ++i) {
      const auto finer = Column(result.rows, "ring", double(divs[i + 1]));
      const auto coarser = Column(result.rows, "ring", double(divs[i]));
      result.summary.push_back({"ring", "ring@grid_div=" + std::to_string(divs[i]),
                                double(divs[i + 1]), PairedDeviationOf(finer, coarser)});
    }
  }
  return result;
}

double MedianWallNs(std::size_t repetitions, const std::function<void()>& fn) {
  std::vector<double> times;
  times.reserve(repetitions);
  for (std::size_t i = 0; i < repetitions; ++i) {
    const auto start = std::chrono::steady_clock::now();
    fn();
    const auto stop = std::chrono::steady_clock::now();
    times.push_back(std::chrono::duration<double, std::nano>(stop - start).count());
  }
  std::sort(times.begin(), times.end());
  const std::size_t n = times.size();
  if (n == 0) return 0.0;
  return n % 2 == 1 ? times[n / 2] : 0.5 * (times[n / 2 - 1] + times[n / 2]);
}

std::vector<ScanBenchRow> ScanBench(const ScanBenchOptions& options) {
  if (options.size == 0) throw ParameterError("size must be positive");
  if (options.seeds == 0) throw ParameterError("need at least one seed");
  if (options.repetitions == 0) throw ParameterError("need at least one repetition");
  if (options.dead_channels > options.model.channels) {
    throw ParameterError("dead channels exceed the channel count");
  }
  const auto methods = options.methods.empty() ? DefaultMethods() : options.methods;
  const StressModels models = StressModels::Build(options.model);
  const std::size_t n = options.size * options.size;

  std::vector<ScanBenchRow> rows;
  for (std::size_t i = 0; i < options.seeds; ++i) {
    const std::uint64_t seed = options.base_seed + i;
    const FeatureMap image = KillChannels(
        SmoothImage(options.size, options.size, options.model.channels, Seed{seed}),
        options.dead_channels);
    for (const Method& method : methods) {
      ScanBenchRow row;
      row.method = method.name();
      row.seed = seed;
      row.height = row.width = options.size;
      row.channels = options.model.channels;
      std::function<void()> run;
      if (method.ring) {
        const std::size_t rings =
            GlobalRingCache()
                .Get(options.size, options.size,
                     models.ring.rings.CenterFor(options.size, options.size),
                     models.ring.rings.delta_r)
                ->ring_count();
        row.tokens = n + rings;
        run = [&] { (void)RingBranchForward(image, models.ring); };
      } else {
        const ScanOrder order = ScanOrder::Build(method.scan, options.size, options.size);
        row.tokens = n * ScanMembers(method.scan).size();
        run = [&, order] { (void)RunAnyScan(image, order, models.fixed_path); };
      }
      {
        MacCountScope scope;
        run();
        row.macs = scope.count();
      }
      row.wall_ns_median = MedianWallNs(options.repetitions, run);
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

}  // namespace prism
