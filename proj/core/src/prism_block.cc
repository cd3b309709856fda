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

#include "prism/prism_block.h"

#include <cmath>
#include <random>
#include <string>

#include "prism/errors.h"

namespace prism {
namespace {

template <typename Block, typename F>
void ForEachParam(Block& b, F&& f) {
  f(b.projector.data());
  f(b.angular);
  f(b.radial);
  f(b.writeback.data());
  f(b.fuse.data());
  f(std::span(b.fuse_bias));
  if (b.has_ffn) {
    f(b.ffn_in.data());
    f(std::span(b.ffn_in_bias));
    f(b.ffn_out.data());
    f(std::span(b.ffn_out_bias));
  }
}

PcfPartition ResolvePartition(const FeatureMap& input, const PrismBlock& block,
                              const PcfPartition* forced) {
  if (forced == nullptr) return PartitionChannels(input, block.pcf);
  if (forced->channels() != input.channels() || forced->retained.empty()) {
    throw ShapeError("supplied channel partition does not fit the input");
  }
  return *forced;
}

void AddInto(std::span<double> dst, std::span<const double> src) {
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
}

// Output of the angular pathway for one input.
struct RingPathway {
  PcfPartition partition;
  std::shared_ptr<const RingPartition> rings;
  FeatureMap gathered;
  Matrix sub_projector;
  std::vector<SsmRun> runs;
  Matrix descriptors;
};

RingPathway RunRingPathway(const FeatureMap& input, const PrismBlock& block,
                           const PcfPartition* forced, bool keep_runs) {
  if (input.channels() != block.channels) {
    throw ShapeError("PRISM block expects " + std::to_string(block.channels) +
                     " channels, got " + std::to_string(input.channels()));
  }
  RingPathway path;
  path.partition = ResolvePartition(input, block, forced);
  path.gathered = Gather(input, path.partition);
  path.sub_projector = block.projector.SelectColumns(path.partition.retained);
  path.rings = GlobalRingCache().Get(
      input.height(), input.width(),
      block.rings.CenterFor(input.height(), input.width()), block.rings.delta_r);

  const std::size_t ring_count = path.rings->ring_count();
  path.descriptors = Matrix(ring_count, block.state_width);
  if (keep_runs) path.runs.reserve(ring_count);
  for (std::size_t r = 0; r < ring_count; ++r) {
    SsmRun run = SsmForward(
        RingTokens(path.gathered, *path.rings, static_cast<int>(r), path.sub_projector),
        block.angular);
    const auto z = RingDescriptor(run);
    std::copy(z.begin(), z.end(), path.descriptors.row(r).begin());
    if (keep_runs) path.runs.push_back(std::move(run));
  }
  return path;
}

}  // namespace

PrismBlock PrismBlock::Random(const PrismBlockOptions& options, Seed seed) {
  const std::size_t c = options.channels;
  const std::size_t m = options.token_width;
  const std::size_t d = options.state_width;
  if (c == 0 || m == 0 || d == 0) throw ShapeError("PRISM block widths must be positive");
  if (!(options.rings.delta_r > 0.0)) throw ParameterError("delta_r must be positive");

  PrismBlock b;
  b.channels = c;
  b.token_width = m;
  b.state_width = d;
  b.pcf = options.pcf;
  b.rings = options.rings;
  b.has_ffn = options.ffn;

  std::mt19937_64 rng(seed.value);
  const double dc = static_cast<double>(c);
  b.projector = Matrix(m, c);
  FillUniform(b.projector.data(), 1.0 / std::sqrt(dc), rng);
  b.angular = SsmParams::Random(m, d, Seed{rng()}, options.ssm_weight_bound);
  b.radial = SsmParams::Random(d, d, Seed{rng()}, options.ssm_weight_bound);
  if (options.memoryless_angular) MakeMemoryless(b.angular);
  b.writeback = Matrix(c, d);
  FillUniform(b.writeback.data(), 1.0 / std::sqrt(static_cast<double>(d)), rng);
  b.fuse = Matrix(c, c);
  FillUniform(b.fuse.data(), 1.0 / std::sqrt(dc), rng);
  b.fuse_bias.assign(c, 0.0);
  if (b.has_ffn) {
    b.ffn_in = Matrix(2 * c, c);
    FillUniform(b.ffn_in.data(), 1.0 / std::sqrt(dc), rng);
    b.ffn_in_bias.assign(2 * c, 0.0);
    b.ffn_out = Matrix(c, 2 * c);
    FillUniform(b.ffn_out.data(), 1.0 / std::sqrt(2.0 * dc), rng);
    b.ffn_out_bias.assign(c, 0.0);
  }
  return b;
}

PrismBlock PrismBlock::ZerosLike() const {
  PrismBlock z = *this;
  ForEachParam(z, [](auto&& block) {
    if constexpr (std::is_same_v<std::decay_t<decltype(block)>, SsmParams>) {
      block = SsmParams::Zeros(block.token_width, block.state_width);
    } else {
      std::fill(block.begin(), block.end(), 0.0);
    }
  });
  return z;
}

std::size_t PrismBlock::ParameterCount() const {
  std::size_t n = 0;
  ForEachParam(const_cast<PrismBlock&>(*this), [&](auto&& block) {
    if constexpr (std::is_same_v<std::decay_t<decltype(block)>, SsmParams>) {
      n += block.ParameterCount();
    } else {
      n += block.size();
    }
  });
  return n;
}

std::vector<double> PrismBlock::Flatten() const {
  std::vector<double> flat;
  flat.reserve(ParameterCount());
  ForEachParam(const_cast<PrismBlock&>(*this), [&](auto&& block) {
    if constexpr (std::is_same_v<std::decay_t<decltype(block)>, SsmParams>) {
      const auto inner = block.Flatten();
      flat.insert(flat.end(), inner.begin(), inner.end());
    } else {
      flat.insert(flat.end(), block.begin(), block.end());
    }
  });
  return flat;
}

void PrismBlock::Unflatten(std::span<const double> flat) {
  if (flat.size() != ParameterCount()) {
    throw ShapeError("PrismBlock::Unflatten: expected " +
                     std::to_string(ParameterCount()) + " values");
  }
  std::size_t offset = 0;
  ForEachParam(*this, [&](auto&& block) {
    if constexpr (std::is_same_v<std::decay_t<decltype(block)>, SsmParams>) {
      const std::size_t n = block.ParameterCount();
      block.Unflatten(flat.subspan(offset, n));
      offset += n;
    } else {
      std::copy_n(flat.begin() + offset, block.size(), block.begin());
      offset += block.size();
    }
  });
}

namespace {

// Radial chain, ring-wise write-back, and merge on top of the pathway.
struct Branch {
  RingPathway path;
  SsmRun radial;
  Matrix sub_writeback;
  Matrix ring_writeback;
  FeatureMap mixed;
};

Branch RunBranch(const FeatureMap& input, const PrismBlock& block,
                 const PcfPartition* partition, bool keep_runs) {
  Branch b;
  b.path = RunRingPathway(input, block, partition, keep_runs);
  const std::size_t h = input.height(), w = input.width();
  const std::size_t retained = b.path.partition.retained.size();
  const std::size_t ring_count = b.path.rings->ring_count();

  b.radial = RadialForward(b.path.descriptors, block.radial);
  b.sub_writeback = block.writeback.SelectRows(b.path.partition.retained);
  b.ring_writeback = Matrix(ring_count, retained);
  for (std::size_t r = 0; r < ring_count; ++r) {
    MatVec(b.sub_writeback, b.radial.outputs.row(r), b.ring_writeback.row(r));
  }

  // Every pixel on ring r receives the same write-back vector.
  FeatureMap written(h, w, retained);
  for (std::size_t v = 0; v < h; ++v) {
    for (std::size_t u = 0; u < w; ++u) {
      const Pixel p{static_cast<int>(u), static_cast<int>(v)};
      auto src = b.ring_writeback.row(b.path.rings->ring_of(p));
      std::copy(src.begin(), src.end(), written.pixel(p).begin());
    }
  }
  b.mixed = Merge(written, input, b.path.partition);
  return b;
}

}  // namespace

FeatureMap RingBranchForward(const FeatureMap& input, const PrismBlock& block,
                             const PcfPartition* partition) {
  return RunBranch(input, block, partition, false).mixed;
}

FeatureMap PrismForward(const FeatureMap& input, const PrismBlock& block,
                        PrismCache* cache, const PcfPartition* partition) {
  Branch branch = RunBranch(input, block, partition, cache != nullptr);
  const std::size_t h = input.height(), w = input.width(), c = block.channels;
  const FeatureMap& mixed = branch.mixed;

  FeatureMap fused = input;
  std::vector<double> tmp(c);
  for (std::size_t v = 0; v < h; ++v) {
    for (std::size_t u = 0; u < w; ++u) {
      MatVec(block.fuse, mixed.pixel(v, u), tmp);
      auto dst = fused.pixel(v, u);
      for (std::size_t i = 0; i < c; ++i) dst[i] += tmp[i] + block.fuse_bias[i];
    }
  }

  FeatureMap output = fused;
  Matrix ffn_pre;
  if (block.has_ffn) {
    ffn_pre = Matrix(h * w, 2 * c);
    std::vector<double> hidden(2 * c);
    for (std::size_t v = 0; v < h; ++v) {
      for (std::size_t u = 0; u < w; ++u) {
        auto pre = ffn_pre.row(v * w + u);
        MatVec(block.ffn_in, fused.pixel(v, u), pre);
        for (std::size_t i = 0; i < 2 * c; ++i) {
          pre[i] += block.ffn_in_bias[i];
          hidden[i] = std::max(pre[i], 0.0);
        }
        MatVec(block.ffn_out, hidden, tmp);
        auto dst = output.pixel(v, u);
        for (std::size_t i = 0; i < c; ++i) dst[i] += tmp[i] + block.ffn_out_bias[i];
      }
    }
  }

  if (cache != nullptr) {
    cache->filled = true;
    cache->input = input;
    cache->partition = std::move(branch.path.partition);
    cache->rings = branch.path.rings;
    cache->gathered = std::move(branch.path.gathered);
    cache->sub_projector = std::move(branch.path.sub_projector);
    cache->sub_writeback = std::move(branch.sub_writeback);
    cache->angular_runs = std::move(branch.path.runs);
    cache->descriptors = std::move(branch.path.descriptors);
    cache->radial_run = std::move(branch.radial);
    cache->ring_writeback = std::move(branch.ring_writeback);
    cache->mixed = std::move(branch.mixed);
    cache->fused = std::move(fused);
    cache->ffn_pre = std::move(ffn_pre);
  }
  return output;
}

PrismGradients PrismBackward(const PrismCache& cache, const PrismBlock& block,
                             const FeatureMap& output_grad) {
  if (!cache.filled) throw StateError("PrismBackward needs a filled forward cache");
  if (!output_grad.SameShape(cache.input)) {
    throw ShapeError("output gradient shape differs from the block output");
  }
  const std::size_t h = cache.input.height(), w = cache.input.width();
  const std::size_t c = block.channels;
  const std::size_t d = block.state_width;
  const auto& retained = cache.partition.retained;
  const auto& bypassed = cache.partition.bypassed;
  const std::size_t ring_count = cache.rings->ring_count();

  PrismGradients grads;
  grads.input = FeatureMap(h, w, c, 0.0);
  grads.params = block.ZerosLike();
  PrismBlock& gp = grads.params;

  Matrix ring_grad(ring_count, retained.size());  // dL/d(Psi' y_rad_r)
  std::vector<double> dz(c), dy(c), dhidden(2 * c), hidden(2 * c), dpre(2 * c);

  for (std::size_t v = 0; v < h; ++v) {
    for (std::size_t u = 0; u < w; ++u) {
      auto dout = output_grad.pixel(v, u);
      std::copy(dout.begin(), dout.end(), dz.begin());
      if (block.has_ffn) {
        auto pre = cache.ffn_pre.row(v * w + u);
        for (std::size_t i = 0; i < 2 * c; ++i) hidden[i] = std::max(pre[i], 0.0);
        OuterAccumulate(dout, hidden, gp.ffn_out);
        AddInto(gp.ffn_out_bias, dout);
        std::fill(dhidden.begin(), dhidden.end(), 0.0);
        MatTVecAccumulate(block.ffn_out, dout, dhidden);
        for (std::size_t i = 0; i < 2 * c; ++i) dpre[i] = pre[i] > 0.0 ? dhidden[i] : 0.0;
        OuterAccumulate(dpre, cache.fused.pixel(v, u), gp.ffn_in);
        AddInto(gp.ffn_in_bias, dpre);
        MatTVecAccumulate(block.ffn_in, dpre, dz);
      }
      auto dx = grads.input.pixel(v, u);
      AddInto(dx, dz);
      OuterAccumulate(dz, cache.mixed.pixel(v, u), gp.fuse);
      AddInto(gp.fuse_bias, dz);
      std::fill(dy.begin(), dy.end(), 0.0);
      MatTVecAccumulate(block.fuse, dz, dy);
      for (std::size_t ch : bypassed) dx[ch] += dy[ch];
      auto acc = ring_grad.row(
          cache.rings->ring_of({static_cast<int>(u), static_cast<int>(v)}));
      for (std::size_t j = 0; j < retained.size(); ++j) acc[j] += dy[retained[j]];
    }
  }

  // Write-back and radial chain.
  Matrix sub_writeback_grad(retained.size(), d);
  Matrix radial_out_grad(ring_count, d);
  for (std::size_t r = 0; r < ring_count; ++r) {
    OuterAccumulate(ring_grad.row(r), cache.radial_run.outputs.row(r), sub_writeback_grad);
    MatTVecAccumulate(cache.sub_writeback, ring_grad.row(r), radial_out_grad.row(r));
  }
  for (std::size_t j = 0; j < retained.size(); ++j) {
    AddInto(gp.writeback.row(retained[j]), sub_writeback_grad.row(j));
  }
  const SsmGradients radial = SsmBackward(cache.radial_run, block.radial, radial_out_grad);
  gp.radial = radial.params;

  // Angular runs: z_r is the mean of the ring's outputs.
  Matrix sub_projector_grad(block.token_width, retained.size());
  for (std::size_t r = 0; r < ring_count; ++r) {
    const SsmRun& run = cache.angular_runs[r];
    const std::size_t len = run.length();
    if (len == 0) continue;
    Matrix out_grad(len, d);
    auto dzr = radial.inputs.row(r);
    for (std::size_t k = 0; k < len; ++k) {
      auto row = out_grad.row(k);
      for (std::size_t i = 0; i < d; ++i) row[i] = dzr[i] / static_cast<double>(len);
    }
    const SsmGradients angular = SsmBackward(run, block.angular, out_grad);
    gp.angular.Accumulate(angular.params);
    const RingLoop& loop = cache.rings->rings()[r];
    std::vector<double> dpixel(retained.size());
    for (std::size_t k = 0; k < len; ++k) {
      const Pixel p = loop.pixels[k];
      OuterAccumulate(angular.inputs.row(k), cache.gathered.pixel(p), sub_projector_grad);
      std::fill(dpixel.begin(), dpixel.end(), 0.0);
      MatTVecAccumulate(cache.sub_projector, angular.inputs.row(k), dpixel);
      auto dx = grads.input.pixel(p);
      for (std::size_t j = 0; j < retained.size(); ++j) dx[retained[j]] += dpixel[j];
    }
  }
  for (std::size_t i = 0; i < block.token_width; ++i) {
    for (std::size_t j = 0; j < retained.size(); ++j) {
      gp.projector(i, retained[j]) += sub_projector_grad(i, j);
    }
  }
  return grads;
}

Matrix ComputeRingDescriptors(const FeatureMap& input, const PrismBlock& block,
                              const PcfPartition* partition) {
  return RunRingPathway(input, block, partition, false).descriptors;
}

std::uint64_t SsmStepMacs(std::size_t token_width, std::size_t state_width) {
  const std::uint64_t m = token_width, d = state_width;
  return 2 * d * m + m + d + d * d;
}

MacBreakdown CountMacs(const PrismBlock& block, std::size_t height,
                       std::size_t width, std::size_t retained) {
  const auto rings = GlobalRingCache().Get(height, width,
                                           block.rings.CenterFor(height, width),
                                           block.rings.delta_r);
  const std::uint64_t n = static_cast<std::uint64_t>(height) * width;
  const std::uint64_t ring_count = rings->ring_count();
  const std::uint64_t c = block.channels;
  MacBreakdown macs;
  macs.projection = n * block.token_width * retained;
  macs.angular = n * SsmStepMacs(block.token_width, block.state_width);
  macs.radial = ring_count * SsmStepMacs(block.state_width, block.state_width);
  macs.writeback = ring_count * retained * block.state_width;
  macs.fuse = n * c * c;
  macs.ffn = block.has_ffn ? n * 4 * c * c : 0;
  return macs;
}

}  // namespace prism
