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

#include <benchmark/benchmark.h>

#include "prism/backbone.h"
#include "prism/prism_block.h"
#include "prism/rings.h"
#include "prism/synthetic.h"

namespace {

prism::PrismBlock MakeBlock(prism::PcfMode pcf) {
  prism::PrismBlockOptions options;
  options.channels = 16;
  options.token_width = 8;
  options.state_width = 4;
  options.pcf = pcf;
  return prism::PrismBlock::Random(options, prism::Seed{1});
}

void BM_PrismForward(benchmark::State& state) {
  const auto side = static_cast<std::size_t>(state.range(0));
  const auto pcf = state.range(1) != 0 ? prism::PcfMode::kMean : prism::PcfMode::kOff;
  const auto block = MakeBlock(pcf);
  const auto image =
      prism::KillChannels(prism::SmoothImage(side, side, 16, prism::Seed{2}), 8);
  for (auto _ : state) {
    benchmark::DoNotOptimize(prism::PrismForward(image, block));
  }
  state.SetLabel(prism::ToString(pcf));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(side * side));
}
BENCHMARK(BM_PrismForward)->ArgsProduct({{32, 64, 128}, {0, 1}});

void BM_PrismBackward(benchmark::State& state) {
  const auto side = static_cast<std::size_t>(state.range(0));
  const auto block = MakeBlock(prism::PcfMode::kMean);
  const auto image = prism::SmoothImage(side, side, 16, prism::Seed{3});
  prism::PrismCache cache;
  const auto out = prism::PrismForward(image, block, &cache);
  for (auto _ : state) {
    benchmark::DoNotOptimize(prism::PrismBackward(cache, block, out));
  }
}
BENCHMARK(BM_PrismBackward)->Arg(32)->Arg(64);

void BM_RingPartition(benchmark::State& state) {
  const auto side = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(prism::RingPartition::Build(
        side, side, prism::DefaultCenter(side, side), 1.0));
  }
}
BENCHMARK(BM_RingPartition)->Arg(64)->Arg(256);

void BM_BackboneForward(benchmark::State& state) {
  const auto image = prism::SmoothImage(64, 64, 3, prism::Seed{4});
  const auto net = prism::Backbone::Build(prism::BackboneConfig{}, 3);
  for (auto _ : state) {
    benchmark::DoNotOptimize(prism::BackboneForward(image, net));
  }
}
BENCHMARK(BM_BackboneForward);

}  // namespace
