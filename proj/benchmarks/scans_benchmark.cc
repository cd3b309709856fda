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

#include "prism/grid.h"
#include "prism/scans.h"

namespace {

void BM_RunScan(benchmark::State& state) {
  const auto side = static_cast<std::size_t>(state.range(0));
  const prism::ScanId id{static_cast<int>(state.range(1))};
  const auto map = prism::MakeMap(side, side, 8, prism::Seed{1});
  const auto kernel = prism::ScanKernel::Random(8, 8, 4, prism::Seed{2});
  const auto order = prism::ScanOrder::Build(id, side, side);
  for (auto _ : state) {
    benchmark::DoNotOptimize(prism::RunAnyScan(map, order, kernel));
  }
  state.SetLabel(prism::ToString(id));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(side * side));
}
BENCHMARK(BM_RunScan)->ArgsProduct({{32, 64, 128}, {1, 9, 13, 19, 21}});

void BM_BuildScanOrder(benchmark::State& state) {
  const auto side = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(prism::ScanOrder::Build(prism::ScanId{9}, side, side));
  }
}
BENCHMARK(BM_BuildScanOrder)->Arg(64)->Arg(256);

}  // namespace
