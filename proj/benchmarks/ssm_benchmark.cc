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

#include <random>

#include <benchmark/benchmark.h>

#include "prism/linalg.h"
#include "prism/ssm.h"

namespace {

void BM_SsmForward(benchmark::State& state) {
  const auto length = static_cast<std::size_t>(state.range(0));
  const auto width = static_cast<std::size_t>(state.range(1));
  const auto params = prism::SsmParams::Random(width, width, prism::Seed{1});
  prism::TokenSequence seq(length, width);
  std::mt19937_64 rng(2);
  prism::FillUniform(seq.tokens.data(), 1.0, rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(prism::SsmForward(seq, params));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(length));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_SsmForward)
    ->ArgsProduct({benchmark::CreateRange(1 << 10, 1 << 16, 4), {4, 8, 16}})
    ->Complexity(benchmark::oN);

void BM_SsmBackward(benchmark::State& state) {
  const auto length = static_cast<std::size_t>(state.range(0));
  const auto params = prism::SsmParams::Random(8, 8, prism::Seed{1});
  prism::TokenSequence seq(length, 8);
  std::mt19937_64 rng(3);
  prism::FillUniform(seq.tokens.data(), 1.0, rng);
  const auto run = prism::SsmForward(seq, params);
  const prism::Matrix grad(length, 8, 1.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(prism::SsmBackward(run, params, grad));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(length));
}
BENCHMARK(BM_SsmBackward)->Range(1 << 10, 1 << 14);

}  // namespace
