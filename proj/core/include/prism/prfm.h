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

// PRFM binary feature-map files.
//
// Layout (all integers little-endian):
//   bytes 0..3    magic "PRFM"
//   u32 H, u32 W, u32 C
//   H*W*C IEEE-754 binary64 values, row-major by (v, u, c)
//   H*W mask bytes, 1 = valid

#ifndef PRISM_PRFM_H_
#define PRISM_PRFM_H_

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "prism/grid.h"

namespace prism {

std::vector<std::uint8_t> EncodePrfm(const FeatureMap& map);
/// Throws FormatError on a bad magic, zero dimension, or truncated payload.
FeatureMap DecodePrfm(std::span<const std::uint8_t> bytes);

void WritePrfm(const std::filesystem::path& path, const FeatureMap& map);
FeatureMap ReadPrfm(const std::filesystem::path& path);

}  // namespace prism

#endif  // PRISM_PRFM_H_
