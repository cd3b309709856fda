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

#ifndef PRISM_SYNTHETIC_H_
#define PRISM_SYNTHETIC_H_

#include <cstddef>

#include "prism/grid.h"

namespace prism {

/// Each channel is a sum of five random low-frequency 2D cosines (at most
/// one cycle across the image per axis), rescaled so the channel spans
/// [-1, 1].
FeatureMap SmoothImage(std::size_t height, std::size_t width,
                       std::size_t channels, Seed seed);

/// Zeroes the last `count` channels.
FeatureMap KillChannels(const FeatureMap& map, std::size_t count);

}  // namespace prism

#endif  // PRISM_SYNTHETIC_H_
