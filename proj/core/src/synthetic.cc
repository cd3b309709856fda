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

#include "prism/synthetic.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "prism/errors.h"

namespace prism {

FeatureMap SmoothImage(std::size_t height, std::size_t width,
                       std::size_t channels, Seed seed) {
  constexpr int kWaves = 5;
  FeatureMap map(height, width, channels);
  std::mt19937_64 rng(seed.value);
  std::uniform_real_distribution<double> freq(-1.0, 1.0);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
  std::uniform_real_distribution<double> amp(0.5, 1.0);

  std::vector<double> channel(height * width);
  for (std::size_t c = 0; c < channels; ++c) {
    double fx[kWaves], fy[kWaves], ph[kWaves], a[kWaves];
    for (int k = 0; k < kWaves; ++k) {
      fx[k] = freq(rng);
      fy[k] = freq(rng);
      ph[k] = phase(rng);
      a[k] = amp(rng);
    }
    for (std::size_t v = 0; v < height; ++v) {
      for (std::size_t u = 0; u < width; ++u) {
        double sum = 0.0;
        for (int k = 0; k < kWaves; ++k) {
          sum += a[k] * std::cos(2.0 * std::numbers::pi *
                                     (fx[k] * double(u) / double(width) +
                                      fy[k] * double(v) / double(height)) +
                                 ph[k]);
        }
        channel[v * width + u] = sum;
      }
    }
    const auto [lo, hi] = std::minmax_element(channel.begin(), channel.end());
    const double low = *lo, span = *hi - *lo;
    for (std::size_t i = 0; i < channel.size(); ++i) {
      const double t = span > 0.0 ? (channel[i] - low) / span : 0.5;
      map.at(i / width, i % width, c) = 2.0 * t - 1.0;
    }
  }
  return map;
}

FeatureMap KillChannels(const FeatureMap& map, std::size_t count) {
  if (count > map.channels()) throw ParameterError("cannot kill more channels than exist");
  FeatureMap out = map;
  for (std::size_t v = 0; v < map.height(); ++v) {
    for (std::size_t u = 0; u < map.width(); ++u) {
      auto px = out.pixel(v, u);
      for (std::size_t c = map.channels() - count; c < map.channels(); ++c) px[c] = 0.0;
    }
  }
  return out;
}

}  // namespace prism
