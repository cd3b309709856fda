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

#include "prism/grid.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "prism/errors.h"

namespace prism {

FeatureMap::FeatureMap(std::size_t height, std::size_t width,
                       std::size_t channels, double fill)
    : height_(height), width_(width), channels_(channels) {
  if (height == 0 || width == 0 || channels == 0) {
    throw ShapeError("feature map dimensions must be positive");
  }
  values_.assign(height * width * channels, fill);
  mask_.assign(height * width, 1);
}

FeatureMap MakeMap(std::size_t height, std::size_t width, std::size_t channels,
                   double fill) {
  return FeatureMap(height, width, channels, fill);
}

FeatureMap MakeMap(std::size_t height, std::size_t width, std::size_t channels,
                   Seed seed) {
  FeatureMap map(height, width, channels);
  std::mt19937_64 rng(seed.value);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  for (double& v : map.values()) v = dist(rng);
  return map;
}

GridCenter DefaultCenter(std::size_t height, std::size_t width) {
  return {(static_cast<double>(width) - 1.0) / 2.0,
          (static_cast<double>(height) - 1.0) / 2.0};
}

std::vector<double> GlobalAveragePool(const FeatureMap& map) {
  const std::size_t c = map.channels();
  std::vector<double> sums(c, 0.0);
  auto values = map.values();
  for (std::size_t i = 0; i < values.size(); ++i) sums[i % c] += values[i];
  const double n = static_cast<double>(map.pixel_count());
  for (double& s : sums) s /= n;
  return sums;
}

Pixel RotatePixel(Pixel p, std::size_t n, int quarter_turns) {
  const int last = static_cast<int>(n) - 1;
  const int turns = ((quarter_turns % 4) + 4) % 4;
  for (int t = 0; t < turns; ++t) p = Pixel{p.v, last - p.u};
  return p;
}

FeatureMap RotateExact(const FeatureMap& map, int quarter_turns) {
  if (map.height() != map.width()) {
    throw ShapeError("exact rotation requires a square map");
  }
  const std::size_t n = map.width();
  FeatureMap out(n, n, map.channels());
  for (std::size_t v = 0; v < n; ++v) {
    for (std::size_t u = 0; u < n; ++u) {
      const Pixel src{static_cast<int>(u), static_cast<int>(v)};
      const Pixel dst = RotatePixel(src, n, quarter_turns);
      auto from = map.pixel(src);
      std::copy(from.begin(), from.end(), out.pixel(dst).begin());
      out.set_valid(dst.v, dst.u, map.valid(src));
    }
  }
  return out;
}

FeatureMap RotateResampled(const FeatureMap& map, double angle_degrees,
                           Resample mode) {
  const std::size_t h = map.height();
  const std::size_t w = map.width();
  const std::size_t channels = map.channels();
  const GridCenter center = DefaultCenter(h, w);

  // Exact trig at multiples of 90 degrees so those angles land on the grid.
  double reduced = std::fmod(angle_degrees, 360.0);
  if (reduced < 0) reduced += 360.0;
  double cos_a, sin_a;
  if (reduced == 0.0) {
    cos_a = 1.0;
    sin_a = 0.0;
  } else if (reduced == 90.0) {
    cos_a = 0.0;
    sin_a = 1.0;
  } else if (reduced == 180.0) {
    cos_a = -1.0;
    sin_a = 0.0;
  } else if (reduced == 270.0) {
    cos_a = 0.0;
    sin_a = -1.0;
  } else {
    const double rad = reduced * std::numbers::pi / 180.0;
    cos_a = std::cos(rad);
    sin_a = std::sin(rad);
  }

  constexpr double kEdge = 1e-9;
  const double max_u = static_cast<double>(w) - 1.0;
  const double max_v = static_cast<double>(h) - 1.0;

  FeatureMap out(h, w, channels);
  for (std::size_t v = 0; v < h; ++v) {
    for (std::size_t u = 0; u < w; ++u) {
      const double x = static_cast<double>(u) - center.x;
      const double y = static_cast<double>(v) - center.y;
      // Inverse of the forward map (x, y) -> (x cos + y sin, -x sin + y cos).
      const double su = x * cos_a - y * sin_a + center.x;
      const double sv = x * sin_a + y * cos_a + center.y;
      auto dst = out.pixel(v, u);
      if (su < -kEdge || su > max_u + kEdge || sv < -kEdge || sv > max_v + kEdge) {
        std::fill(dst.begin(), dst.end(), 0.0);
        out.set_valid(v, u, false);
        continue;
      }
      const double cu = std::clamp(su, 0.0, max_u);
      const double cv = std::clamp(sv, 0.0, max_v);
      if (mode == Resample::kNearest) {
        const auto nu = static_cast<std::size_t>(std::lround(cu));
        const auto nv = static_cast<std::size_t>(std::lround(cv));
        auto src = map.pixel(nv, nu);
        std::copy(src.begin(), src.end(), dst.begin());
        out.set_valid(v, u, map.valid(nv, nu));
        continue;
      }
      const auto u0 = static_cast<std::size_t>(std::floor(cu));
      const auto v0 = static_cast<std::size_t>(std::floor(cv));
      const std::size_t u1 = std::min(u0 + 1, w - 1);
      const std::size_t v1 = std::min(v0 + 1, h - 1);
      const double fu = cu - static_cast<double>(u0);
      const double fv = cv - static_cast<double>(v0);
      const double weights[4] = {(1 - fu) * (1 - fv), fu * (1 - fv),
                                 (1 - fu) * fv, fu * fv};
      const std::size_t us[4] = {u0, u1, u0, u1};
      const std::size_t vs[4] = {v0, v0, v1, v1};
      bool valid = true;
      std::fill(dst.begin(), dst.end(), 0.0);
      for (int k = 0; k < 4; ++k) {
        if (weights[k] == 0.0) continue;
        valid = valid && map.valid(vs[k], us[k]);
        auto src = map.pixel(vs[k], us[k]);
        for (std::size_t c = 0; c < channels; ++c) dst[c] += weights[k] * src[c];
      }
      out.set_valid(v, u, valid);
    }
  }
  return out;
}

FeatureMap Occlude(const FeatureMap& map, std::size_t tile_row,
                   std::size_t tile_col, std::size_t grid_div) {
  if (grid_div == 0 || map.height() % grid_div != 0 ||
      map.width() % grid_div != 0) {
    throw ParameterError("grid_div must divide both map dimensions");
  }
  if (tile_row >= grid_div || tile_col >= grid_div) {
    throw ParameterError("occlusion tile index out of range");
  }
  const std::size_t th = map.height() / grid_div;
  const std::size_t tw = map.width() / grid_div;
  FeatureMap out = map;
  for (std::size_t v = tile_row * th; v < (tile_row + 1) * th; ++v) {
    for (std::size_t u = tile_col * tw; u < (tile_col + 1) * tw; ++u) {
      auto px = out.pixel(v, u);
      std::fill(px.begin(), px.end(), 0.0);
      out.set_valid(v, u, false);
    }
  }
  return out;
}

double RelativeL2(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw ShapeError("RelativeL2: length mismatch");
  double diff = 0.0, ref = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    diff += (a[i] - b[i]) * (a[i] - b[i]);
    ref += b[i] * b[i];
  }
  if (ref == 0.0) return diff == 0.0 ? 0.0 : std::sqrt(diff);
  return std::sqrt(diff / ref);
}

}  // namespace prism
