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

#include "prism/backbone.h"

#include <cmath>
#include <random>
#include <string>

#include "prism/errors.h"

namespace prism {
namespace {

constexpr std::size_t kStages = 4;

FeatureMap Patchify(const FeatureMap& image, std::size_t patch,
                    const Matrix& projection) {
  const std::size_t h = image.height() / patch;
  const std::size_t w = image.width() / patch;
  const std::size_t c = image.channels();
  FeatureMap out(h, w, projection.rows());
  std::vector<double> flat(patch * patch * c);
  for (std::size_t v = 0; v < h; ++v) {
    for (std::size_t u = 0; u < w; ++u) {
      std::size_t k = 0;
      for (std::size_t dv = 0; dv < patch; ++dv) {
        for (std::size_t du = 0; du < patch; ++du) {
          for (double x : image.pixel(v * patch + dv, u * patch + du)) flat[k++] = x;
        }
      }
      MatVec(projection, flat, out.pixel(v, u));
    }
  }
  return out;
}

// factor x factor mean pool followed by a channel projection.
FeatureMap Downsample(const FeatureMap& map, std::size_t factor,
                      const Matrix& projection) {
  const std::size_t h = map.height() / factor;
  const std::size_t w = map.width() / factor;
  const std::size_t c = map.channels();
  FeatureMap out(h, w, projection.rows());
  std::vector<double> pooled(c);
  const double scale = 1.0 / static_cast<double>(factor * factor);
  for (std::size_t v = 0; v < h; ++v) {
    for (std::size_t u = 0; u < w; ++u) {
      std::fill(pooled.begin(), pooled.end(), 0.0);
      for (std::size_t dv = 0; dv < factor; ++dv) {
        for (std::size_t du = 0; du < factor; ++du) {
          auto px = map.pixel(v * factor + dv, u * factor + du);
          for (std::size_t i = 0; i < c; ++i) pooled[i] += px[i];
        }
      }
      for (double& p : pooled) p *= scale;
      MatVec(projection, pooled, out.pixel(v, u));
    }
  }
  return out;
}

void CheckConfig(const BackboneConfig& config) {
  if (config.blocks.size() != kStages || config.channels.size() != kStages) {
    throw ParameterError("backbone needs exactly four stages");
  }
  for (std::size_t i = 0; i < kStages; ++i) {
    if (config.channels[i] == 0) throw ParameterError("stage channels must be positive");
  }
  if (config.patchify == 0 || config.downsample == 0 || config.classes == 0 ||
      config.state_width == 0) {
    throw ParameterError("patchify, downsample, classes, state_width must be positive");
  }
  if (!(config.delta_r > 0.0)) throw ParameterError("delta_r must be positive");
}

}  // namespace

Backbone Backbone::Build(const BackboneConfig& config, std::size_t in_channels) {
  CheckConfig(config);
  if (in_channels == 0) throw ShapeError("input channels must be positive");
  Backbone net;
  net.config = config;
  net.in_channels = in_channels;

  std::mt19937_64 rng(config.seed);
  const std::size_t patch_in = config.patchify * config.patchify * in_channels;
  net.patch_projection = Matrix(config.channels[0], patch_in);
  FillUniform(net.patch_projection.data(), 1.0 / std::sqrt(double(patch_in)), rng);

  for (std::size_t s = 0; s < kStages; ++s) {
    PrismBlockOptions options;
    options.channels = config.channels[s];
    options.token_width = std::max<std::size_t>(1, config.channels[s] / 2);
    options.state_width = config.state_width;
    options.pcf = config.pcf;
    options.rings.delta_r = config.delta_r;
    options.ffn = config.ffn;
    options.memoryless_angular = config.memoryless_angular;
    std::vector<PrismBlock> stage;
    for (std::size_t b = 0; b < config.blocks[s]; ++b) {
      stage.push_back(PrismBlock::Random(options, Seed{rng()}));
    }
    net.stages.push_back(std::move(stage));
    if (s + 1 < kStages) {
      Matrix proj(config.channels[s + 1], config.channels[s]);
      FillUniform(proj.data(), 1.0 / std::sqrt(double(config.channels[s])), rng);
      net.downsample_projection.push_back(std::move(proj));
    }
  }
  net.head = Matrix(config.classes, config.channels[kStages - 1]);
  FillUniform(net.head.data(), 1.0 / std::sqrt(double(config.channels[kStages - 1])),
              rng);
  return net;
}

BackboneOutput BackboneForward(const FeatureMap& image, const Backbone& net) {
  const BackboneConfig& config = net.config;
  if (image.channels() != net.in_channels) {
    throw ShapeError("backbone expects " + std::to_string(net.in_channels) +
                     " input channels");
  }
  std::size_t factor = config.patchify;
  for (std::size_t s = 1; s < kStages; ++s) factor *= config.downsample;
  if (image.height() % factor != 0 || image.width() % factor != 0) {
    throw ShapeError("input " + std::to_string(image.height()) + "x" +
                     std::to_string(image.width()) + " is not divisible by " +
                     std::to_string(factor));
  }

  BackboneOutput out;
  FeatureMap x = Patchify(image, config.patchify, net.patch_projection);
  for (std::size_t s = 0; s < kStages; ++s) {
    if (s > 0) x = Downsample(x, config.downsample, net.downsample_projection[s - 1]);
    StageTrace trace;
    for (const PrismBlock& block : net.stages[s]) {
      const PcfPartition part = PartitionChannels(x, block.pcf);
      trace.retained.push_back(part.retained.size());
      x = PrismForward(x, block, nullptr, &part);
    }
    trace.height = x.height();
    trace.width = x.width();
    trace.channels = x.channels();
    trace.pooled = GlobalAveragePool(x);
    out.stages.push_back(std::move(trace));
  }
  out.scores.resize(config.classes);
  MatVec(net.head, out.stages.back().pooled, out.scores);
  return out;
}

BackboneOutput BackboneForward(const FeatureMap& image,
                               const BackboneConfig& config) {
  return BackboneForward(image, Backbone::Build(config, image.channels()));
}

std::uint64_t CountBackboneMacs(const Backbone& net, std::size_t height,
                                std::size_t width,
                                const std::vector<StageTrace>& trace) {
  const BackboneConfig& config = net.config;
  if (trace.size() != kStages) throw ShapeError("trace must cover four stages");
  std::uint64_t total = 0;
  std::size_t h = height / config.patchify;
  std::size_t w = width / config.patchify;
  total += static_cast<std::uint64_t>(h) * w * net.patch_projection.size();
  for (std::size_t s = 0; s < kStages; ++s) {
    if (s > 0) {
      h /= config.downsample;
      w /= config.downsample;
      total += static_cast<std::uint64_t>(h) * w * net.downsample_projection[s - 1].size();
    }
    for (std::size_t b = 0; b < net.stages[s].size(); ++b) {
      total += CountMacs(net.stages[s][b], h, w, trace[s].retained.at(b)).total();
    }
  }
  total += net.head.size();
  return total;
}

}  // namespace prism
