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

#include "prism/scans.h"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <random>
#include <string>

#include "prism/errors.h"

namespace prism {
namespace {

std::vector<Pixel> PrimitiveVisit(int id, int h, int w) {
  std::vector<Pixel> visit;
  visit.reserve(static_cast<std::size_t>(h) * w);
  auto row_major = [&](bool serpentine, bool first_reversed) {
    for (int v = 0; v < h; ++v) {
      const bool reversed = serpentine ? ((v % 2 == 1) != first_reversed)
                                       : first_reversed;
      for (int i = 0; i < w; ++i) visit.push_back({reversed ? w - 1 - i : i, v});
    }
  };
  auto column_major = [&](bool serpentine, bool first_reversed) {
    for (int u = 0; u < w; ++u) {
      const bool reversed = serpentine ? ((u % 2 == 1) != first_reversed)
                                       : first_reversed;
      for (int i = 0; i < h; ++i) visit.push_back({u, reversed ? h - 1 - i : i});
    }
  };
  auto anti_diagonal = [&] {
    for (int s = 0; s <= h + w - 2; ++s) {
      for (int u = std::max(0, s - (h - 1)); u <= std::min(s, w - 1); ++u) {
        visit.push_back({u, s - u});
      }
    }
  };
  auto main_diagonal = [&] {
    for (int s = -(h - 1); s <= w - 1; ++s) {
      for (int u = std::max(0, s); u <= std::min(w - 1, s + h - 1); ++u) {
        visit.push_back({u, u - s});
      }
    }
  };
  switch (id) {
    case 1: row_major(false, false); break;
    case 2: row_major(false, true); break;
    case 3: row_major(true, false); break;
    case 4: row_major(true, true); break;
    case 5: column_major(false, false); break;
    case 6: column_major(false, true); break;
    case 7: column_major(true, false); break;
    case 8: column_major(true, true); break;
    case 9: anti_diagonal(); break;
    case 10:
      anti_diagonal();
      std::reverse(visit.begin(), visit.end());
      break;
    case 11: main_diagonal(); break;
    case 12:
      main_diagonal();
      std::reverse(visit.begin(), visit.end());
      break;
    default: throw ParameterError("not a primitive scan id");
  }
  return visit;
}

void CheckProjector(const Matrix& projector, std::size_t channels) {
  if (projector.cols() != channels || projector.rows() == 0) {
    throw ShapeError("projector must be m x C with C = " +
                     std::to_string(channels));
  }
}

}  // namespace

ScanId ParseScanId(std::string_view text) {
  if (text.size() >= 2 && (text[0] == 's' || text[0] == 'S')) {
    int number = 0;
    auto [ptr, ec] = std::from_chars(text.data() + 1, text.data() + text.size(), number);
    if (ec == std::errc() && ptr == text.data() + text.size() && number >= 1 &&
        number <= 21) {
      return ScanId{number};
    }
  }
  throw ParameterError("unknown scan id '" + std::string(text) + "'");
}

std::string ToString(ScanId id) { return "s" + std::to_string(id.number); }

std::vector<ScanId> ScanMembers(ScanId id) {
  switch (id.number) {
    case 13: return {{1}, {5}};
    case 14: return {{3}, {7}};
    case 15: return {{1}, {2}};
    case 16: return {{5}, {6}};
    case 17: return {{9}, {11}};
    case 18: return {{3}, {4}};
    case 19: return {{1}, {2}, {5}, {6}};
    case 20: return {{3}, {4}, {7}, {8}};
    case 21: return {{9}, {10}, {11}, {12}};
    default:
      if (id.number < 1 || id.number > 21) throw ParameterError("unknown scan id");
      return {id};
  }
}

ScanOrder ScanOrder::Build(ScanId id, std::size_t height, std::size_t width) {
  if (id.number < 1 || id.number > 21) {
    throw ParameterError("scan id must be in 1..21");
  }
  if (height == 0 || width == 0) throw ShapeError("scan grid must be nonempty");
  ScanOrder order;
  order.id_ = id;
  order.height_ = height;
  order.width_ = width;
  if (id.composite()) {
    for (ScanId member : ScanMembers(id)) {
      order.members_.push_back(Build(member, height, width));
    }
    return order;
  }
  order.visit_ = PrimitiveVisit(id.number, static_cast<int>(height),
                                static_cast<int>(width));
  order.inverse_.assign(height * width, 0);
  for (std::size_t k = 0; k < order.visit_.size(); ++k) {
    const Pixel p = order.visit_[k];
    order.inverse_[p.v * width + p.u] = k;
  }
  return order;
}

TokenSequence Serialize(const FeatureMap& map, const ScanOrder& order,
                        const Matrix& projector) {
  if (order.composite()) {
    throw ParameterError("Serialize needs a primitive order");
  }
  if (order.height() != map.height() || order.width() != map.width()) {
    throw ShapeError("scan order shape does not match the map");
  }
  CheckProjector(projector, map.channels());
  const auto& visit = order.visit();
  TokenSequence seq(visit.size(), projector.rows());
  for (std::size_t k = 0; k < visit.size(); ++k) {
    MatVec(projector, map.pixel(visit[k]), seq.tokens.row(k));
    seq.mask[k] = map.valid(visit[k]) ? 1 : 0;
  }
  return seq;
}

FeatureMap Deserialize(const TokenSequence& seq, const ScanOrder& order,
                       const Matrix& writeback) {
  if (order.composite()) {
    throw ParameterError("Deserialize needs a primitive order");
  }
  const auto& visit = order.visit();
  if (seq.length() != visit.size()) {
    throw ShapeError("sequence length must equal H*W");
  }
  if (writeback.cols() != seq.width() || writeback.rows() == 0) {
    throw ShapeError("write-back must be C x d with d = token width");
  }
  FeatureMap out(order.height(), order.width(), writeback.rows());
  for (std::size_t k = 0; k < visit.size(); ++k) {
    MatVec(writeback, seq.tokens.row(k), out.pixel(visit[k]));
    out.set_valid(visit[k].v, visit[k].u, seq.mask[k] != 0);
  }
  return out;
}

ScanKernel ScanKernel::Random(std::size_t channels, std::size_t token_width,
                              std::size_t state_width, Seed seed) {
  ScanKernel kernel;
  std::mt19937_64 rng(seed.value);
  kernel.projector = Matrix(token_width, channels);
  FillUniform(kernel.projector.data(), 1.0 / std::sqrt(double(channels)), rng);
  kernel.writeback = Matrix(channels, state_width);
  FillUniform(kernel.writeback.data(), 1.0 / std::sqrt(double(state_width)), rng);
  kernel.ssm = SsmParams::Random(token_width, state_width, Seed{rng()});
  return kernel;
}

FeatureMap RunScan(const FeatureMap& map, const ScanOrder& order,
                   const ScanKernel& kernel) {
  const SsmRun run = SsmForward(Serialize(map, order, kernel.projector), kernel.ssm);
  return Deserialize(run.OutputSequence(), order, kernel.writeback);
}

FeatureMap MultiScanAggregate(const FeatureMap& map, const ScanOrder& composite,
                              const ScanKernel& kernel) {
  if (!composite.composite()) {
    throw ParameterError("MultiScanAggregate needs a composite order (s13-s21)");
  }
  const auto& members = composite.members();
  FeatureMap sum = RunScan(map, members.front(), kernel);
  for (std::size_t i = 1; i < members.size(); ++i) {
    const FeatureMap part = RunScan(map, members[i], kernel);
    auto dst = sum.values();
    auto src = part.values();
    for (std::size_t j = 0; j < dst.size(); ++j) dst[j] += src[j];
  }
  const double scale = 1.0 / static_cast<double>(members.size());
  for (double& v : sum.values()) v *= scale;
  return sum;
}

FeatureMap RunAnyScan(const FeatureMap& map, const ScanOrder& order,
                      const ScanKernel& kernel) {
  return order.composite() ? MultiScanAggregate(map, order, kernel)
                           : RunScan(map, order, kernel);
}

}  // namespace prism
