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

// Fixed-path serialization orders and the grid <-> sequence plumbing around
// them.
//
// Primitive orders:
//   S1  rows top to bottom, each row left to right
//   S2  rows top to bottom, each row right to left
//   S3  row serpentine, first row left to right
//   S4  row serpentine, first row right to left
//   S5  columns left to right, each column top to bottom
//   S6  columns left to right, each column bottom to top
//   S7  column serpentine, first column top to bottom
//   S8  column serpentine, first column bottom to top
//   S9  anti-diagonal bands u+v ascending, u ascending within a band
//   S10 S9 traversed backwards
//   S11 main-diagonal bands u-v ascending, u ascending within a band
//   S12 S11 traversed backwards
// Composites (outputs averaged over members):
//   S13 {S1,S5}  S14 {S3,S7}  S15 {S1,S2}  S16 {S5,S6}  S17 {S9,S11}
//   S18 {S3,S4}  S19 {S1,S2,S5,S6}  S20 {S3,S4,S7,S8}  S21 {S9,S10,S11,S12}

#ifndef PRISM_SCANS_H_
#define PRISM_SCANS_H_

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "prism/grid.h"
#include "prism/linalg.h"
#include "prism/ssm.h"

namespace prism {

/// Scan identifier 1..21.
struct ScanId {
  int number = 1;
  bool composite() const { return number >= 13; }
  friend bool operator==(const ScanId&, const ScanId&) = default;
};

/// Parses "s1".."s21" (case-insensitive). Throws ParameterError otherwise.
ScanId ParseScanId(std::string_view text);
std::string ToString(ScanId id);

/// Member primitives of a composite id (or {id} for a primitive).
std::vector<ScanId> ScanMembers(ScanId id);

class ScanOrder {
 public:
  /// Throws ParameterError for ids outside 1..21 and ShapeError for a zero
  /// dimension.
  static ScanOrder Build(ScanId id, std::size_t height, std::size_t width);

  ScanId id() const { return id_; }
  std::size_t height() const { return height_; }
  std::size_t width() const { return width_; }
  bool composite() const { return !members_.empty(); }

  /// visit[k] is the k-th pixel visited. Empty for composites.
  const std::vector<Pixel>& visit() const { return visit_; }
  /// Visit index of pixel (u, v).
  std::size_t index_of(Pixel p) const { return inverse_[p.v * width_ + p.u]; }
  const std::vector<ScanOrder>& members() const { return members_; }

 private:
  ScanId id_;
  std::size_t height_ = 0;
  std::size_t width_ = 0;
  std::vector<Pixel> visit_;
  std::vector<std::size_t> inverse_;
  std::vector<ScanOrder> members_;
};

/// token k = projector * X[visit[k]]; projector is m x C.
TokenSequence Serialize(const FeatureMap& map, const ScanOrder& order,
                        const Matrix& projector);

/// Pixel visit[k] receives writeback * seq.tokens[k]; writeback is C x d.
/// The mask of each pixel is taken from the sequence mask.
FeatureMap Deserialize(const TokenSequence& seq, const ScanOrder& order,
                       const Matrix& writeback);

/// Projection, SSM, and write-back weights for a single-path pipeline.
struct ScanKernel {
  Matrix projector;   // P, m x C
  SsmParams ssm;      // (m, d)
  Matrix writeback;   // Psi, C x d

  static ScanKernel Random(std::size_t channels, std::size_t token_width,
                           std::size_t state_width, Seed seed);
};

/// Serialize -> SsmForward -> Deserialize along one primitive order.
FeatureMap RunScan(const FeatureMap& map, const ScanOrder& order,
                   const ScanKernel& kernel);

/// Runs every member of a composite order and averages the written maps in
/// member order. Throws ParameterError for a primitive order.
FeatureMap MultiScanAggregate(const FeatureMap& map, const ScanOrder& composite,
                              const ScanKernel& kernel);

/// RunScan for primitives, MultiScanAggregate for composites.
FeatureMap RunAnyScan(const FeatureMap& map, const ScanOrder& order,
                      const ScanKernel& kernel);

}  // namespace prism

#endif  // PRISM_SCANS_H_
