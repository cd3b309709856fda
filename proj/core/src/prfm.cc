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

#include "prism/prfm.h"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include "prism/errors.h"

namespace prism {
namespace {

constexpr char kMagic[4] = {'P', 'R', 'F', 'M'};
constexpr std::size_t kHeaderSize = 16;

void PutU32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void PutU64(std::vector<std::uint8_t>& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint64_t GetLittleEndian(std::span<const std::uint8_t> bytes,
                              std::size_t offset, int width) {
  std::uint64_t v = 0;
  for (int i = 0; i < width; ++i) {
    v |= static_cast<std::uint64_t>(bytes[offset + i]) << (8 * i);
  }
  return v;
}

}  // namespace

std::vector<std::uint8_t> EncodePrfm(const FeatureMap& map) {
  std::vector<std::uint8_t> out;
  out.reserve(kHeaderSize + map.values().size() * 8 + map.mask().size());
  out.insert(out.end(), std::begin(kMagic), std::end(kMagic));
  PutU32(out, static_cast<std::uint32_t>(map.height()));
  PutU32(out, static_cast<std::uint32_t>(map.width()));
  PutU32(out, static_cast<std::uint32_t>(map.channels()));
  for (double v : map.values()) PutU64(out, std::bit_cast<std::uint64_t>(v));
  for (std::uint8_t m : map.mask()) out.push_back(m != 0 ? 1 : 0);
  return out;
}

FeatureMap DecodePrfm(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kHeaderSize) throw FormatError("PRFM: truncated header");
  if (std::memcmp(bytes.data(), kMagic, 4) != 0) {
    throw FormatError("PRFM: bad magic");
  }
  const std::uint64_t h = GetLittleEndian(bytes, 4, 4);
  const std::uint64_t w = GetLittleEndian(bytes, 8, 4);
  const std::uint64_t c = GetLittleEndian(bytes, 12, 4);
  if (h == 0 || w == 0 || c == 0) throw FormatError("PRFM: zero dimension");
  const std::uint64_t count = h * w * c;
  const std::uint64_t expected = kHeaderSize + count * 8 + h * w;
  if (bytes.size() < expected) throw FormatError("PRFM: truncated payload");
  if (bytes.size() > expected) throw FormatError("PRFM: trailing bytes");

  FeatureMap map(h, w, c);
  auto values = map.values();
  for (std::uint64_t i = 0; i < count; ++i) {
    values[i] = std::bit_cast<double>(GetLittleEndian(bytes, kHeaderSize + 8 * i, 8));
  }
  auto mask = map.mask();
  const std::size_t mask_offset = kHeaderSize + count * 8;
  for (std::uint64_t i = 0; i < h * w; ++i) {
    mask[i] = bytes[mask_offset + i] != 0 ? 1 : 0;
  }
  return map;
}

void WritePrfm(const std::filesystem::path& path, const FeatureMap& map) {
  const auto bytes = EncodePrfm(map);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw FormatError("write failed: " + path.string());
}

FeatureMap ReadPrfm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return DecodePrfm(bytes);
}

}  // namespace prism
