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

#include <charconv>
#include <fstream>
#include <sstream>
#include <string>

#include "prism/backbone.h"
#include "prism/errors.h"

namespace prism {
namespace {

std::string_view Trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

template <typename T>
T ParseNumber(std::string_view key, std::string_view text) {
  T value{};
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw FormatError("config: bad value '" + std::string(text) + "' for " +
                      std::string(key));
  }
  return value;
}

double ParseReal(std::string_view key, std::string_view text) {
  try {
    std::size_t used = 0;
    const std::string s(text);
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw FormatError("config: bad real '" + std::string(text) + "' for " +
                      std::string(key));
  }
}

std::vector<std::size_t> ParseList(std::string_view key, std::string_view text) {
  std::vector<std::size_t> out;
  while (!text.empty()) {
    const auto comma = text.find(',');
    out.push_back(ParseNumber<std::size_t>(key, Trim(text.substr(0, comma))));
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  return out;
}

bool ParseSwitch(std::string_view key, std::string_view text) {
  if (text == "on") return true;
  if (text == "off") return false;
  throw FormatError("config: " + std::string(key) + " must be on or off");
}

std::string JoinList(const std::vector<std::size_t>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i > 0) out += ",";
    out += std::to_string(values[i]);
  }
  return out;
}

}  // namespace

BackboneConfig ParseBackboneConfig(std::string_view text) {
  BackboneConfig config;
  std::size_t line_number = 0;
  while (!text.empty()) {
    const auto newline = text.find('\n');
    std::string_view line = text.substr(0, newline);
    text.remove_prefix(newline == std::string_view::npos ? text.size() : newline + 1);
    ++line_number;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = Trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw FormatError("config line " + std::to_string(line_number) +
                        ": expected key = value");
    }
    const std::string_view key = Trim(line.substr(0, eq));
    const std::string_view value = Trim(line.substr(eq + 1));
    if (key == "stages.blocks") {
      config.blocks = ParseList(key, value);
    } else if (key == "stages.channels") {
      config.channels = ParseList(key, value);
    } else if (key == "patchify") {
      config.patchify = ParseNumber<std::size_t>(key, value);
    } else if (key == "downsample") {
      config.downsample = ParseNumber<std::size_t>(key, value);
    } else if (key == "classes") {
      config.classes = ParseNumber<std::size_t>(key, value);
    } else if (key == "state_width") {
      config.state_width = ParseNumber<std::size_t>(key, value);
    } else if (key == "delta_r") {
      config.delta_r = ParseReal(key, value);
    } else if (key == "pcf") {
      try {
        config.pcf = ParsePcfMode(value);
      } catch (const ParameterError& e) {
        throw FormatError(std::string("config: ") + e.what());
      }
    } else if (key == "seed") {
      config.seed = ParseNumber<std::uint64_t>(key, value);
    } else if (key == "ffn") {
      config.ffn = ParseSwitch(key, value);
    } else if (key == "angular") {
      if (value == "memoryless") {
        config.memoryless_angular = true;
      } else if (value == "default") {
        config.memoryless_angular = false;
      } else {
        throw FormatError("config: angular must be default or memoryless");
      }
    } else {
      throw FormatError("config line " + std::to_string(line_number) +
                        ": unknown key '" + std::string(key) + "'");
    }
  }
  return config;
}

BackboneConfig LoadBackboneConfig(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open config " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return ParseBackboneConfig(buffer.str());
}

std::string FormatBackboneConfig(const BackboneConfig& config) {
  std::ostringstream out;
  out << "stages.blocks = " << JoinList(config.blocks) << "\n"
      << "stages.channels = " << JoinList(config.channels) << "\n"
      << "patchify = " << config.patchify << "\n"
      << "downsample = " << config.downsample << "\n"
      << "classes = " << config.classes << "\n"
      << "state_width = " << config.state_width << "\n"
      << "delta_r = " << config.delta_r << "\n"
      << "pcf = " << ToString(config.pcf) << "\n"
      << "seed = " << config.seed << "\n"
      << "ffn = " << (config.ffn ? "on" : "off") << "\n"
      << "angular = " << (config.memoryless_angular ? "memoryless" : "default")
      << "\n";
  return out.str();
}

}  // namespace prism
