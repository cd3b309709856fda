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

#include "cli.h"

#include <chrono>
#include <cstdint>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>
#include <string>
#include <system_error>

#include <CLI/CLI11.hpp>
#include <nlohmann/json.hpp>

#include "prism/backbone.h"
#include "prism/errors.h"
#include "prism/experiments.h"
#include "prism/parallel.h"
#include "prism/pcf.h"
#include "prism/prfm.h"
#include "prism/synthetic.h"
#include "prism/verification.h"

namespace prism::cli {
namespace {

using nlohmann::json;

struct Globals {
  std::uint64_t seed = 0;
  bool seed_given = false;
  std::string out;
  std::string config;
};

// CLI11 converts an empty list item to 0; reject it instead.
const CLI::Validator kNonEmpty(
    [](std::string& value) {
      return value.empty() ? std::string("empty list entry") : std::string();
    },
    "NONEMPTY");

// Model flags shared by the stress and benchmark subcommands.
struct ModelFlags {
  std::size_t channels = 8;
  std::size_t token_width = 8;
  std::size_t state_width = 4;
  std::string pcf = "off";
  double delta_r = 1.0;
  std::vector<double> center;
  std::string angular = "default";
  std::uint64_t model_seed = 7;
};

void AddModelFlags(CLI::App* cmd, ModelFlags& flags) {
  cmd->add_option("--channels", flags.channels, "Channels of the synthetic images")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--token-width", flags.token_width, "SSM token width m")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--state-width", flags.state_width, "SSM state width d")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--pcf", flags.pcf, "Channel filter")
      ->check(CLI::IsMember({"mean", "median", "off"}));
  cmd->add_option("--delta-r", flags.delta_r, "Ring width")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--center", flags.center, "Ring center cx,cy in pixel units")
      ->delimiter(',')
      ->expected(2);
  cmd->add_option("--angular", flags.angular, "Angular SSM variant")
      ->check(CLI::IsMember({"default", "memoryless"}));
  cmd->add_option("--model-seed", flags.model_seed, "Seed of the model weights");
}

// Config-file keys override the flag defaults only where the flag was not
// given on the command line.
ModelOptions ResolveModel(const ModelFlags& flags, const CLI::App* cmd,
                          const std::optional<BackboneConfig>& config) {
  ModelOptions m;
  m.channels = flags.channels;
  m.token_width = flags.token_width;
  m.state_width = flags.state_width;
  m.pcf = ParsePcfMode(flags.pcf);
  m.delta_r = flags.delta_r;
  m.memoryless_angular = flags.angular == "memoryless";
  m.seed = flags.model_seed;
  if (!flags.center.empty()) m.center = GridCenter{flags.center[0], flags.center[1]};
  if (config) {
    if (cmd->count("--state-width") == 0) m.state_width = config->state_width;
    if (cmd->count("--pcf") == 0) m.pcf = config->pcf;
    if (cmd->count("--delta-r") == 0) m.delta_r = config->delta_r;
    if (cmd->count("--angular") == 0) m.memoryless_angular = config->memoryless_angular;
  }
  return m;
}

json ModelJson(const ModelOptions& m) {
  json center = nullptr;
  if (m.center) center = {m.center->x, m.center->y};
  return {{"channels", m.channels},
          {"center", center},
          {"token_width", m.token_width},
          {"state_width", m.state_width},
          {"pcf", ToString(m.pcf)},
          {"delta_r", m.delta_r},
          {"angular", m.memoryless_angular ? "memoryless" : "default"},
          {"model_seed", m.seed}};
}

std::vector<std::string> MethodNames(const std::vector<Method>& methods) {
  std::vector<std::string> names;
  for (const Method& m : methods) names.push_back(m.name());
  return names;
}

std::vector<std::uint64_t> SeedList(std::uint64_t base, std::size_t count) {
  std::vector<std::uint64_t> seeds(count);
  for (std::size_t i = 0; i < count; ++i) seeds[i] = base + i;
  return seeds;
}

std::string Num(double x) {
  std::ostringstream s;
  s << std::setprecision(17) << x;
  return s.str();
}

std::string Timestamp(std::chrono::system_clock::time_point t) {
  const std::time_t tt = std::chrono::system_clock::to_time_t(t);
  std::tm tm{};
  gmtime_r(&tt, &tm);
  std::ostringstream s;
  s << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return s.str();
}

std::filesystem::path Sibling(const std::filesystem::path& out, const std::string& suffix) {
  std::filesystem::path p = out;
  p.replace_extension();
  p += suffix;
  return p;
}

void WriteFile(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw FormatError("cannot write " + path.string());
  file << text;
  if (!file) throw FormatError("failed writing " + path.string());
}

// Routes the primary CSV and its companions either to files next to --out
// or to the console, and records the manifest.
class Emitter {
 public:
  Emitter(const Globals& globals, std::string subcommand, std::ostream& out,
          std::ostream& err)
      : globals_(globals), out_(out), err_(err),
        started_(std::chrono::system_clock::now()),
        clock_(std::chrono::steady_clock::now()) {
    manifest_["subcommand"] = std::move(subcommand);
    manifest_["tool_version"] = PRISM_VERSION;
    manifest_["seed"] = globals.seed;
    manifest_["threads"] = WorkerCount();
    if (!globals.config.empty()) manifest_["config_file"] = globals.config;
  }

  json& manifest() { return manifest_; }

  void Primary(const std::string& csv) {
    if (globals_.out.empty()) {
      out_ << csv;
      return;
    }
    WriteFile(globals_.out, csv);
    manifest_["outputs"]["csv"] = globals_.out;
  }

  void Companion(const std::string& key, const std::string& suffix,
                 const std::string& text) {
    if (globals_.out.empty()) {
      err_ << text;
      return;
    }
    const auto path = Sibling(globals_.out, suffix);
    WriteFile(path, text);
    manifest_["outputs"][key] = path.string();
  }

  void Finish() {
    if (globals_.out.empty()) return;
    manifest_["started_at"] = Timestamp(started_);
    manifest_["wall_seconds"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - clock_).count();
    const auto path = Sibling(globals_.out, ".manifest.json");
    manifest_["outputs"]["manifest"] = path.string();
    WriteFile(path, manifest_.dump(2) + "\n");
  }

 private:
  const Globals& globals_;
  std::ostream& out_;
  std::ostream& err_;
  std::chrono::system_clock::time_point started_;
  std::chrono::steady_clock::time_point clock_;
  json manifest_;
};

std::string SummaryCsv(const std::vector<SummaryRow>& rows, const std::string& setting) {
  std::ostringstream csv;
  csv << "method,reference," << setting << ",mean_difference,win_fraction,count\n";
  for (const SummaryRow& r : rows) {
    csv << r.method << ',' << r.reference << ',' << Num(r.setting) << ','
        << Num(r.stats.mean_difference) << ',' << Num(r.stats.win_fraction) << ','
        << r.stats.count << '\n';
  }
  return csv.str();
}

std::string DeviationCsv(const std::vector<DeviationRow>& rows, const std::string& setting) {
  std::ostringstream csv;
  csv << "method," << setting << ",seed,deviation\n";
  for (const DeviationRow& r : rows) {
    csv << r.method << ',' << Num(r.setting) << ',' << r.seed << ',' << Num(r.deviation)
        << '\n';
  }
  return csv.str();
}

std::optional<BackboneConfig> LoadConfig(const Globals& globals) {
  if (globals.config.empty()) return std::nullopt;
  return LoadBackboneConfig(globals.config);
}

}  // namespace

int Run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"PRISM ring-scan experiments, benchmarks and acceptance checks", "prism"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", PRISM_VERSION);

  Globals globals;
  app.add_option("--seed", globals.seed, "Base seed; seed i of a run is seed + i");
  app.add_option("--out", globals.out,
                 "CSV path; the manifest and summaries are written next to it");
  app.add_option("--config", globals.config, "Backbone/model config file (key = value)")
      ->check(CLI::ExistingFile);

  // scan-bench
  auto* bench = app.add_subcommand("scan-bench", "MACs and median wall time per method");
  std::string bench_scans = "s1,ring";
  std::size_t bench_size = 64, bench_seeds = 3, bench_reps = 5, dead = 0;
  ModelFlags bench_model;
  bench->add_option("--scans", bench_scans, "Comma-separated s1..s21 and ring");
  bench->add_option("--size", bench_size, "Square image side")->check(CLI::PositiveNumber);
  bench->add_option("--seeds", bench_seeds, "Number of images")->check(CLI::PositiveNumber);
  bench->add_option("--reps", bench_reps, "Timed repetitions (at least 5)")
      ->check(CLI::Range(std::size_t{5}, std::size_t{100000}));
  bench->add_option("--dead-channels", dead, "Zero this many trailing channels");
  AddModelFlags(bench, bench_model);

  // rotation-stress
  auto* rot = app.add_subcommand("rotation-stress", "Deviation under image rotation");
  std::vector<double> angles{0, 30, 60, 90};
  std::string rot_scans = "s1,ring", resample = "nearest";
  std::size_t rot_size = 32, rot_seeds = 30;
  ModelFlags rot_model;
  rot->add_option("--angles", angles, "Rotation angles in degrees")
      ->delimiter(',')
      ->check(kNonEmpty);
  rot->add_option("--scans", rot_scans, "Comma-separated s1..s21 and ring");
  rot->add_option("--size", rot_size, "Square image side")->check(CLI::PositiveNumber);
  rot->add_option("--seeds", rot_seeds, "Number of images")->check(CLI::PositiveNumber);
  rot->add_option("--resample", resample, "Resampling of rotated pixels")
      ->check(CLI::IsMember({"nearest", "bilinear"}));
  AddModelFlags(rot, rot_model);

  // occlusion-stress
  auto* occ = app.add_subcommand("occlusion-stress", "Deviation under a dropped tile");
  std::vector<std::size_t> divs{2, 4};
  std::string occ_scans = "s1,ring";
  std::size_t occ_size = 32, occ_seeds = 30;
  ModelFlags occ_model;
  occ->add_option("--grid-divs", divs, "Tilings; the tile side is size / grid_div")
      ->delimiter(',')
      ->check(kNonEmpty);
  occ->add_option("--scans", occ_scans, "Comma-separated s1..s21 and ring");
  occ->add_option("--size", occ_size, "Square image side")->check(CLI::PositiveNumber);
  occ->add_option("--seeds", occ_seeds, "Number of images")->check(CLI::PositiveNumber);
  AddModelFlags(occ, occ_model);

  // verify
  auto* verify = app.add_subcommand("verify", "Run the acceptance suite");
  std::vector<int> only;
  bool perturb = false;
  verify->add_option("--only", only, "Criterion ids to run")
      ->delimiter(',')
      ->check(kNonEmpty)
      ->check(CLI::Range(1, 8));
  verify->add_flag("--perturb-gradient", perturb,
                   "Corrupt the analytic SSM gradient (checks the checker)");

  // backbone-demo
  auto* demo = app.add_subcommand("backbone-demo", "Class scores of the backbone");
  std::string input;
  std::size_t demo_size = 32, demo_channels = 3;
  demo->add_option("--input", input, "PRFM feature map; synthesized when omitted")
      ->check(CLI::ExistingFile);
  demo->add_option("--size", demo_size, "Side of the synthesized image")
      ->check(CLI::PositiveNumber);
  demo->add_option("--channels", demo_channels, "Channels of the synthesized image")
      ->check(CLI::PositiveNumber);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }
  globals.seed_given = app.count("--seed") > 0;

  try {
    if (*bench) {
      Emitter emit(globals, "scan-bench", out, err);
      const auto config = LoadConfig(globals);
      ScanBenchOptions o;
      o.methods = ParseMethods(bench_scans);
      o.size = bench_size;
      o.seeds = bench_seeds;
      o.base_seed = globals.seed;
      o.repetitions = bench_reps;
      o.dead_channels = dead;
      o.model = ResolveModel(bench_model, bench, config);
      const auto rows = ScanBench(o);

      std::ostringstream csv;
      csv << "scan_id,seed,H,W,C,pcf,T_tokens,macs,wall_ns_median\n";
      for (const ScanBenchRow& r : rows) {
        csv << r.method << ',' << r.seed << ',' << r.height << ',' << r.width << ','
            << r.channels << ',' << ToString(o.model.pcf) << ',' << r.tokens << ','
            << r.macs << ',' << std::fixed << std::setprecision(1) << r.wall_ns_median
            << std::defaultfloat << '\n';
      }
      emit.manifest()["config"] = {{"scans", MethodNames(o.methods)},
                                   {"size", o.size},
                                   {"seeds", o.seeds},
                                   {"repetitions", o.repetitions},
                                   {"dead_channels", o.dead_channels},
                                   {"model", ModelJson(o.model)}};
      emit.manifest()["seed_list"] = SeedList(o.base_seed, o.seeds);
      emit.Primary(csv.str());
      emit.Finish();
      return kExitOk;
    }

    if (*rot) {
      Emitter emit(globals, "rotation-stress", out, err);
      const auto config = LoadConfig(globals);
      RotationStressOptions o;
      o.size = rot_size;
      o.angles = angles;
      o.methods = ParseMethods(rot_scans);
      o.seeds = rot_seeds;
      o.base_seed = globals.seed;
      o.resample = resample == "bilinear" ? Resample::kBilinear : Resample::kNearest;
      o.model = ResolveModel(rot_model, rot, config);
      const StressResult result = RotationStress(o);
      emit.manifest()["config"] = {{"scans", MethodNames(o.methods)},
                                   {"size", o.size},
                                   {"angles", o.angles},
                                   {"seeds", o.seeds},
                                   {"resample", resample},
                                   {"model", ModelJson(o.model)}};
      emit.manifest()["seed_list"] = SeedList(o.base_seed, o.seeds);
      emit.Primary(DeviationCsv(result.rows, "angle"));
      emit.Companion("summary", ".summary.csv", SummaryCsv(result.summary, "angle"));
      emit.Finish();
      return kExitOk;
    }

    if (*occ) {
      Emitter emit(globals, "occlusion-stress", out, err);
      const auto config = LoadConfig(globals);
      OcclusionStressOptions o;
      o.size = occ_size;
      o.grid_divs = divs;
      o.methods = ParseMethods(occ_scans);
      o.seeds = occ_seeds;
      o.base_seed = globals.seed;
      o.model = ResolveModel(occ_model, occ, config);
      const StressResult result = OcclusionStress(o);
      emit.manifest()["config"] = {{"scans", MethodNames(o.methods)},
                                   {"size", o.size},
                                   {"grid_divs", o.grid_divs},
                                   {"seeds", o.seeds},
                                   {"model", ModelJson(o.model)}};
      emit.manifest()["seed_list"] = SeedList(o.base_seed, o.seeds);
      emit.Primary(DeviationCsv(result.rows, "grid_div"));
      emit.Companion("summary", ".summary.csv", SummaryCsv(result.summary, "grid_div"));
      emit.Finish();
      return kExitOk;
    }

    if (*verify) {
      VerifyOptions o;
      o.only = only;
      o.perturb_gradient = perturb;
      const auto results = RunAcceptance(o);
      std::ostringstream report;
      PrintReport(results, report);
      const bool ok = AllPassed(results);
      report << (ok ? "all criteria passed\n" : "acceptance FAILED\n");
      out << report.str();
      if (!globals.out.empty()) WriteFile(globals.out, report.str());
      return ok ? kExitOk : kExitFailure;
    }

    if (*demo) {
      Emitter emit(globals, "backbone-demo", out, err);
      BackboneConfig config = LoadConfig(globals).value_or(BackboneConfig{});
      if (globals.seed_given) config.seed = globals.seed;
      const FeatureMap image = input.empty()
                                   ? SmoothImage(demo_size, demo_size, demo_channels,
                                                 Seed{config.seed})
                                   : ReadPrfm(input);
      const BackboneOutput result = BackboneForward(image, config);

      std::ostringstream csv;
      csv << "class,score\n";
      for (std::size_t i = 0; i < result.scores.size(); ++i) {
        csv << i << ',' << Num(result.scores[i]) << '\n';
      }
      std::ostringstream shapes;
      shapes << "stage,H,W,C,retained\n";
      json stages = json::array();
      for (std::size_t i = 0; i < result.stages.size(); ++i) {
        const StageTrace& s = result.stages[i];
        shapes << i + 1 << ',' << s.height << ',' << s.width << ',' << s.channels << ',';
        for (std::size_t k = 0; k < s.retained.size(); ++k) {
          shapes << (k ? ";" : "") << s.retained[k];
        }
        shapes << '\n';
        stages.push_back({{"height", s.height}, {"width", s.width}, {"channels", s.channels}});
      }
      emit.manifest()["config"] = {
          {"backbone", FormatBackboneConfig(config)},
          {"input", input.empty() ? "synthetic" : input},
          {"input_shape", {image.height(), image.width(), image.channels()}}};
      emit.manifest()["seed_list"] = {config.seed};
      emit.manifest()["stages"] = stages;
      emit.Primary(csv.str());
      emit.Companion("stages", ".stages.csv", shapes.str());
      emit.Finish();
      return kExitOk;
    }
  } catch (const Error& e) {
    err << "prism: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "prism: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace prism::cli
