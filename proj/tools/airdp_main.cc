// Copyright 2026 The airdp Authors
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

// airdp: privacy accounting, convergence bounds and simulation experiments for
// differentially private wireless FedSGD.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "airdp/config.h"
#include "airdp/experiments.h"
#include "airdp/version.h"

namespace {

constexpr int kExitRuntimeError = 1;
constexpr int kExitConfigError = 2;
constexpr int kExitInfeasible = 3;

struct Options {
  std::string config_path;
  std::string preset;
  std::string out_path;
  std::optional<uint64_t> seed;
};

bool WriteFile(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  return static_cast<bool>(out);
}

int Run(airdp::Experiment experiment, const Options& options) {
  airdp::ConfigSources sources;
  if (!options.preset.empty()) sources.preset = options.preset;
  if (!options.config_path.empty()) {
    absl::StatusOr<std::string> text =
        airdp::ReadConfigText(options.config_path);
    if (!text.ok()) {
      std::cerr << "config error: " << text.status().message() << "\n";
      return kExitConfigError;
    }
    sources.config_text = *std::move(text);
  }
  if (!sources.preset.has_value() && !sources.config_text.has_value()) {
    std::cerr << "config error: give --config, --preset or both\n";
    return kExitConfigError;
  }
  sources.seed = options.seed;

  absl::StatusOr<airdp::ExperimentConfig> config =
      airdp::ResolveConfig(experiment, sources);
  if (!config.ok()) {
    std::cerr << "config error: " << config.status().message() << "\n";
    return kExitConfigError;
  }
  absl::StatusOr<airdp::ExperimentOutput> output =
      airdp::RunExperiment(*config);
  if (!output.ok()) {
    std::cerr << "error: " << output.status().message() << "\n";
    return absl::IsInvalidArgument(output.status()) ? kExitConfigError
                                                    : kExitRuntimeError;
  }

  if (options.out_path.empty()) {
    std::cout << output->csv;
    if (!output->side_files.empty()) {
      std::cerr << "note: " << output->side_files.size()
                << " trace files not written; pass --out to keep them\n";
    }
  } else {
    const std::filesystem::path out(options.out_path);
    if (!WriteFile(out, output->csv)) {
      std::cerr << "error: cannot write " << out << "\n";
      return kExitRuntimeError;
    }
    for (const auto& [suffix, text] : output->side_files) {
      std::filesystem::path side = out;
      side.replace_filename(out.stem().string() + "." + suffix);
      if (!WriteFile(side, text)) {
        std::cerr << "error: cannot write " << side << "\n";
        return kExitRuntimeError;
      }
    }
  }
  return output->infeasible_only ? kExitInfeasible : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Privacy accounting and simulation for wireless FedSGD with "
      "user sampling"};
  app.set_version_flag("--version", std::string(airdp::kVersion));
  app.require_subcommand(1);

  Options options;
  const std::map<std::string, airdp::Experiment> commands = {
      {"privacy-sweep", airdp::Experiment::kPrivacySweep},
      {"compose", airdp::Experiment::kCompositionSweep},
      {"local-dp-table", airdp::Experiment::kLocalDpTable},
      {"bounds", airdp::Experiment::kBoundCurves},
      {"train", airdp::Experiment::kTrain},
  };
  const std::map<std::string, std::string> descriptions = {
      {"privacy-sweep", "central epsilon against K for four schemes"},
      {"compose", "composed epsilon over a (K, T) grid at p*(K)"},
      {"local-dp-table", "per-round local epsilon by sampling scheme"},
      {"bounds", "convergence bounds against T"},
      {"train", "Monte Carlo FedSGD training with privacy accounting"},
  };
  std::map<CLI::App*, airdp::Experiment> by_app;
  for (const auto& [name, experiment] : commands) {
    CLI::App* sub = app.add_subcommand(name, descriptions.at(name));
    sub->add_option("--config", options.config_path,
                    "JSON config, or a CSV produced by this tool");
    sub->add_option("--preset", options.preset, "built-in preset")
        ->check(CLI::IsMember(airdp::PresetNames()));
    sub->add_option("--out", options.out_path, "output CSV path");
    sub->add_option("--seed", options.seed, "master seed override");
    by_app[sub] = experiment;
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfigError;
  }
  for (const auto& [sub, experiment] : by_app) {
    if (sub->parsed()) return Run(experiment, options);
  }
  return kExitConfigError;
}
