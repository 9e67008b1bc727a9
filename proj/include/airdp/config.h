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

// Experiment configuration: JSON parsing, validation against a per-experiment
// key set, preset merging and default resolution.

#ifndef AIRDP_CONFIG_H_
#define AIRDP_CONFIG_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "airdp/fedsgd_sim.h"
#include "airdp/training_task.h"

namespace airdp {

enum class Experiment {
  kPrivacySweep,
  kCompositionSweep,
  kBoundCurves,
  kTrain,
  kLocalDpTable,
};

// "privacy_sweep", "composition_sweep", ...
absl::string_view ExperimentName(Experiment experiment);
absl::StatusOr<Experiment> ParseExperiment(absl::string_view name);

struct SamplingSpec {
  enum class Type { kUniform, kOptimal, kSchedule, kChannelAware, kExplicit };
  Type type = Type::kUniform;
  double p = 1.0;
  std::vector<double> schedule;
  double h_threshold = 2.0;
  std::vector<std::vector<double>> matrix;
};

struct ChannelSpec {
  bool fading = true;
  double rician_gamma = 5.0;
  double temporal_rho = 0.1;
  std::vector<double> snr_db;  // expanded to one entry per user
};

struct TaskSpec {
  enum class Type { kQuadratic, kLogistic };
  Type type = Type::kQuadratic;
  QuadraticTaskParams quadratic;
  LogisticTaskParams logistic;
};

struct ExperimentConfig {
  Experiment experiment = Experiment::kPrivacySweep;
  // Fully resolved configuration as compact JSON with sorted keys.
  std::string resolved_json;

  uint64_t master_seed = 0;
  int trials = 1;
  int64_t users = 0;
  std::vector<int64_t> users_grid;
  int64_t rounds = 0;
  std::vector<int64_t> rounds_grid;

  double lipschitz = 1.0;
  std::vector<double> lipschitz_values;
  double noise_var = 0.0;  // sigma^2 for every user
  double receiver_noise_var = 0.0;
  double delta_local = 1e-5;
  double delta_prime = 1e-5;
  DeltaPrimeRule delta_prime_rule = DeltaPrimeRule::kFixed;
  double delta_tilde = 1e-5;
  bool include_n0 = true;

  SamplingSpec sampling;
  ChannelSpec channel;
  TaskSpec task;

  AlphaMode alpha_mode = AlphaMode::kIdeal;
  std::vector<EstimatorMode> estimators;
  LearningRate learning_rate;
  int batch_size = 1;
  std::vector<int64_t> checkpoints;
  bool write_traces = false;

  double fit_min_users = 1e5;
  double fit_max_users = 1e7;
  std::vector<double> probabilities;
  double h_threshold = 2.0;
  int64_t monte_carlo_rounds = 0;
};

// Names of the built-in presets.
std::vector<std::string> PresetNames();

// Raw JSON of a built-in preset. Each preset holds one section per experiment.
absl::StatusOr<std::string> PresetJson(absl::string_view name);

// Reads a config file. A CSV written by this tool is accepted too: its
// "# config: " header line is extracted.
absl::StatusOr<std::string> ReadConfigText(const std::string& path);

struct ConfigSources {
  std::optional<std::string> preset;       // preset name
  std::optional<std::string> config_text;  // JSON document
  std::optional<uint64_t> seed;            // overrides master_seed
};

// Layers defaults, the preset section for `experiment`, the config document
// and the seed override, then validates the result. Every error is
// InvalidArgument.
absl::StatusOr<ExperimentConfig> ResolveConfig(Experiment experiment,
                                               const ConfigSources& sources);

}  // namespace airdp

#endif  // AIRDP_CONFIG_H_
