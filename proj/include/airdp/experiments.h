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

// Experiment drivers. Each returns typed rows; RunExperiment renders them as
// CSV documents that embed the resolved configuration.

#ifndef AIRDP_EXPERIMENTS_H_
#define AIRDP_EXPERIMENTS_H_

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "airdp/config.h"
#include "airdp/fedsgd_sim.h"

namespace airdp {

// Worker count: AIRDP_THREADS when set to a positive integer, otherwise the
// hardware concurrency.
int ThreadCount();

// Runs fn(0), ..., fn(n - 1) on up to ThreadCount() threads.
void ParallelFor(int64_t n, const std::function<void(int64_t)>& fn);

// Least-squares slope of log(y) against log(x) over points with
// x in [x_min, x_max] and finite positive y. NaN with fewer than two points.
double LogLogSlope(const std::vector<double>& x, const std::vector<double>& y,
                   double x_min, double x_max);

struct PrivacySweepRow {
  int64_t users = 0;
  double p_star = 0.0;
  double eps_wireless_sampling = 0.0;
  double eps_wireless = 0.0;
  double eps_orth_sampling = 0.0;
  double eps_orth = 0.0;
  bool feasible = true;  // eps_wireless_sampling defined
};

struct PrivacySweepResult {
  std::vector<PrivacySweepRow> rows;
  double slope_wireless_sampling = 0.0;
  double slope_wireless = 0.0;
};

absl::StatusOr<PrivacySweepResult> RunPrivacySweep(
    const ExperimentConfig& config);

struct CompositionCell {
  int64_t users = 0;
  int64_t rounds = 0;
  double p_star = 0.0;
  double eps_round = 0.0;
  double eps_total = 0.0;
  double delta_total = 0.0;
  bool feasible = true;
};

// Cells ordered by users, then rounds.
absl::StatusOr<std::vector<CompositionCell>> RunCompositionSweep(
    const ExperimentConfig& config);

struct LocalDpEntry {
  double lipschitz = 0.0;
  bool channel_aware = false;
  double parameter = 0.0;  // h_threshold or p
  double avg_participants = 0.0;
  double eps_local_mean = 0.0;  // mean over rounds of the per-round maximum
  double eps_local_max = 0.0;   // maximum over rounds and users
  bool kappa_clamped = false;
};

absl::StatusOr<std::vector<LocalDpEntry>> RunLocalDpTable(
    const ExperimentConfig& config);

struct BoundRow {
  int64_t rounds = 0;
  double bound_unknown = 0.0;
  double bound_known_taylor = 0.0;
  double bound_known_exact = 0.0;
  double rel_gap = 0.0;  // |known_exact - unknown| / unknown
  double bound_optimal_p = 0.0;
  double p_star = 0.0;
  bool optimal_fell_back = false;
};

absl::StatusOr<std::vector<BoundRow>> RunBoundCurves(
    const ExperimentConfig& config);

struct TrainSummaryRow {
  EstimatorMode mode = EstimatorMode::kUnknown;
  int64_t checkpoint = 0;
  int trials = 0;
  double mean_gap = 0.0;
  double ci_half_width = 0.0;  // 95% normal interval
  double bound = 0.0;          // NaN when no closed form applies
  double mean_eps_central_total = 0.0;
  int64_t infeasible_rounds = 0;  // summed over trials
};

struct TrainRun {
  EstimatorMode mode = EstimatorMode::kUnknown;
  int trial = 0;
  TrainingTrace trace;
};

struct TrainResult {
  std::vector<TrainSummaryRow> summary;  // ordered by mode, then checkpoint
  std::vector<TrainRun> runs;            // ordered by mode, then trial
};

// Builds the TrainingConfig of one trial.
absl::StatusOr<TrainingConfig> MakeTrainingConfig(
    const ExperimentConfig& config, EstimatorMode mode, int trial);

absl::StatusOr<TrainResult> RunTrain(const ExperimentConfig& config);

absl::string_view EstimatorName(EstimatorMode mode);

// Trace of one trial as CSV with the provenance header.
std::string TraceCsv(const TrainRun& run, const std::string& resolved_json);

struct ExperimentOutput {
  std::string csv;
  // (file-name suffix, contents) pairs, e.g. per-trial traces.
  std::vector<std::pair<std::string, std::string>> side_files;
  // Every row or cell was infeasible.
  bool infeasible_only = false;
};

absl::StatusOr<ExperimentOutput> RunExperiment(const ExperimentConfig& config);

}  // namespace airdp

#endif  // AIRDP_EXPERIMENTS_H_
