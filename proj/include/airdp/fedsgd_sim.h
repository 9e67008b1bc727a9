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

// One round and the full loop of private over-the-air FedSGD: participation,
// local gradients, clipping, Gaussian perturbation, power scaling, MAC
// superposition, server-side estimation and the SGD update. Each round is also
// passed through the privacy accountant.

#ifndef AIRDP_FEDSGD_SIM_H_
#define AIRDP_FEDSGD_SIM_H_

#include <cstdint>
#include <span>
#include <vector>

#include "absl/status/statusor.h"
#include "airdp/rng.h"
#include "airdp/sampling.h"
#include "airdp/training_task.h"

namespace airdp {

// How the server normalizes the received superposition.
enum class EstimatorMode {
  kKnown,    // y / (zeta |S|); participant set observed
  kUnknown,  // y / mu; only the expected count is used
};

enum class AlphaMode {
  kIdeal,      // exact channel inversion
  kEmpirical,  // inversion capped by the average power constraint
};

enum class DeltaPrimeRule {
  kFixed,     // one delta' for every round
  kAdaptive,  // 2 exp(-2 mu_t^2 / K) + 1e-5 per round
};

// Returns g unchanged when ||g|| <= L, else g L / ||g||.
absl::StatusOr<std::vector<double>> ClipGradient(std::span<const double> g,
                                                 double lipschitz);

// alpha (g + n) with n ~ N(0, sigma^2 I).
std::vector<double> PerturbAndScale(std::span<const double> g, double sigma,
                                    double alpha, RngStream& rng);

absl::StatusOr<std::vector<double>> EstimateUnknown(std::span<const double> y,
                                                    double mu);

struct KnownEstimate {
  std::vector<double> g_hat;
  // Set for an empty round; g_hat is then the zero vector.
  bool skipped = false;
};

absl::StatusOr<KnownEstimate> EstimateKnown(std::span<const double> y,
                                            int count, double zeta);

struct LearningRate {
  enum class Schedule { kInverse, kConstant };
  Schedule schedule = Schedule::kInverse;
  // Strong-convexity constant for kInverse (eta_t = 1 / (lambda t)), step size
  // for kConstant.
  double value = 1.0;

  double At(int64_t t) const;
};

struct RoundConfig {
  SamplingPolicy policy = UniformInvariant{1.0};
  std::vector<double> noise_var;  // sigma_k^2, one per user
  std::vector<double> power;      // P_k, one per user; used in empirical mode
  double noise_var_n0 = 0.0;
  double lipschitz = 1.0;
  EstimatorMode estimator = EstimatorMode::kUnknown;
  AlphaMode alpha_mode = AlphaMode::kIdeal;
  int batch_size = 1;
  LearningRate learning_rate;
};

struct ModelState {
  std::vector<double> w;
  int64_t t = 1;  // 1-based index of the next update
};

struct RoundOutcome {
  std::vector<double> probabilities;  // p_{k,t}, all users
  std::vector<int> participants;
  std::vector<double> gains;              // h_{k,t}, all users
  std::vector<double> alphas;             // one per participant
  std::vector<double> noise_var;          // sigma_k^2, one per participant
  std::vector<double> transmitted_norms;  // ||clipped g_k||, per participant
  std::vector<double> received_y;
  std::vector<double> g_hat;
  double effective_noise_var = 0.0;  // sum_S h^2 alpha^2 sigma^2 + N0
  double eta = 0.0;
  bool skipped = false;
};

struct RoundResult {
  RoundOutcome outcome;
  ModelState next;
};

// Runs round `model.t` (stream round index model.t - 1). `gains` holds one
// channel gain per user. Only master_seed and trial of `base_key` are used.
absl::StatusOr<RoundResult> RunRound(const TrainingTask& task,
                                     const ModelState& model,
                                     const RoundConfig& config,
                                     std::span<const double> gains,
                                     const StreamKey& base_key);

struct TrainingConfig {
  RoundConfig round;
  int64_t rounds = 1;

  // Channel. Without fading every gain is 1.
  bool fading = false;
  double rician_gamma = 5.0;
  double temporal_rho = 0.1;

  // Accounting.
  double delta_local = 1e-5;
  DeltaPrimeRule delta_prime_rule = DeltaPrimeRule::kFixed;
  double delta_prime = 1e-5;
  double delta_tilde = 1e-5;
  bool include_n0 = true;

  uint64_t master_seed = 0;
  uint64_t trial = 0;
  std::vector<double> initial_w;  // zeros when empty
};

struct TraceRow {
  int64_t t = 0;
  double loss = 0.0;
  double gap = 0.0;  // after the update of round t
  double eps_local_max = 0.0;
  double eps_central = 0.0;
  double eps_central_total = 0.0;
  double delta_central_total = 0.0;
  int participants = 0;
  double effective_noise_var = 0.0;
  bool infeasible = false;  // central bound unavailable this round
};

struct TrainingTrace {
  std::vector<TraceRow> rows;
  std::vector<double> final_w;
  int64_t infeasible_rounds = 0;
};

absl::StatusOr<TrainingTrace> RunTraining(const TrainingTask& task,
                                          const TrainingConfig& config);

}  // namespace airdp

#endif  // AIRDP_FEDSGD_SIM_H_
