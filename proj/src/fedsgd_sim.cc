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

#include "airdp/fedsgd_sim.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <utility>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/str_cat.h"
#include "airdp/channel.h"
#include "airdp/dp_analysis.h"
#include "airdp/rng.h"
#include "airdp/sampling.h"

namespace airdp {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double SquaredNorm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return s;
}

std::vector<int> DrawBatch(int shard_size, int batch_size, RngStream& rng) {
  std::vector<int> indices(shard_size);
  std::iota(indices.begin(), indices.end(), 0);
  if (batch_size >= shard_size) return indices;
  // Partial Fisher-Yates.
  for (int i = 0; i < batch_size; ++i) {
    const int j = i + static_cast<int>(rng.UniformIndex(
                          static_cast<uint64_t>(shard_size - i)));
    std::swap(indices[i], indices[j]);
  }
  indices.resize(batch_size);
  return indices;
}

absl::Status CheckRoundConfig(const TrainingTask& task,
                              const RoundConfig& config) {
  const size_t k = static_cast<size_t>(task.num_users());
  if (config.noise_var.size() != k) {
    return absl::InvalidArgumentError(
        absl::StrCat("noise_var has ", config.noise_var.size(), " entries for ",
                     k, " users"));
  }
  for (double v : config.noise_var) {
    if (!(std::isfinite(v) && v >= 0.0)) {
      return absl::InvalidArgumentError(
          absl::StrCat("noise variance must be nonnegative, got ", v));
    }
  }
  if (config.alpha_mode == AlphaMode::kEmpirical && config.power.size() != k) {
    return absl::InvalidArgumentError(absl::StrCat(
        "empirical scaling needs one transmit power per user; got ",
        config.power.size()));
  }
  if (!(config.noise_var_n0 >= 0.0)) {
    return absl::InvalidArgumentError("receiver noise variance must be >= 0");
  }
  if (!(config.lipschitz > 0.0)) {
    return absl::InvalidArgumentError(absl::StrCat(
        "clipping bound must be positive, got ", config.lipschitz));
  }
  if (config.batch_size < 1) {
    return absl::InvalidArgumentError("batch size must be positive");
  }
  if (!(config.learning_rate.value > 0.0)) {
    return absl::InvalidArgumentError("learning-rate parameter must be > 0");
  }
  return absl::OkStatus();
}

struct RoundAccounting {
  double eps_local_max = 0.0;
  double eps_central = 0.0;
  double delta_central = 0.0;
  bool infeasible = false;
};

RoundAccounting AccountRound(std::span<const double> probabilities,
                             const TrainingConfig& config) {
  RoundAccounting acc;
  const int64_t k = static_cast<int64_t>(probabilities.size());
  const double min_var = *std::min_element(config.round.noise_var.begin(),
                                           config.round.noise_var.end());
  const ParticipantStats stats = ComputeParticipantStats(probabilities);
  const double delta_prime =
      config.delta_prime_rule == DeltaPrimeRule::kAdaptive
          ? AdaptiveDeltaPrime(stats.mu, k)
          : config.delta_prime;
  if (!(min_var > 0.0) || !(delta_prime < 1.0)) {
    acc.eps_local_max = kInf;
    acc.eps_central = kInf;
    acc.delta_central = 1.0;
    acc.infeasible = true;
    return acc;
  }
  MechanismParams params;
  params.lipschitz = config.round.lipschitz;
  params.sigma_min = std::sqrt(min_var);
  params.delta_local = config.delta_local;
  params.noise_var_n0 = config.round.noise_var_n0;

  const double beta = *BetaFromDelta(delta_prime, k);
  // The user with the largest p has the fewest other participants.
  const int worst = static_cast<int>(
      std::max_element(probabilities.begin(), probabilities.end()) -
      probabilities.begin());
  const double kappa = *LocalKappa(probabilities, worst, beta);
  absl::StatusOr<LocalEpsilon> local =
      LocalEpsilonBound(params, kappa, config.include_n0);
  acc.eps_local_max = local.ok() ? local->epsilon : kInf;

  absl::StatusOr<PrivacyBudget> central =
      CentralEpsilonNonuniform(probabilities, params, delta_prime);
  if (central.ok()) {
    acc.eps_central = central->epsilon;
    acc.delta_central = central->delta;
  } else {
    const double max_p = probabilities[worst];
    acc.eps_central = kInf;
    acc.delta_central = std::min(
        1.0, delta_prime + max_p * config.delta_local / (1.0 - delta_prime));
    acc.infeasible = true;
  }
  return acc;
}

}  // namespace

absl::StatusOr<std::vector<double>> ClipGradient(std::span<const double> g,
                                                 double lipschitz) {
  if (!(lipschitz > 0.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("clipping bound must be positive, got ", lipschitz));
  }
  std::vector<double> out(g.begin(), g.end());
  const double norm = std::sqrt(SquaredNorm(g));
  if (norm > lipschitz) {
    const double scale = lipschitz / norm;
    for (double& x : out) x *= scale;
  }
  return out;
}

std::vector<double> PerturbAndScale(std::span<const double> g, double sigma,
                                    double alpha, RngStream& rng) {
  std::vector<double> x(g.size());
  for (size_t i = 0; i < g.size(); ++i) {
    const double noise = sigma > 0.0 ? sigma * rng.Normal() : 0.0;
    x[i] = alpha * (g[i] + noise);
  }
  return x;
}

absl::StatusOr<std::vector<double>> EstimateUnknown(std::span<const double> y,
                                                    double mu) {
  if (!(std::isfinite(mu) && mu > 0.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("expected participant count must be positive, got ", mu));
  }
  std::vector<double> g_hat(y.begin(), y.end());
  for (double& x : g_hat) x /= mu;
  return g_hat;
}

absl::StatusOr<KnownEstimate> EstimateKnown(std::span<const double> y,
                                            int count, double zeta) {
  if (!(zeta > 0.0 && zeta <= 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("zeta must lie in (0, 1], got ", zeta));
  }
  if (count < 0) {
    return absl::InvalidArgumentError(
        absl::StrCat("participant count must be >= 0, got ", count));
  }
  KnownEstimate estimate;
  estimate.g_hat.assign(y.size(), 0.0);
  if (count == 0) {
    estimate.skipped = true;
    return estimate;
  }
  const double scale = 1.0 / (zeta * count);
  for (size_t i = 0; i < y.size(); ++i) estimate.g_hat[i] = y[i] * scale;
  return estimate;
}

double LearningRate::At(int64_t t) const {
  if (schedule == Schedule::kConstant) return value;
  return 1.0 / (value * static_cast<double>(t));
}

absl::StatusOr<RoundResult> RunRound(const TrainingTask& task,
                                     const ModelState& model,
                                     const RoundConfig& config,
                                     std::span<const double> gains,
                                     const StreamKey& base_key) {
  const int num_users = task.num_users();
  const int d = task.dimension();
  if (absl::Status s = CheckRoundConfig(task, config); !s.ok()) return s;
  if (static_cast<int>(gains.size()) != num_users) {
    return absl::InvalidArgumentError(
        absl::StrCat("got ", gains.size(), " gains for ", num_users, " users"));
  }
  if (static_cast<int>(model.w.size()) != d || model.t < 1) {
    return absl::InvalidArgumentError("model state does not match the task");
  }
  const uint64_t round = static_cast<uint64_t>(model.t - 1);
  auto key = [&](uint64_t user, StreamPurpose purpose) {
    return StreamKey{base_key.master_seed, base_key.trial, round, user,
                     purpose};
  };

  RoundResult result;
  RoundOutcome& out = result.outcome;
  absl::StatusOr<std::vector<double>> probabilities = ResolveProbabilities(
      config.policy, gains, static_cast<int>(round), num_users);
  if (!probabilities.ok()) return probabilities.status();
  out.probabilities = *std::move(probabilities);
  out.gains.assign(gains.begin(), gains.end());

  RngStream sampling_rng(key(0, StreamPurpose::kSampling));
  out.participants = SampleParticipants(out.probabilities, sampling_rng);

  std::vector<std::vector<double>> signals;
  std::vector<double> participant_gains;
  out.effective_noise_var = config.noise_var_n0;
  for (int k : out.participants) {
    RngStream batch_rng(key(k, StreamPurpose::kMinibatch));
    const std::vector<int> batch =
        DrawBatch(task.shard_size(), config.batch_size, batch_rng);
    absl::StatusOr<std::vector<double>> grad =
        task.LocalGradient(k, model.w, batch);
    if (!grad.ok()) return grad.status();
    absl::StatusOr<std::vector<double>> clipped =
        ClipGradient(*grad, config.lipschitz);
    if (!clipped.ok()) return clipped.status();
    const double sq_norm = SquaredNorm(*clipped);

    absl::StatusOr<double> alpha =
        config.alpha_mode == AlphaMode::kIdeal
            ? InversionAlpha(gains[k])
            : EmpiricalAlpha(gains[k], config.power[k], sq_norm, d,
                             config.noise_var[k]);
    if (!alpha.ok()) return alpha.status();

    RngStream noise_rng(key(k, StreamPurpose::kPerturbation));
    signals.push_back(PerturbAndScale(*clipped, std::sqrt(config.noise_var[k]),
                                      *alpha, noise_rng));
    participant_gains.push_back(gains[k]);
    out.alphas.push_back(*alpha);
    out.noise_var.push_back(config.noise_var[k]);
    out.transmitted_norms.push_back(std::sqrt(sq_norm));
    const double h_alpha = gains[k] * *alpha;
    out.effective_noise_var += h_alpha * h_alpha * config.noise_var[k];
  }

  RngStream receiver_rng(key(0, StreamPurpose::kReceiverNoise));
  absl::StatusOr<std::vector<double>> y = MacSuperpose(
      signals, participant_gains, config.noise_var_n0, d, receiver_rng);
  if (!y.ok()) return y.status();
  out.received_y = *std::move(y);

  const ParticipantStats stats = ComputeParticipantStats(out.probabilities);
  if (config.estimator == EstimatorMode::kUnknown) {
    absl::StatusOr<std::vector<double>> g_hat =
        EstimateUnknown(out.received_y, stats.mu);
    if (!g_hat.ok()) return g_hat.status();
    out.g_hat = *std::move(g_hat);
  } else {
    absl::StatusOr<KnownEstimate> estimate = EstimateKnown(
        out.received_y, static_cast<int>(out.participants.size()), stats.zeta);
    if (!estimate.ok()) return estimate.status();
    out.g_hat = std::move(estimate->g_hat);
    out.skipped = estimate->skipped;
  }

  out.eta = config.learning_rate.At(model.t);
  result.next.w = model.w;
  for (int j = 0; j < d; ++j) result.next.w[j] -= out.eta * out.g_hat[j];
  result.next.t = model.t + 1;
  return result;
}

absl::StatusOr<TrainingTrace> RunTraining(const TrainingTask& task,
                                          const TrainingConfig& config) {
  const int num_users = task.num_users();
  auto fail = [&](int64_t round, const absl::Status& status) {
    return absl::Status(status.code(),
                        absl::StrCat("trial ", config.trial, ", round ", round,
                                     ": ", status.message()));
  };
  if (config.rounds < 1) {
    return absl::InvalidArgumentError("training needs at least one round");
  }
  if (absl::Status s = CheckRoundConfig(task, config.round); !s.ok()) {
    return fail(0, s);
  }
  if (absl::Status s = ValidatePolicy(config.round.policy, num_users,
                                      static_cast<int>(config.rounds));
      !s.ok()) {
    return fail(0, s);
  }
  if (!(config.delta_local > 0.0 && config.delta_local <= 1.0) ||
      !(config.delta_tilde > 0.0 && config.delta_tilde <= 1.0) ||
      (config.delta_prime_rule == DeltaPrimeRule::kFixed &&
       !(config.delta_prime > 0.0 && config.delta_prime < 1.0))) {
    return fail(0, absl::InvalidArgumentError(
                       "privacy parameters outside their domains"));
  }
  if (config.fading &&
      (!(config.rician_gamma > 0.0) ||
       !(config.temporal_rho >= 0.0 && config.temporal_rho < 1.0))) {
    return fail(0, absl::InvalidArgumentError(
                       "fading needs gamma > 0 and rho in [0, 1)"));
  }

  ModelState model;
  model.w = config.initial_w.empty()
                ? std::vector<double>(task.dimension(), 0.0)
                : config.initial_w;
  if (static_cast<int>(model.w.size()) != task.dimension()) {
    return fail(
        0, absl::InvalidArgumentError("initial model has the wrong dimension"));
  }
  FadingChannel channel(num_users, config.rician_gamma, config.temporal_rho,
                        config.master_seed, config.trial);
  const std::vector<double> unit_gains(num_users, 1.0);
  const StreamKey base_key{config.master_seed, config.trial, 0, 0,
                           StreamPurpose::kSampling};

  TrainingTrace trace;
  trace.rows.reserve(config.rounds);
  HeterogeneousComposer composer;
  for (int64_t t = 1; t <= config.rounds; ++t) {
    std::vector<double> gains = unit_gains;
    if (config.fading) {
      absl::StatusOr<std::vector<double>> g =
          channel.Advance(static_cast<uint64_t>(t - 1));
      if (!g.ok()) return fail(t, g.status());
      gains = *std::move(g);
    }
    absl::StatusOr<RoundResult> result =
        RunRound(task, model, config.round, gains, base_key);
    if (!result.ok()) return fail(t, result.status());
    model = std::move(result->next);
    const RoundOutcome& out = result->outcome;

    const RoundAccounting acc = AccountRound(out.probabilities, config);
    if (absl::Status s = composer.Add(acc.eps_central, acc.delta_central);
        !s.ok()) {
      return fail(t, s);
    }
    absl::StatusOr<PrivacyBudget> total = composer.Total(config.delta_tilde);
    if (!total.ok()) return fail(t, total.status());

    TraceRow row;
    row.t = t;
    row.loss = task.Loss(model.w);
    row.gap = task.Gap(model.w);
    if (!std::isfinite(row.gap)) {
      return fail(t, absl::InternalError("model diverged"));
    }
    row.eps_local_max = acc.eps_local_max;
    row.eps_central = acc.eps_central;
    row.eps_central_total = total->epsilon;
    row.delta_central_total = total->delta;
    row.participants = static_cast<int>(out.participants.size());
    row.effective_noise_var = out.effective_noise_var;
    row.infeasible = acc.infeasible;
    if (acc.infeasible) ++trace.infeasible_rounds;
    trace.rows.push_back(row);
  }
  trace.final_w = std::move(model.w);
  return trace;
}

}  // namespace airdp
