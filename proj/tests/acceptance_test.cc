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

// Acceptance checks. Prints one PASS/FAIL line per criterion and exits with
// status 1 if any criterion fails.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "absl/strings/str_format.h"
#include "airdp/channel.h"
#include "airdp/config.h"
#include "airdp/conv_bounds.h"
#include "airdp/experiments.h"
#include "airdp/fedsgd_sim.h"
#include "airdp/rng.h"
#include "airdp/sampling.h"
#include "airdp/training_task.h"

namespace airdp {
namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

template <typename T>
T ValueOrDie(absl::StatusOr<T> v) {
  if (!v.ok()) {
    std::fprintf(stderr, "unexpected error: %s\n",
                 v.status().ToString().c_str());
    std::abort();
  }
  return *std::move(v);
}

ExperimentConfig Preset(Experiment e, const char* name,
                        const char* text = nullptr) {
  ConfigSources sources;
  sources.preset = name;
  if (text != nullptr) sources.config_text = text;
  return ValueOrDie(ResolveConfig(e, sources));
}

double RelErr(double a, double b) { return std::fabs(a - b) / std::fabs(b); }

Verdict TableReproduction() {
  struct Cell {
    const char* preset;
    double lipschitz;
    double p;
    double reference;
  };
  const Cell cells[] = {
      {"table2", 1.0, 0.9, 2.46},   {"table2", 1.0, 0.3, 5.124},
      {"table2", 0.1, 0.9, 0.2460}, {"table2", 0.1, 0.3, 0.5124},
      {"table3", 1.0, 0.9, 0.8953}, {"table3", 1.0, 0.3, 2.084},
  };
  Verdict v{true, ""};
  double worst = 0.0;
  int found = 0;
  for (const Cell& c : cells) {
    const std::vector<LocalDpEntry> entries = ValueOrDie(
        RunLocalDpTable(Preset(Experiment::kLocalDpTable, c.preset)));
    for (const LocalDpEntry& e : entries) {
      if (e.channel_aware || e.lipschitz != c.lipschitz || e.parameter != c.p) {
        continue;
      }
      ++found;
      const double err = RelErr(e.eps_local_max, c.reference);
      worst = std::max(worst, err);
      v.pass = v.pass && err <= 0.005;
    }
  }
  v.pass = v.pass && found == 6;
  v.detail =
      absl::StrFormat("%d/6 values, worst relative error %.3g%% (tol 0.5%%)",
                      found, 100 * worst);
  return v;
}

Verdict ScalingLaw() {
  const PrivacySweepResult r =
      ValueOrDie(RunPrivacySweep(Preset(Experiment::kPrivacySweep, "fig2")));
  const double s = r.slope_wireless_sampling;
  const double w = r.slope_wireless;
  return {s >= -0.78 && s <= -0.72 && w >= -0.53 && w <= -0.47,
          absl::StrFormat("slope %.5f in [-0.78, -0.72]; p=1 slope %.5f in "
                          "[-0.53, -0.47]",
                          s, w)};
}

Verdict Ordering() {
  const PrivacySweepResult r =
      ValueOrDie(RunPrivacySweep(Preset(Experiment::kPrivacySweep, "fig2")));
  Verdict v{true, ""};
  int rows = 0;
  std::string violations;
  for (const PrivacySweepRow& row : r.rows) {
    if (row.users < 100) continue;
    ++rows;
    const bool ok = row.feasible && row.eps_orth > row.eps_orth_sampling &&
                    row.eps_orth_sampling > row.eps_wireless &&
                    row.eps_wireless > row.eps_wireless_sampling;
    if (!ok) {
      v.pass = false;
      violations += absl::StrFormat(
          " K=%d (wireless %.5f <= wireless+sampling %.5f)", row.users,
          row.eps_wireless, row.eps_wireless_sampling);
    }
  }
  v.detail = absl::StrFormat("%d rows with K >= 100", rows);
  if (!v.pass) v.detail += "; violated at" + violations;
  return v;
}

Verdict CompositionDecay() {
  const ExperimentConfig config = Preset(Experiment::kCompositionSweep, "fig2",
                                         R"({"rounds_grid": [10, 50, 100]})");
  const std::vector<CompositionCell> cells =
      ValueOrDie(RunCompositionSweep(config));
  Verdict v{true, ""};
  for (int64_t t : {10, 50, 100}) {
    double prev = INFINITY, at_1e3 = NAN, at_1e6 = NAN;
    for (const CompositionCell& c : cells) {
      if (c.rounds != t) continue;
      v.pass = v.pass && c.feasible && c.eps_total < prev;
      prev = c.eps_total;
      if (c.users == 1000) at_1e3 = c.eps_total;
      if (c.users == 1000000) at_1e6 = c.eps_total;
    }
    v.pass = v.pass && at_1e6 < 0.1 * at_1e3;
    v.detail +=
        absl::StrFormat("%sT=%d: %.4g -> %.4g", v.detail.empty() ? "" : "; ", t,
                        at_1e3, at_1e6);
  }
  return v;
}

std::unique_ptr<QuadraticTask> FixedGradientTask() {
  std::vector<std::vector<std::vector<double>>> offsets = {
      {{0.4, -0.3, 0.2}},
      {{-0.1, 0.5, 0.3}},
      {{0.6, 0.1, -0.4}},
      {{-0.5, -0.2, 0.1}},
      {{-0.4, -0.1, -0.2}}};
  return ValueOrDie(QuadraticTask::Create({1.0, 1.0, 1.0}, {0.0, 0.0, 0.0},
                                          std::move(offsets)));
}

Verdict Unbiasedness() {
  constexpr int kRounds = 100000;
  const std::unique_ptr<QuadraticTask> task = FixedGradientTask();
  const std::vector<double> w = {0.5, -0.2, 0.1};  // also the mean gradient
  const std::vector<double> gains(5, 1.0);
  Verdict v{true, ""};
  for (EstimatorMode mode : {EstimatorMode::kUnknown, EstimatorMode::kKnown}) {
    RoundConfig config;
    config.policy = UniformInvariant{0.5};
    config.noise_var.assign(5, 0.09);
    config.power.assign(5, 1.0);
    config.noise_var_n0 = 1.0;
    config.lipschitz = 10.0;
    config.estimator = mode;
    std::vector<double> sum(3, 0.0), sum_sq(3, 0.0);
    for (int r = 0; r < kRounds; ++r) {
      const RoundResult res = ValueOrDie(RunRound(
          *task, ModelState{w, r + 1}, config, gains, StreamKey{2026, 0}));
      for (int j = 0; j < 3; ++j) {
        sum[j] += res.outcome.g_hat[j];
        sum_sq[j] += res.outcome.g_hat[j] * res.outcome.g_hat[j];
      }
    }
    double worst = 0.0;
    for (int j = 0; j < 3; ++j) {
      const double mean = sum[j] / kRounds;
      const double se =
          std::sqrt((sum_sq[j] / kRounds - mean * mean) / (kRounds - 1));
      worst = std::max(worst, std::fabs(mean - w[j]) / se);
    }
    v.pass = v.pass && worst <= 4.0;
    v.detail +=
        absl::StrFormat("%s%s: max |z| %.2f", v.detail.empty() ? "" : "; ",
                        EstimatorName(mode), worst);
  }
  return v;
}

Verdict SecondMoment() {
  constexpr int kRounds = 100000;
  const ExperimentConfig preset = Preset(Experiment::kTrain, "fig3_k20");
  const std::unique_ptr<QuadraticTask> task =
      ValueOrDie(MakeQuadraticTask(preset.task.quadratic));
  TrainingConfig training =
      ValueOrDie(MakeTrainingConfig(preset, EstimatorMode::kUnknown, 0));
  RoundConfig config = training.round;
  FadingChannel channel(task->num_users(), preset.channel.rician_gamma,
                        preset.channel.temporal_rho, preset.master_seed, 0);
  const std::vector<double> w(task->dimension(), 0.0);
  double sum = 0.0, sum_sq = 0.0;
  for (int r = 0; r < kRounds; ++r) {
    const std::vector<double> gains = ValueOrDie(channel.Advance(r));
    const RoundResult res = ValueOrDie(RunRound(
        *task, ModelState{w, r + 1}, config, gains, StreamKey{2026, 0}));
    double sq = 0.0;
    for (double x : res.outcome.g_hat) sq += x * x;
    sum += sq;
    sum_sq += sq * sq;
  }
  const double mean = sum / kRounds;
  const double se = std::sqrt((sum_sq / kRounds - mean * mean) / (kRounds - 1));
  const double g2 = ValueOrDie(
      SecondMomentBound(ComputeParticipantStats(std::vector<double>(
                            task->num_users(), preset.sampling.p)),
                        preset.lipschitz, task->dimension(), preset.noise_var,
                        preset.receiver_noise_var));
  return {mean <= g2 + 3 * se,
          absl::StrFormat("E||g_hat||^2 = %.5f +/- %.5f, G^2 = %.5f", mean, se,
                          g2)};
}

// Criteria 7 and 8 share one run of the fig3_k20 training preset.
void TrainingCriteria(Verdict& dominance, Verdict& comparison) {
  const ExperimentConfig config = Preset(Experiment::kTrain, "fig3_k20");
  const TrainResult r = ValueOrDie(RunTrain(config));
  dominance = {config.trials >= 100, ""};
  const TrainSummaryRow* final_unknown = nullptr;
  const TrainSummaryRow* final_known = nullptr;
  for (const TrainSummaryRow& row : r.summary) {
    if (row.checkpoint == 100 || row.checkpoint == 1000) {
      dominance.pass = dominance.pass && std::isfinite(row.bound) &&
                       row.mean_gap <= row.bound;
      dominance.detail += absl::StrFormat(
          "%s%s T=%d: %.4g <= %.4g", dominance.detail.empty() ? "" : "; ",
          EstimatorName(row.mode), row.checkpoint, row.mean_gap, row.bound);
    }
    if (row.checkpoint == config.rounds) {
      (row.mode == EstimatorMode::kUnknown ? final_unknown : final_known) =
          &row;
    }
  }
  dominance.detail =
      absl::StrFormat("%d trials; ", config.trials) + dominance.detail;
  if (final_unknown == nullptr || final_known == nullptr) {
    comparison = {false, "final checkpoint missing"};
    return;
  }
  comparison = {
      final_unknown->mean_gap <=
          final_known->mean_gap + final_known->ci_half_width,
      absl::StrFormat("T=%d, %d trials: unknown %.5g <= known %.5g + %.2g",
                      config.rounds, config.trials, final_unknown->mean_gap,
                      final_known->mean_gap, final_known->ci_half_width)};
}

Verdict OracleEquivalence() {
  std::mt19937_64 gen(12);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  for (int trial = 0; trial < 60; ++trial) {
    const int k = 1 + trial % 12;
    std::vector<double> p(k);
    for (double& x : p) x = u(gen);
    std::vector<double> pmf(k + 1, 0.0);
    for (uint32_t mask = 0; mask < (1u << k); ++mask) {
      double prob = 1.0;
      int count = 0;
      for (int i = 0; i < k; ++i) {
        const bool in = mask & (1u << i);
        prob *= in ? p[i] : 1.0 - p[i];
        count += in;
      }
      pmf[count] += prob;
    }
    double mean = 0.0, second = 0.0, inv1 = 0.0, inv2 = 0.0;
    for (int j = 0; j <= k; ++j) {
      mean += j * pmf[j];
      second += static_cast<double>(j) * j * pmf[j];
      if (j > 0) {
        inv1 += pmf[j] / j;
        inv2 += pmf[j] / (static_cast<double>(j) * j);
      }
    }
    const std::vector<double> exact = ValueOrDie(CountDistributionExact(p));
    for (int j = 0; j <= k; ++j)
      worst = std::max(worst, std::fabs(exact[j] - pmf[j]));
    const ParticipantStats stats = ComputeParticipantStats(p);
    const InverseMoments m = ValueOrDie(InverseMomentsExact(p));
    for (double diff :
         {stats.mu - mean, stats.sigma2 - (second - mean * mean),
          stats.zeta - (1.0 - pmf[0]), m.first - inv1, m.second - inv2}) {
      worst = std::max(worst, std::fabs(diff));
    }
  }
  double taylor_worst = 0.0;
  for (int k : {100, 200, 500, 1000}) {
    for (double p : {0.5, 0.9}) {
      if (k * p < 50) continue;
      const std::vector<double> row(k, p);
      const ParticipantStats s = ComputeParticipantStats(row);
      const InverseMoments t = ValueOrDie(InverseMomentsTaylor(s.mu, s.sigma2));
      const InverseMoments e = ValueOrDie(InverseMomentsExact(row));
      taylor_worst = std::max(
          {taylor_worst, RelErr(t.first, e.first), RelErr(t.second, e.second)});
    }
  }
  return {worst <= 1e-12 && taylor_worst <= 0.01,
          absl::StrFormat("enumeration max abs diff %.2g (tol 1e-12); Taylor "
                          "max rel err %.3g%% for mu >= 50 (tol 1%%)",
                          worst, 100 * taylor_worst)};
}

int Main() {
  int failures = 0;
  auto report = [&](int id, const char* name, const Verdict& v) {
    std::printf("CRITERION %d %s: %s (%s)\n", id, name,
                v.pass ? "PASS" : "FAIL", v.detail.c_str());
    std::fflush(stdout);
    failures += !v.pass;
  };
  report(1, "table reproduction", TableReproduction());
  report(2, "scaling law", ScalingLaw());
  report(3, "ordering", Ordering());
  report(4, "composition decay", CompositionDecay());
  report(5, "unbiasedness", Unbiasedness());
  report(6, "second-moment bound", SecondMoment());
  Verdict dominance, comparison;
  TrainingCriteria(dominance, comparison);
  report(7, "bound dominance", dominance);
  report(8, "known vs unknown", comparison);
  report(9, "oracle equivalence", OracleEquivalence());
  std::printf(
      "CRITERION 10 desk-scale substitutes: NOT RUN (neural-network accuracies "
      "and "
      "empirical eps_c,max are replaced by criteria 1-9)\n");
  return failures == 0 ? 0 : 1;
}

}  // namespace
}  // namespace airdp

int main() { return airdp::Main(); }
