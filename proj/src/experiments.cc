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

#include "airdp/experiments.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <limits>
#include <memory>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/string_view.h"
#include "airdp/channel.h"
#include "airdp/config.h"
#include "airdp/conv_bounds.h"
#include "airdp/csv.h"
#include "airdp/dp_analysis.h"
#include "airdp/fedsgd_sim.h"
#include "airdp/sampling.h"
#include "airdp/training_task.h"

namespace airdp {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kZ975 = 1.959963984540054;

MechanismParams Mechanism(const ExperimentConfig& config, double lipschitz) {
  MechanismParams params;
  params.lipschitz = lipschitz;
  params.sigma_min = std::sqrt(config.noise_var);
  params.delta_local = config.delta_local;
  params.noise_var_n0 = config.receiver_noise_var;
  return params;
}

double DeltaPrimeFor(const ExperimentConfig& config, double mu, int64_t k) {
  return config.delta_prime_rule == DeltaPrimeRule::kAdaptive
             ? AdaptiveDeltaPrime(mu, k)
             : config.delta_prime;
}

absl::StatusOr<std::unique_ptr<TrainingTask>> BuildTask(
    const ExperimentConfig& config) {
  if (config.task.type == TaskSpec::Type::kQuadratic) {
    absl::StatusOr<std::unique_ptr<QuadraticTask>> task =
        MakeQuadraticTask(config.task.quadratic);
    if (!task.ok()) return task.status();
    return std::unique_ptr<TrainingTask>(*std::move(task));
  }
  return MakeLogisticTask(config.task.logistic);
}

// Time-invariant or per-round probability rows for the closed-form bounds;
// empty when participation depends on the channel.
absl::StatusOr<std::vector<std::vector<double>>> BoundRows(
    const ExperimentConfig& config, int64_t rounds) {
  const int64_t k = config.users;
  switch (config.sampling.type) {
    case SamplingSpec::Type::kUniform:
      return std::vector<std::vector<double>>{
          std::vector<double>(k, config.sampling.p)};
    case SamplingSpec::Type::kOptimal: {
      absl::StatusOr<double> p =
          OptimalSamplingProbability(k, config.delta_prime);
      if (!p.ok()) return p.status();
      return std::vector<std::vector<double>>{std::vector<double>(k, *p)};
    }
    case SamplingSpec::Type::kSchedule: {
      std::vector<std::vector<double>> rows;
      for (int64_t t = 0; t < rounds; ++t) {
        rows.emplace_back(k, config.sampling.schedule[t]);
      }
      return rows;
    }
    case SamplingSpec::Type::kExplicit:
      return std::vector<std::vector<double>>(
          config.sampling.matrix.begin(),
          config.sampling.matrix.begin() + rounds);
    case SamplingSpec::Type::kChannelAware:
      return std::vector<std::vector<double>>{};
  }
  return std::vector<std::vector<double>>{};
}

ConvergenceParams BoundParams(const ExperimentConfig& config, int64_t rounds,
                              std::vector<std::vector<double>> rows) {
  ConvergenceParams params;
  params.strong_convexity = config.task.quadratic.strong_convexity;
  params.smoothness = config.task.quadratic.smoothness;
  params.lipschitz = config.lipschitz;
  params.dimension = config.task.quadratic.dimension;
  params.noise_var_max = config.noise_var;
  params.noise_var_n0 = config.receiver_noise_var;
  params.rounds = rounds;
  params.probabilities = std::move(rows);
  return params;
}

std::string Cell(double x) { return FormatDouble(x); }
std::string Cell(int64_t x) { return absl::StrCat(x); }

}  // namespace

int ThreadCount() {
  if (const char* env = std::getenv("AIRDP_THREADS")) {
    int n = 0;
    if (absl::SimpleAtoi(env, &n) && n > 0) return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

void ParallelFor(int64_t n, const std::function<void(int64_t)>& fn) {
  const int64_t workers = std::min<int64_t>(ThreadCount(), n);
  if (workers <= 1) {
    for (int64_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int64_t> next{0};
  std::vector<std::thread> threads;
  threads.reserve(workers);
  for (int64_t w = 0; w < workers; ++w) {
    threads.emplace_back([&] {
      for (int64_t i = next++; i < n; i = next++) fn(i);
    });
  }
  for (std::thread& t : threads) t.join();
}

double LogLogSlope(const std::vector<double>& x, const std::vector<double>& y,
                   double x_min, double x_max) {
  std::vector<std::pair<double, double>> pts;
  for (size_t i = 0; i < x.size() && i < y.size(); ++i) {
    if (x[i] >= x_min && x[i] <= x_max && std::isfinite(y[i]) && y[i] > 0.0 &&
        x[i] > 0.0) {
      pts.emplace_back(std::log(x[i]), std::log(y[i]));
    }
  }
  if (pts.size() < 2) return kNaN;
  double mx = 0.0, my = 0.0;
  for (const auto& [a, b] : pts) {
    mx += a;
    my += b;
  }
  mx /= pts.size();
  my /= pts.size();
  double sxy = 0.0, sxx = 0.0;
  for (const auto& [a, b] : pts) {
    sxy += (a - mx) * (b - my);
    sxx += (a - mx) * (a - mx);
  }
  return sxx > 0.0 ? sxy / sxx : kNaN;
}

absl::StatusOr<PrivacySweepResult> RunPrivacySweep(
    const ExperimentConfig& config) {
  const MechanismParams params = Mechanism(config, config.lipschitz);
  PrivacySweepResult result;
  result.rows.resize(config.users_grid.size());
  std::vector<absl::Status> errors(config.users_grid.size());
  ParallelFor(static_cast<int64_t>(config.users_grid.size()), [&](int64_t i) {
    PrivacySweepRow& row = result.rows[i];
    const int64_t k = config.users_grid[i];
    row.users = k;
    auto fill = [&]() -> absl::Status {
      absl::StatusOr<double> p =
          OptimalSamplingProbability(k, config.delta_prime);
      if (!p.ok()) return p.status();
      row.p_star = *p;
      absl::StatusOr<PrivacyBudget> ws =
          CentralEpsilonUniform(*p, k, params, config.delta_prime);
      if (ws.ok()) {
        row.eps_wireless_sampling = ws->epsilon;
      } else if (absl::IsFailedPrecondition(ws.status())) {
        row.eps_wireless_sampling = kNaN;
        row.feasible = false;
      } else {
        return ws.status();
      }
      const std::pair<Comparator, double*> comparators[] = {
          {Comparator::kWirelessNoSampling, &row.eps_wireless},
          {Comparator::kOrthogonalWithSampling, &row.eps_orth_sampling},
          {Comparator::kOrthogonalNoSampling, &row.eps_orth}};
      for (const auto& [variant, slot] : comparators) {
        absl::StatusOr<double> eps =
            ComparatorEpsilon(k, params, config.delta_prime, variant);
        if (!eps.ok()) return eps.status();
        *slot = *eps;
      }
      return absl::OkStatus();
    };
    errors[i] = fill();
  });
  for (const absl::Status& s : errors) {
    if (!s.ok()) return s;
  }
  std::vector<double> ks, ws, w;
  for (const PrivacySweepRow& row : result.rows) {
    ks.push_back(static_cast<double>(row.users));
    ws.push_back(row.eps_wireless_sampling);
    w.push_back(row.eps_wireless);
  }
  result.slope_wireless_sampling =
      LogLogSlope(ks, ws, config.fit_min_users, config.fit_max_users);
  result.slope_wireless =
      LogLogSlope(ks, w, config.fit_min_users, config.fit_max_users);
  return result;
}

absl::StatusOr<std::vector<CompositionCell>> RunCompositionSweep(
    const ExperimentConfig& config) {
  const MechanismParams params = Mechanism(config, config.lipschitz);
  std::vector<int64_t> users = config.users_grid;
  std::vector<int64_t> rounds = config.rounds_grid;
  std::sort(users.begin(), users.end());
  std::sort(rounds.begin(), rounds.end());
  std::vector<CompositionCell> cells(users.size() * rounds.size());
  std::vector<absl::Status> errors(cells.size());
  ParallelFor(static_cast<int64_t>(cells.size()), [&](int64_t i) {
    CompositionCell& cell = cells[i];
    cell.users = users[i / rounds.size()];
    cell.rounds = rounds[i % rounds.size()];
    auto fill = [&]() -> absl::Status {
      absl::StatusOr<double> p =
          OptimalSamplingProbability(cell.users, config.delta_prime);
      if (!p.ok()) return p.status();
      cell.p_star = *p;
      absl::StatusOr<PrivacyBudget> round =
          CentralEpsilonUniform(*p, cell.users, params, config.delta_prime);
      if (!round.ok()) {
        if (!absl::IsFailedPrecondition(round.status())) return round.status();
        cell.feasible = false;
        cell.eps_round = cell.eps_total = cell.delta_total = kNaN;
        return absl::OkStatus();
      }
      cell.eps_round = round->epsilon;
      absl::StatusOr<PrivacyBudget> total = ComposeHomogeneous(
          round->epsilon, round->delta, cell.rounds, config.delta_tilde);
      if (!total.ok()) return total.status();
      cell.eps_total = total->epsilon;
      cell.delta_total = total->delta;
      return absl::OkStatus();
    };
    errors[i] = fill();
  });
  for (const absl::Status& s : errors) {
    if (!s.ok()) return s;
  }
  return cells;
}

absl::StatusOr<std::vector<LocalDpEntry>> RunLocalDpTable(
    const ExperimentConfig& config) {
  const int64_t k = config.users;
  std::vector<LocalDpEntry> entries;

  // Per-round probabilities of channel-aware sampling; shared by every L.
  std::vector<std::vector<double>> aware_rows;
  {
    FadingChannel channel(static_cast<int>(k), config.channel.rician_gamma,
                          config.channel.temporal_rho, config.master_seed,
                          /*trial=*/0);
    const SamplingPolicy policy = ChannelAware{config.h_threshold};
    for (int64_t t = 0; t < config.monte_carlo_rounds; ++t) {
      std::vector<double> gains(k, 1.0);
      if (config.channel.fading) {
        absl::StatusOr<std::vector<double>> g =
            channel.Advance(static_cast<uint64_t>(t));
        if (!g.ok()) return g.status();
        gains = *std::move(g);
      }
      absl::StatusOr<std::vector<double>> p = ResolveProbabilities(
          policy, gains, static_cast<int>(t), static_cast<int>(k));
      if (!p.ok()) return p.status();
      aware_rows.push_back(*std::move(p));
    }
  }

  // Largest per-user local epsilon of one round.
  auto round_max = [&](const std::vector<double>& p, double lipschitz,
                       bool& clamped) -> absl::StatusOr<double> {
    const ParticipantStats stats = ComputeParticipantStats(p);
    const double delta_prime = DeltaPrimeFor(config, stats.mu, k);
    if (!(delta_prime < 1.0)) {
      return absl::FailedPreconditionError("delta' reached 1");
    }
    absl::StatusOr<double> beta = BetaFromDelta(delta_prime, k);
    if (!beta.ok()) return beta.status();
    const int worst =
        static_cast<int>(std::max_element(p.begin(), p.end()) - p.begin());
    absl::StatusOr<double> kappa = LocalKappa(p, worst, *beta);
    if (!kappa.ok()) return kappa.status();
    absl::StatusOr<LocalEpsilon> eps = LocalEpsilonBound(
        Mechanism(config, lipschitz), *kappa, config.include_n0);
    if (!eps.ok()) return eps.status();
    clamped = clamped || eps->kappa_clamped;
    return eps->epsilon;
  };

  for (double lipschitz : config.lipschitz_values) {
    LocalDpEntry aware;
    aware.lipschitz = lipschitz;
    aware.channel_aware = true;
    aware.parameter = config.h_threshold;
    double sum_eps = 0.0, sum_mu = 0.0;
    for (const std::vector<double>& p : aware_rows) {
      absl::StatusOr<double> eps = round_max(p, lipschitz, aware.kappa_clamped);
      if (!eps.ok()) return eps.status();
      sum_eps += *eps;
      aware.eps_local_max = std::max(aware.eps_local_max, *eps);
      sum_mu += ComputeParticipantStats(p).mu;
    }
    const double n = static_cast<double>(aware_rows.size());
    aware.eps_local_mean = sum_eps / n;
    aware.avg_participants = sum_mu / n;
    entries.push_back(aware);

    for (double prob : config.probabilities) {
      LocalDpEntry uniform;
      uniform.lipschitz = lipschitz;
      uniform.parameter = prob;
      const std::vector<double> p(k, prob);
      absl::StatusOr<double> eps =
          round_max(p, lipschitz, uniform.kappa_clamped);
      if (!eps.ok()) return eps.status();
      uniform.eps_local_mean = uniform.eps_local_max = *eps;
      uniform.avg_participants = static_cast<double>(k) * prob;
      entries.push_back(uniform);
    }
  }
  return entries;
}

absl::StatusOr<std::vector<BoundRow>> RunBoundCurves(
    const ExperimentConfig& config) {
  std::vector<int64_t> rounds = config.rounds_grid;
  std::sort(rounds.begin(), rounds.end());
  std::vector<BoundRow> rows;
  for (int64_t t : rounds) {
    absl::StatusOr<std::vector<std::vector<double>>> prob_rows =
        BoundRows(config, t);
    if (!prob_rows.ok()) return prob_rows.status();
    const ConvergenceParams params = BoundParams(config, t, *prob_rows);
    BoundRow row;
    row.rounds = t;
    absl::StatusOr<double> unknown = BoundUnknown(params);
    if (!unknown.ok()) return unknown.status();
    absl::StatusOr<double> taylor = BoundKnown(params, MomentSource::kTaylor);
    if (!taylor.ok()) return taylor.status();
    absl::StatusOr<double> exact = BoundKnown(params, MomentSource::kExact);
    if (!exact.ok()) return exact.status();
    absl::StatusOr<OptimalPBound> optimal =
        BoundOptimalP(params, config.delta_prime, config.users);
    if (!optimal.ok()) return optimal.status();
    row.bound_unknown = *unknown;
    row.bound_known_taylor = *taylor;
    row.bound_known_exact = *exact;
    row.rel_gap = std::fabs(*exact - *unknown) / *unknown;
    row.bound_optimal_p = optimal->bound;
    row.p_star = optimal->p_star;
    row.optimal_fell_back = optimal->fell_back;
    rows.push_back(row);
  }
  return rows;
}

absl::string_view EstimatorName(EstimatorMode mode) {
  return mode == EstimatorMode::kKnown ? "known" : "unknown";
}

absl::StatusOr<TrainingConfig> MakeTrainingConfig(
    const ExperimentConfig& config, EstimatorMode mode, int trial) {
  const int64_t k = config.users;
  TrainingConfig tc;
  RoundConfig& round = tc.round;
  switch (config.sampling.type) {
    case SamplingSpec::Type::kUniform:
      round.policy = UniformInvariant{config.sampling.p};
      break;
    case SamplingSpec::Type::kOptimal: {
      absl::StatusOr<double> p =
          OptimalSamplingProbability(k, config.delta_prime);
      if (!p.ok()) return p.status();
      round.policy = UniformInvariant{*p};
      break;
    }
    case SamplingSpec::Type::kSchedule:
      round.policy = UniformSchedule{config.sampling.schedule};
      break;
    case SamplingSpec::Type::kChannelAware:
      round.policy = ChannelAware{config.sampling.h_threshold};
      break;
    case SamplingSpec::Type::kExplicit:
      round.policy = ExplicitProbabilities{config.sampling.matrix};
      break;
  }
  const int d = config.task.type == TaskSpec::Type::kQuadratic
                    ? config.task.quadratic.dimension
                    : config.task.logistic.dimension;
  round.noise_var.assign(k, config.noise_var);
  if (config.alpha_mode == AlphaMode::kEmpirical) {
    if (!(config.receiver_noise_var > 0.0)) {
      return absl::InvalidArgumentError(
          "empirical scaling needs receiver_noise_var > 0 to define SNR");
    }
    for (double snr : config.channel.snr_db) {
      round.power.push_back(SnrToPower(snr, d, config.receiver_noise_var));
    }
  }
  round.noise_var_n0 = config.receiver_noise_var;
  round.lipschitz = config.lipschitz;
  round.estimator = mode;
  round.alpha_mode = config.alpha_mode;
  round.batch_size = config.batch_size;
  round.learning_rate = config.learning_rate;
  tc.rounds = config.rounds;
  tc.fading = config.channel.fading;
  tc.rician_gamma = config.channel.rician_gamma;
  tc.temporal_rho = config.channel.temporal_rho;
  tc.delta_local = config.delta_local;
  tc.delta_prime_rule = config.delta_prime_rule;
  tc.delta_prime = config.delta_prime;
  tc.delta_tilde = config.delta_tilde;
  tc.include_n0 = config.include_n0;
  tc.master_seed = config.master_seed;
  tc.trial = static_cast<uint64_t>(trial);
  return tc;
}

absl::StatusOr<TrainResult> RunTrain(const ExperimentConfig& config) {
  absl::StatusOr<std::unique_ptr<TrainingTask>> task = BuildTask(config);
  if (!task.ok()) return task.status();
  const std::vector<EstimatorMode>& modes = config.estimators;
  const int trials = config.trials;

  std::vector<TrainingConfig> configs;
  TrainResult result;
  for (EstimatorMode mode : modes) {
    for (int trial = 0; trial < trials; ++trial) {
      absl::StatusOr<TrainingConfig> tc =
          MakeTrainingConfig(config, mode, trial);
      if (!tc.ok()) return tc.status();
      configs.push_back(*std::move(tc));
      result.runs.push_back(TrainRun{mode, trial, {}});
    }
  }
  std::vector<absl::Status> errors(configs.size());
  ParallelFor(static_cast<int64_t>(configs.size()), [&](int64_t i) {
    absl::StatusOr<TrainingTrace> trace = RunTraining(**task, configs[i]);
    if (trace.ok()) {
      result.runs[i].trace = *std::move(trace);
    } else {
      errors[i] = trace.status();
    }
  });
  for (const absl::Status& s : errors) {
    if (!s.ok()) return s;
  }

  const bool has_bound =
      config.task.type == TaskSpec::Type::kQuadratic &&
      config.sampling.type != SamplingSpec::Type::kChannelAware &&
      config.learning_rate.schedule == LearningRate::Schedule::kInverse &&
      config.learning_rate.value == config.task.quadratic.strong_convexity;
  for (size_t m = 0; m < modes.size(); ++m) {
    for (int64_t checkpoint : config.checkpoints) {
      TrainSummaryRow row;
      row.mode = modes[m];
      row.checkpoint = checkpoint;
      row.trials = trials;
      double sum = 0.0, sum_sq = 0.0, sum_eps = 0.0;
      for (int trial = 0; trial < trials; ++trial) {
        const TrainingTrace& trace = result.runs[m * trials + trial].trace;
        const TraceRow& r = trace.rows[checkpoint - 1];
        sum += r.gap;
        sum_sq += r.gap * r.gap;
        sum_eps += r.eps_central_total;
        for (int64_t t = 0; t < checkpoint; ++t) {
          if (trace.rows[t].infeasible) ++row.infeasible_rounds;
        }
      }
      row.mean_gap = sum / trials;
      row.mean_eps_central_total = sum_eps / trials;
      if (trials > 1) {
        const double var =
            std::max(0.0, (sum_sq - trials * row.mean_gap * row.mean_gap) /
                              (trials - 1));
        row.ci_half_width = kZ975 * std::sqrt(var / trials);
      } else {
        row.ci_half_width = kNaN;
      }
      row.bound = kNaN;
      if (has_bound) {
        absl::StatusOr<std::vector<std::vector<double>>> prob_rows =
            BoundRows(config, checkpoint);
        if (!prob_rows.ok()) return prob_rows.status();
        const ConvergenceParams params =
            BoundParams(config, checkpoint, *std::move(prob_rows));
        absl::StatusOr<double> bound =
            modes[m] == EstimatorMode::kUnknown
                ? BoundUnknown(params)
                : BoundKnown(params, MomentSource::kExact);
        if (bound.ok()) row.bound = *bound;
      }
      result.summary.push_back(row);
    }
  }
  return result;
}

std::string TraceCsv(const TrainRun& run, const std::string& resolved_json) {
  CsvWriter writer({"t", "loss", "gap", "eps_local_max", "eps_central",
                    "eps_central_total", "delta_central_total", "participants",
                    "effective_noise_var"});
  AddProvenance(writer, resolved_json);
  writer.AddComment(absl::StrCat("trial ", run.trial, ", estimator ",
                                 EstimatorName(run.mode)));
  for (const TraceRow& r : run.trace.rows) {
    writer.AddRow({Cell(r.t), Cell(r.loss), Cell(r.gap), Cell(r.eps_local_max),
                   Cell(r.eps_central), Cell(r.eps_central_total),
                   Cell(r.delta_central_total),
                   Cell(static_cast<int64_t>(r.participants)),
                   Cell(r.effective_noise_var)});
  }
  writer.AddFooter(
      absl::StrCat("infeasible_rounds ", run.trace.infeasible_rounds));
  return writer.ToString();
}

absl::StatusOr<ExperimentOutput> RunExperiment(const ExperimentConfig& config) {
  ExperimentOutput out;
  switch (config.experiment) {
    case Experiment::kPrivacySweep: {
      absl::StatusOr<PrivacySweepResult> r = RunPrivacySweep(config);
      if (!r.ok()) return r.status();
      CsvWriter writer({"K", "p_star", "eps_wireless_sampling", "eps_wireless",
                        "eps_orth_sampling", "eps_orth", "status"});
      AddProvenance(writer, config.resolved_json);
      bool any_feasible = false;
      for (const PrivacySweepRow& row : r->rows) {
        any_feasible = any_feasible || row.feasible;
        writer.AddRow({Cell(row.users), Cell(row.p_star),
                       Cell(row.eps_wireless_sampling), Cell(row.eps_wireless),
                       Cell(row.eps_orth_sampling), Cell(row.eps_orth),
                       row.feasible ? "ok" : "infeasible"});
      }
      writer.AddFooter(absl::StrCat("slope_wireless_sampling ",
                                    FormatDouble(r->slope_wireless_sampling)));
      writer.AddFooter(
          absl::StrCat("slope_wireless ", FormatDouble(r->slope_wireless)));
      out.csv = writer.ToString();
      out.infeasible_only = !any_feasible;
      break;
    }
    case Experiment::kCompositionSweep: {
      absl::StatusOr<std::vector<CompositionCell>> cells =
          RunCompositionSweep(config);
      if (!cells.ok()) return cells.status();
      CsvWriter writer({"K", "T", "p_star", "eps_round", "eps_total",
                        "delta_total", "status"});
      AddProvenance(writer, config.resolved_json);
      bool any_feasible = false;
      for (const CompositionCell& c : *cells) {
        any_feasible = any_feasible || c.feasible;
        writer.AddRow({Cell(c.users), Cell(c.rounds), Cell(c.p_star),
                       Cell(c.eps_round), Cell(c.eps_total),
                       Cell(c.delta_total), c.feasible ? "ok" : "infeasible"});
      }
      out.csv = writer.ToString();
      out.infeasible_only = !any_feasible;
      break;
    }
    case Experiment::kLocalDpTable: {
      absl::StatusOr<std::vector<LocalDpEntry>> entries =
          RunLocalDpTable(config);
      if (!entries.ok()) return entries.status();
      CsvWriter writer({"L", "scheme", "parameter", "avg_participants",
                        "eps_local_mean", "eps_local_max", "kappa_clamped"});
      AddProvenance(writer, config.resolved_json);
      for (const LocalDpEntry& e : *entries) {
        writer.AddRow({Cell(e.lipschitz),
                       e.channel_aware ? "channel_aware" : "uniform",
                       Cell(e.parameter), Cell(e.avg_participants),
                       Cell(e.eps_local_mean), Cell(e.eps_local_max),
                       e.kappa_clamped ? "1" : "0"});
      }
      out.csv = writer.ToString();
      break;
    }
    case Experiment::kBoundCurves: {
      absl::StatusOr<std::vector<BoundRow>> rows = RunBoundCurves(config);
      if (!rows.ok()) return rows.status();
      CsvWriter writer({"T", "bound_unknown", "bound_known_taylor",
                        "bound_known_exact", "rel_gap", "bound_optimal_p",
                        "p_star"});
      AddProvenance(writer, config.resolved_json);
      for (const BoundRow& b : *rows) {
        writer.AddRow({Cell(b.rounds), Cell(b.bound_unknown),
                       Cell(b.bound_known_taylor), Cell(b.bound_known_exact),
                       Cell(b.rel_gap), Cell(b.bound_optimal_p),
                       Cell(b.p_star)});
      }
      if (!rows->empty() && rows->front().optimal_fell_back) {
        writer.AddFooter("bound_optimal_p uses p = 1 since p* is clamped");
      }
      out.csv = writer.ToString();
      break;
    }
    case Experiment::kTrain: {
      absl::StatusOr<TrainResult> r = RunTrain(config);
      if (!r.ok()) return r.status();
      CsvWriter writer({"estimator", "T", "trials", "mean_gap", "ci95_half",
                        "bound", "mean_eps_central_total",
                        "infeasible_rounds"});
      AddProvenance(writer, config.resolved_json);
      for (const TrainSummaryRow& s : r->summary) {
        writer.AddRow({std::string(EstimatorName(s.mode)), Cell(s.checkpoint),
                       Cell(static_cast<int64_t>(s.trials)), Cell(s.mean_gap),
                       Cell(s.ci_half_width), Cell(s.bound),
                       Cell(s.mean_eps_central_total),
                       Cell(s.infeasible_rounds)});
      }
      out.csv = writer.ToString();
      if (config.write_traces) {
        for (const TrainRun& run : r->runs) {
          out.side_files.emplace_back(
              absl::StrCat("trace_", EstimatorName(run.mode), "_", run.trial,
                           ".csv"),
              TraceCsv(run, config.resolved_json));
        }
      }
      break;
    }
  }
  return out;
}

}  // namespace airdp
