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

#include "airdp/conv_bounds.h"

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/str_cat.h"
#include "airdp/dp_analysis.h"
#include "airdp/sampling.h"

namespace airdp {
namespace {

absl::Status CheckCommon(const ConvergenceParams& p) {
  if (!(p.strong_convexity > 0.0) || !(p.smoothness >= p.strong_convexity)) {
    return absl::InvalidArgumentError(absl::StrCat(
        "need smoothness >= lambda > 0, got lambda=", p.strong_convexity,
        " smoothness=", p.smoothness));
  }
  if (!(p.lipschitz >= 0.0) || p.dimension < 1 || !(p.noise_var_max >= 0.0) ||
      !(p.noise_var_n0 >= 0.0)) {
    return absl::InvalidArgumentError("bound parameters outside their domains");
  }
  if (p.rounds < 1) {
    return absl::InvalidArgumentError("rounds must be positive");
  }
  return absl::OkStatus();
}

absl::Status CheckSchedule(const ConvergenceParams& p) {
  if (absl::Status s = CheckCommon(p); !s.ok()) return s;
  const size_t rows = p.probabilities.size();
  if (rows != 1 && rows != static_cast<size_t>(p.rounds)) {
    return absl::InvalidArgumentError(
        absl::StrCat("need 1 or ", p.rounds, " probability rows, got ", rows));
  }
  return absl::OkStatus();
}

double Prefactor(const ConvergenceParams& p) {
  const double t = static_cast<double>(p.rounds);
  return 2.0 * p.smoothness / (p.strong_convexity * p.strong_convexity * t * t);
}

// Sums `term(row)` over rounds; a single row counts T times.
template <typename Term>
absl::StatusOr<double> SumOverRounds(const ConvergenceParams& p, Term term) {
  if (absl::Status s = CheckSchedule(p); !s.ok()) return s;
  if (p.probabilities.size() == 1) {
    absl::StatusOr<double> v = term(p.probabilities[0]);
    if (!v.ok()) return v.status();
    return Prefactor(p) * static_cast<double>(p.rounds) * *v;
  }
  double sum = 0.0;
  for (const std::vector<double>& row : p.probabilities) {
    absl::StatusOr<double> v = term(row);
    if (!v.ok()) return v.status();
    sum += *v;
  }
  return Prefactor(p) * sum;
}

}  // namespace

absl::StatusOr<double> SecondMomentBound(const ParticipantStats& stats,
                                         double lipschitz, int dimension,
                                         double noise_var_max,
                                         double noise_var_n0) {
  if (!(stats.mu > 0.0)) {
    return absl::InvalidArgumentError(
        "second-moment bound needs a positive expected participant count");
  }
  const double mu2 = stats.mu * stats.mu;
  return lipschitz * lipschitz * (mu2 + stats.sigma2) / mu2 +
         dimension / mu2 * (noise_var_max * stats.mu + noise_var_n0);
}

absl::StatusOr<double> BoundUnknown(const ConvergenceParams& params) {
  return SumOverRounds(params, [&](std::span<const double> row) {
    return SecondMomentBound(ComputeParticipantStats(row), params.lipschitz,
                             params.dimension, params.noise_var_max,
                             params.noise_var_n0);
  });
}

absl::StatusOr<OptimalPBound> BoundOptimalP(const ConvergenceParams& params,
                                            double delta_prime,
                                            int64_t num_users) {
  if (absl::Status s = CheckCommon(params); !s.ok()) return s;
  absl::StatusOr<double> p_star =
      OptimalSamplingProbability(num_users, delta_prime);
  if (!p_star.ok()) return p_star.status();
  OptimalPBound out;
  out.p_star = *p_star;
  if (*p_star >= 1.0) {
    ConvergenceParams full = params;
    full.probabilities = {std::vector<double>(num_users, 1.0)};
    absl::StatusOr<double> bound = BoundUnknown(full);
    if (!bound.ok()) return bound.status();
    out.bound = *bound;
    out.fell_back = true;
    return out;
  }
  const double alpha = 2.0 * std::sqrt(0.5 * std::log(2.0 / delta_prime));
  const double root_k = std::sqrt(static_cast<double>(num_users));
  const double k = static_cast<double>(num_users);
  const double l2 = params.lipschitz * params.lipschitz;
  const double bracket =
      l2 * (alpha * (root_k - 1.0 / root_k) + 1.0) / (alpha * root_k) +
      params.dimension / (alpha * alpha * k) *
          (alpha * root_k * params.noise_var_max + params.noise_var_n0);
  out.bound = 2.0 * params.smoothness /
              (params.strong_convexity * params.strong_convexity *
               static_cast<double>(params.rounds)) *
              bracket;
  return out;
}

absl::StatusOr<InverseMoments> InverseMomentsTaylor(double mu, double sigma2) {
  if (!(mu > 0.0) || !(sigma2 >= 0.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("need mu > 0 and sigma2 >= 0, got ", mu, ", ", sigma2));
  }
  const double mu2 = mu * mu;
  return InverseMoments{1.0 / mu + sigma2 / (mu2 * mu),
                        1.0 / mu2 + 3.0 * sigma2 / (mu2 * mu2)};
}

absl::StatusOr<double> BoundKnown(const ConvergenceParams& params,
                                  MomentSource source) {
  return SumOverRounds(
      params, [&](std::span<const double> row) -> absl::StatusOr<double> {
        const ParticipantStats stats = ComputeParticipantStats(row);
        if (!(stats.zeta > 0.0)) {
          return absl::InvalidArgumentError(
              "known-count bound needs zeta > 0 in every round");
        }
        absl::StatusOr<InverseMoments> m =
            source == MomentSource::kTaylor
                ? InverseMomentsTaylor(stats.mu, stats.sigma2)
                : InverseMomentsExact(row);
        if (!m.ok()) return m.status();
        const double z = stats.zeta;
        return params.lipschitz * params.lipschitz / z +
               params.dimension / (z * z) *
                   (params.noise_var_max * m->first +
                    m->second * params.noise_var_n0);
      });
}

absl::StatusOr<double> BoundKnownUniform(const ConvergenceParams& params) {
  if (absl::Status s = CheckCommon(params); !s.ok()) return s;
  if (params.probabilities.size() != 1 || params.probabilities[0].empty()) {
    return absl::InvalidArgumentError(
        "uniform closed form needs one probability row");
  }
  const std::vector<double>& row = params.probabilities[0];
  const double p = row[0];
  for (double q : row) {
    if (q != p) {
      return absl::InvalidArgumentError(
          "uniform closed form needs identical probabilities");
    }
  }
  if (!(p > 0.0 && p <= 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("probability must lie in (0, 1], got ", p));
  }
  const double k = static_cast<double>(row.size());
  const double kp = k * p;
  const double zeta = -std::expm1(k * std::log1p(-p));
  const double q = (1.0 - p) / kp;
  const double bracket = params.lipschitz * params.lipschitz / zeta +
                         params.dimension / (kp * zeta * zeta) *
                             (params.noise_var_max * (1.0 + q) +
                              (1.0 + 3.0 * q) * params.noise_var_n0 / kp);
  return 2.0 * params.smoothness /
         (params.strong_convexity * params.strong_convexity *
          static_cast<double>(params.rounds)) *
         bracket;
}

}  // namespace airdp
