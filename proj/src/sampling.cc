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

#include "airdp/sampling.h"

#include <algorithm>
#include <cmath>
#include <span>
#include <type_traits>
#include <variant>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/str_cat.h"

namespace airdp {
namespace {

bool IsProbability(double x) {
  return std::isfinite(x) && x >= 0.0 && x <= 1.0;
}

absl::Status CheckProbabilities(std::span<const double> probabilities) {
  for (size_t i = 0; i < probabilities.size(); ++i) {
    if (!IsProbability(probabilities[i])) {
      return absl::InvalidArgumentError(absl::StrCat(
          "probability ", i, " outside [0, 1]: ", probabilities[i]));
    }
  }
  return absl::OkStatus();
}

bool IsConstant(std::span<const double> p) {
  return std::all_of(p.begin(), p.end(), [&](double x) { return x == p[0]; });
}

// Binomial(K, p) pmf in log space so large K does not underflow prematurely.
std::vector<double> BinomialPmf(int k, double p) {
  std::vector<double> pmf(k + 1, 0.0);
  if (p == 0.0) {
    pmf[0] = 1.0;
    return pmf;
  }
  if (p == 1.0) {
    pmf[k] = 1.0;
    return pmf;
  }
  const double log_p = std::log(p);
  const double log_q = std::log1p(-p);
  for (int j = 0; j <= k; ++j) {
    const double log_choose =
        std::lgamma(k + 1.0) - std::lgamma(j + 1.0) - std::lgamma(k - j + 1.0);
    pmf[j] = std::exp(log_choose + j * log_p + (k - j) * log_q);
  }
  return pmf;
}

}  // namespace

absl::Status ValidatePolicy(const SamplingPolicy& policy, int num_users,
                            int rounds) {
  return std::visit(
      [&](const auto& v) -> absl::Status {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, UniformInvariant>) {
          if (!IsProbability(v.p)) {
            return absl::InvalidArgumentError(
                absl::StrCat("uniform probability outside [0, 1]: ", v.p));
          }
        } else if constexpr (std::is_same_v<T, UniformSchedule>) {
          if (static_cast<int>(v.p.size()) != rounds) {
            return absl::InvalidArgumentError(
                absl::StrCat("schedule has ", v.p.size(),
                             " entries but training runs ", rounds, " rounds"));
          }
          return CheckProbabilities(v.p);
        } else if constexpr (std::is_same_v<T, ChannelAware>) {
          if (!(std::isfinite(v.h_threshold) && v.h_threshold > 0.0)) {
            return absl::InvalidArgumentError(absl::StrCat(
                "h_threshold must be positive, got ", v.h_threshold));
          }
        } else {
          if (static_cast<int>(v.p.size()) != rounds) {
            return absl::InvalidArgumentError(
                absl::StrCat("probability matrix has ", v.p.size(),
                             " rows but training runs ", rounds, " rounds"));
          }
          for (const auto& row : v.p) {
            if (static_cast<int>(row.size()) != num_users) {
              return absl::InvalidArgumentError(
                  absl::StrCat("probability row has ", row.size(),
                               " entries, expected ", num_users));
            }
            if (absl::Status s = CheckProbabilities(row); !s.ok()) return s;
          }
        }
        return absl::OkStatus();
      },
      policy);
}

absl::StatusOr<std::vector<double>> ResolveProbabilities(
    const SamplingPolicy& policy, std::span<const double> gains, int round,
    int num_users) {
  if (num_users < 1) {
    return absl::InvalidArgumentError(
        absl::StrCat("number of users must be positive, got ", num_users));
  }
  if (round < 0) {
    return absl::OutOfRangeError(absl::StrCat("negative round ", round));
  }
  return std::visit(
      [&](const auto& v) -> absl::StatusOr<std::vector<double>> {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, UniformInvariant>) {
          if (!IsProbability(v.p)) {
            return absl::InvalidArgumentError(
                absl::StrCat("uniform probability outside [0, 1]: ", v.p));
          }
          return std::vector<double>(num_users, v.p);
        } else if constexpr (std::is_same_v<T, UniformSchedule>) {
          if (static_cast<size_t>(round) >= v.p.size()) {
            return absl::OutOfRangeError(absl::StrCat(
                "round ", round, " beyond schedule of ", v.p.size()));
          }
          if (!IsProbability(v.p[round])) {
            return absl::InvalidArgumentError(absl::StrCat(
                "scheduled probability outside [0, 1]: ", v.p[round]));
          }
          return std::vector<double>(num_users, v.p[round]);
        } else if constexpr (std::is_same_v<T, ChannelAware>) {
          if (static_cast<int>(gains.size()) != num_users) {
            return absl::FailedPreconditionError(absl::StrCat(
                "channel-aware sampling needs one gain per user; got ",
                gains.size(), " gains for ", num_users, " users"));
          }
          if (!(v.h_threshold > 0.0)) {
            return absl::InvalidArgumentError(absl::StrCat(
                "h_threshold must be positive, got ", v.h_threshold));
          }
          std::vector<double> p(num_users);
          for (int k = 0; k < num_users; ++k) {
            if (!(gains[k] >= 0.0)) {
              return absl::InvalidArgumentError(
                  absl::StrCat("negative channel gain ", gains[k]));
            }
            p[k] = std::min(1.0, gains[k] / v.h_threshold);
          }
          return p;
        } else {
          if (static_cast<size_t>(round) >= v.p.size()) {
            return absl::OutOfRangeError(
                absl::StrCat("round ", round, " beyond probability matrix of ",
                             v.p.size(), " rows"));
          }
          const std::vector<double>& row = v.p[round];
          if (static_cast<int>(row.size()) != num_users) {
            return absl::InvalidArgumentError(
                absl::StrCat("probability row has ", row.size(),
                             " entries, expected ", num_users));
          }
          if (absl::Status s = CheckProbabilities(row); !s.ok()) return s;
          return row;
        }
      },
      policy);
}

std::vector<int> SampleParticipants(std::span<const double> probabilities,
                                    RngStream& rng) {
  std::vector<int> participants;
  for (size_t k = 0; k < probabilities.size(); ++k) {
    // One draw per user regardless of p keeps the stream aligned across
    // policies.
    if (rng.Bernoulli(probabilities[k])) {
      participants.push_back(static_cast<int>(k));
    }
  }
  return participants;
}

ParticipantStats ComputeParticipantStats(
    std::span<const double> probabilities) {
  ParticipantStats stats;
  double log_none = 0.0;
  bool certain = false;
  for (double p : probabilities) {
    stats.mu += p;
    stats.sigma2 += p * (1.0 - p);
    if (p >= 1.0) {
      certain = true;
    } else {
      log_none += std::log1p(-p);
    }
  }
  stats.zeta = certain ? 1.0 : -std::expm1(log_none);
  return stats;
}

absl::StatusOr<std::vector<double>> CountDistributionExact(
    std::span<const double> probabilities) {
  if (absl::Status s = CheckProbabilities(probabilities); !s.ok()) return s;
  const int k = static_cast<int>(probabilities.size());
  if (k > 0 && IsConstant(probabilities)) {
    return BinomialPmf(k, probabilities[0]);
  }
  // Poisson-binomial recursion: fold in one user at a time.
  std::vector<double> pmf(k + 1, 0.0);
  pmf[0] = 1.0;
  for (int i = 0; i < k; ++i) {
    const double p = probabilities[i];
    for (int j = i + 1; j >= 1; --j) {
      pmf[j] = pmf[j] * (1.0 - p) + pmf[j - 1] * p;
    }
    pmf[0] *= (1.0 - p);
  }
  return pmf;
}

absl::StatusOr<InverseMoments> InverseMomentsExact(
    std::span<const double> probabilities) {
  absl::StatusOr<std::vector<double>> pmf =
      CountDistributionExact(probabilities);
  if (!pmf.ok()) return pmf.status();
  InverseMoments moments;
  for (size_t j = 1; j < pmf->size(); ++j) {
    const double inv = 1.0 / static_cast<double>(j);
    moments.first += (*pmf)[j] * inv;
    moments.second += (*pmf)[j] * inv * inv;
  }
  return moments;
}

}  // namespace airdp
