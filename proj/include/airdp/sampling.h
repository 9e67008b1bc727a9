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

// Participation policies and the statistics of the random participant count.

#ifndef AIRDP_SAMPLING_H_
#define AIRDP_SAMPLING_H_

#include <span>
#include <variant>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "airdp/rng.h"

namespace airdp {

// Same probability for every user and round.
struct UniformInvariant {
  double p = 1.0;
};

// Same probability for every user; one entry per round.
struct UniformSchedule {
  std::vector<double> p;
};

// p_k = min(1, h_k / h_threshold), using this round's channel gain.
struct ChannelAware {
  double h_threshold = 1.0;
};

// Arbitrary per-round, per-user probabilities: rows are rounds, columns users.
struct ExplicitProbabilities {
  std::vector<std::vector<double>> p;
};

using SamplingPolicy = std::variant<UniformInvariant, UniformSchedule,
                                    ChannelAware, ExplicitProbabilities>;

// Checks that every probability lies in [0, 1] and that the schedule or matrix
// covers `rounds` rounds of `num_users` users.
absl::Status ValidatePolicy(const SamplingPolicy& policy, int num_users,
                            int rounds);

// Per-user probabilities for 0-based round `round`. `gains` may be empty unless
// the policy is channel-aware.
absl::StatusOr<std::vector<double>> ResolveProbabilities(
    const SamplingPolicy& policy, std::span<const double> gains, int round,
    int num_users);

// Independent Bernoulli(p_k) participation. Returns sorted user indices.
std::vector<int> SampleParticipants(std::span<const double> probabilities,
                                    RngStream& rng);

struct ParticipantStats {
  double mu = 0.0;      // sum p_k
  double sigma2 = 0.0;  // sum p_k (1 - p_k)
  double zeta = 0.0;    // 1 - prod (1 - p_k)
};

ParticipantStats ComputeParticipantStats(std::span<const double> probabilities);

// Exact pmf of the participant count over {0, ..., K}.
absl::StatusOr<std::vector<double>> CountDistributionExact(
    std::span<const double> probabilities);

// E[1{|S| >= 1} / |S|] and E[1{|S| >= 1} / |S|^2]; an empty round contributes
// zero.
struct InverseMoments {
  double first = 0.0;
  double second = 0.0;
};

absl::StatusOr<InverseMoments> InverseMomentsExact(
    std::span<const double> probabilities);

}  // namespace airdp

#endif  // AIRDP_SAMPLING_H_
