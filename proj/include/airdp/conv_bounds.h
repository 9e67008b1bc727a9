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

// Upper bounds on the expected optimality gap E[F(w_T)] - F(w*) of private
// wireless FedSGD with step size 1 / (lambda t).

#ifndef AIRDP_CONV_BOUNDS_H_
#define AIRDP_CONV_BOUNDS_H_

#include <cstdint>
#include <vector>

#include "absl/status/statusor.h"
#include "airdp/sampling.h"

namespace airdp {

struct ConvergenceParams {
  double strong_convexity = 0.2;  // lambda
  double smoothness = 0.9;
  double lipschitz = 2.0;
  int dimension = 30;
  double noise_var_max = 0.1;  // max_k sigma_k^2
  double noise_var_n0 = 1.0;
  int64_t rounds = 1;
  // Participation probabilities: a single row used for every round, or one row
  // per round.
  std::vector<std::vector<double>> probabilities;
};

// G^2 = L^2 (mu^2 + s^2) / mu^2 + (d / mu^2) (sigma_max^2 mu + N0), a bound on
// E||g_hat||^2 for the unknown-count estimator.
absl::StatusOr<double> SecondMomentBound(const ParticipantStats& stats,
                                         double lipschitz, int dimension,
                                         double noise_var_max,
                                         double noise_var_n0);

// (2 smoothness / (lambda^2 T^2)) sum_t G_t^2.
absl::StatusOr<double> BoundUnknown(const ConvergenceParams& params);

struct OptimalPBound {
  double bound = 0.0;
  double p_star = 1.0;
  bool fell_back = false;  // p* clamped at 1; bound is BoundUnknown at p = 1
};

// Closed form at p = p*(K, delta'). `params.probabilities` is ignored.
absl::StatusOr<OptimalPBound> BoundOptimalP(const ConvergenceParams& params,
                                            double delta_prime,
                                            int64_t num_users);

// Second-order expansions of E[1/|S|] and E[1/|S|^2] around mu:
//   (1/mu + s^2/mu^3, 1/mu^2 + 3 s^2/mu^4).
absl::StatusOr<InverseMoments> InverseMomentsTaylor(double mu, double sigma2);

enum class MomentSource { kTaylor, kExact };

// Bound for the known-count estimator:
//   (2 smoothness / (lambda^2 T^2)) sum_t [L^2/zeta_t
//       + (d/zeta_t^2)(sigma_max^2 E[1/|S_t|] + E[1/|S_t|^2] N0)].
absl::StatusOr<double> BoundKnown(const ConvergenceParams& params,
                                  MomentSource source);

// Closed form of BoundKnown with Taylor moments for a time-invariant uniform p.
// Requires `params.probabilities` to be one constant row.
absl::StatusOr<double> BoundKnownUniform(const ConvergenceParams& params);

}  // namespace airdp

#endif  // AIRDP_CONV_BOUNDS_H_
