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

// Closed-form privacy accounting for private over-the-air FedSGD with
// randomized user participation. All quantities are in nats.

#ifndef AIRDP_DP_ANALYSIS_H_
#define AIRDP_DP_ANALYSIS_H_

#include <cstdint>
#include <span>

#include "absl/status/statusor.h"

namespace airdp {

// An (epsilon, delta) guarantee. `overflow` is set when epsilon could not be
// represented (an exponent beyond kMaxExponent) and was reported as +infinity.
struct PrivacyBudget {
  double epsilon = 0.0;
  double delta = 0.0;
  bool overflow = false;
};

// Parameters of the per-user Gaussian mechanism.
struct MechanismParams {
  double lipschitz = 0.0;     // gradient norm bound L
  double sigma_min = 1.0;     // smallest per-user noise standard deviation
  double delta_local = 1e-5;  // delta of the local Gaussian mechanism
  double noise_var_n0 = 0.0;  // receiver noise variance
};

// Exponents above this are treated as overflow.
inline constexpr double kMaxExponent = 700.0;

// Floor added to the Hoeffding term by the adaptive delta' rule.
inline constexpr double kAdaptiveDeltaPrimeFloor = 1e-5;

// (sensitivity / sigma) * sqrt(2 ln(1.25 / delta_local)).
absl::StatusOr<double> GaussianMechanismEpsilon(double sensitivity,
                                                double sigma,
                                                double delta_local);

// 2 * h * alpha * L. Equals 2L under exact channel inversion.
absl::StatusOr<double> SensitivityBound(double lipschitz, double gain,
                                        double alpha);

// Two-sided Hoeffding tail 2 exp(-2 beta^2 K) for a sum of K Bernoullis
// deviating from its mean by beta * K. Not clamped to 1.
absl::StatusOr<double> HoeffdingDelta(double beta, int64_t num_users);

// Inverse of HoeffdingDelta in beta: sqrt(0.5 ln(2 / delta')) / sqrt(K).
absl::StatusOr<double> BetaFromDelta(double delta_prime, int64_t num_users);

// c = (2L / sigma_min) sqrt(2 ln(1.25 / delta_local)).
absl::StatusOr<double> GaussianConstant(const MechanismParams& params);

// delta' = 2 exp(-2 mu^2 / K) + 1e-5, recomputed each round from the policy's
// expected participant count.
double AdaptiveDeltaPrime(double expected_participants, int64_t num_users);

struct LocalEpsilon {
  double epsilon = 0.0;
  // True when the supplied kappa was negative and clamped to zero, i.e. the
  // concentration window exceeds the expected number of other participants.
  bool kappa_clamped = false;
};

// Per-user local epsilon under wireless aggregation. With `include_n0` unset
// this is (1 / sqrt(1 + kappa)) * c. With it set the effective variance is
// (1 + kappa) sigma_min^2 + N0, the form that reproduces the reference table
// values.
absl::StatusOr<LocalEpsilon> LocalEpsilonBound(const MechanismParams& params,
                                               double kappa, bool include_n0);

// kappa for `user`: sum_{i != user} p_i - beta K.
absl::StatusOr<double> LocalKappa(std::span<const double> probabilities,
                                  int user, double beta);

// Companion delta of the local guarantee: p_k (delta_local + delta').
double LocalDelta(double probability, double delta_local, double delta_prime);

// Per-round central guarantee for independent, non-uniform participation.
// Fails with FailedPrecondition when mu - beta K <= 0, which is equivalent to
// delta' lying at or below its admissible floor 2 exp(-2 mu^2 / K).
absl::StatusOr<PrivacyBudget> CentralEpsilonNonuniform(
    std::span<const double> probabilities, const MechanismParams& params,
    double delta_prime);

// Uniform-probability specialization. Requires p > beta.
absl::StatusOr<PrivacyBudget> CentralEpsilonUniform(
    double probability, int64_t num_users, const MechanismParams& params,
    double delta_prime);

// p* = min(1, 2 beta).
absl::StatusOr<double> OptimalSamplingProbability(int64_t num_users,
                                                  double delta_prime);

enum class Comparator {
  kWirelessNoSampling,      // c / sqrt(K)
  kOrthogonalNoSampling,    // c
  kOrthogonalWithSampling,  // ln(1 + p* (e^c - 1))
};

// Reference schemes used only to order the wireless-with-sampling curve.
absl::StatusOr<double> ComparatorEpsilon(int64_t num_users,
                                         const MechanismParams& params,
                                         double delta_prime,
                                         Comparator variant);

// Streaming form of the heterogeneous advanced-composition rule.
class HeterogeneousComposer {
 public:
  // Both arguments must be nonnegative; delta in [0, 1].
  absl::Status Add(double epsilon, double delta);

  // Budget of all rounds added so far.
  absl::StatusOr<PrivacyBudget> Total(double delta_tilde) const;

  int64_t rounds() const { return rounds_; }

 private:
  int64_t rounds_ = 0;
  double first_order_sum_ = 0.0;  // sum (e^e - 1) e / (e^e + 1)
  double squared_sum_ = 0.0;      // sum e^2
  double log_survival_ = 0.0;     // sum log(1 - delta_t)
  bool overflow_ = false;
};

// Advanced composition over rounds with per-round budgets (eps_t, delta_t):
//   eps   = sum (e^eps_t - 1) eps_t / (e^eps_t + 1)
//           + sqrt(2 ln(1/delta_tilde) sum eps_t^2)
//   delta = 1 - (1 - delta_tilde) prod (1 - delta_t)
absl::StatusOr<PrivacyBudget> ComposeHeterogeneous(
    std::span<const double> epsilons, std::span<const double> deltas,
    double delta_tilde);

// Closed-form relaxation of ComposeHeterogeneous applied to per-round central
// budgets; uses ln(1 + x) <= x and e^x + 1 >= 2. Dominates the exact
// composition.
absl::StatusOr<double> ComposeHeterogeneousUpper(
    std::span<const double> max_probabilities,
    std::span<const double> expected_participants, int64_t num_users,
    const MechanismParams& params, double delta_prime, double delta_tilde);

// Time-invariant composition:
//   eps   = sqrt(2 T ln(1/delta_tilde)) eps + T eps (e^eps - 1)
//   delta = T delta_c + delta_tilde, clamped to 1.
absl::StatusOr<PrivacyBudget> ComposeHomogeneous(double epsilon, double delta_c,
                                                 int64_t rounds,
                                                 double delta_tilde);

}  // namespace airdp

#endif  // AIRDP_DP_ANALYSIS_H_
