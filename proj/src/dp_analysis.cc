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

#include "airdp/dp_analysis.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/str_cat.h"

namespace airdp {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool IsProbability(double x) {
  return std::isfinite(x) && x >= 0.0 && x <= 1.0;
}

absl::Status CheckDeltaLocal(double delta_local) {
  if (!(delta_local > 0.0 && delta_local <= 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("delta_local must lie in (0, 1], got ", delta_local));
  }
  return absl::OkStatus();
}

absl::Status CheckDeltaPrime(double delta_prime) {
  if (!(delta_prime > 0.0 && delta_prime < 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("delta_prime must lie in (0, 1), got ", delta_prime));
  }
  return absl::OkStatus();
}

absl::Status CheckDeltaTilde(double delta_tilde) {
  if (!(delta_tilde > 0.0 && delta_tilde <= 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("delta_tilde must lie in (0, 1], got ", delta_tilde));
  }
  return absl::OkStatus();
}

absl::Status CheckMechanism(const MechanismParams& params) {
  if (!(std::isfinite(params.lipschitz) && params.lipschitz >= 0.0)) {
    return absl::InvalidArgumentError(absl::StrCat(
        "lipschitz must be finite and nonnegative, got ", params.lipschitz));
  }
  if (!(std::isfinite(params.sigma_min) && params.sigma_min > 0.0)) {
    return absl::InvalidArgumentError(absl::StrCat(
        "sigma_min must be finite and positive, got ", params.sigma_min));
  }
  if (!(std::isfinite(params.noise_var_n0) && params.noise_var_n0 >= 0.0)) {
    return absl::InvalidArgumentError(absl::StrCat(
        "noise_var_n0 must be nonnegative, got ", params.noise_var_n0));
  }
  return CheckDeltaLocal(params.delta_local);
}

// ln(1 + a (e^x - 1)) for a in [0, 1], x >= 0, without overflowing e^x.
double AmplifiedEpsilon(double a, double x) {
  if (a == 0.0 || x == 0.0) return 0.0;
  if (x <= kMaxExponent) return std::log1p(a * std::expm1(x));
  return x + std::log(a + (1.0 - a) * std::exp(-x));
}

// Shared tail of the central bounds once the concentration margin
// (mu - beta K) is known.
absl::StatusOr<PrivacyBudget> CentralFromMargin(double max_probability,
                                                double margin, double c,
                                                double delta_local,
                                                double delta_prime) {
  PrivacyBudget budget;
  budget.delta = std::min(
      1.0, delta_prime + max_probability * delta_local / (1.0 - delta_prime));
  if (c == 0.0) return budget;
  if (!(margin > 0.0)) {
    return absl::FailedPreconditionError(
        absl::StrCat("infeasible concentration: mu - beta*K = ", margin,
                     " <= 0 (delta_prime at or below 2*exp(-2*mu^2/K))"));
  }
  const double exponent = c / std::sqrt(margin);
  budget.epsilon =
      AmplifiedEpsilon(max_probability / (1.0 - delta_prime), exponent);
  return budget;
}

}  // namespace

absl::StatusOr<double> GaussianMechanismEpsilon(double sensitivity,
                                                double sigma,
                                                double delta_local) {
  if (!(std::isfinite(sensitivity) && sensitivity >= 0.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("sensitivity must be nonnegative, got ", sensitivity));
  }
  if (!(std::isfinite(sigma) && sigma > 0.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("sigma must be positive, got ", sigma));
  }
  if (absl::Status s = CheckDeltaLocal(delta_local); !s.ok()) return s;
  return sensitivity / sigma * std::sqrt(2.0 * std::log(1.25 / delta_local));
}

absl::StatusOr<double> SensitivityBound(double lipschitz, double gain,
                                        double alpha) {
  if (!(lipschitz >= 0.0 && gain >= 0.0 && alpha >= 0.0) ||
      !std::isfinite(lipschitz * gain * alpha)) {
    return absl::InvalidArgumentError(absl::StrCat(
        "sensitivity inputs must be finite and nonnegative, got L=", lipschitz,
        " h=", gain, " alpha=", alpha));
  }
  return 2.0 * gain * alpha * lipschitz;
}

absl::StatusOr<double> HoeffdingDelta(double beta, int64_t num_users) {
  if (num_users < 1) {
    return absl::InvalidArgumentError(
        absl::StrCat("number of users must be positive, got ", num_users));
  }
  if (!(std::isfinite(beta) && beta >= 0.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("beta must be nonnegative, got ", beta));
  }
  return 2.0 * std::exp(-2.0 * beta * beta * static_cast<double>(num_users));
}

absl::StatusOr<double> BetaFromDelta(double delta_prime, int64_t num_users) {
  if (num_users < 1) {
    return absl::InvalidArgumentError(
        absl::StrCat("number of users must be positive, got ", num_users));
  }
  if (absl::Status s = CheckDeltaPrime(delta_prime); !s.ok()) return s;
  return std::sqrt(0.5 * std::log(2.0 / delta_prime)) /
         std::sqrt(static_cast<double>(num_users));
}

absl::StatusOr<double> GaussianConstant(const MechanismParams& params) {
  if (absl::Status s = CheckMechanism(params); !s.ok()) return s;
  return GaussianMechanismEpsilon(2.0 * params.lipschitz, params.sigma_min,
                                  params.delta_local);
}

double AdaptiveDeltaPrime(double expected_participants, int64_t num_users) {
  const double k = static_cast<double>(num_users);
  return 2.0 * std::exp(-2.0 * expected_participants * expected_participants /
                        k) +
         kAdaptiveDeltaPrimeFloor;
}

absl::StatusOr<LocalEpsilon> LocalEpsilonBound(const MechanismParams& params,
                                               double kappa, bool include_n0) {
  if (absl::Status s = CheckMechanism(params); !s.ok()) return s;
  if (!std::isfinite(kappa)) {
    return absl::InvalidArgumentError(
        absl::StrCat("kappa must be finite, got ", kappa));
  }
  LocalEpsilon result;
  if (kappa < 0.0) {
    result.kappa_clamped = true;
    kappa = 0.0;
  }
  const double root = std::sqrt(2.0 * std::log(1.25 / params.delta_local));
  if (include_n0) {
    const double variance =
        (1.0 + kappa) * params.sigma_min * params.sigma_min +
        params.noise_var_n0;
    result.epsilon = 2.0 * params.lipschitz * root / std::sqrt(variance);
  } else {
    result.epsilon = 2.0 * params.lipschitz / params.sigma_min * root /
                     std::sqrt(1.0 + kappa);
  }
  return result;
}

absl::StatusOr<double> LocalKappa(std::span<const double> probabilities,
                                  int user, double beta) {
  if (user < 0 || static_cast<size_t>(user) >= probabilities.size()) {
    return absl::OutOfRangeError(absl::StrCat(
        "user index ", user, " outside [0, ", probabilities.size(), ")"));
  }
  double others = 0.0;
  for (size_t i = 0; i < probabilities.size(); ++i) {
    if (!IsProbability(probabilities[i])) {
      return absl::InvalidArgumentError(absl::StrCat(
          "probability ", i, " outside [0, 1]: ", probabilities[i]));
    }
    if (static_cast<int>(i) != user) others += probabilities[i];
  }
  return others - beta * static_cast<double>(probabilities.size());
}

double LocalDelta(double probability, double delta_local, double delta_prime) {
  return std::min(1.0, probability * (delta_local + delta_prime));
}

absl::StatusOr<PrivacyBudget> CentralEpsilonNonuniform(
    std::span<const double> probabilities, const MechanismParams& params,
    double delta_prime) {
  if (probabilities.empty()) {
    return absl::InvalidArgumentError("probability vector is empty");
  }
  absl::StatusOr<double> c = GaussianConstant(params);
  if (!c.ok()) return c.status();
  if (absl::Status s = CheckDeltaPrime(delta_prime); !s.ok()) return s;
  double mu = 0.0;
  double max_p = 0.0;
  for (size_t i = 0; i < probabilities.size(); ++i) {
    if (!IsProbability(probabilities[i])) {
      return absl::InvalidArgumentError(absl::StrCat(
          "probability ", i, " outside [0, 1]: ", probabilities[i]));
    }
    mu += probabilities[i];
    max_p = std::max(max_p, probabilities[i]);
  }
  const int64_t k = static_cast<int64_t>(probabilities.size());
  absl::StatusOr<double> beta = BetaFromDelta(delta_prime, k);
  if (!beta.ok()) return beta.status();
  return CentralFromMargin(max_p, mu - *beta * static_cast<double>(k), *c,
                           params.delta_local, delta_prime);
}

absl::StatusOr<PrivacyBudget> CentralEpsilonUniform(
    double probability, int64_t num_users, const MechanismParams& params,
    double delta_prime) {
  if (!(probability > 0.0 && probability <= 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("probability must lie in (0, 1], got ", probability));
  }
  absl::StatusOr<double> c = GaussianConstant(params);
  if (!c.ok()) return c.status();
  absl::StatusOr<double> beta = BetaFromDelta(delta_prime, num_users);
  if (!beta.ok()) return beta.status();
  const double k = static_cast<double>(num_users);
  return CentralFromMargin(probability, k * (probability - *beta), *c,
                           params.delta_local, delta_prime);
}

absl::StatusOr<double> OptimalSamplingProbability(int64_t num_users,
                                                  double delta_prime) {
  absl::StatusOr<double> beta = BetaFromDelta(delta_prime, num_users);
  if (!beta.ok()) return beta.status();
  return std::min(1.0, 2.0 * *beta);
}

absl::StatusOr<double> ComparatorEpsilon(int64_t num_users,
                                         const MechanismParams& params,
                                         double delta_prime,
                                         Comparator variant) {
  absl::StatusOr<double> c = GaussianConstant(params);
  if (!c.ok()) return c.status();
  if (num_users < 1) {
    return absl::InvalidArgumentError(
        absl::StrCat("number of users must be positive, got ", num_users));
  }
  switch (variant) {
    case Comparator::kWirelessNoSampling:
      return *c / std::sqrt(static_cast<double>(num_users));
    case Comparator::kOrthogonalNoSampling:
      return *c;
    case Comparator::kOrthogonalWithSampling: {
      absl::StatusOr<double> p_star =
          OptimalSamplingProbability(num_users, delta_prime);
      if (!p_star.ok()) return p_star.status();
      return AmplifiedEpsilon(*p_star, *c);
    }
  }
  return absl::InvalidArgumentError("unknown comparator");
}

absl::Status HeterogeneousComposer::Add(double epsilon, double delta) {
  if (std::isnan(epsilon) || epsilon < 0.0) {
    return absl::InvalidArgumentError(
        absl::StrCat("per-round epsilon must be nonnegative, got ", epsilon));
  }
  if (!IsProbability(delta)) {
    return absl::InvalidArgumentError(
        absl::StrCat("per-round delta must lie in [0, 1], got ", delta));
  }
  ++rounds_;
  if (std::isinf(epsilon)) {
    overflow_ = true;
  } else {
    // (e^e - 1) e / (e^e + 1) == e tanh(e / 2), which never overflows.
    first_order_sum_ += epsilon * std::tanh(0.5 * epsilon);
    squared_sum_ += epsilon * epsilon;
  }
  log_survival_ += std::log1p(-delta);
  return absl::OkStatus();
}

absl::StatusOr<PrivacyBudget> HeterogeneousComposer::Total(
    double delta_tilde) const {
  if (absl::Status s = CheckDeltaTilde(delta_tilde); !s.ok()) return s;
  if (rounds_ == 0) {
    return absl::InvalidArgumentError("no rounds to compose");
  }
  PrivacyBudget budget;
  if (overflow_) {
    budget.epsilon = kInf;
    budget.overflow = true;
  } else {
    budget.epsilon =
        first_order_sum_ +
        std::sqrt(2.0 * std::log(1.0 / delta_tilde) * squared_sum_);
    budget.overflow = std::isinf(budget.epsilon);
  }
  // 1 - (1 - dt) prod(1 - d_t), computed as -expm1(log(1 - dt) + sum log(1 -
  // d_t)).
  const double log_keep =
      (delta_tilde == 1.0 ? -kInf : std::log1p(-delta_tilde)) + log_survival_;
  budget.delta = std::clamp(-std::expm1(log_keep), 0.0, 1.0);
  return budget;
}

absl::StatusOr<PrivacyBudget> ComposeHeterogeneous(
    std::span<const double> epsilons, std::span<const double> deltas,
    double delta_tilde) {
  if (epsilons.empty() || epsilons.size() != deltas.size()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "per-round vectors must be nonempty and of equal length, got ",
        epsilons.size(), " and ", deltas.size()));
  }
  HeterogeneousComposer composer;
  for (size_t t = 0; t < epsilons.size(); ++t) {
    if (absl::Status s = composer.Add(epsilons[t], deltas[t]); !s.ok()) {
      return s;
    }
  }
  return composer.Total(delta_tilde);
}

absl::StatusOr<double> ComposeHeterogeneousUpper(
    std::span<const double> max_probabilities,
    std::span<const double> expected_participants, int64_t num_users,
    const MechanismParams& params, double delta_prime, double delta_tilde) {
  if (max_probabilities.empty() ||
      max_probabilities.size() != expected_participants.size()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "per-round vectors must be nonempty and of equal length, got ",
        max_probabilities.size(), " and ", expected_participants.size()));
  }
  if (absl::Status s = CheckDeltaTilde(delta_tilde); !s.ok()) return s;
  absl::StatusOr<double> c = GaussianConstant(params);
  if (!c.ok()) return c.status();
  absl::StatusOr<double> beta = BetaFromDelta(delta_prime, num_users);
  if (!beta.ok()) return beta.status();

  double squared_sum = 0.0;
  for (double p : max_probabilities) {
    if (!IsProbability(p)) {
      return absl::InvalidArgumentError(
          absl::StrCat("max probability outside [0, 1]: ", p));
    }
    squared_sum += p * p;
  }
  if (squared_sum == 0.0 || *c == 0.0) return 0.0;
  const double min_mu = *std::min_element(expected_participants.begin(),
                                          expected_participants.end());
  const double margin = min_mu - *beta * static_cast<double>(num_users);
  if (!(margin > 0.0)) {
    return absl::FailedPreconditionError(absl::StrCat(
        "infeasible concentration: min_t mu_t - beta*K = ", margin, " <= 0"));
  }
  const double exponent = *c / std::sqrt(margin);
  if (exponent > kMaxExponent) return kInf;
  const double growth = std::expm1(exponent);
  const double scale = 1.0 - delta_prime;
  return growth * growth * squared_sum / (2.0 * scale * scale) +
         std::sqrt(2.0 * std::log(1.0 / delta_tilde)) * growth *
             std::sqrt(squared_sum) / scale;
}

absl::StatusOr<PrivacyBudget> ComposeHomogeneous(double epsilon, double delta_c,
                                                 int64_t rounds,
                                                 double delta_tilde) {
  if (std::isnan(epsilon) || epsilon < 0.0) {
    return absl::InvalidArgumentError(
        absl::StrCat("epsilon must be nonnegative, got ", epsilon));
  }
  if (!IsProbability(delta_c)) {
    return absl::InvalidArgumentError(
        absl::StrCat("delta_c must lie in [0, 1], got ", delta_c));
  }
  if (rounds < 1) {
    return absl::InvalidArgumentError(
        absl::StrCat("rounds must be positive, got ", rounds));
  }
  if (absl::Status s = CheckDeltaTilde(delta_tilde); !s.ok()) return s;
  const double t = static_cast<double>(rounds);
  PrivacyBudget budget;
  budget.delta = std::min(1.0, t * delta_c + delta_tilde);
  if (epsilon > kMaxExponent) {
    budget.epsilon = kInf;
    budget.overflow = true;
    return budget;
  }
  budget.epsilon = std::sqrt(2.0 * t * std::log(1.0 / delta_tilde)) * epsilon +
                   t * epsilon * std::expm1(epsilon);
  budget.overflow = std::isinf(budget.epsilon);
  return budget;
}

}  // namespace airdp
