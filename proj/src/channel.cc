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

#include "airdp/channel.h"

#include <cmath>
#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/str_cat.h"

namespace airdp {
namespace {

std::complex<double> StandardComplexNormal(RngStream& rng) {
  const double scale = std::sqrt(0.5);
  const double re = rng.Normal();
  const double im = rng.Normal();
  return {scale * re, scale * im};
}

}  // namespace

double SnrToPower(double snr_db, int dimension, double noise_var_n0) {
  return std::pow(10.0, snr_db / 10.0) * dimension * noise_var_n0;
}

FadingState StationaryFadingState(RngStream& rng) {
  return FadingState{StandardComplexNormal(rng)};
}

FadingSample FadingStep(const FadingState& state, double rician_gamma,
                        double temporal_rho, RngStream& rng) {
  const std::complex<double> innovation = StandardComplexNormal(rng);
  FadingSample sample;
  sample.next.scatter =
      temporal_rho * state.scatter +
      std::sqrt(1.0 - temporal_rho * temporal_rho) * innovation;
  const double los = std::sqrt(rician_gamma / (rician_gamma + 1.0));
  const double diffuse = std::sqrt(1.0 / (rician_gamma + 1.0));
  sample.gain = std::abs(los + diffuse * sample.next.scatter);
  return sample;
}

FadingChannel::FadingChannel(int num_users, double rician_gamma,
                             double temporal_rho, uint64_t master_seed,
                             uint64_t trial)
    : rician_gamma_(rician_gamma),
      temporal_rho_(temporal_rho),
      master_seed_(master_seed),
      trial_(trial),
      states_(num_users) {
  for (int k = 0; k < num_users; ++k) {
    RngStream rng(StreamKey{master_seed_, trial_, 0, static_cast<uint64_t>(k),
                            StreamPurpose::kFadingInit});
    states_[k] = StationaryFadingState(rng);
  }
}

absl::StatusOr<std::vector<double>> FadingChannel::Advance(uint64_t round) {
  if (round != next_round_) {
    return absl::FailedPreconditionError(
        absl::StrCat("fading rounds must be consumed in order; expected ",
                     next_round_, ", got ", round));
  }
  ++next_round_;
  std::vector<double> gains(states_.size());
  for (size_t k = 0; k < states_.size(); ++k) {
    RngStream rng(StreamKey{master_seed_, trial_, round,
                            static_cast<uint64_t>(k), StreamPurpose::kFading});
    FadingSample sample =
        FadingStep(states_[k], rician_gamma_, temporal_rho_, rng);
    states_[k] = sample.next;
    gains[k] = sample.gain;
  }
  return gains;
}

absl::StatusOr<double> InversionAlpha(double gain) {
  if (!(std::isfinite(gain) && gain > 0.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("channel inversion needs a positive gain, got ", gain));
  }
  return 1.0 / gain;
}

absl::StatusOr<double> EmpiricalAlpha(double gain, double power,
                                      double grad_sq_norm, int dimension,
                                      double noise_var) {
  absl::StatusOr<double> inversion = InversionAlpha(gain);
  if (!inversion.ok()) return inversion.status();
  if (!(power >= 0.0 && grad_sq_norm >= 0.0 && noise_var >= 0.0) ||
      dimension < 1) {
    return absl::InvalidArgumentError(absl::StrCat(
        "invalid power-control inputs: P=", power, " ||g||^2=", grad_sq_norm,
        " d=", dimension, " sigma^2=", noise_var));
  }
  if (power == 0.0) return 0.0;
  const double energy = grad_sq_norm + dimension * noise_var;
  if (energy == 0.0) return *inversion;
  return std::min(*inversion, std::sqrt(power) / std::sqrt(energy));
}

absl::StatusOr<std::vector<double>> MacSuperpose(
    std::span<const std::vector<double>> signals, std::span<const double> gains,
    double noise_var_n0, int dimension, RngStream& rng) {
  if (signals.size() != gains.size()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "got ", signals.size(), " signals but ", gains.size(), " gains"));
  }
  if (dimension < 1 || !(noise_var_n0 >= 0.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("invalid channel: d=", dimension, " N0=", noise_var_n0));
  }
  std::vector<double> received(dimension, 0.0);
  for (size_t k = 0; k < signals.size(); ++k) {
    if (static_cast<int>(signals[k].size()) != dimension) {
      return absl::InvalidArgumentError(
          absl::StrCat("signal ", k, " has dimension ", signals[k].size(),
                       ", expected ", dimension));
    }
    for (int i = 0; i < dimension; ++i) {
      received[i] += gains[k] * signals[k][i];
    }
  }
  if (noise_var_n0 > 0.0) {
    const double sd = std::sqrt(noise_var_n0);
    for (double& y : received) y += sd * rng.Normal();
  }
  return received;
}

}  // namespace airdp
