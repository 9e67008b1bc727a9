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

// Block flat-fading Rician channel, transmit power control and the Gaussian
// multiple-access superposition.

#ifndef AIRDP_CHANNEL_H_
#define AIRDP_CHANNEL_H_

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "absl/status/statusor.h"
#include "airdp/rng.h"

namespace airdp {

struct ChannelParams {
  double rician_gamma = 5.0;   // LOS-to-scatter power ratio
  double temporal_rho = 0.1;   // AR(1) correlation of the scatter component
  double noise_var_n0 = 1.0;   // receiver noise variance per channel use
  std::vector<double> snr_db;  // transmit SNR per user
  int dimension = 1;           // channel uses per round (model size)
};

// P such that SNR = P / (d N0).
double SnrToPower(double snr_db, int dimension, double noise_var_n0);

// Diffuse (scatter) component of one user's channel.
struct FadingState {
  std::complex<double> scatter{0.0, 0.0};
};

// Draws the scatter component from its stationary CN(0, 1) law.
FadingState StationaryFadingState(RngStream& rng);

struct FadingSample {
  double gain = 0.0;
  FadingState next;
};

// One AR(1) step of the scatter component followed by the Rician combination:
//   s_t = rho s_{t-1} + sqrt(1 - rho^2) w_t,  w_t ~ CN(0, 1)
//   h_t = | sqrt(G/(G+1)) + sqrt(1/(G+1)) s_t |
// so that E[h^2] = 1 in steady state.
FadingSample FadingStep(const FadingState& state, double rician_gamma,
                        double temporal_rho, RngStream& rng);

// Per-user fading processes sharing (gamma, rho). Each user draws from its own
// keyed stream so trajectories do not depend on how many users exist.
class FadingChannel {
 public:
  FadingChannel(int num_users, double rician_gamma, double temporal_rho,
                uint64_t master_seed, uint64_t trial);

  // Gains for 0-based round `round`. Rounds must be requested in order
  // starting at 0.
  absl::StatusOr<std::vector<double>> Advance(uint64_t round);

  int num_users() const { return static_cast<int>(states_.size()); }

 private:
  double rician_gamma_;
  double temporal_rho_;
  uint64_t master_seed_;
  uint64_t trial_;
  uint64_t next_round_ = 0;
  std::vector<FadingState> states_;
};

// Exact channel inversion, 1 / h.
absl::StatusOr<double> InversionAlpha(double gain);

// min(1/h, sqrt(P) / sqrt(||g||^2 + d sigma^2)): channel inversion unless the
// average power constraint binds.
absl::StatusOr<double> EmpiricalAlpha(double gain, double power,
                                      double grad_sq_norm, int dimension,
                                      double noise_var);

// y = sum_k h_k x_k + m with m ~ N(0, N0 I_d). `dimension` is used when there
// are no signals.
absl::StatusOr<std::vector<double>> MacSuperpose(
    std::span<const std::vector<double>> signals, std::span<const double> gains,
    double noise_var_n0, int dimension, RngStream& rng);

}  // namespace airdp

#endif  // AIRDP_CHANNEL_H_
