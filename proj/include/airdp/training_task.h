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

// Synthetic strongly convex learning tasks whose data is split evenly across
// users.

#ifndef AIRDP_TRAINING_TASK_H_
#define AIRDP_TRAINING_TASK_H_

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "absl/status/statusor.h"

namespace airdp {

class TrainingTask {
 public:
  virtual ~TrainingTask() = default;

  virtual int dimension() const = 0;
  virtual int num_users() const = 0;
  // Number of data points held by every user.
  virtual int shard_size() const = 0;

  // Minibatch-average gradient over `batch` (indices into the user's shard)
  // plus the regularizer gradient.
  virtual absl::StatusOr<std::vector<double>> LocalGradient(
      int user, std::span<const double> w,
      std::span<const int> batch) const = 0;

  // Global objective F(w) over all shards.
  virtual double Loss(std::span<const double> w) const = 0;

  virtual const std::vector<double>& optimum() const = 0;

  // F(w) - F(w*).
  virtual double Gap(std::span<const double> w) const = 0;
};

// F(w) = 1/2 w'Aw - b'w with diagonal A. Data point i of the pooled dataset
// contributes gradient A w - b + xi_i, where the offsets xi_i sum to zero, so
// the average over all points is exactly A w - b and w* = A^{-1} b.
class QuadraticTask : public TrainingTask {
 public:
  // `offsets[k][i]` is the offset of point i on user k; all shards must have
  // the same size and the offsets must sum to zero.
  static absl::StatusOr<std::unique_ptr<QuadraticTask>> Create(
      std::vector<double> eigenvalues, std::vector<double> b,
      std::vector<std::vector<std::vector<double>>> offsets);

  int dimension() const override { return static_cast<int>(b_.size()); }
  int num_users() const override { return static_cast<int>(offsets_.size()); }
  int shard_size() const override {
    return static_cast<int>(offsets_.front().size());
  }
  absl::StatusOr<std::vector<double>> LocalGradient(
      int user, std::span<const double> w,
      std::span<const int> batch) const override;
  double Loss(std::span<const double> w) const override;
  const std::vector<double>& optimum() const override { return optimum_; }
  double Gap(std::span<const double> w) const override;

  const std::vector<double>& eigenvalues() const { return eigenvalues_; }
  const std::vector<double>& b() const { return b_; }

 private:
  QuadraticTask() = default;

  std::vector<double> eigenvalues_;
  std::vector<double> b_;
  std::vector<std::vector<std::vector<double>>> offsets_;
  std::vector<double> optimum_;
};

struct QuadraticTaskParams {
  int dimension = 30;
  double strong_convexity = 0.2;  // smallest eigenvalue
  double smoothness = 0.9;        // largest eigenvalue
  int num_users = 20;
  int shard_size = 1;
  // Standard deviation of the per-point gradient offsets. Zero makes every
  // local gradient equal to the global one.
  double data_spread = 0.0;
  // b is scaled to this Euclidean norm; zero keeps the raw N(0, I) draw.
  double b_norm = 0.0;
  uint64_t seed = 0;
};

// Eigenvalues linearly spaced on [strong_convexity, smoothness]; b drawn from a
// seeded standard Gaussian.
absl::StatusOr<std::unique_ptr<QuadraticTask>> MakeQuadraticTask(
    const QuadraticTaskParams& params);

struct LogisticTaskParams {
  int dimension = 10;
  int num_users = 20;
  int shard_size = 50;
  double l2_reg = 0.1;
  // Class means are +/- separation * (1, ..., 1) / sqrt(d).
  double separation = 1.0;
  uint64_t seed = 0;
};

// Two-class Gaussian data with labels in {-1, +1}:
//   F(w) = mean log(1 + exp(-v w'u)) + (l2_reg / 2) ||w||^2.
// The optimum is found by Newton's method at construction.
absl::StatusOr<std::unique_ptr<TrainingTask>> MakeLogisticTask(
    const LogisticTaskParams& params);

}  // namespace airdp

#endif  // AIRDP_TRAINING_TASK_H_
