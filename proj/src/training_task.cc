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

#include "airdp/training_task.h"

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <memory>
#include <span>
#include <utility>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/str_cat.h"
#include "airdp/rng.h"

namespace airdp {
namespace {

absl::Status CheckBatch(int user, int num_users, std::span<const double> w,
                        int dimension, std::span<const int> batch,
                        int shard_size) {
  if (user < 0 || user >= num_users) {
    return absl::OutOfRangeError(
        absl::StrCat("user ", user, " outside [0, ", num_users, ")"));
  }
  if (static_cast<int>(w.size()) != dimension) {
    return absl::InvalidArgumentError(absl::StrCat(
        "model has dimension ", w.size(), ", expected ", dimension));
  }
  if (batch.empty()) {
    return absl::InvalidArgumentError("minibatch is empty");
  }
  for (int i : batch) {
    if (i < 0 || i >= shard_size) {
      return absl::OutOfRangeError(
          absl::StrCat("batch index ", i, " outside shard of ", shard_size));
    }
  }
  return absl::OkStatus();
}

double Log1pExp(double x) {
  return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

double Sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

class LogisticTask : public TrainingTask {
 public:
  LogisticTask(std::vector<std::vector<Eigen::VectorXd>> features,
               std::vector<std::vector<double>> labels, double l2_reg)
      : features_(std::move(features)),
        labels_(std::move(labels)),
        l2_reg_(l2_reg) {}

  int dimension() const override {
    return static_cast<int>(features_.front().front().size());
  }
  int num_users() const override { return static_cast<int>(features_.size()); }
  int shard_size() const override {
    return static_cast<int>(features_.front().size());
  }

  absl::StatusOr<std::vector<double>> LocalGradient(
      int user, std::span<const double> w,
      std::span<const int> batch) const override {
    if (absl::Status s =
            CheckBatch(user, num_users(), w, dimension(), batch, shard_size());
        !s.ok()) {
      return s;
    }
    const Eigen::Map<const Eigen::VectorXd> wv(w.data(), dimension());
    Eigen::VectorXd grad = l2_reg_ * wv;
    const double inv_batch = 1.0 / static_cast<double>(batch.size());
    for (int i : batch) {
      const Eigen::VectorXd& u = features_[user][i];
      const double v = labels_[user][i];
      grad -= inv_batch * v * Sigmoid(-v * u.dot(wv)) * u;
    }
    return std::vector<double>(grad.data(), grad.data() + grad.size());
  }

  double Loss(std::span<const double> w) const override {
    const Eigen::Map<const Eigen::VectorXd> wv(w.data(), dimension());
    double total = 0.0;
    int64_t count = 0;
    for (size_t k = 0; k < features_.size(); ++k) {
      for (size_t i = 0; i < features_[k].size(); ++i) {
        total += Log1pExp(-labels_[k][i] * features_[k][i].dot(wv));
        ++count;
      }
    }
    return total / static_cast<double>(count) +
           0.5 * l2_reg_ * wv.squaredNorm();
  }

  const std::vector<double>& optimum() const override { return optimum_; }

  double Gap(std::span<const double> w) const override {
    return Loss(w) - optimal_loss_;
  }

  // Damped Newton iterations on the full objective.
  absl::Status Solve() {
    const int d = dimension();
    Eigen::VectorXd w = Eigen::VectorXd::Zero(d);
    int64_t count = 0;
    for (const auto& shard : features_) count += shard.size();
    const double inv_n = 1.0 / static_cast<double>(count);
    for (int iter = 0; iter < 100; ++iter) {
      Eigen::VectorXd grad = l2_reg_ * w;
      Eigen::MatrixXd hess = l2_reg_ * Eigen::MatrixXd::Identity(d, d);
      for (size_t k = 0; k < features_.size(); ++k) {
        for (size_t i = 0; i < features_[k].size(); ++i) {
          const Eigen::VectorXd& u = features_[k][i];
          const double v = labels_[k][i];
          const double s = Sigmoid(-v * u.dot(w));
          grad -= inv_n * v * s * u;
          hess += inv_n * s * (1.0 - s) * u * u.transpose();
        }
      }
      if (grad.norm() < 1e-13) break;
      w -= hess.llt().solve(grad);
    }
    optimum_.assign(w.data(), w.data() + d);
    optimal_loss_ = Loss(optimum_);
    if (!std::isfinite(optimal_loss_)) {
      return absl::InternalError("logistic optimum did not converge");
    }
    return absl::OkStatus();
  }

 private:
  std::vector<std::vector<Eigen::VectorXd>> features_;
  std::vector<std::vector<double>> labels_;
  double l2_reg_;
  std::vector<double> optimum_;
  double optimal_loss_ = 0.0;
};

}  // namespace

absl::StatusOr<std::unique_ptr<QuadraticTask>> QuadraticTask::Create(
    std::vector<double> eigenvalues, std::vector<double> b,
    std::vector<std::vector<std::vector<double>>> offsets) {
  const size_t d = b.size();
  if (d == 0 || eigenvalues.size() != d) {
    return absl::InvalidArgumentError(
        absl::StrCat("need matching nonempty eigenvalues and b, got ",
                     eigenvalues.size(), " and ", d));
  }
  for (double a : eigenvalues) {
    if (!(std::isfinite(a) && a > 0.0)) {
      return absl::InvalidArgumentError(
          absl::StrCat("eigenvalues must be positive, got ", a));
    }
  }
  if (offsets.empty() || offsets.front().empty()) {
    return absl::InvalidArgumentError("need at least one user and data point");
  }
  std::vector<double> total(d, 0.0);
  for (const auto& shard : offsets) {
    if (shard.size() != offsets.front().size()) {
      return absl::InvalidArgumentError("shards must have equal size");
    }
    for (const auto& xi : shard) {
      if (xi.size() != d) {
        return absl::InvalidArgumentError("offset dimension mismatch");
      }
      for (size_t j = 0; j < d; ++j) total[j] += xi[j];
    }
  }
  for (double t : total) {
    if (std::abs(t) > 1e-9) {
      return absl::InvalidArgumentError("data offsets must sum to zero");
    }
  }
  std::unique_ptr<QuadraticTask> task(new QuadraticTask());
  task->optimum_.resize(d);
  for (size_t j = 0; j < d; ++j) task->optimum_[j] = b[j] / eigenvalues[j];
  task->eigenvalues_ = std::move(eigenvalues);
  task->b_ = std::move(b);
  task->offsets_ = std::move(offsets);
  return task;
}

absl::StatusOr<std::vector<double>> QuadraticTask::LocalGradient(
    int user, std::span<const double> w, std::span<const int> batch) const {
  if (absl::Status s =
          CheckBatch(user, num_users(), w, dimension(), batch, shard_size());
      !s.ok()) {
    return s;
  }
  const int d = dimension();
  std::vector<double> grad(d);
  for (int j = 0; j < d; ++j) grad[j] = eigenvalues_[j] * w[j] - b_[j];
  const double inv_batch = 1.0 / static_cast<double>(batch.size());
  for (int i : batch) {
    const std::vector<double>& xi = offsets_[user][i];
    for (int j = 0; j < d; ++j) grad[j] += inv_batch * xi[j];
  }
  return grad;
}

double QuadraticTask::Loss(std::span<const double> w) const {
  double loss = 0.0;
  for (size_t j = 0; j < b_.size(); ++j) {
    loss += 0.5 * eigenvalues_[j] * w[j] * w[j] - b_[j] * w[j];
  }
  return loss;
}

double QuadraticTask::Gap(std::span<const double> w) const {
  double gap = 0.0;
  for (size_t j = 0; j < b_.size(); ++j) {
    const double diff = w[j] - optimum_[j];
    gap += 0.5 * eigenvalues_[j] * diff * diff;
  }
  return gap;
}

absl::StatusOr<std::unique_ptr<QuadraticTask>> MakeQuadraticTask(
    const QuadraticTaskParams& params) {
  if (params.dimension < 1 || params.num_users < 1 || params.shard_size < 1) {
    return absl::InvalidArgumentError(
        "dimension, num_users and shard_size must be positive");
  }
  if (!(params.strong_convexity > 0.0 &&
        params.smoothness >= params.strong_convexity)) {
    return absl::InvalidArgumentError(
        absl::StrCat("need smoothness >= strong_convexity > 0, got ",
                     params.smoothness, " and ", params.strong_convexity));
  }
  if (!(params.data_spread >= 0.0 && params.b_norm >= 0.0)) {
    return absl::InvalidArgumentError("data_spread and b_norm must be >= 0");
  }
  const int d = params.dimension;
  std::vector<double> eigenvalues(d);
  for (int j = 0; j < d; ++j) {
    eigenvalues[j] = d == 1
                         ? params.strong_convexity
                         : params.strong_convexity +
                               (params.smoothness - params.strong_convexity) *
                                   j / static_cast<double>(d - 1);
  }
  RngStream rng(StreamKey{params.seed, 0, 0, 0, StreamPurpose::kTaskData});
  std::vector<double> b(d);
  for (double& x : b) x = rng.Normal();
  if (params.b_norm > 0.0) {
    double norm = 0.0;
    for (double x : b) norm += x * x;
    norm = std::sqrt(norm);
    for (double& x : b) x *= params.b_norm / norm;
  }
  std::vector<std::vector<std::vector<double>>> offsets(
      params.num_users, std::vector<std::vector<double>>(
                            params.shard_size, std::vector<double>(d, 0.0)));
  if (params.data_spread > 0.0) {
    std::vector<double> mean(d, 0.0);
    for (auto& shard : offsets) {
      for (auto& xi : shard) {
        for (int j = 0; j < d; ++j) {
          xi[j] = params.data_spread * rng.Normal();
          mean[j] += xi[j];
        }
      }
    }
    const double n = static_cast<double>(params.num_users) * params.shard_size;
    for (double& m : mean) m /= n;
    for (auto& shard : offsets) {
      for (auto& xi : shard) {
        for (int j = 0; j < d; ++j) xi[j] -= mean[j];
      }
    }
  }
  return QuadraticTask::Create(std::move(eigenvalues), std::move(b),
                               std::move(offsets));
}

absl::StatusOr<std::unique_ptr<TrainingTask>> MakeLogisticTask(
    const LogisticTaskParams& params) {
  if (params.dimension < 1 || params.num_users < 1 || params.shard_size < 1) {
    return absl::InvalidArgumentError(
        "dimension, num_users and shard_size must be positive");
  }
  if (!(params.l2_reg > 0.0)) {
    return absl::InvalidArgumentError(absl::StrCat(
        "l2_reg must be positive for strong convexity, got ", params.l2_reg));
  }
  const int d = params.dimension;
  RngStream rng(StreamKey{params.seed, 0, 0, 0, StreamPurpose::kTaskData});
  const double shift = params.separation / std::sqrt(static_cast<double>(d));
  std::vector<std::vector<Eigen::VectorXd>> features(params.num_users);
  std::vector<std::vector<double>> labels(params.num_users);
  for (int k = 0; k < params.num_users; ++k) {
    for (int i = 0; i < params.shard_size; ++i) {
      const double v = rng.Bernoulli(0.5) ? 1.0 : -1.0;
      Eigen::VectorXd u(d);
      for (int j = 0; j < d; ++j) u[j] = v * shift + rng.Normal();
      features[k].push_back(std::move(u));
      labels[k].push_back(v);
    }
  }
  auto task = std::make_unique<LogisticTask>(std::move(features),
                                             std::move(labels), params.l2_reg);
  if (absl::Status s = task->Solve(); !s.ok()) return s;
  return task;
}

}  // namespace airdp
