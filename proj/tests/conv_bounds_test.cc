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
#include <vector>

#include "absl/status/status.h"
#include "airdp/sampling.h"
#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "test_util.h"

namespace airdp {
namespace {

using ::airdp::testing::RelErr;
using ::airdp::testing::StatusIs;

constexpr double kOracleTol = 1e-12;

// Default parameters with a uniform row of K copies of p.
ConvergenceParams Uniform(int k, double p, int64_t rounds) {
  ConvergenceParams params;
  params.rounds = rounds;
  params.probabilities = {std::vector<double>(k, p)};
  return params;
}

TEST(SecondMomentBoundTest, Examples) {
  const ParticipantStats full =
      ComputeParticipantStats(std::vector<double>(7, 1));
  EXPECT_DOUBLE_EQ(*SecondMomentBound(full, 2.0, 30, 0.0, 0.0), 4.0);
  const ParticipantStats half =
      ComputeParticipantStats(std::vector<double>(20, 0.5));
  EXPECT_NEAR(*SecondMomentBound(half, 2.0, 30, 0.1, 1.0), 4.8, kOracleTol);
  EXPECT_THAT(SecondMomentBound(ParticipantStats{}, 2.0, 30, 0.1, 1.0),
              StatusIs(absl::StatusCode::kInvalidArgument));
}

TEST(SecondMomentBoundTest, LinearInReceiverNoise) {
  const ParticipantStats stats{7.0, 2.5, 0.99};
  const double base = *SecondMomentBound(stats, 1.5, 12, 0.3, 0.8);
  const double doubled = *SecondMomentBound(stats, 1.5, 12, 0.3, 1.6);
  EXPECT_NEAR(doubled - base, 12 * 0.8 / 49.0, 1e-14);
}

TEST(BoundUnknownTest, Examples) {
  EXPECT_NEAR(*BoundUnknown(Uniform(20, 0.5, 4000)), 0.054, kOracleTol);
  EXPECT_NEAR(*BoundUnknown(Uniform(20, 0.5, 8000)),
              0.5 * *BoundUnknown(Uniform(20, 0.5, 4000)), 1e-15);
}

TEST(BoundUnknownTest, HeterogeneousIsMeanOfSingleRoundBounds) {
  ConvergenceParams params;
  params.rounds = 4;
  params.probabilities = {
      {0.2, 0.4, 0.9}, {0.5, 0.5, 0.5}, {1.0, 0.3, 0.7}, {0.1, 0.1, 0.8}};
  double mean = 0.0;
  for (const std::vector<double>& row : params.probabilities) {
    ConvergenceParams single = params;
    single.probabilities = {row};
    mean += *BoundUnknown(single) / 4;
  }
  EXPECT_LT(RelErr(*BoundUnknown(params), mean), 1e-14);
}

TEST(BoundUnknownTest, RejectsBadShapes) {
  ConvergenceParams params = Uniform(20, 0.5, 3);
  params.probabilities.push_back(params.probabilities.front());
  EXPECT_THAT(BoundUnknown(params),
              StatusIs(absl::StatusCode::kInvalidArgument));
  params = Uniform(20, 0.5, 10);
  params.strong_convexity = 1.0;
  EXPECT_THAT(BoundUnknown(params),
              StatusIs(absl::StatusCode::kInvalidArgument));
  EXPECT_THAT(BoundUnknown(Uniform(20, 0.0, 10)),
              StatusIs(absl::StatusCode::kInvalidArgument));
}

TEST(BoundOptimalPTest, MatchesUnknownBoundAtPStar) {
  ASSERT_OK_AND_ASSIGN(OptimalPBound opt,
                       BoundOptimalP(Uniform(1, 1.0, 4000), 1e-5, 200));
  EXPECT_FALSE(opt.fell_back);
  EXPECT_NEAR(opt.p_star, 0.3493719027845567, kOracleTol);
  EXPECT_NEAR(opt.bound, 0.045971147941777857, kOracleTol);
  for (int64_t k : {200, 1000, 50000}) {
    for (double dp : {1e-3, 1e-5}) {
      ASSERT_OK_AND_ASSIGN(OptimalPBound o,
                           BoundOptimalP(Uniform(1, 1.0, 1000), dp, k));
      ASSERT_FALSE(o.fell_back);
      const double direct =
          *BoundUnknown(Uniform(static_cast<int>(k), o.p_star, 1000));
      EXPECT_LT(RelErr(o.bound, direct), 1e-9) << k << " " << dp;
    }
  }
}

TEST(BoundOptimalPTest, FallsBackWhenPStarSaturates) {
  ASSERT_OK_AND_ASSIGN(OptimalPBound opt,
                       BoundOptimalP(Uniform(1, 1.0, 4000), 1e-5, 20));
  EXPECT_TRUE(opt.fell_back);
  EXPECT_EQ(opt.p_star, 1.0);
  EXPECT_NEAR(opt.bound, *BoundUnknown(Uniform(20, 1.0, 4000)), 1e-15);
}

TEST(BoundOptimalPTest, NoiseTermDecaysLikeInverseRootK) {
  // The d-dependent part is linear in d, so twice the difference between d and
  // d/2 isolates it.
  auto noise_term = [](int64_t k) {
    ConvergenceParams full = Uniform(1, 1.0, 1000);
    ConvergenceParams half = full;
    half.dimension = full.dimension / 2;
    return 2 * (BoundOptimalP(full, 1e-5, k)->bound -
                BoundOptimalP(half, 1e-5, k)->bound);
  };
  for (int64_t k : {10000, 100000, 1000000}) {
    EXPECT_NEAR(noise_term(4 * k) / noise_term(k), 0.5, 0.025) << k;
  }
}

TEST(InverseMomentsTaylorTest, Examples) {
  const InverseMoments a = *InverseMomentsTaylor(4.0, 0.0);
  EXPECT_EQ(a.first, 0.25);
  EXPECT_EQ(a.second, 0.0625);
  const InverseMoments b = *InverseMomentsTaylor(1.0, 0.5);
  EXPECT_DOUBLE_EQ(b.first, 1.5);
  EXPECT_DOUBLE_EQ(b.second, 2.5);
  EXPECT_NEAR(InverseMomentsTaylor(100.0, 50.0)->first, 0.01005, 1e-15);
  EXPECT_NEAR(InverseMomentsTaylor(100.0, 50.0)->first,
              InverseMomentsExact(std::vector<double>(200, 0.5))->first, 1e-6);
  EXPECT_THAT(InverseMomentsTaylor(0.0, 1.0),
              StatusIs(absl::StatusCode::kInvalidArgument));
}

TEST(InverseMomentsTaylorTest, AccuracyImprovesWithMu) {
  for (double p : {0.5, 0.1}) {
    double prev_first = INFINITY, prev_second = INFINITY;
    for (int mu : {5, 10, 20, 50, 100}) {
      const int k = static_cast<int>(std::lround(mu / p));
      const std::vector<double> row(k, p);
      const ParticipantStats stats = ComputeParticipantStats(row);
      const InverseMoments taylor =
          *InverseMomentsTaylor(stats.mu, stats.sigma2);
      const InverseMoments exact = *InverseMomentsExact(row);
      const double err_first = RelErr(taylor.first, exact.first);
      const double err_second = RelErr(taylor.second, exact.second);
      EXPECT_LT(err_first, prev_first) << mu;
      EXPECT_LT(err_second, prev_second) << mu;
      if (mu >= 50) {
        EXPECT_LE(err_first, 0.01) << mu;
        EXPECT_LE(err_second, 0.01) << mu;
      }
      prev_first = err_first;
      prev_second = err_second;
    }
  }
}

TEST(BoundKnownTest, FullParticipationEqualsUnknown) {
  for (MomentSource source : {MomentSource::kTaylor, MomentSource::kExact}) {
    EXPECT_LT(RelErr(*BoundKnown(Uniform(20, 1.0, 500), source),
                     *BoundUnknown(Uniform(20, 1.0, 500))),
              1e-14);
  }
}

TEST(BoundKnownTest, OracleValues) {
  const ConvergenceParams params = Uniform(20, 0.5, 4000);
  EXPECT_NEAR(*BoundKnown(params, MomentSource::kTaylor), 0.052425057077469023,
              kOracleTol);
  EXPECT_NEAR(*BoundKnown(params, MomentSource::kExact), 0.052657521161348102,
              kOracleTol);
  EXPECT_NEAR(*BoundKnownUniform(params), 0.052425057077469023, kOracleTol);
}

TEST(BoundKnownTest, UniformClosedFormMatchesGenericPath) {
  for (int k : {1, 5, 20, 200, 5000}) {
    for (double p : {0.01, 0.2, 0.5, 0.97, 1.0}) {
      const ConvergenceParams params = Uniform(k, p, 321);
      EXPECT_LT(RelErr(*BoundKnownUniform(params),
                       *BoundKnown(params, MomentSource::kTaylor)),
                1e-12)
          << k << " " << p;
    }
  }
  ConvergenceParams mixed = Uniform(3, 0.5, 10);
  mixed.probabilities = {{0.5, 0.4, 0.5}};
  EXPECT_THAT(BoundKnownUniform(mixed),
              StatusIs(absl::StatusCode::kInvalidArgument));
}

TEST(BoundKnownTest, TaylorAndExactAgreeForLargeMu) {
  for (int k : {100, 200, 1000}) {
    for (double p : {0.5, 0.9}) {
      const ConvergenceParams params = Uniform(k, p, 1000);
      EXPECT_LT(RelErr(*BoundKnown(params, MomentSource::kTaylor),
                       *BoundKnown(params, MomentSource::kExact)),
                0.01);
    }
  }
}

TEST(BoundKnownTest, CloseToUnknownBound) {
  for (int k : {200, 1000}) {
    for (double p : {0.05, 0.1, 0.3, 0.5, 0.9, 1.0}) {
      for (int64_t t : {1000, 4000}) {
        const ConvergenceParams params = Uniform(k, p, t);
        const double unknown = *BoundUnknown(params);
        for (MomentSource source :
             {MomentSource::kTaylor, MomentSource::kExact}) {
          EXPECT_LE(RelErr(*BoundKnown(params, source), unknown), 0.1)
              << k << " " << p << " " << t;
        }
      }
    }
  }
  for (double p : {0.3, 0.5, 0.9}) {
    const ConvergenceParams params = Uniform(20, p, 4000);
    EXPECT_LE(RelErr(*BoundKnown(params, MomentSource::kExact),
                     *BoundUnknown(params)),
              0.1)
        << p;
  }
}

TEST(BoundKnownTest, RatioToUnknownDoesNotDependOnRounds) {
  // With time-invariant sampling both bounds scale as 1/T, so a large T alone
  // cannot close the gap when few users participate.
  const double r1 = *BoundKnown(Uniform(20, 0.1, 1000), MomentSource::kExact) /
                    *BoundUnknown(Uniform(20, 0.1, 1000));
  const double r2 =
      *BoundKnown(Uniform(20, 0.1, 100000), MomentSource::kExact) /
      *BoundUnknown(Uniform(20, 0.1, 100000));
  EXPECT_LT(RelErr(r1, r2), 1e-12);
  EXPECT_GT(std::fabs(r1 - 1.0), 0.1);
}

TEST(BoundsTest, StrictlyDecreasingInRounds) {
  double prev_unknown = INFINITY, prev_taylor = INFINITY, prev_exact = INFINITY;
  double prev_opt = INFINITY;
  for (int64_t t : {1, 2, 10, 100, 1000, 4000, 100000}) {
    const ConvergenceParams params = Uniform(20, 0.5, t);
    const double unknown = *BoundUnknown(params);
    const double taylor = *BoundKnown(params, MomentSource::kTaylor);
    const double exact = *BoundKnown(params, MomentSource::kExact);
    const double opt = BoundOptimalP(params, 1e-5, 200)->bound;
    EXPECT_LT(unknown, prev_unknown);
    EXPECT_LT(taylor, prev_taylor);
    EXPECT_LT(exact, prev_exact);
    EXPECT_LT(opt, prev_opt);
    prev_unknown = unknown;
    prev_taylor = taylor;
    prev_exact = exact;
    prev_opt = opt;
  }
}

}  // namespace
}  // namespace airdp
