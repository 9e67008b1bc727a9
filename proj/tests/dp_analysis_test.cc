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

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <utility>
#include <vector>

#include "absl/status/status.h"
#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "test_util.h"

namespace airdp {
namespace {

using ::airdp::testing::RelErr;
using ::airdp::testing::StatusIs;
using ::testing::DoubleNear;

// Frozen values come from tests/oracles/compute_oracles.py (50-digit mpmath).
constexpr double kOracleTol = 1e-12;
constexpr double kReferenceTol = 5e-3;

MechanismParams TableParams(double lipschitz, double noise_var) {
  return {.lipschitz = lipschitz,
          .sigma_min = std::sqrt(noise_var),
          .delta_local = 1e-5,
          .noise_var_n0 = 1.0};
}

MechanismParams Fig2Params() {
  return {.lipschitz = 1.0,
          .sigma_min = 3.0,
          .delta_local = 1e-4,
          .noise_var_n0 = 9.0};
}

TEST(GaussianMechanismEpsilonTest, Examples) {
  EXPECT_EQ(*GaussianMechanismEpsilon(0.0, 1.0, 0.05), 0.0);
  EXPECT_LT(
      RelErr(*GaussianMechanismEpsilon(2.0, 1.0, 1.25 * std::exp(-0.5)), 2.0),
      kOracleTol);
  EXPECT_LT(
      RelErr(*GaussianMechanismEpsilon(1.0, 1.0, 0.05), 2.5372724823590393),
      kOracleTol);
}

TEST(GaussianMechanismEpsilonTest, RejectsBadDomain) {
  EXPECT_THAT(GaussianMechanismEpsilon(1.0, 0.0, 0.1),
              StatusIs(absl::StatusCode::kInvalidArgument));
  EXPECT_THAT(GaussianMechanismEpsilon(1.0, 1.0, 0.0),
              StatusIs(absl::StatusCode::kInvalidArgument));
  EXPECT_THAT(GaussianMechanismEpsilon(1.0, 1.0, 1.5),
              StatusIs(absl::StatusCode::kInvalidArgument));
}

TEST(GaussianMechanismEpsilonTest, Monotone) {
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> u(0.05, 3.0);
  std::uniform_real_distribution<double> ud(1e-6, 0.9);
  for (int i = 0; i < 200; ++i) {
    const double s = u(gen), sigma = u(gen), d = ud(gen);
    const double base = *GaussianMechanismEpsilon(s, sigma, d);
    EXPECT_GT(*GaussianMechanismEpsilon(s * 1.1, sigma, d), base);
    EXPECT_LT(*GaussianMechanismEpsilon(s, sigma * 1.1, d), base);
    EXPECT_LT(*GaussianMechanismEpsilon(s, sigma, d * 1.05), base);
  }
}

TEST(SensitivityBoundTest, Examples) {
  EXPECT_EQ(*SensitivityBound(1.0, 1.0, 1.0), 2.0);
  EXPECT_EQ(*SensitivityBound(0.0, 3.0, 0.2), 0.0);
  EXPECT_DOUBLE_EQ(*SensitivityBound(2.0, 0.5, 1.5), 3.0);
  EXPECT_THAT(SensitivityBound(-1.0, 1.0, 1.0),
              StatusIs(absl::StatusCode::kInvalidArgument));
}

TEST(HoeffdingTest, Examples) {
  EXPECT_EQ(*HoeffdingDelta(0.0, 10), 2.0);
  EXPECT_LT(RelErr(*HoeffdingDelta(1.0, 1), 0.27067056647322538), kOracleTol);
  EXPECT_LT(RelErr(*HoeffdingDelta(0.17468, 200), 1.0008320314764838e-5),
            1e-10);
  EXPECT_THAT(HoeffdingDelta(0.1, 0),
              StatusIs(absl::StatusCode::kInvalidArgument));
}

TEST(HoeffdingTest, BetaFromDelta) {
  EXPECT_LT(RelErr(*BetaFromDelta(2.0 * std::exp(-2.0), 1), 1.0), kOracleTol);
  EXPECT_LT(RelErr(*BetaFromDelta(1e-5, 200), 0.17468595139227835), kOracleTol);
  EXPECT_THAT(BetaFromDelta(1.0, 10),
              StatusIs(absl::StatusCode::kInvalidArgument));
  EXPECT_THAT(BetaFromDelta(0.0, 10),
              StatusIs(absl::StatusCode::kInvalidArgument));
}

TEST(HoeffdingTest, RoundTrip) {
  EXPECT_LT(RelErr(*HoeffdingDelta(*BetaFromDelta(0.3, 50), 50), 0.3),
            kOracleTol);
  for (double d = 1e-9; d < 1.0; d *= 1.7) {
    for (int64_t k : {1, 7, 200, 100000}) {
      EXPECT_LT(RelErr(*HoeffdingDelta(*BetaFromDelta(d, k), k), d), 1e-12)
          << d << " " << k;
    }
  }
}

TEST(LocalEpsilonTest, ReferenceTableEntries) {
  const double kappa09 = 144.16280972154433;
  const double kappa03 = 24.76280972154433;
  struct Case {
    double lipschitz, noise_var, kappa, reference, oracle;
  };
  const Case cases[] = {
      {1.0, 0.1, kappa09, 2.46, 2.4598719669628524},
      {1.0, 0.1, kappa03, 5.124, 5.1237803626827017},
      {0.1, 0.1, kappa09, 0.2460, 0.24598719669628524},
      {0.1, 0.1, kappa03, 0.5124, 0.51237803626827017},
      {1.0, 0.8, kappa09, 0.8953, 0.89530660798174757},
      {1.0, 0.8, kappa03, 2.084, 2.0843778417133183},
      {0.2, 0.8, kappa09, 0.1791, 0.17906132159634951},
      {0.2, 0.8, kappa03, 0.4169, 0.41687556834266366},
  };
  for (const Case& c : cases) {
    const double eps =
        LocalEpsilonBound(TableParams(c.lipschitz, c.noise_var), c.kappa, true)
            ->epsilon;
    EXPECT_LT(RelErr(eps, c.oracle), kOracleTol);
    EXPECT_LT(RelErr(eps, c.reference), kReferenceTol);
  }
}

TEST(LocalEpsilonTest, FixedKappaExamples) {
  EXPECT_LT(
      RelErr(LocalEpsilonBound(TableParams(1, 0.1), 144.164, true)->epsilon,
             2.4598625319836655),
      kOracleTol);
  EXPECT_LT(
      RelErr(LocalEpsilonBound(TableParams(1, 0.8), 24.764, true)->epsilon,
             2.0843319207581075),
      kOracleTol);
  EXPECT_LT(
      RelErr(LocalEpsilonBound(TableParams(1, 0.1), 144.164, false)->epsilon,
             2.5431785828312418),
      kOracleTol);
  EXPECT_EQ(LocalEpsilonBound(TableParams(0, 0.1), 3.0, true)->epsilon, 0.0);
  EXPECT_EQ(LocalEpsilonBound(TableParams(0, 0.1), 3.0, false)->epsilon, 0.0);
}

TEST(LocalEpsilonTest, KappaFromProbabilities) {
  const double beta = *BetaFromDelta(1e-5, 200);
  const std::vector<double> p(200, 0.9);
  EXPECT_LT(RelErr(*LocalKappa(p, 0, beta), 144.16280972154433), 1e-13);
}

TEST(LocalEpsilonTest, NegativeKappaIsClampedAndFlagged) {
  const LocalEpsilon clamped =
      *LocalEpsilonBound(TableParams(1, 0.1), -5, false);
  const LocalEpsilon zero = *LocalEpsilonBound(TableParams(1, 0.1), 0, false);
  EXPECT_TRUE(clamped.kappa_clamped);
  EXPECT_FALSE(zero.kappa_clamped);
  EXPECT_EQ(clamped.epsilon, zero.epsilon);
}

TEST(LocalEpsilonTest, DecreasingInKappaAndSqrtTwoScaling) {
  const MechanismParams params = TableParams(1.0, 0.3);
  for (double kappa = 0.0; kappa < 500.0; kappa = 2.0 * kappa + 0.7) {
    for (bool n0 : {false, true}) {
      EXPECT_LT(LocalEpsilonBound(params, kappa + 0.5, n0)->epsilon,
                LocalEpsilonBound(params, kappa, n0)->epsilon);
    }
    const double e1 = LocalEpsilonBound(params, kappa, false)->epsilon;
    const double e2 =
        LocalEpsilonBound(params, 2.0 * (1.0 + kappa) - 1.0, false)->epsilon;
    EXPECT_LT(RelErr(e1 / e2, std::sqrt(2.0)), 1e-14);
  }
}

TEST(LocalEpsilonTest, CompanionDelta) {
  EXPECT_DOUBLE_EQ(LocalDelta(0.5, 1e-5, 1e-4), 0.5 * (1e-5 + 1e-4));
}

TEST(CentralEpsilonTest, NonuniformExamples) {
  const MechanismParams params = TableParams(1.0, 0.1);
  std::vector<double> p(200, 0.3);
  const PrivacyBudget uniform = *CentralEpsilonNonuniform(p, params, 1e-5);
  EXPECT_LT(RelErr(uniform.epsilon, 4.921714848347752), 1e-12);
  EXPECT_LT(RelErr(uniform.delta, 1.3000030000300003e-5), 1e-12);
  p.back() = 0.9;
  const PrivacyBudget skewed = *CentralEpsilonNonuniform(p, params, 1e-5);
  EXPECT_LT(RelErr(skewed.epsilon, 5.9435027784586834), 1e-12);
  EXPECT_LT(RelErr(skewed.delta, 1.9000090000900009e-5), 1e-12);
}

TEST(CentralEpsilonTest, ZeroConstantGivesZero) {
  const std::vector<double> p(10, 0.0);
  MechanismParams params = TableParams(0.0, 0.1);
  EXPECT_EQ(CentralEpsilonNonuniform(p, params, 1e-5)->epsilon, 0.0);
  EXPECT_EQ(CentralEpsilonUniform(0.5, 100, params, 1e-5)->epsilon, 0.0);
}

TEST(CentralEpsilonTest, Fig2Uniform) {
  const double p4 = *OptimalSamplingProbability(10000, 1e-4);
  EXPECT_LT(RelErr(p4, 0.044505027923901201), kOracleTol);
  EXPECT_LT(
      RelErr(CentralEpsilonUniform(p4, 10000, Fig2Params(), 1e-4)->epsilon,
             0.0094906196053327521),
      1e-12);
  const double p6 = *OptimalSamplingProbability(1000000, 1e-4);
  EXPECT_LT(
      RelErr(CentralEpsilonUniform(p6, 1000000, Fig2Params(), 1e-4)->epsilon,
             2.8174719266482652e-4),
      1e-12);
}

TEST(CentralEpsilonTest, InfeasibleConcentration) {
  const MechanismParams params = TableParams(1.0, 0.1);
  // beta(1e-5, 200) = 0.1747, so p = 0.1 leaves mu - beta K < 0.
  EXPECT_THAT(CentralEpsilonUniform(0.1, 200, params, 1e-5),
              StatusIs(absl::StatusCode::kFailedPrecondition));
  EXPECT_THAT(
      CentralEpsilonNonuniform(std::vector<double>(200, 0.1), params, 1e-5),
      StatusIs(absl::StatusCode::kFailedPrecondition));
  EXPECT_THAT(CentralEpsilonUniform(0.5, 200, params, 1.0),
              StatusIs(absl::StatusCode::kInvalidArgument));
}

TEST(CentralEpsilonTest, UniformMatchesNonuniformOnConstantVectors) {
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int checked = 0;
  for (int i = 0; i < 300; ++i) {
    const int64_t k = 20 + static_cast<int64_t>(u(gen) * 2000);
    const double p = 0.05 + 0.95 * u(gen);
    const double dp = std::pow(10.0, -1.0 - 8.0 * u(gen));
    MechanismParams params = {.lipschitz = 0.1 + 2.0 * u(gen),
                              .sigma_min = 0.2 + 3.0 * u(gen),
                              .delta_local = 1e-5,
                              .noise_var_n0 = 1.0};
    auto a = CentralEpsilonUniform(p, k, params, dp);
    auto b = CentralEpsilonNonuniform(std::vector<double>(k, p), params, dp);
    ASSERT_EQ(a.ok(), b.ok());
    if (!a.ok()) continue;
    ++checked;
    EXPECT_LT(RelErr(a->epsilon, b->epsilon), 1e-12);
    EXPECT_LT(RelErr(a->delta, b->delta), 1e-12);
  }
  EXPECT_GT(checked, 100);
}

TEST(CentralEpsilonTest, LargeExponentStaysFinite) {
  MechanismParams params = {.lipschitz = 50.0,
                            .sigma_min = 0.01,
                            .delta_local = 1e-5,
                            .noise_var_n0 = 0.0};
  const PrivacyBudget b = *CentralEpsilonUniform(0.5, 200, params, 1e-5);
  EXPECT_TRUE(std::isfinite(b.epsilon));
  EXPECT_GT(b.epsilon, 700.0);
}

TEST(OptimalSamplingTest, Examples) {
  EXPECT_EQ(*OptimalSamplingProbability(1, 0.01), 1.0);
  EXPECT_LT(RelErr(*OptimalSamplingProbability(200, 1e-5), 0.3493719027845567),
            kOracleTol);
  EXPECT_LT(
      RelErr(*OptimalSamplingProbability(10000, 1e-4), 0.044505027923901201),
      kOracleTol);
}

TEST(OptimalSamplingTest, StationarityOfLinearizedObjective) {
  for (int64_t k : {200, 10000, 1000000}) {
    for (double dp : {1e-3, 1e-5}) {
      const double bk = *BetaFromDelta(dp, k) * static_cast<double>(k);
      auto phi = [&](double x) { return x / std::sqrt(x - bk); };
      const double x0 = 2.0 * bk;
      const double h = 1e-4 * x0;
      const double derivative = (phi(x0 + h) - phi(x0 - h)) / (2.0 * h);
      EXPECT_LT(std::fabs(derivative), 1e-6) << k << " " << dp;
    }
  }
}

// Index of the grid minimum of psi(p) = p c / sqrt(K (p - beta)) over 1000
// points in (beta, 1], and of the grid point nearest p*.
std::pair<int, int> GridArgminAndNearest(int64_t k, double dp) {
  const double beta = *BetaFromDelta(dp, k);
  const double p_star = *OptimalSamplingProbability(k, dp);
  const double c = 2.8957415359325135;
  auto psi = [&](double p) {
    return p * c / std::sqrt(static_cast<double>(k) * (p - beta));
  };
  constexpr int kGrid = 1000;
  int best = 0, nearest = 0;
  double best_value = std::numeric_limits<double>::infinity();
  double nearest_dist = std::numeric_limits<double>::infinity();
  for (int i = 1; i <= kGrid; ++i) {
    const double p = beta + (1.0 - beta) * i / kGrid;
    if (psi(p) < best_value) {
      best_value = psi(p);
      best = i;
    }
    if (std::fabs(p - p_star) < nearest_dist) {
      nearest_dist = std::fabs(p - p_star);
      nearest = i;
    }
  }
  return {best, nearest};
}

TEST(OptimalSamplingTest, GridMinimumAtPStar) {
  for (int64_t k : {50, 200, 1000, 10000}) {
    for (double dp : {1e-3, 1e-5}) {
      ASSERT_LT(*OptimalSamplingProbability(k, dp), 1.0);
      const auto [best, nearest] = GridArgminAndNearest(k, dp);
      EXPECT_EQ(best, nearest) << k << " " << dp;
    }
  }
}

TEST(OptimalSamplingTest, GridMinimumAdjacentWhenGridIsCoarse) {
  // p* lies a few cells above beta here and psi is skewed, so the grid
  // minimum can sit one cell past the nearest point.
  const auto [best, nearest] = GridArgminAndNearest(1000000, 1e-5);
  EXPECT_LE(std::abs(best - nearest), 1);
}

TEST(ComparatorTest, Fig2Values) {
  const MechanismParams params = Fig2Params();
  EXPECT_LT(RelErr(*GaussianConstant(params), 2.8957415359325135), 1e-14);
  const double wireless =
      *ComparatorEpsilon(10000, params, 1e-4, Comparator::kWirelessNoSampling);
  const double orth_s = *ComparatorEpsilon(10000, params, 1e-4,
                                           Comparator::kOrthogonalWithSampling);
  const double orth = *ComparatorEpsilon(10000, params, 1e-4,
                                         Comparator::kOrthogonalNoSampling);
  EXPECT_LT(RelErr(wireless, 0.028957415359325135), 1e-13);
  EXPECT_LT(RelErr(orth_s, 0.56582431685603264), 1e-13);
  EXPECT_LT(RelErr(orth, 2.8957415359325135), 1e-13);
  const double ours =
      CentralEpsilonUniform(*OptimalSamplingProbability(10000, 1e-4), 10000,
                            params, 1e-4)
          ->epsilon;
  EXPECT_GT(orth, orth_s);
  EXPECT_GT(orth_s, wireless);
  EXPECT_GT(wireless, ours);
}

TEST(ComparatorTest, ZeroConstant) {
  MechanismParams params = Fig2Params();
  params.lipschitz = 0.0;
  for (Comparator v :
       {Comparator::kWirelessNoSampling, Comparator::kOrthogonalNoSampling,
        Comparator::kOrthogonalWithSampling}) {
    EXPECT_EQ(*ComparatorEpsilon(100, params, 1e-4, v), 0.0);
  }
}

TEST(CompositionTest, HeterogeneousExamples) {
  const PrivacyBudget zero = *ComposeHeterogeneous(
      std::vector<double>(5, 0.0), std::vector<double>(5, 0.0), 1e-5);
  EXPECT_EQ(zero.epsilon, 0.0);
  EXPECT_DOUBLE_EQ(zero.delta, 1e-5);
  const PrivacyBudget b = *ComposeHeterogeneous(
      std::vector<double>(100, 0.1), std::vector<double>(100, 0.0), 1e-5);
  EXPECT_LT(RelErr(b.epsilon, 5.2981096617668809), 1e-12);
  const double e = 0.1;
  const PrivacyBudget one = *ComposeHeterogeneous({{e}}, {{0.0}}, 1e-5);
  EXPECT_LT(RelErr(one.epsilon, (std::exp(e) - 1) * e / (std::exp(e) + 1) +
                                    e * std::sqrt(2 * std::log(1e5))),
            1e-14);
  EXPECT_THAT(ComposeHeterogeneous({}, {}, 1e-5),
              StatusIs(absl::StatusCode::kInvalidArgument));
}

TEST(CompositionTest, HeterogeneousAppendIsMonotoneAndDeltaBounded) {
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  HeterogeneousComposer composer;
  double previous = 0.0;
  for (int t = 0; t < 300; ++t) {
    ASSERT_OK(composer.Add(3.0 * u(gen), 0.05 * u(gen)));
    const PrivacyBudget total = *composer.Total(1e-5);
    EXPECT_GE(total.epsilon, previous);
    EXPECT_GE(total.delta, 0.0);
    EXPECT_LE(total.delta, 1.0);
    previous = total.epsilon;
  }
}

TEST(CompositionTest, InfiniteRoundSetsOverflow) {
  HeterogeneousComposer composer;
  ASSERT_OK(composer.Add(0.1, 0.0));
  ASSERT_OK(composer.Add(std::numeric_limits<double>::infinity(), 0.0));
  const PrivacyBudget total = *composer.Total(1e-5);
  EXPECT_TRUE(total.overflow);
  EXPECT_TRUE(std::isinf(total.epsilon));
}

TEST(CompositionTest, UpperRelaxationExample) {
  const std::vector<double> maxp(10, 0.3), mu(10, 60.0);
  const double upper =
      *ComposeHeterogeneousUpper(maxp, mu, 200, Fig2Params(), 1e-4, 1e-5);
  EXPECT_LT(RelErr(upper, 3.5096039134585577), 1e-12);
  const double eps =
      CentralEpsilonUniform(0.3, 200, Fig2Params(), 1e-4)->epsilon;
  const PrivacyBudget exact = *ComposeHeterogeneous(
      std::vector<double>(10, eps), std::vector<double>(10, 0.0), 1e-5);
  EXPECT_LT(RelErr(exact.epsilon, 3.157137167314021), 1e-12);
  EXPECT_EQ(*ComposeHeterogeneousUpper(std::vector<double>(10, 0.0), mu, 200,
                                       Fig2Params(), 1e-4, 1e-5),
            0.0);
}

TEST(CompositionTest, UpperDominatesExact) {
  std::mt19937_64 gen(17);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int draws = 0;
  while (draws < 20) {
    const int64_t k = 100 + static_cast<int64_t>(u(gen) * 900);
    const int rounds = 1 + static_cast<int>(u(gen) * 50);
    MechanismParams params = {.lipschitz = 0.2 + u(gen),
                              .sigma_min = 1.0 + 3.0 * u(gen),
                              .delta_local = 1e-4,
                              .noise_var_n0 = 1.0};
    const double dp = 1e-4;
    std::vector<double> maxp, mus, eps, deltas;
    bool feasible = true;
    for (int t = 0; t < rounds; ++t) {
      std::vector<double> p(k);
      for (double& x : p) x = 0.3 + 0.6 * u(gen);
      auto b = CentralEpsilonNonuniform(p, params, dp);
      if (!b.ok()) {
        feasible = false;
        break;
      }
      double mx = 0.0, mu = 0.0;
      for (double x : p) {
        mx = std::max(mx, x);
        mu += x;
      }
      maxp.push_back(mx);
      mus.push_back(mu);
      eps.push_back(b->epsilon);
      deltas.push_back(0.0);
    }
    if (!feasible) continue;
    ++draws;
    const double upper =
        *ComposeHeterogeneousUpper(maxp, mus, k, params, dp, 1e-5);
    const double exact = ComposeHeterogeneous(eps, deltas, 1e-5)->epsilon;
    EXPECT_GE(upper, exact);
  }
}

TEST(CompositionTest, HomogeneousExamples) {
  const PrivacyBudget zero = *ComposeHomogeneous(0.0, 1e-6, 50, 1e-5);
  EXPECT_EQ(zero.epsilon, 0.0);
  EXPECT_DOUBLE_EQ(zero.delta, 50 * 1e-6 + 1e-5);
  EXPECT_LT(RelErr(ComposeHomogeneous(0.1, 0.0, 100, 1e-5)->epsilon,
                   5.8502350929445575),
            1e-12);
  EXPECT_LT(RelErr(ComposeHomogeneous(0.1, 0.0, 1, 1e-5)->epsilon,
                   0.49036968302637288),
            1e-12);
  EXPECT_EQ(ComposeHomogeneous(0.1, 0.5, 10, 1e-5)->delta, 1.0);
}

TEST(CompositionTest, HomogeneousOverflowFlag) {
  const PrivacyBudget b = *ComposeHomogeneous(800.0, 0.0, 10, 1e-5);
  EXPECT_TRUE(b.overflow);
  EXPECT_TRUE(std::isinf(b.epsilon));
}

TEST(AdaptiveDeltaPrimeTest, FollowsRule) {
  EXPECT_DOUBLE_EQ(AdaptiveDeltaPrime(10.0, 20),
                   2.0 * std::exp(-2.0 * 100.0 / 20.0) + 1e-5);
  EXPECT_THAT(AdaptiveDeltaPrime(60.0, 200), DoubleNear(1e-5, 1e-15));
}

}  // namespace
}  // namespace airdp
