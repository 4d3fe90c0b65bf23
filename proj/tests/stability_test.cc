// Copyright 2026 The ASL Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cmath>
#include <limits>

#include "asl/random.h"
#include "asl/stability/budget.h"
#include "asl/stability/planner.h"
#include "gtest/gtest.h"
#include "test_util.h"

namespace asl {
namespace {

using ::asl::testing::ValueOrDie;

// Hand evaluation of the composed epsilon, written independently of the
// library: eps0 * sqrt(k) * sqrt(-ln delta') + 2 k eps0^2.
double HandComposedEpsilon(double eps0, double k, double delta_prime) {
  return eps0 * std::sqrt(k) * std::sqrt(-std::log(delta_prime)) +
         2.0 * k * eps0 * eps0;
}

TEST(ComposeAdvancedTest, NullMechanism) {
  const StabilityBudget b = ValueOrDie(ComposeAdvanced(0, 0, 17, 1e-5));
  EXPECT_EQ(b.epsilon, 0.0);
  EXPECT_EQ(b.delta, 1e-5);
}

TEST(ComposeAdvancedTest, SingleQueryExample) {
  const double dp = std::exp(-4.0);
  const StabilityBudget b = ValueOrDie(ComposeAdvanced(0.5, 0, 1, dp));
  EXPECT_NEAR(b.epsilon, 0.5 * 2 + 0.5, 1e-15);
  EXPECT_EQ(b.delta, dp);
}

TEST(ComposeAdvancedTest, FourQueryExample) {
  const StabilityBudget b = ValueOrDie(ComposeAdvanced(0.1, 0, 4, 1e-6));
  // 0.1 * sqrt(4 * 13.8155...) + 0.08
  EXPECT_NEAR(b.epsilon, 0.1 * std::sqrt(4 * 13.815510557964274) + 0.08, 1e-14);
}

TEST(ComposeAdvancedTest, RejectsEpsilonAboveOne) {
  EXPECT_EQ(ComposeAdvanced(1.01, 0, 3, 1e-6).status().code(),
            absl::StatusCode::kOutOfRange);
  EXPECT_FALSE(ComposeAdvanced(0.5, 0, 3, 0).ok());
}

TEST(ComposeAdvancedTest, MatchesHandEvaluationAtRandomPoints) {
  Rng rng(2024);
  for (int i = 0; i < 100; ++i) {
    const double eps0 = Uniform01(rng);
    const double delta0 = 1e-3 * Uniform01(rng);
    const std::size_t k = 1 + static_cast<std::size_t>(Uniform01(rng) * 1000);
    const double dp = std::pow(10.0, -1 - 9 * Uniform01(rng));
    const StabilityBudget b = ValueOrDie(ComposeAdvanced(eps0, delta0, k, dp));
    const double hand_eps = HandComposedEpsilon(eps0, static_cast<double>(k), dp);
    const double hand_delta = std::min(1.0, dp + static_cast<double>(k) * delta0);
    EXPECT_LE(std::abs(b.epsilon - hand_eps), 1e-12 * std::abs(hand_eps) + 1e-300);
    EXPECT_LE(std::abs(b.delta - hand_delta), 1e-12 * hand_delta);
  }
}

TEST(ComposeAdvancedTest, MonotoneInEveryArgument) {
  Rng rng(5);
  for (int i = 0; i < 200; ++i) {
    const double eps0 = 0.9 * Uniform01(rng);
    const double delta0 = 1e-4 * Uniform01(rng);
    const std::size_t k = 1 + i;
    const double dp = 1e-6;
    const StabilityBudget base = ValueOrDie(ComposeAdvanced(eps0, delta0, k, dp));
    const StabilityBudget more_k = ValueOrDie(ComposeAdvanced(eps0, delta0, k + 1, dp));
    const StabilityBudget more_eps =
        ValueOrDie(ComposeAdvanced(eps0 + 0.05, delta0, k, dp));
    const StabilityBudget more_delta =
        ValueOrDie(ComposeAdvanced(eps0, delta0 + 1e-5, k, dp));
    EXPECT_GE(more_k.epsilon, base.epsilon);
    EXPECT_GE(more_k.delta, base.delta);
    EXPECT_GE(more_eps.epsilon, base.epsilon);
    EXPECT_GE(more_delta.delta, base.delta);
  }
}

TEST(ComposeBasicTest, ScalesLinearlyAndCapsDelta) {
  const StabilityBudget b = ComposeBasic({0.2, 0.3}, 5);
  EXPECT_DOUBLE_EQ(b.epsilon, 1.0);
  EXPECT_EQ(b.delta, 1.0);
}

TEST(CalibrateTest, SingleQueryMatchesClosedForm) {
  const StabilityBudget target{1.0, 1e-6};
  const StabilityBudget per = ValueOrDie(CalibratePerQuery(target, 1, 5e-7));
  // Solve 2 e^2 + sqrt(L) e - 1 = 0 with L = ln(1 / 5e-7).
  const double L = std::log(1.0 / 5e-7);
  const double closed = (-std::sqrt(L) + std::sqrt(L + 8.0)) / 4.0;
  EXPECT_NEAR(per.epsilon, closed, 1e-10);
  EXPECT_NEAR(per.delta, 5e-7, 1e-20);
}

TEST(CalibrateTest, RoundTripNeverExceedsTarget) {
  Rng rng(8);
  for (int i = 0; i < 100; ++i) {
    const StabilityBudget target{0.01 + 3 * Uniform01(rng),
                                 1e-8 + 1e-3 * Uniform01(rng)};
    const std::size_t k = 1 + static_cast<std::size_t>(Uniform01(rng) * 5000);
    const StabilityBudget per = ValueOrDie(CalibratePerQuery(target, k));
    const StabilityBudget total =
        ValueOrDie(ComposeAdvanced(per.epsilon, per.delta, k, target.delta / 2));
    EXPECT_LE(total.epsilon, target.epsilon);
    EXPECT_LE(total.delta, target.delta * (1 + 1e-12));
  }
}

TEST(CalibrateTest, ZeroTargetGivesZeroEpsilon) {
  const StabilityBudget per = ValueOrDie(CalibratePerQuery({0.0, 1e-6}, 10));
  EXPECT_EQ(per.epsilon, 0.0);
}

TEST(CalibrateTest, RejectsBadSplits) {
  EXPECT_FALSE(CalibratePerQuery({1.0, 1e-6}, 10, 1e-6).ok());
  EXPECT_FALSE(CalibratePerQuery({1.0, 1e-6}, 10, 0.0).ok());
  EXPECT_FALSE(CalibratePerQuery(StabilityBudget::None(), 10).ok());
}

TEST(BudgetTest, NoneIsInfiniteAndSerializesAsNull) {
  const StabilityBudget none = StabilityBudget::None();
  EXPECT_FALSE(none.is_finite());
  EXPECT_TRUE(ToJson(none)["epsilon"].is_null());
  EXPECT_EQ(ToJson(none)["delta"], 1.0);
  EXPECT_FALSE(StabilityBudget::Create(-1, 0).ok());
  EXPECT_FALSE(StabilityBudget::Create(1, 1.5).ok());
}

TEST(TvConversionTest, PinskerAndMaxKl) {
  EXPECT_NEAR(TvFromKl(0.1), 0.1, 1e-15);  // sqrt(2 * 0.01 / 2)
  EXPECT_EQ(TvFromKlDivergence(10.0), 1.0);
  EXPECT_NEAR(ValueOrDie(TvFromMaxKl({0.2, 0.01})), 0.41, 1e-15);
  EXPECT_FALSE(TvFromMaxKl({1.5, 0}).ok());
}

TEST(PlanTransferTest, Example) {
  const std::size_t n = 1000;
  const TransferPlan plan = ValueOrDie(PlanTransfer(
      0.064, 0.032, 1.0 / n, n, 10, TransferVariant::kLowSensitivity));
  EXPECT_NEAR(plan.required_budget.epsilon, 0.001, 1e-15);
  EXPECT_NEAR(plan.required_budget.delta, 6.4e-5, 1e-17);
  EXPECT_NEAR(plan.required_alpha, 0.008, 1e-15);
  EXPECT_NEAR(plan.required_beta, 0.064 * 0.032 / 16, 1e-17);
}

TEST(PlanTransferTest, IdentitiesHoldAtRandomPoints) {
  Rng rng(31);
  for (int i = 0; i < 100; ++i) {
    const double alpha = 0.0999 * Uniform01(rng) + 1e-4;
    const double beta = 0.0999 * Uniform01(rng) + 1e-4;
    const std::size_t n = 10 + static_cast<std::size_t>(Uniform01(rng) * 1e5);
    const double delta = (0.5 + Uniform01(rng)) / static_cast<double>(n);
    const double dn = delta * static_cast<double>(n);
    const TransferPlan lo = ValueOrDie(
        PlanTransfer(alpha, beta, delta, n, 5, TransferVariant::kLowSensitivity));
    EXPECT_NEAR(lo.required_budget.epsilon * 64 * dn, alpha, 1e-12);
    EXPECT_NEAR(lo.required_budget.delta * 32 * dn, alpha * beta, 1e-12);
    const TransferPlan mn = ValueOrDie(
        PlanTransfer(alpha, beta, delta, n, 5, TransferVariant::kMinimization));
    EXPECT_NEAR(mn.required_budget.epsilon * 128 * dn, alpha, 1e-12);
    EXPECT_NEAR(mn.required_budget.delta * 64 * dn, alpha * beta, 1e-12);
    EXPECT_NEAR(mn.required_beta * 32 * dn, alpha * beta, 1e-12);
    EXPECT_DOUBLE_EQ(mn.required_alpha, alpha / 8);
  }
}

TEST(PlanTransferTest, EnforcesHypothesis) {
  EXPECT_EQ(PlanTransfer(0.2, 0.05, 0.01, 100, 1, TransferVariant::kLowSensitivity)
                .status()
                .code(),
            absl::StatusCode::kOutOfRange);
  EXPECT_FALSE(
      PlanTransfer(0.05, 0.0, 0.01, 100, 1, TransferVariant::kLowSensitivity).ok());
  EXPECT_TRUE(
      PlanTransfer(0.2, 0.05, 0.01, 100, 1, TransferVariant::kMinimization).ok());
}

TEST(PlanTransferTest, FeasibleAtLargeN) {
  // With Delta = 1/n the budget is absolute, so a large enough n leaves the
  // Laplace noise far below alpha'.
  const std::size_t n = 1000;
  const TransferPlan plan = ValueOrDie(PlanTransfer(
      0.09, 0.09, 1.0 / static_cast<double>(n) / 1e4, n, 1,
      TransferVariant::kLowSensitivity));
  EXPECT_TRUE(plan.feasible);
  EXPECT_GT(plan.laplace_noise_scale, 0);
  const nlohmann::json doc = ToJson(plan);
  EXPECT_EQ(doc["variant"], "low_sensitivity");
  EXPECT_TRUE(doc.contains("required_sample_accuracy"));
}

TEST(SampleComplexityTest, StatisticalRows) {
  SampleComplexityInput in;
  in.k = 1e4;
  in.alpha = 0.05;
  in.beta = 0.05;
  in.universe_size = 1e6;
  const double conf = std::pow(std::log(1 / (0.05 * 0.05)), 1.5);
  const double small = ValueOrDie(SampleComplexity(in));
  EXPECT_EQ(small, std::ceil(std::sqrt(1e4 * std::log(std::log(1e4))) * conf /
                             (0.05 * 0.05)));
  in.regime = QueryRegime::kManyQueries;
  const double large = ValueOrDie(SampleComplexity(in));
  EXPECT_EQ(large, std::ceil(std::sqrt(std::log(1e6)) * std::log(1e4) * conf /
                             (0.05 * 0.05 * 0.05)));
}

TEST(SampleComplexityTest, TrivialInstanceIsOrderOne) {
  SampleComplexityInput in;
  in.k = 1;
  in.alpha = 1;
  in.beta = 0.5;
  const double n = ValueOrDie(SampleComplexity(in));
  EXPECT_EQ(n, 1.0);
}

TEST(SampleComplexityTest, ParsesRowNames) {
  EXPECT_TRUE(ParseQueryFamily("statistical").ok());
  EXPECT_FALSE(ParseQueryFamily("sparse_vector").ok());
  EXPECT_EQ(ValueOrDie(ParseQueryRegime("k_large")), QueryRegime::kManyQueries);
}

}  // namespace
}  // namespace asl
