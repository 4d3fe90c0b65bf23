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

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>
#include <vector>

#include "asl/analysts/analyst.h"
#include "asl/harness/games.h"
#include "asl/mechanisms/mechanism.h"
#include "asl/random.h"
#include "asl/stability/budget.h"
#include "asl/stats.h"
#include "gtest/gtest.h"
#include "test_util.h"

namespace asl {
namespace {

using ::asl::testing::MakeQuery;
using ::asl::testing::UniformOn;
using ::asl::testing::ValueOrDie;
using ::asl::testing::WithPmf;

std::size_t CountOnes(const StatisticalQuery& q) {
  const auto t = q.table();
  return static_cast<std::size_t>(std::count(t.begin(), t.end(), 1.0));
}

TEST(OverfitAttackTest, ZeroProbesSelectsFirstElements) {
  auto a = ValueOrDie(
      OverfitAttackAnalyst::Create(UniformOn(10), {.k_probe = 0, .selection_fraction = 0.25}, 1));
  const StatisticalQuery q = ValueOrDie(a->NextQuery(0));
  const std::vector<double> expected = {1, 1, 1, 0, 0, 0, 0, 0, 0, 0};
  EXPECT_EQ(std::vector<double>(q.table().begin(), q.table().end()), expected);
}

TEST(AttackScoreTableTest, ExactAnswersGiveZeroScores) {
  const Distribution p = WithPmf({0.1, 0.2, 0.3, 0.4});
  Rng rng(4);
  QueryHistory history;
  for (int j = 0; j < 5; ++j) {
    StatisticalQuery q = RandomBinaryQuery(4, rng);
    const double exact = ValueOrDie(EvalPopulation(q, p));
    history.emplace_back(std::move(q), exact);
  }
  for (double s : ValueOrDie(AttackScoreTable(history, p))) EXPECT_NEAR(s, 0, 1e-15);
}

TEST(AttackScoreTableTest, SingleProbeExample) {
  // Residual 0.1 on probe (1, 0): scores 0.1 * (+1/2) and 0.1 * (-1/2).
  const Distribution p = UniformOn(2);
  QueryHistory history;
  history.emplace_back(MakeQuery({1, 0}), 0.6);
  const std::vector<double> scores = ValueOrDie(AttackScoreTable(history, p));
  EXPECT_NEAR(scores[0], 0.05, 1e-15);
  EXPECT_NEAR(scores[1], -0.05, 1e-15);
}

TEST(AttackScoreTableTest, LinearInHistory) {
  const Distribution p = UniformOn(30);
  Rng rng(9);
  QueryHistory a, b, both;
  for (int j = 0; j < 8; ++j) {
    StatisticalQuery q = RandomBinaryQuery(30, rng);
    const double answer = Uniform01(rng);
    (j % 2 == 0 ? a : b).emplace_back(q, answer);
    both.emplace_back(q, answer);
  }
  const auto sa = ValueOrDie(AttackScoreTable(a, p));
  const auto sb = ValueOrDie(AttackScoreTable(b, p));
  const auto sab = ValueOrDie(AttackScoreTable(both, p));
  for (std::size_t z = 0; z < 30; ++z) EXPECT_NEAR(sab[z], sa[z] + sb[z], 1e-12);
  EXPECT_FALSE(AttackScoreTable({}, p).ok());
}

TEST(TopFractionQueryTest, CountsAndTies) {
  Rng rng(2);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t size = 1 + trial * 3;
    std::vector<double> scores(size);
    // Coarse values force ties.
    for (double& s : scores) s = std::floor(4 * Uniform01(rng));
    const double f = 0.05 + 0.95 * Uniform01(rng);
    const StatisticalQuery q = ValueOrDie(TopFractionQuery(scores, f));
    const auto expected = static_cast<std::size_t>(std::ceil(f * size));
    EXPECT_EQ(CountOnes(q), expected);
    for (double v : q.table()) EXPECT_TRUE(v == 0.0 || v == 1.0);
    // Every selected element outranks every unselected one, ties by index.
    for (std::size_t u = 0; u < size; ++u) {
      for (std::size_t v = 0; v < size; ++v) {
        if (q(u) == 1.0 && q(v) == 0.0) {
          EXPECT_TRUE(scores[u] > scores[v] || (scores[u] == scores[v] && u < v));
        }
      }
    }
  }
  EXPECT_FALSE(TopFractionQuery(std::vector<double>{1.0}, 0.0).ok());
  EXPECT_FALSE(TopFractionQuery(std::vector<double>{}, 0.5).ok());
}

TEST(AnalystProtocolTest, ErrorAfterLastRound) {
  auto attack = ValueOrDie(
      OverfitAttackAnalyst::Create(UniformOn(8), {.k_probe = 2, .selection_fraction = 0.5}, 3));
  for (std::size_t r = 0; r < attack->rounds(); ++r) {
    ASSERT_TRUE(attack->NextQuery(r).ok());
    attack->Observe(0.5);
  }
  EXPECT_EQ(attack->NextQuery(3).status().code(),
            absl::StatusCode::kFailedPrecondition);
  RandomNonadaptiveAnalyst random(8, 2, 3);
  EXPECT_TRUE(random.NextQuery(1).ok());
  EXPECT_EQ(random.NextQuery(2).status().code(),
            absl::StatusCode::kFailedPrecondition);
}

TEST(AnalystDeterminismTest, SameSeedSameQueries) {
  auto a = ValueOrDie(OverfitAttackAnalyst::Create(UniformOn(100), {.k_probe = 20}, 8));
  auto b = ValueOrDie(OverfitAttackAnalyst::Create(UniformOn(100), {.k_probe = 20}, 8));
  Rng answers(1);
  for (std::size_t r = 0; r < a->rounds(); ++r) {
    const StatisticalQuery qa = ValueOrDie(a->NextQuery(r));
    const StatisticalQuery qb = ValueOrDie(b->NextQuery(r));
    EXPECT_TRUE(std::equal(qa.table().begin(), qa.table().end(), qb.table().begin()));
    const double answer = Uniform01(answers);
    a->Observe(answer);
    b->Observe(answer);
  }
}

TEST(AttackParamsTest, JsonRoundTripAndValidation) {
  const AttackParams back = ValueOrDie(
      AttackParamsFromJson(ToJson(AttackParams{.k_probe = 7, .selection_fraction = 0.3})));
  EXPECT_EQ(back.k_probe, 7u);
  EXPECT_EQ(back.selection_fraction, 0.3);
  EXPECT_FALSE(AttackParamsFromJson({{"selection_fraction", 1.5}}).ok());
  EXPECT_FALSE(ParseAnalystKind("oracle").ok());
}

// Final-round population error a - q(P) of the attack against `mechanism`.
std::vector<double> FinalErrors(const Distribution& p, std::size_t n,
                                std::size_t k_probe, const MechanismConfig& config,
                                bool adaptive, std::size_t trials, uint64_t seed) {
  const std::size_t k = k_probe + 1;
  MechanismConfig c = config;
  c.k_max = k;
  const MechanismFactory factory = MakeMechanismFactory(c);
  std::vector<double> errs;
  for (std::size_t t = 0; t < trials; ++t) {
    const uint64_t trial_seed = DeriveSeed(seed, t);
    const uint64_t analyst_seed = DeriveSeed(trial_seed, kAnalystStream);
    std::unique_ptr<Analyst> analyst;
    if (adaptive) {
      analyst = ValueOrDie(OverfitAttackAnalyst::Create(
          p, {.k_probe = k_probe, .selection_fraction = 0.5}, analyst_seed));
    } else {
      analyst = std::make_unique<RandomNonadaptiveAnalyst>(p.size(), k, analyst_seed);
    }
    const GameResult game =
        ValueOrDie(RunAccuracyGame(p, n, k, factory, *analyst, trial_seed));
    errs.push_back(game.pop_errs.back());
  }
  return errs;
}

double Mean(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

TEST(OverfitAttackTest, EmpiricalErrorGrowsWithProbeCount) {
  const std::size_t n = 40;
  const Distribution p = UniformOn(400);
  MechanismConfig empirical;
  empirical.kind = MechanismKind::kEmpirical;
  std::vector<double> means;
  for (std::size_t mult : {1, 2, 5, 10}) {
    const std::vector<double> errs =
        FinalErrors(p, n, mult * n, empirical, true, 100, 1000 + mult);
    means.push_back(Mean(errs));
  }
  EXPECT_GT(means.front(), 0.0);
  for (std::size_t i = 1; i < means.size(); ++i) {
    EXPECT_GT(means[i], means[i - 1]) << "k_probe multiple index " << i;
  }
}

TEST(OverfitAttackTest, LaplaceAttackIndistinguishableFromBaseline) {
  const std::size_t n = 50;
  const std::size_t k_probe = 250;
  const Distribution p = UniformOn(250);
  const StabilityBudget per_query = ValueOrDie(
      CalibratePerQuery(ValueOrDie(StabilityBudget::Create(1.0, 1e-6)), k_probe + 1));
  MechanismConfig laplace;
  laplace.kind = MechanismKind::kLaplace;
  laplace.noise_scale = (1.0 / n) / per_query.epsilon;
  std::vector<double> attack = FinalErrors(p, n, k_probe, laplace, true, 100, 5);
  std::vector<double> baseline = FinalErrors(p, n, k_probe, laplace, false, 100, 6);
  for (double& e : attack) e = std::abs(e);
  for (double& e : baseline) e = std::abs(e);
  EXPECT_LE(KolmogorovSmirnov(attack, baseline), KolmogorovSmirnovCritical01(100, 100));
}

TEST(OverfitAttackTest, PilotSucceedsAgainstEmpirical) {
  const std::size_t n = 100;
  MechanismConfig empirical;
  empirical.kind = MechanismKind::kEmpirical;
  const std::vector<double> errs =
      FinalErrors(UniformOn(1000), n, 1000, empirical, true, 100, 77);
  const auto hits = std::count_if(errs.begin(), errs.end(),
                                  [](double e) { return e >= 0.2; });
  EXPECT_GE(hits, 90);
}

}  // namespace
}  // namespace asl
