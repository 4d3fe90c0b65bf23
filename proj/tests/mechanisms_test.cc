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

#include "asl/core/queries.h"
#include "asl/mechanisms/config.h"
#include "asl/mechanisms/mechanism.h"
#include "asl/random.h"
#include "gtest/gtest.h"
#include "test_util.h"

namespace asl {
namespace {

using ::asl::testing::MakeQuery;
using ::asl::testing::MakeSample;
using ::asl::testing::UniformOn;
using ::asl::testing::ValueOrDie;

MechanismConfig Config(MechanismKind kind, double noise, std::size_t k_max) {
  MechanismConfig c;
  c.kind = kind;
  c.noise_scale = noise;
  c.k_max = k_max;
  return c;
}

std::unique_ptr<ConfiguredMechanism> Make(const MechanismConfig& c,
                                          const Sample& x, uint64_t seed) {
  return ValueOrDie(ConfiguredMechanism::Create(c, x, seed));
}

StatisticalQuery RandomQuery(std::size_t size, Rng& rng) {
  std::vector<double> table(size);
  for (double& v : table) v = Uniform01(rng);
  return MakeQuery(table);
}

TEST(EmpiricalMechanismTest, AnswersExactly) {
  auto m = Make(Config(MechanismKind::kEmpirical, 0, 1),
                MakeSample(2, {1, 1, 1, 0}), 0);
  EXPECT_DOUBLE_EQ(ValueOrDie(m->AnswerStatistical(MakeQuery({0, 1}))), 0.75);
}

TEST(LaplaceMechanismTest, ZeroNoiseEqualsEmpirical) {
  Rng rng(1);
  const Sample x = UniformOn(20).Draw(30, rng);
  auto lap = Make(Config(MechanismKind::kLaplace, 0, 100), x, 5);
  auto emp = Make(Config(MechanismKind::kEmpirical, 0, 100), x, 5);
  for (int i = 0; i < 100; ++i) {
    const StatisticalQuery q = RandomQuery(20, rng);
    EXPECT_EQ(ValueOrDie(lap->AnswerStatistical(q)),
              ValueOrDie(emp->AnswerStatistical(q)));
  }
}

TEST(LaplaceMechanismTest, MeanMatchesExactAnswer) {
  const double b = 0.3;
  const std::size_t draws = 100000;
  const Sample x = MakeSample(2, {1, 0, 1, 1, 0});
  auto m = Make(Config(MechanismKind::kLaplace, b, draws), x, 17);
  const StatisticalQuery q = MakeQuery({0, 1});
  double sum = 0;
  for (std::size_t i = 0; i < draws; ++i) sum += ValueOrDie(m->AnswerStatistical(q));
  // Laplace(b) has variance 2 b^2.
  EXPECT_NEAR(sum / draws, 0.6, 3 * b * std::sqrt(2.0 / draws));
}

// Two-sided tail Pr[|noise| > t] for both noise families, 3-sigma binomial
// band over 10^5 draws.
TEST(NoiseTailTest, SampleErrorTailsMatchNoiseDistribution) {
  const std::size_t draws = 100000;
  const Sample x = MakeSample(4, {0, 1, 2, 3, 3});
  const StatisticalQuery q = MakeQuery({0.1, 0.4, 0.9, 0.3});
  const double exact = ValueOrDie(EvalSample(q, x));
  struct Case {
    MechanismKind kind;
    double scale;
  };
  for (const Case c : {Case{MechanismKind::kLaplace, 0.2},
                       Case{MechanismKind::kGaussian, 0.2}}) {
    auto m = Make(Config(c.kind, c.scale, draws), x, 99);
    std::vector<double> errs(draws);
    for (double& e : errs) e = std::abs(ValueOrDie(m->AnswerStatistical(q)) - exact);
    for (double t : {0.05, 0.2, 0.5}) {
      const double expected = c.kind == MechanismKind::kLaplace
                                  ? std::exp(-t / c.scale)
                                  : std::erfc(t / (c.scale * std::sqrt(2.0)));
      const double freq =
          static_cast<double>(std::count_if(errs.begin(), errs.end(),
                                            [t](double e) { return e > t; })) /
          draws;
      const double sd = std::sqrt(expected * (1 - expected) / draws);
      EXPECT_NEAR(freq, expected, 3 * sd) << "t=" << t;
    }
  }
}

TEST(MechanismBudgetTest, RefusesAfterKMax) {
  auto m = Make(Config(MechanismKind::kLaplace, 0.1, 3), MakeSample(2, {0, 1}), 0);
  const StatisticalQuery q = MakeQuery({0, 1});
  for (int i = 0; i < 3; ++i) EXPECT_TRUE(m->AnswerStatistical(q).ok());
  EXPECT_EQ(m->AnswerStatistical(q).status().code(),
            absl::StatusCode::kResourceExhausted);
  EXPECT_EQ(m->answered(), 3u);
}

TEST(MechanismDeterminismTest, SameSeedSameAnswers) {
  Rng rng(3);
  const Distribution p = UniformOn(16);
  const Sample x = p.Draw(40, rng);
  std::vector<StatisticalQuery> queries;
  for (int i = 0; i < 50; ++i) queries.push_back(RandomQuery(16, rng));
  MechanismConfig pmw = Config(MechanismKind::kPmw, 0.01, 50);
  pmw.pmw_params = DefaultPmwParams(0.1, 50);
  for (const MechanismConfig& c :
       {Config(MechanismKind::kEmpirical, 0, 50),
        Config(MechanismKind::kLaplace, 0.05, 50),
        Config(MechanismKind::kGaussian, 0.05, 50), pmw}) {
    auto a = Make(c, x, 42);
    auto b = Make(c, x, 42);
    for (const auto& q : queries) {
      EXPECT_EQ(ValueOrDie(a->AnswerStatistical(q)),
                ValueOrDie(b->AnswerStatistical(q)));
    }
  }
}

TEST(TruncationTest, ClampsToIntervalAroundEmpiricalAnswer) {
  const Sample x = MakeSample(2, {0, 1, 1, 1});
  MechanismConfig c = Config(MechanismKind::kLaplace, 50.0, 1000);
  c.truncation = true;
  auto m = Make(c, x, 7);
  const StatisticalQuery q = MakeQuery({0, 1});
  bool clamped = false;
  for (int i = 0; i < 1000; ++i) {
    const double a = ValueOrDie(m->AnswerStatistical(q));
    // Width 2 Delta n = 2 around q(x) = 0.75.
    EXPECT_GE(a, 0.75 - 1.0);
    EXPECT_LE(a, 0.75 + 1.0);
    clamped |= a == 0.75 + 1.0 || a == 0.75 - 1.0;
  }
  EXPECT_TRUE(clamped);
}

TEST(PmwTest, NeverExceedsUpdateBudget) {
  Rng rng(12);
  // A skewed population makes the uniform synthetic distribution wrong.
  const Distribution p = ::asl::testing::WithPmf({0.7, 0.1, 0.1, 0.05, 0.05});
  const Sample x = p.Draw(500, rng);
  MechanismConfig c = Config(MechanismKind::kPmw, 0.001, 400);
  c.pmw_params = DefaultPmwParams(0.1, 3);
  auto m = Make(c, x, 5);
  std::size_t refusals = 0;
  for (int i = 0; i < 400; ++i) {
    const std::vector<double> before(m->pmw_weights().begin(),
                                     m->pmw_weights().end());
    const std::size_t updates = m->pmw_updates();
    const StatisticalQuery q = RandomQuery(5, rng);
    absl::StatusOr<double> a = m->AnswerStatistical(q);
    if (!a.ok()) {
      EXPECT_EQ(a.status().code(), absl::StatusCode::kResourceExhausted);
      ++refusals;
      continue;
    }
    if (m->pmw_updates() == updates) {
      // Between updates the answer is the synthetic answer of the weights.
      double total = 0;
      double weighted = 0;
      for (std::size_t z = 0; z < before.size(); ++z) {
        total += before[z];
        weighted += before[z] * q(z);
      }
      EXPECT_DOUBLE_EQ(*a, weighted / total);
    }
    for (double w : m->pmw_weights()) {
      EXPECT_GT(w, 0);
      EXPECT_TRUE(std::isfinite(w));
    }
  }
  EXPECT_LE(m->pmw_updates(), 3u);
  EXPECT_GT(refusals, 0u);
}

MinimizationQuery TableLoss(std::vector<double> losses, double sensitivity) {
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < losses.size(); ++i) labels.push_back(std::to_string(i));
  return ValueOrDie(MinimizationQuery::Create(
      labels, [losses](const Sample&, std::size_t t) { return losses[t]; },
      sensitivity, *std::max_element(losses.begin(), losses.end())));
}

std::vector<double> DrawFrequencies(ConfiguredMechanism& m,
                                    const MinimizationQuery& l,
                                    std::size_t draws) {
  std::vector<double> freq(l.theta_count(), 0.0);
  for (std::size_t i = 0; i < draws; ++i) {
    freq[ValueOrDie(m.AnswerMinimization(l))] += 1.0 / draws;
  }
  return freq;
}

MechanismConfig ExpMech(double eta, std::size_t k_max) {
  MechanismConfig c = Config(MechanismKind::kExpMechMin, 0, k_max);
  c.expmech_eta = eta;
  return c;
}

TEST(ExpMechTest, SingletonAlwaysChosen) {
  auto m = Make(ExpMech(3.0, 100), MakeSample(2, {0}), 1);
  const MinimizationQuery l = TableLoss({0.4}, 1);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(ValueOrDie(m->AnswerMinimization(l)), 0u);
}

TEST(ExpMechTest, ZeroEtaIsUniform) {
  const std::size_t draws = 10000;
  auto m = Make(ExpMech(0.0, draws), MakeSample(2, {0}), 2);
  const std::vector<double> freq =
      DrawFrequencies(*m, TableLoss({0.0, 1.0, 5.0, 2.0}, 1), draws);
  double chi2 = 0;
  for (double f : freq) chi2 += std::pow(f * draws - draws / 4.0, 2) / (draws / 4.0);
  EXPECT_LT(chi2, 11.345);  // chi-square(3) upper 1% point
}

TEST(ExpMechTest, TwoPointSoftmax) {
  const std::size_t draws = 100000;
  auto m = Make(ExpMech(1.0, draws), MakeSample(2, {0}), 3);
  const std::vector<double> freq =
      DrawFrequencies(*m, TableLoss({0.0, 1.0}, 1), draws);
  EXPECT_NEAR(freq[0], std::exp(1.0) / (1 + std::exp(1.0)), 0.01);
}

TEST(ExpMechTest, MatchesExactSoftmaxInTotalVariation) {
  Rng rng(77);
  const std::size_t draws = 100000;
  for (int trial = 0; trial < 5; ++trial) {
    const std::size_t size = 2 + trial * 2;
    std::vector<double> losses(size);
    for (double& v : losses) v = 3 * Uniform01(rng);
    const double eta = 0.5 + Uniform01(rng);
    // Oracle: direct normalization of exp(-eta L).
    std::vector<double> exact(size);
    double z = 0;
    for (std::size_t i = 0; i < size; ++i) z += exact[i] = std::exp(-eta * losses[i]);
    for (double& e : exact) e /= z;
    auto m = Make(ExpMech(eta, draws), MakeSample(2, {0}), 100 + trial);
    const std::vector<double> freq = DrawFrequencies(*m, TableLoss(losses, 1), draws);
    double tv = 0;
    for (std::size_t i = 0; i < size; ++i) tv += 0.5 * std::abs(freq[i] - exact[i]);
    EXPECT_LE(tv, 0.02);
  }
}

TEST(ExpMechTest, NonFiniteLossIsAnError) {
  auto m = Make(ExpMech(1.0, 10), MakeSample(2, {0}), 0);
  EXPECT_FALSE(m->AnswerMinimization(TableLoss({0.0, INFINITY}, 1)).ok());
}

TEST(ExpMechTest, EmpiricalKindReturnsArgmin) {
  auto m = Make(Config(MechanismKind::kEmpirical, 0, 1), MakeSample(2, {0}), 0);
  EXPECT_EQ(ValueOrDie(m->AnswerMinimization(TableLoss({0.5, 0.1, 0.1}, 1))), 1u);
}

// Bins the outputs of two mechanisms built on neighboring samples and checks
// freq(x) <= e^eps freq(x') + delta (and symmetrically) up to a 4-sigma slack.
void ExpectMaxKlBins(const std::vector<double>& a, const std::vector<double>& b,
                     double eps, double delta, std::size_t draws) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double slack = 4 * (std::sqrt(a[i] / draws) +
                              std::exp(eps) * std::sqrt(b[i] / draws)) +
                         4.0 / draws;
    EXPECT_LE(a[i], std::exp(eps) * b[i] + delta + slack) << "bin " << i;
    EXPECT_LE(b[i], std::exp(eps) * a[i] + delta + slack) << "bin " << i;
  }
}

std::vector<double> BinAnswers(ConfiguredMechanism& m, const StatisticalQuery& q,
                               double center, double half_width,
                               std::size_t draws) {
  // 18 equal bins over [center - w, center + w] plus two tail bins.
  std::vector<double> bins(20, 0.0);
  for (std::size_t i = 0; i < draws; ++i) {
    const double a = ValueOrDie(m.AnswerStatistical(q));
    const double u = (a - (center - half_width)) / (2 * half_width);
    std::size_t bin = 0;
    if (u >= 1) {
      bin = 19;
    } else if (u >= 0) {
      bin = 1 + static_cast<std::size_t>(u * 18);
    }
    bins[bin] += 1.0 / draws;
  }
  return bins;
}

TEST(MaxKlSmokeTest, NoiseMechanismsOnNeighbors) {
  const std::size_t draws = 100000;
  const std::size_t n = 10;
  const Sample x = MakeSample(2, {1, 1, 1, 0, 0, 1, 0, 1, 1, 0});
  const Sample x2 = ValueOrDie(ReplaceElement(x, 3, 1));
  const StatisticalQuery q = MakeQuery({0, 1});
  const double sens = 1.0 / n;

  const double eps0 = 0.5;
  {
    const MechanismConfig c = Config(MechanismKind::kLaplace, sens / eps0, draws);
    const StabilityBudget claim = ClaimedBudget(c, sens, n, 1);
    EXPECT_NEAR(claim.epsilon, eps0, 1e-15);
    auto m = Make(c, x, 1);
    auto m2 = Make(c, x2, 2);
    ExpectMaxKlBins(BinAnswers(*m, q, 0.6, 1.0, draws),
                    BinAnswers(*m2, q, 0.6, 1.0, draws), claim.epsilon,
                    claim.delta, draws);
  }
  {
    const double delta0 = 1e-3;
    const double sigma = sens * std::sqrt(2 * std::log(1.25 / delta0)) / eps0;
    const MechanismConfig c = Config(MechanismKind::kGaussian, sigma, draws);
    ClaimOptions options;
    options.gaussian_delta0 = delta0;
    const StabilityBudget claim = ClaimedBudget(c, sens, n, 1, options);
    EXPECT_NEAR(claim.epsilon, eps0, 1e-12);
    EXPECT_EQ(claim.delta, delta0);
    auto m = Make(c, x, 3);
    auto m2 = Make(c, x2, 4);
    ExpectMaxKlBins(BinAnswers(*m, q, 0.6, 1.0, draws),
                    BinAnswers(*m2, q, 0.6, 1.0, draws), claim.epsilon,
                    claim.delta, draws);
  }
  {
    // L(x; theta) = |mean(x) - theta / 4|, sensitivity 1/n.
    std::vector<std::string> labels = {"0", "1", "2", "3", "4"};
    const MinimizationQuery l = ValueOrDie(MinimizationQuery::Create(
        labels,
        [](const Sample& s, std::size_t t) {
          return std::abs(ValueOrDie(EvalSample(MakeQuery({0, 1}), s)) -
                          static_cast<double>(t) / 4);
        },
        sens, 1.0));
    const double eta = eps0 / (2 * sens);
    const MechanismConfig c = ExpMech(eta, draws);
    const StabilityBudget claim = ClaimedBudget(c, sens, n, 1);
    EXPECT_NEAR(claim.epsilon, eps0, 1e-15);
    auto m = Make(c, x, 5);
    auto m2 = Make(c, x2, 6);
    ExpectMaxKlBins(DrawFrequencies(*m, l, draws), DrawFrequencies(*m2, l, draws),
                    claim.epsilon, claim.delta, draws);
  }
}

TEST(ClaimedBudgetTest, Examples) {
  const double sens = 0.01;
  EXPECT_EQ(ClaimedBudget(Config(MechanismKind::kEmpirical, 0, 1), sens, 100, 1),
            StabilityBudget::None());
  EXPECT_EQ(ClaimedBudget(Config(MechanismKind::kLaplace, 0, 1), sens, 100, 1),
            StabilityBudget::None());
  const StabilityBudget one =
      ClaimedBudget(Config(MechanismKind::kLaplace, sens / 0.1, 1), sens, 100, 1);
  EXPECT_NEAR(one.epsilon, 0.1, 1e-15);
  EXPECT_EQ(one.delta, 0.0);
  const StabilityBudget four =
      ClaimedBudget(Config(MechanismKind::kLaplace, sens / 0.1, 4), sens, 100, 4);
  EXPECT_NEAR(four.epsilon, 0.1 * std::sqrt(4 * std::log(1e6)) + 2 * 0.01 * 4,
              1e-12);
  EXPECT_NEAR(four.delta, 1e-6, 1e-18);
}

TEST(MechanismConfigTest, JsonRoundTrip) {
  MechanismConfig c = Config(MechanismKind::kPmw, 0.02, 30);
  c.pmw_params = DefaultPmwParams(0.2, 7);
  c.truncation = true;
  const MechanismConfig back = ValueOrDie(MechanismConfigFromJson(ToJson(c)));
  EXPECT_EQ(back.kind, MechanismKind::kPmw);
  EXPECT_EQ(back.noise_scale, 0.02);
  EXPECT_EQ(back.k_max, 30u);
  EXPECT_TRUE(back.truncation);
  EXPECT_DOUBLE_EQ(back.pmw_params.threshold, 0.1);
  EXPECT_DOUBLE_EQ(back.pmw_params.update_rate, 0.05);
  EXPECT_EQ(back.pmw_params.failure_budget, 7u);
  EXPECT_FALSE(MechanismConfigFromJson({{"kind", "median"}}).ok());
  EXPECT_FALSE(MechanismConfigFromJson({{"kind", "laplace"}, {"noise_scale", -1}}).ok());
  EXPECT_FALSE(MechanismConfigFromJson({{"kind", "laplace"}, {"k_max", 0}}).ok());
}

TEST(LowSensitivityAnswerTest, EmpiricalAnswersAndPmwRejects) {
  const auto q = ValueOrDie(LowSensitivityQuery::Create(
      [](const Sample& x) { return static_cast<double>(x[0]); }, 1.0));
  auto emp = Make(Config(MechanismKind::kEmpirical, 0, 2), MakeSample(3, {2, 0}), 0);
  EXPECT_EQ(ValueOrDie(emp->AnswerLowSensitivity(q)), 2.0);
  EXPECT_EQ(ValueOrDie(emp->AnswerLowSensitivity(q.Negated())), -2.0);
  MechanismConfig pmw_config = Config(MechanismKind::kPmw, 0.1, 2);
  pmw_config.pmw_params = DefaultPmwParams(0.1, 2);
  auto pmw = Make(pmw_config, MakeSample(3, {2, 0}), 0);
  EXPECT_EQ(pmw->AnswerLowSensitivity(q).status().code(),
            absl::StatusCode::kUnimplemented);
}

}  // namespace
}  // namespace asl
