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

#ifndef ASL_ANALYSTS_ANALYST_H_
#define ASL_ANALYSTS_ANALYST_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "absl/status/statusor.h"
#include "asl/core/queries.h"
#include "asl/core/universe.h"
#include "asl/random.h"
#include "nlohmann/json.hpp"

namespace asl {

// A stateful data analyst A. It issues statistical queries and observes
// answers. In the population game it never sees the sample; only the sample
// game calls ObserveSample.
class Analyst {
 public:
  virtual ~Analyst() = default;

  // The query for `round` (0-based). Fails with kFailedPrecondition once all
  // rounds have been played.
  virtual absl::StatusOr<StatisticalQuery> NextQuery(std::size_t round) = 0;
  virtual void Observe(double answer) = 0;
  virtual void ObserveSample(const Sample&) {}

  // Total number of rounds this analyst plays.
  virtual std::size_t rounds() const = 0;
  virtual std::string tag() const = 0;
};

using AnalystFactory = std::function<std::unique_ptr<Analyst>(uint64_t seed)>;

enum class AnalystKind { kRandomNonadaptive, kOverfitAttack };

std::string_view AnalystKindName(AnalystKind kind);
absl::StatusOr<AnalystKind> ParseAnalystKind(std::string_view name);

struct AttackParams {
  std::size_t k_probe = 0;
  double selection_fraction = 0.5;
};

nlohmann::json ToJson(const AttackParams& params);
absl::StatusOr<AttackParams> AttackParamsFromJson(const nlohmann::json& doc);

using QueryHistory = std::vector<std::pair<StatisticalQuery, double>>;

// Issues `rounds` independent queries with table entries iid uniform on
// {0, 1}. Ignores answers.
class RandomNonadaptiveAnalyst final : public Analyst {
 public:
  RandomNonadaptiveAnalyst(std::size_t universe_size, std::size_t rounds,
                           uint64_t seed);

  absl::StatusOr<StatisticalQuery> NextQuery(std::size_t round) override;
  void Observe(double answer) override { history_answers_.push_back(answer); }
  std::size_t rounds() const override { return rounds_; }
  std::string tag() const override { return "random_nonadaptive"; }

 private:
  std::size_t universe_size_;
  std::size_t rounds_;
  Rng rng_;
  std::vector<double> history_answers_;
};

// The correlation attack. Rounds 0..k_probe-1 are random {0,1} probes. The
// final round scores each element by
//   s(z) = sum_j (a_j - q_j(P)) * (q_j(z) - 1/2)
// and asks the indicator of the ceil(selection_fraction * |X|) highest-scoring
// elements (ties to the lower index). The analyst knows P because it chose P.
class OverfitAttackAnalyst final : public Analyst {
 public:
  static absl::StatusOr<std::unique_ptr<OverfitAttackAnalyst>> Create(
      Distribution population, AttackParams params, uint64_t seed);

  absl::StatusOr<StatisticalQuery> NextQuery(std::size_t round) override;
  void Observe(double answer) override;
  std::size_t rounds() const override { return params_.k_probe + 1; }
  std::string tag() const override { return "overfit_attack"; }

  const QueryHistory& history() const { return history_; }

 private:
  OverfitAttackAnalyst(Distribution population, AttackParams params,
                       uint64_t seed)
      : population_(std::move(population)), params_(params), rng_(seed) {}

  Distribution population_;
  AttackParams params_;
  Rng rng_;
  QueryHistory history_;
  std::vector<StatisticalQuery> pending_;
};

// The attack's per-element scores over a nonempty probe history.
absl::StatusOr<std::vector<double>> AttackScoreTable(const QueryHistory& history,
                                                     const Distribution& p);

// Indicator of the top ceil(fraction * |X|) elements by score, ties broken
// by lower index.
absl::StatusOr<StatisticalQuery> TopFractionQuery(std::span<const double> scores,
                                                  double fraction);

// A uniformly random {0,1}-valued statistical query.
StatisticalQuery RandomBinaryQuery(std::size_t universe_size, Rng& rng);

// Builds fresh analysts for repeated games (e.g. inside the monitor).
absl::StatusOr<AnalystFactory> MakeAnalystFactory(AnalystKind kind,
                                                  const Distribution& population,
                                                  std::size_t rounds,
                                                  const AttackParams& params);

}  // namespace asl

#endif  // ASL_ANALYSTS_ANALYST_H_
