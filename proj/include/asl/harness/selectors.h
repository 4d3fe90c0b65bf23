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

#ifndef ASL_HARNESS_SELECTORS_H_
#define ASL_HARNESS_SELECTORS_H_

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "asl/core/queries.h"
#include "asl/core/universe.h"
#include "asl/random.h"
#include "asl/stability/budget.h"
#include "nlohmann/json.hpp"

namespace asl {

// A fixed, finite menu of Delta-sensitive queries on samples of size n,
// together with their population values.
class QueryMenu {
 public:
  // Statistical queries, lifted to 1/n-sensitive queries. Population values
  // are exact.
  static absl::StatusOr<QueryMenu> FromStatistical(
      std::vector<StatisticalQuery> queries, const Distribution& p,
      std::size_t n);
  // General queries. Population values are Monte Carlo estimates over
  // `population_trials` fresh samples each.
  static absl::StatusOr<QueryMenu> FromLowSensitivity(
      std::vector<LowSensitivityQuery> queries, const Distribution& p,
      std::size_t n, std::size_t population_trials, uint64_t seed);

  std::size_t size() const { return queries_.size(); }
  std::size_t n() const { return n_; }
  const LowSensitivityQuery& query(std::size_t i) const { return queries_[i]; }
  double population(std::size_t i) const { return population_[i].value; }
  // Largest population CI half-width (0 when every value is exact).
  double max_population_ci() const;
  // Largest declared sensitivity in the menu.
  double sensitivity() const;
  bool all_statistical() const;

  absl::StatusOr<double> Evaluate(std::size_t i, const Sample& x) const;

 private:
  QueryMenu(std::vector<LowSensitivityQuery> queries,
            std::vector<Estimate> population, std::size_t n)
      : queries_(std::move(queries)),
        population_(std::move(population)),
        n_(n) {}

  std::vector<LowSensitivityQuery> queries_;
  std::vector<Estimate> population_;
  std::size_t n_;
};

// `count` random {0,1}-valued statistical queries drawn from `seed`.
std::vector<StatisticalQuery> RandomBinaryMenu(std::size_t universe_size,
                                               std::size_t count,
                                               uint64_t seed);

// max(a(x), b(x)): a 1/n-sensitive query on samples of size n that is not a
// statistical query.
LowSensitivityQuery MaxOfTwoQuery(StatisticalQuery a, StatisticalQuery b,
                                  std::size_t n);

// A choice of menu query and sample index.
struct Selection {
  std::size_t query_index = 0;
  std::size_t sample_index = 0;
};

// A randomized procedure W that looks at samples x_1..x_T and picks a
// (query, sample) pair.
class Selector {
 public:
  virtual ~Selector() = default;
  virtual absl::StatusOr<Selection> Select(const QueryMenu& menu,
                                           std::span<const Sample> xs,
                                           Rng& rng) const = 0;
  // The max-KL stability of the selection with respect to changing one
  // element of one sample.
  virtual StabilityBudget Budget(const QueryMenu& menu) const = 0;
  // The TV stability parameter of the selection on a single sample.
  virtual double TvParameter(const QueryMenu& menu) const = 0;
  virtual std::string tag() const = 0;
};

// Ignores the data.
class ConstantSelector final : public Selector {
 public:
  explicit ConstantSelector(Selection choice) : choice_(choice) {}
  absl::StatusOr<Selection> Select(const QueryMenu& menu,
                                   std::span<const Sample> xs,
                                   Rng& rng) const override;
  StabilityBudget Budget(const QueryMenu&) const override { return {0, 0}; }
  double TvParameter(const QueryMenu&) const override { return 0; }
  std::string tag() const override { return "constant"; }

 private:
  Selection choice_;
};

// Samples (j, t) with probability proportional to exp(eta * q_j(x_t)).
// (2 eta Delta, 0)-stable.
class ExpMechSelector final : public Selector {
 public:
  explicit ExpMechSelector(double eta) : eta_(eta) {}
  // The eta giving (epsilon, 0) stability on this menu.
  static ExpMechSelector ForEpsilon(double epsilon, const QueryMenu& menu);

  absl::StatusOr<Selection> Select(const QueryMenu& menu,
                                   std::span<const Sample> xs,
                                   Rng& rng) const override;
  StabilityBudget Budget(const QueryMenu& menu) const override;
  double TvParameter(const QueryMenu& menu) const override;
  std::string tag() const override { return "expmech"; }
  double eta() const { return eta_; }

 private:
  double eta_;
};

// Randomized response over a 2-query menu on x_1: keeps the query with the
// larger empirical value with probability e^eps / (1 + e^eps) and otherwise
// reports the other one. (eps, 0)-stable, and tanh(eps / 2)-TV stable.
class RandomizedResponseSelector final : public Selector {
 public:
  explicit RandomizedResponseSelector(double epsilon) : epsilon_(epsilon) {}
  absl::StatusOr<Selection> Select(const QueryMenu& menu,
                                   std::span<const Sample> xs,
                                   Rng& rng) const override;
  StabilityBudget Budget(const QueryMenu&) const override {
    return {epsilon_, 0};
  }
  double TvParameter(const QueryMenu&) const override;
  std::string tag() const override { return "randomized_response"; }

 private:
  double epsilon_;
};

// The exact argmax of q_j(x_t), ties to the lowest (t, j). Not stable.
class ArgmaxSelector final : public Selector {
 public:
  absl::StatusOr<Selection> Select(const QueryMenu& menu,
                                   std::span<const Sample> xs,
                                   Rng& rng) const override;
  StabilityBudget Budget(const QueryMenu&) const override {
    return StabilityBudget::None();
  }
  double TvParameter(const QueryMenu&) const override { return 1; }
  std::string tag() const override { return "argmax"; }
};

// Parses {"kind": "constant" | "expmech" | "randomized_response" | "argmax",
// ...}. expmech takes "epsilon" (converted with ForEpsilon) or "eta";
// randomized_response takes "epsilon"; constant takes optional "query" and
// "sample" indices.
absl::StatusOr<std::unique_ptr<Selector>> SelectorFromJson(
    const nlohmann::json& doc, const QueryMenu& menu);

}  // namespace asl

#endif  // ASL_HARNESS_SELECTORS_H_
