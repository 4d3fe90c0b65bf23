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

#include "asl/harness/selectors.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "absl/status/status.h"
#include "absl/strings/str_format.h"
#include "asl/analysts/analyst.h"
#include "asl/mechanisms/mechanism.h"
#include "asl/status_macros.h"

namespace asl {
namespace {

absl::Status CheckSamples(const QueryMenu& menu, std::span<const Sample> xs) {
  if (menu.size() == 0) return absl::InvalidArgumentError("empty query menu");
  if (xs.empty()) return absl::InvalidArgumentError("no samples to select from");
  return absl::OkStatus();
}

}  // namespace

absl::StatusOr<QueryMenu> QueryMenu::FromStatistical(
    std::vector<StatisticalQuery> queries, const Distribution& p,
    std::size_t n) {
  if (n == 0) return absl::InvalidArgumentError("sample size must be >= 1");
  std::vector<LowSensitivityQuery> lifted;
  std::vector<Estimate> population;
  for (StatisticalQuery& q : queries) {
    ASSIGN_OR_RETURN(const double value, EvalPopulation(q, p));
    population.push_back({value, 0.0});
    lifted.push_back(LowSensitivityQuery::Lift(std::move(q), n));
  }
  return QueryMenu(std::move(lifted), std::move(population), n);
}

absl::StatusOr<QueryMenu> QueryMenu::FromLowSensitivity(
    std::vector<LowSensitivityQuery> queries, const Distribution& p,
    std::size_t n, std::size_t population_trials, uint64_t seed) {
  if (n == 0) return absl::InvalidArgumentError("sample size must be >= 1");
  std::vector<Estimate> population;
  for (std::size_t i = 0; i < queries.size(); ++i) {
    ASSIGN_OR_RETURN(Estimate e,
                     EstimatePopulation(queries[i], p, n, population_trials,
                                        DeriveSeed(seed, i)));
    population.push_back(e);
  }
  return QueryMenu(std::move(queries), std::move(population), n);
}

double QueryMenu::max_population_ci() const {
  double worst = 0;
  for (const Estimate& e : population_) worst = std::max(worst, e.ci_halfwidth);
  return worst;
}

double QueryMenu::sensitivity() const {
  double worst = 0;
  for (const auto& q : queries_) worst = std::max(worst, q.sensitivity());
  return worst;
}

bool QueryMenu::all_statistical() const {
  return std::all_of(queries_.begin(), queries_.end(),
                     [](const auto& q) { return q.lifted() != nullptr; });
}

absl::StatusOr<double> QueryMenu::Evaluate(std::size_t i,
                                           const Sample& x) const {
  if (i >= queries_.size()) {
    return absl::OutOfRangeError(absl::StrFormat("menu index %d", i));
  }
  return queries_[i].Evaluate(x);
}

std::vector<StatisticalQuery> RandomBinaryMenu(std::size_t universe_size,
                                               std::size_t count,
                                               uint64_t seed) {
  Rng rng(seed);
  std::vector<StatisticalQuery> menu;
  menu.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    menu.push_back(RandomBinaryQuery(universe_size, rng));
  }
  return menu;
}

LowSensitivityQuery MaxOfTwoQuery(StatisticalQuery a, StatisticalQuery b,
                                  std::size_t n) {
  auto evaluator = [a = std::move(a), b = std::move(b)](const Sample& x) {
    absl::StatusOr<double> va = EvalSample(a, x);
    absl::StatusOr<double> vb = EvalSample(b, x);
    if (!va.ok() || !vb.ok()) return std::numeric_limits<double>::quiet_NaN();
    return std::max(*va, *vb);
  };
  return *LowSensitivityQuery::Create(std::move(evaluator),
                                      1.0 / static_cast<double>(n));
}

absl::StatusOr<Selection> ConstantSelector::Select(const QueryMenu& menu,
                                                   std::span<const Sample> xs,
                                                   Rng&) const {
  RETURN_IF_ERROR(CheckSamples(menu, xs));
  if (choice_.query_index >= menu.size() || choice_.sample_index >= xs.size()) {
    return absl::OutOfRangeError("constant selection outside the menu");
  }
  return choice_;
}

ExpMechSelector ExpMechSelector::ForEpsilon(double epsilon,
                                            const QueryMenu& menu) {
  const double delta = menu.sensitivity();
  return ExpMechSelector(delta > 0 ? epsilon / (2 * delta) : 0.0);
}

absl::StatusOr<Selection> ExpMechSelector::Select(const QueryMenu& menu,
                                                  std::span<const Sample> xs,
                                                  Rng& rng) const {
  RETURN_IF_ERROR(CheckSamples(menu, xs));
  const std::size_t m = menu.size();
  std::vector<double> losses;
  losses.reserve(m * xs.size());
  for (const Sample& x : xs) {
    for (std::size_t j = 0; j < m; ++j) {
      ASSIGN_OR_RETURN(const double score, menu.Evaluate(j, x));
      losses.push_back(-score);
    }
  }
  const std::vector<double> probs = ExpMechProbabilities(losses, eta_);
  const double u = Uniform01(rng);
  double cumulative = 0;
  std::size_t pick = probs.size() - 1;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    cumulative += probs[i];
    if (u < cumulative) {
      pick = i;
      break;
    }
  }
  return Selection{pick % m, pick / m};
}

StabilityBudget ExpMechSelector::Budget(const QueryMenu& menu) const {
  return {2 * eta_ * menu.sensitivity(), 0};
}

double ExpMechSelector::TvParameter(const QueryMenu& menu) const {
  // Pure eps-stability bounds the TV distance by tanh(eps / 2).
  return std::tanh(Budget(menu).epsilon / 2);
}

absl::StatusOr<Selection> RandomizedResponseSelector::Select(
    const QueryMenu& menu, std::span<const Sample> xs, Rng& rng) const {
  RETURN_IF_ERROR(CheckSamples(menu, xs));
  if (menu.size() != 2) {
    return absl::InvalidArgumentError(
        "randomized response needs a 2-query menu");
  }
  ASSIGN_OR_RETURN(const double v0, menu.Evaluate(0, xs[0]));
  ASSIGN_OR_RETURN(const double v1, menu.Evaluate(1, xs[0]));
  const std::size_t preferred = v1 > v0 ? 1 : 0;
  const double keep = 1.0 / (1.0 + std::exp(-epsilon_));
  const std::size_t pick = Uniform01(rng) < keep ? preferred : 1 - preferred;
  return Selection{pick, 0};
}

double RandomizedResponseSelector::TvParameter(const QueryMenu&) const {
  return std::tanh(epsilon_ / 2);
}

absl::StatusOr<Selection> ArgmaxSelector::Select(const QueryMenu& menu,
                                                 std::span<const Sample> xs,
                                                 Rng&) const {
  RETURN_IF_ERROR(CheckSamples(menu, xs));
  Selection best;
  double best_value = -std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t < xs.size(); ++t) {
    for (std::size_t j = 0; j < menu.size(); ++j) {
      ASSIGN_OR_RETURN(const double v, menu.Evaluate(j, xs[t]));
      if (v > best_value) {
        best_value = v;
        best = {j, t};
      }
    }
  }
  return best;
}

absl::StatusOr<std::unique_ptr<Selector>> SelectorFromJson(
    const nlohmann::json& doc, const QueryMenu& menu) {
  if (!doc.is_object() || !doc.contains("kind") || !doc["kind"].is_string()) {
    return absl::InvalidArgumentError("selector needs a string 'kind'");
  }
  const std::string kind = doc["kind"].get<std::string>();
  auto number = [&](const char* key) -> absl::StatusOr<double> {
    if (!doc.contains(key) || !doc[key].is_number()) {
      return absl::InvalidArgumentError(
          absl::StrFormat("selector '%s' needs a numeric '%s'", kind, key));
    }
    const double v = doc[key].get<double>();
    if (!(v >= 0) || !std::isfinite(v)) {
      return absl::InvalidArgumentError(
          absl::StrFormat("selector '%s': '%s' must be finite and >= 0", kind,
                          key));
    }
    return v;
  };
  if (kind == "constant") {
    Selection choice{doc.value("query", std::size_t{0}),
                     doc.value("sample", std::size_t{0})};
    return std::make_unique<ConstantSelector>(choice);
  }
  if (kind == "expmech") {
    if (doc.contains("eta")) {
      ASSIGN_OR_RETURN(const double eta, number("eta"));
      return std::make_unique<ExpMechSelector>(eta);
    }
    ASSIGN_OR_RETURN(const double epsilon, number("epsilon"));
    return std::make_unique<ExpMechSelector>(
        ExpMechSelector::ForEpsilon(epsilon, menu));
  }
  if (kind == "randomized_response") {
    ASSIGN_OR_RETURN(const double epsilon, number("epsilon"));
    return std::make_unique<RandomizedResponseSelector>(epsilon);
  }
  if (kind == "argmax") return std::make_unique<ArgmaxSelector>();
  return absl::InvalidArgumentError(
      absl::StrFormat("unknown selector kind '%s'", kind));
}

}  // namespace asl
