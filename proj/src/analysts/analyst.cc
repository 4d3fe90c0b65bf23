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

#include "asl/analysts/analyst.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "absl/status/status.h"
#include "absl/strings/str_format.h"
#include "asl/status_macros.h"

namespace asl {
namespace {

absl::Status ProtocolError(std::size_t round, std::size_t rounds) {
  return absl::FailedPreconditionError(absl::StrFormat(
      "analyst asked for round %d but plays only %d rounds", round, rounds));
}

}  // namespace

std::string_view AnalystKindName(AnalystKind kind) {
  return kind == AnalystKind::kOverfitAttack ? "overfit_attack"
                                             : "random_nonadaptive";
}

absl::StatusOr<AnalystKind> ParseAnalystKind(std::string_view name) {
  if (name == "random_nonadaptive") return AnalystKind::kRandomNonadaptive;
  if (name == "overfit_attack") return AnalystKind::kOverfitAttack;
  return absl::InvalidArgumentError(
      absl::StrFormat("unknown analyst kind '%s'", std::string(name)));
}

nlohmann::json ToJson(const AttackParams& params) {
  return {{"k_probe", params.k_probe},
          {"selection_fraction", params.selection_fraction}};
}

absl::StatusOr<AttackParams> AttackParamsFromJson(const nlohmann::json& doc) {
  AttackParams params;
  if (!doc.is_object()) {
    return absl::InvalidArgumentError("attack_params must be an object");
  }
  try {
    if (doc.contains("k_probe")) params.k_probe = doc["k_probe"].get<std::size_t>();
    if (doc.contains("selection_fraction")) {
      params.selection_fraction = doc["selection_fraction"].get<double>();
    }
  } catch (const nlohmann::json::exception& e) {
    return absl::InvalidArgumentError(
        absl::StrFormat("attack_params: %s", e.what()));
  }
  if (!(params.selection_fraction > 0 && params.selection_fraction <= 1)) {
    return absl::InvalidArgumentError("selection_fraction must lie in (0, 1]");
  }
  return params;
}

StatisticalQuery RandomBinaryQuery(std::size_t universe_size, Rng& rng) {
  std::vector<double> table(universe_size);
  // One engine draw yields 64 fair bits.
  uint64_t bits = 0;
  for (std::size_t z = 0; z < universe_size; ++z) {
    if (z % 64 == 0) bits = rng();
    table[z] = static_cast<double>(bits & 1u);
    bits >>= 1;
  }
  return *StatisticalQuery::Create(std::move(table));
}

RandomNonadaptiveAnalyst::RandomNonadaptiveAnalyst(std::size_t universe_size,
                                                   std::size_t rounds,
                                                   uint64_t seed)
    : universe_size_(universe_size), rounds_(rounds), rng_(seed) {}

absl::StatusOr<StatisticalQuery> RandomNonadaptiveAnalyst::NextQuery(
    std::size_t round) {
  if (round >= rounds_) return ProtocolError(round, rounds_);
  return RandomBinaryQuery(universe_size_, rng_);
}

absl::StatusOr<std::unique_ptr<OverfitAttackAnalyst>>
OverfitAttackAnalyst::Create(Distribution population, AttackParams params,
                             uint64_t seed) {
  if (!(params.selection_fraction > 0 && params.selection_fraction <= 1)) {
    return absl::InvalidArgumentError("selection_fraction must lie in (0, 1]");
  }
  return std::unique_ptr<OverfitAttackAnalyst>(
      new OverfitAttackAnalyst(std::move(population), params, seed));
}

absl::StatusOr<StatisticalQuery> OverfitAttackAnalyst::NextQuery(
    std::size_t round) {
  if (round >= rounds()) return ProtocolError(round, rounds());
  if (round < params_.k_probe) {
    pending_.push_back(RandomBinaryQuery(population_.size(), rng_));
    return pending_.back();
  }
  std::vector<double> scores(population_.size(), 0.0);
  if (!history_.empty()) {
    ASSIGN_OR_RETURN(scores, AttackScoreTable(history_, population_));
  }
  return TopFractionQuery(scores, params_.selection_fraction);
}

void OverfitAttackAnalyst::Observe(double answer) {
  if (pending_.empty()) return;  // the final query's answer is not needed
  history_.emplace_back(std::move(pending_.front()), answer);
  pending_.erase(pending_.begin());
}

absl::StatusOr<std::vector<double>> AttackScoreTable(const QueryHistory& history,
                                                     const Distribution& p) {
  if (history.empty()) {
    return absl::InvalidArgumentError("attack scores need a nonempty history");
  }
  std::vector<double> scores(p.size(), 0.0);
  for (const auto& [q, answer] : history) {
    ASSIGN_OR_RETURN(const double population_value, EvalPopulation(q, p));
    const double residual = answer - population_value;
    const auto table = q.table();
    for (std::size_t z = 0; z < scores.size(); ++z) {
      scores[z] += residual * (table[z] - 0.5);
    }
  }
  return scores;
}

absl::StatusOr<StatisticalQuery> TopFractionQuery(std::span<const double> scores,
                                                  double fraction) {
  if (scores.empty()) return absl::InvalidArgumentError("no scores");
  if (!(fraction > 0 && fraction <= 1)) {
    return absl::InvalidArgumentError("fraction must lie in (0, 1]");
  }
  const std::size_t size = scores.size();
  const auto selected = std::min<std::size_t>(
      size, static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(size))));
  std::vector<Element> order(size);
  std::iota(order.begin(), order.end(), Element{0});
  std::stable_sort(order.begin(), order.end(), [&](Element a, Element b) {
    return scores[a] > scores[b];
  });
  std::vector<double> table(size, 0.0);
  for (std::size_t r = 0; r < selected; ++r) table[order[r]] = 1.0;
  return StatisticalQuery::Create(std::move(table));
}

absl::StatusOr<AnalystFactory> MakeAnalystFactory(AnalystKind kind,
                                                  const Distribution& population,
                                                  std::size_t rounds,
                                                  const AttackParams& params) {
  if (kind == AnalystKind::kRandomNonadaptive) {
    const std::size_t size = population.size();
    return AnalystFactory([size, rounds](uint64_t seed) {
      return std::make_unique<RandomNonadaptiveAnalyst>(size, rounds, seed);
    });
  }
  if (!(params.selection_fraction > 0 && params.selection_fraction <= 1)) {
    return absl::InvalidArgumentError("selection_fraction must lie in (0, 1]");
  }
  return AnalystFactory([population, params](uint64_t seed) {
    return std::unique_ptr<Analyst>(
        std::move(*OverfitAttackAnalyst::Create(population, params, seed)));
  });
}

}  // namespace asl
