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

#include "asl/harness/games.h"

#include <cmath>
#include <utility>

#include "absl/status/status.h"
#include "absl/strings/str_format.h"
#include "asl/random.h"
#include "asl/status_macros.h"

namespace asl {
namespace {

// Plays up to k rounds. Population errors are computed only when `p` is set.
absl::StatusOr<GameResult> PlayRounds(const Sample& x, const Distribution* p,
                                      std::size_t k,
                                      const MechanismFactory& factory,
                                      Analyst& analyst, uint64_t seed) {
  if (k == 0) return absl::InvalidArgumentError("a game needs k >= 1 rounds");
  ASSIGN_OR_RETURN(std::unique_ptr<Mechanism> mechanism,
                   factory(x, DeriveSeed(seed, kMechanismStream)));
  GameResult result;
  result.seed = seed;
  result.transcript.seed = seed;
  result.transcript.mechanism_tag = mechanism->tag();
  result.transcript.analyst_tag = analyst.tag();
  for (std::size_t j = 0; j < k; ++j) {
    ASSIGN_OR_RETURN(StatisticalQuery q, analyst.NextQuery(j));
    absl::StatusOr<double> answer = mechanism->AnswerStatistical(q);
    if (answer.status().code() == absl::StatusCode::kResourceExhausted) {
      result.refused = true;
      break;
    }
    RETURN_IF_ERROR(answer.status());
    analyst.Observe(*answer);

    ASSIGN_OR_RETURN(const double err_x, SampleError(q, *answer, x));
    result.sample_errs.push_back(err_x);
    result.max_sample_err = std::max(result.max_sample_err, std::abs(err_x));
    if (p != nullptr) {
      ASSIGN_OR_RETURN(const double err_p, PopulationError(q, *answer, *p));
      result.pop_errs.push_back(err_p);
      result.max_pop_err = std::max(result.max_pop_err, std::abs(err_p));
    }
    result.transcript.records.push_back({std::move(q), *answer});
  }
  result.sample = x;
  return result;
}

}  // namespace

absl::StatusOr<GameResult> RunAccuracyGame(const Distribution& p, std::size_t n,
                                           std::size_t k,
                                           const MechanismFactory& mechanism,
                                           Analyst& analyst, uint64_t seed) {
  if (n == 0) return absl::InvalidArgumentError("sample size must be >= 1");
  Rng sample_rng(DeriveSeed(seed, kSampleStream));
  const Sample x = p.Draw(n, sample_rng);
  return PlayRounds(x, &p, k, mechanism, analyst, seed);
}

absl::StatusOr<GameResult> RunSampleAccuracyGame(
    const Sample& x, std::size_t k, const MechanismFactory& mechanism,
    Analyst& analyst, uint64_t seed) {
  analyst.ObserveSample(x);
  return PlayRounds(x, nullptr, k, mechanism, analyst, seed);
}

absl::StatusOr<MonitorOutput> RunMonitor(const Distribution& p, std::size_t n,
                                         std::size_t T, std::size_t k,
                                         const MechanismFactory& mechanism,
                                         const AnalystFactory& analyst,
                                         uint64_t seed) {
  if (T == 0) return absl::InvalidArgumentError("monitor needs T >= 1");
  std::optional<GameResult> best_game;
  std::size_t best_t = 0;
  std::size_t best_j = 0;
  double best = -1;
  for (std::size_t t = 0; t < T; ++t) {
    const uint64_t game_seed = DeriveSeed(seed, t);
    std::unique_ptr<Analyst> a = analyst(DeriveSeed(game_seed, kAnalystStream));
    ASSIGN_OR_RETURN(GameResult game,
                     RunAccuracyGame(p, n, k, mechanism, *a, game_seed));
    bool improved = false;
    for (std::size_t j = 0; j < game.pop_errs.size(); ++j) {
      if (std::abs(game.pop_errs[j]) > best) {
        best = std::abs(game.pop_errs[j]);
        best_t = t;
        best_j = j;
        improved = true;
      }
    }
    if (improved) best_game = std::move(game);
  }
  if (!best_game.has_value()) {
    return absl::FailedPreconditionError(
        "monitor: every game was refused before its first answer");
  }

  const TranscriptRecord& record = best_game->transcript.records[best_j];
  const auto& sq = std::get<StatisticalQuery>(record.query);
  const double a = std::get<double>(record.answer);
  ASSIGN_OR_RETURN(const double q_p, EvalPopulation(sq, p));
  ASSIGN_OR_RETURN(const double q_x, EvalSample(sq, *best_game->sample));
  const bool negate = a - q_p < 0;
  LowSensitivityQuery lifted = LowSensitivityQuery::Lift(sq, n);
  MonitorOutput out{negate ? lifted.Negated() : lifted};
  out.tstar = best_t;
  out.jstar = best_j;
  out.answer = negate ? -a : a;
  out.selected_pop_err = std::abs(a - q_p);
  out.qstar_pop_minus_sample = negate ? -(q_p - q_x) : q_p - q_x;
  out.games = T;
  return out;
}

FlakyMechanism::FlakyMechanism(Sample sample, double beta, double offset,
                               uint64_t seed)
    : sample_(std::move(sample)), offset_(offset) {
  Rng rng(seed);
  failing_ = Uniform01(rng) < beta;
}

absl::StatusOr<double> FlakyMechanism::AnswerStatistical(
    const StatisticalQuery& q) {
  ASSIGN_OR_RETURN(const double exact, EvalSample(q, sample_));
  ++answered_;
  return failing_ ? exact + offset_ : exact;
}

MechanismFactory MakeFlakyFactory(double beta, double offset) {
  return [beta, offset](Sample x, uint64_t seed)
             -> absl::StatusOr<std::unique_ptr<Mechanism>> {
    return std::make_unique<FlakyMechanism>(std::move(x), beta, offset, seed);
  };
}

}  // namespace asl
