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

#ifndef ASL_HARNESS_GAMES_H_
#define ASL_HARNESS_GAMES_H_

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "asl/analysts/analyst.h"
#include "asl/core/queries.h"
#include "asl/core/transcript.h"
#include "asl/core/universe.h"
#include "asl/mechanisms/mechanism.h"

namespace asl {

// One run of the accuracy game (or the sample accuracy game). Errors are
// signed per round; the max fields hold the largest magnitudes.
struct GameResult {
  Transcript transcript;
  std::vector<double> sample_errs;
  std::vector<double> pop_errs;  // empty for the sample accuracy game
  double max_sample_err = 0;
  double max_pop_err = 0;
  bool refused = false;
  uint64_t seed = 0;
  // The sample the mechanism was built on. Kept for post-hoc diagnostics; the
  // analyst never receives it in the population game.
  std::optional<Sample> sample;
};

// The accuracy game: x <- P^n is drawn from DeriveSeed(seed, kSampleStream),
// the mechanism is built on x with DeriveSeed(seed, kMechanismStream), and
// the analyst and mechanism exchange k rounds. The mechanism never sees P and
// the analyst never sees x. A mechanism refusal ends the game early with
// `refused` set; any other error is returned.
absl::StatusOr<GameResult> RunAccuracyGame(const Distribution& p, std::size_t n,
                                           std::size_t k,
                                           const MechanismFactory& mechanism,
                                           Analyst& analyst, uint64_t seed);

// The sample accuracy game: the analyst supplies x (and is shown it). Only
// sample errors are recorded.
absl::StatusOr<GameResult> RunSampleAccuracyGame(
    const Sample& x, std::size_t k, const MechanismFactory& mechanism,
    Analyst& analyst, uint64_t seed);

struct MonitorOutput {
  LowSensitivityQuery qstar;
  std::size_t tstar = 0;
  std::size_t jstar = 0;
  // The answer to qstar (negated along with the query when needed), and
  // answer - qstar(P), which is always >= 0.
  double answer = 0;
  double selected_pop_err = 0;
  // qstar(P) - qstar(x_tstar).
  double qstar_pop_minus_sample = 0;
  std::size_t games = 0;
};

// Plays T independent accuracy games (game t uses seed DeriveSeed(seed, t)
// and a fresh analyst seeded with DeriveSeed(game seed, kAnalystStream)),
// then picks the round with the largest |err_P|, ties to the lowest (t, j).
// The chosen query is negated if needed so that its answer is at least its
// population value.
absl::StatusOr<MonitorOutput> RunMonitor(const Distribution& p, std::size_t n,
                                         std::size_t T, std::size_t k,
                                         const MechanismFactory& mechanism,
                                         const AnalystFactory& analyst,
                                         uint64_t seed);

// A test mechanism that answers exactly, except that with probability beta
// (decided once, at construction) it shifts every answer by `offset`.
class FlakyMechanism final : public Mechanism {
 public:
  FlakyMechanism(Sample sample, double beta, double offset, uint64_t seed);
  absl::StatusOr<double> AnswerStatistical(const StatisticalQuery& q) override;
  std::size_t answered() const override { return answered_; }
  std::string tag() const override { return "flaky"; }
  bool failing() const { return failing_; }

 private:
  Sample sample_;
  double offset_;
  bool failing_;
  std::size_t answered_ = 0;
};

MechanismFactory MakeFlakyFactory(double beta, double offset);

}  // namespace asl

#endif  // ASL_HARNESS_GAMES_H_
