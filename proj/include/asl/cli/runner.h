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

#ifndef ASL_CLI_RUNNER_H_
#define ASL_CLI_RUNNER_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "nlohmann/json.hpp"

namespace asl {

inline constexpr char kVersionTag[] = "asl/0.1.0";

inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalidConfig = 1;
inline constexpr int kExitVerdictFailed = 2;
inline constexpr int kExitReplayMismatch = 3;

enum class Experiment {
  kGame,
  kAttackDemo,
  kMonitor,
  kLemmaSq,
  kLemmaLowSens,
  kLemmaTv,
  kEmUtility,
  kLowerBound,
  kGeneralization,
  kPlan,
};

std::string_view ExperimentName(Experiment experiment);
// Accepts the canonical names ("attack_demo") and the subcommand spellings
// ("attack-demo").
absl::StatusOr<Experiment> ParseExperiment(std::string_view name);

struct ExperimentConfig {
  Experiment experiment = Experiment::kGame;
  nlohmann::json params = nlohmann::json::object();
  uint64_t seed = 0;
  std::size_t trials = 0;
  std::string out_path;  // empty: no files are written
};

// Reads {"experiment", "params", "seed", "trials", "out"}. A missing trial
// count gets the experiment's default.
absl::StatusOr<ExperimentConfig> ExperimentConfigFromJson(
    const nlohmann::json& doc);
nlohmann::json ToJson(const ExperimentConfig& config);
std::size_t DefaultTrials(Experiment experiment);

// One long-format CSV row; `trial` is a trial index or "all".
struct CsvRow {
  std::string trial;
  std::string metric;
  double value = 0;
};

struct VerdictRecord {
  std::string name;
  bool holds = false;
  bool expected_to_hold = true;  // false for negative controls
  nlohmann::json detail = nlohmann::json::object();
  bool passed() const { return holds == expected_to_hold; }
};

struct ExperimentOutcome {
  nlohmann::json metrics = nlohmann::json::object();
  std::vector<VerdictRecord> verdicts;
  std::vector<CsvRow> rows;
  // Experiment-specific payload (e.g. the transfer plan).
  nlohmann::json report = nlohmann::json::object();
  bool all_passed() const;
};

// Validates the parameters and runs the experiment. Every random choice is
// derived from config.seed, so equal configs give bit-identical outcomes.
absl::StatusOr<ExperimentOutcome> RunExperiment(const ExperimentConfig& config);

// FNV-1a over the CSV rows (trial, metric and the bits of each value).
std::string TrialDigest(const std::vector<CsvRow>& rows);

// Self-contained summary: version, config, metrics, verdicts, report and the
// trial digest.
nlohmann::json SummaryJson(const ExperimentConfig& config,
                           const ExperimentOutcome& outcome);

// Appends rows to <out>.csv (header only for a new file) and writes the
// summary to <out>.json.
absl::Status WriteOutputs(const ExperimentConfig& config,
                          const ExperimentOutcome& outcome);

struct RunOverrides {
  std::optional<uint64_t> seed;
  std::optional<std::size_t> trials;
  std::optional<std::string> out;
};

// Runs the experiment described by the JSON file at `config_path` and returns
// the process exit status.
int RunCommand(Experiment experiment, const std::string& config_path,
               const RunOverrides& overrides, std::ostream& out,
               std::ostream& err);

// Re-executes the run recorded in a summary file and compares metrics and
// trial digest bit for bit. A --trials override that differs from the
// recorded count is a config mismatch.
int ReplayCommand(const std::string& summary_path,
                  const RunOverrides& overrides, std::ostream& out,
                  std::ostream& err);

// {"error": {"code": ..., "message": ...}}
nlohmann::json ErrorJson(const absl::Status& status);

}  // namespace asl

#endif  // ASL_CLI_RUNNER_H_
