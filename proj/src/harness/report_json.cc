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

#include "asl/harness/report_json.h"

#include <variant>

namespace asl {

nlohmann::json ToJson(const GameResult& result) {
  nlohmann::json answers = nlohmann::json::array();
  for (const TranscriptRecord& r : result.transcript.records) {
    if (const double* a = std::get_if<double>(&r.answer)) {
      answers.push_back(*a);
    } else {
      answers.push_back(std::get<std::size_t>(r.answer));
    }
  }
  return {
      {"seed", result.seed},
      {"mechanism", result.transcript.mechanism_tag},
      {"analyst", result.transcript.analyst_tag},
      {"rounds", result.transcript.rounds()},
      {"refused", result.refused},
      {"answers", answers},
      {"sample_errs", result.sample_errs},
      {"pop_errs", result.pop_errs},
      {"max_sample_err", result.max_sample_err},
      {"max_pop_err", result.max_pop_err},
  };
}

nlohmann::json ToJson(const LemmaVerdict& verdict) {
  return {
      {"estimate", verdict.estimate},
      {"ci_halfwidth", verdict.ci_halfwidth},
      {"bound", verdict.bound},
      {"holds_within_ci", verdict.holds_within_ci},
      {"trials", verdict.trials},
  };
}

nlohmann::json ToJson(const MonitorOutput& output) {
  return {
      {"tstar", output.tstar},
      {"jstar", output.jstar},
      {"negated", output.qstar.negated()},
      {"answer", output.answer},
      {"selected_pop_err", output.selected_pop_err},
      {"qstar_pop_minus_sample", output.qstar_pop_minus_sample},
      {"games", output.games},
  };
}

nlohmann::json ToJson(const LowerBoundResult& result) {
  return {
      {"frequency", result.frequency},
      {"ci_halfwidth", result.ci_halfwidth},
      {"bound", result.bound},
      {"exact", result.exact},
      {"trials", result.trials},
  };
}

nlohmann::json ToJson(const EmSweepResult& result) {
  return {
      {"instances", result.instances},
      {"holds", result.holds},
      {"min_slack", result.min_slack},
  };
}

}  // namespace asl
