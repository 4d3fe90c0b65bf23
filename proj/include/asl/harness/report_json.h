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

#ifndef ASL_HARNESS_REPORT_JSON_H_
#define ASL_HARNESS_REPORT_JSON_H_

#include "asl/harness/games.h"
#include "asl/harness/lemmas.h"
#include "nlohmann/json.hpp"

namespace asl {

// Transcripts are summarized by their answers; query tables are omitted.
nlohmann::json ToJson(const GameResult& result);
nlohmann::json ToJson(const LemmaVerdict& verdict);
nlohmann::json ToJson(const MonitorOutput& output);
nlohmann::json ToJson(const LowerBoundResult& result);
nlohmann::json ToJson(const EmSweepResult& result);

}  // namespace asl

#endif  // ASL_HARNESS_REPORT_JSON_H_
