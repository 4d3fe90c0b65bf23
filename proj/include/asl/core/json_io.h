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

#ifndef ASL_CORE_JSON_IO_H_
#define ASL_CORE_JSON_IO_H_

#include <vector>

#include "absl/status/statusor.h"
#include "asl/core/queries.h"
#include "asl/core/universe.h"
#include "nlohmann/json.hpp"

namespace asl {

// Parses {"elements": [...], "pmf": [...]}. Elements may be any JSON scalars;
// non-string tokens are keyed by their compact JSON text.
absl::StatusOr<Distribution> DistributionFromJson(const nlohmann::json& doc);
nlohmann::json DistributionToJson(const Distribution& p);

// Parses statistical queries given as arrays aligned with the universe:
// either a single array of numbers or an array of such arrays.
absl::StatusOr<std::vector<StatisticalQuery>> StatisticalQueriesFromJson(
    const nlohmann::json& doc, std::size_t universe_size);

}  // namespace asl

#endif  // ASL_CORE_JSON_IO_H_
