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

#include "asl/core/json_io.h"

#include <string>

#include "absl/status/status.h"
#include "absl/strings/str_format.h"
#include "asl/status_macros.h"

namespace asl {
namespace {

std::string TokenOf(const nlohmann::json& element) {
  return element.is_string() ? element.get<std::string>() : element.dump();
}

absl::StatusOr<std::vector<double>> NumberArray(const nlohmann::json& doc,
                                                const char* what) {
  if (!doc.is_array()) {
    return absl::InvalidArgumentError(absl::StrFormat("%s must be an array", what));
  }
  std::vector<double> values;
  values.reserve(doc.size());
  for (const auto& v : doc) {
    if (!v.is_number()) {
      return absl::InvalidArgumentError(
          absl::StrFormat("%s must contain only numbers", what));
    }
    values.push_back(v.get<double>());
  }
  return values;
}

}  // namespace

absl::StatusOr<Distribution> DistributionFromJson(const nlohmann::json& doc) {
  if (!doc.is_object() || !doc.contains("elements") || !doc.contains("pmf")) {
    return absl::InvalidArgumentError(
        "distribution must be an object with 'elements' and 'pmf'");
  }
  const auto& elements = doc["elements"];
  if (!elements.is_array()) {
    return absl::InvalidArgumentError("'elements' must be an array");
  }
  std::vector<std::string> labels;
  labels.reserve(elements.size());
  for (const auto& e : elements) labels.push_back(TokenOf(e));
  ASSIGN_OR_RETURN(Universe universe, Universe::Create(std::move(labels)));
  ASSIGN_OR_RETURN(std::vector<double> pmf, NumberArray(doc["pmf"], "'pmf'"));
  return Distribution::Create(
      std::make_shared<const Universe>(std::move(universe)), std::move(pmf));
}

nlohmann::json DistributionToJson(const Distribution& p) {
  nlohmann::json elements = nlohmann::json::array();
  for (Element z = 0; z < p.size(); ++z) elements.push_back(p.universe().label(z));
  return {{"elements", std::move(elements)},
          {"pmf", std::vector<double>(p.pmf().begin(), p.pmf().end())}};
}

absl::StatusOr<std::vector<StatisticalQuery>> StatisticalQueriesFromJson(
    const nlohmann::json& doc, std::size_t universe_size) {
  if (!doc.is_array()) {
    return absl::InvalidArgumentError("queries must be given as arrays");
  }
  std::vector<StatisticalQuery> queries;
  auto add = [&](const nlohmann::json& row) -> absl::Status {
    ASSIGN_OR_RETURN(std::vector<double> table, NumberArray(row, "query table"));
    if (table.size() != universe_size) {
      return absl::InvalidArgumentError(absl::StrFormat(
          "query table has %d entries but universe has %d", table.size(),
          universe_size));
    }
    ASSIGN_OR_RETURN(StatisticalQuery q, StatisticalQuery::Create(std::move(table)));
    queries.push_back(std::move(q));
    return absl::OkStatus();
  };
  if (!doc.empty() && doc.front().is_array()) {
    for (const auto& row : doc) RETURN_IF_ERROR(add(row));
  } else {
    RETURN_IF_ERROR(add(doc));
  }
  return queries;
}

}  // namespace asl
