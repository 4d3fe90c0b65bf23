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

#ifndef ASL_STABILITY_PLANNER_H_
#define ASL_STABILITY_PLANNER_H_

#include <cstddef>
#include <string_view>

#include "absl/status/statusor.h"
#include "asl/stability/budget.h"
#include "nlohmann/json.hpp"

namespace asl {

enum class TransferVariant { kLowSensitivity, kMinimization };

// Parameters a mechanism must meet for the transfer from sample accuracy to
// (alpha, beta) population accuracy over k adaptive Delta-sensitive queries.
struct TransferPlan {
  double alpha = 0;
  double beta = 0;
  double delta_sens = 0;
  std::size_t n = 0;
  std::size_t k = 0;
  StabilityBudget required_budget;
  double required_alpha = 0;  // alpha'
  double required_beta = 0;   // beta'
  TransferVariant variant = TransferVariant::kLowSensitivity;

  // Whether a k-fold composed Laplace mechanism can meet both the budget and
  // the (alpha', beta') sample accuracy at this n, and the noise scale it
  // would use (0 when infeasible).
  bool feasible = false;
  double per_query_epsilon = 0;
  double laplace_noise_scale = 0;
};

// Low-sensitivity variant (alpha, beta in (0, 0.1)):
//   eps = alpha / (64 Delta n),  delta = alpha beta / (32 Delta n),
//   alpha' = alpha / 8,          beta' = alpha beta / (16 Delta n).
// Minimization variant (alpha > 0, beta in (0, 1)):
//   eps = alpha / (128 Delta n), delta = alpha beta / (64 Delta n),
//   alpha' = alpha / 8,          beta' = alpha beta / (32 Delta n).
absl::StatusOr<TransferPlan> PlanTransfer(double alpha, double beta,
                                          double delta_sens, std::size_t n,
                                          std::size_t k,
                                          TransferVariant variant);

nlohmann::json ToJson(const TransferPlan& plan);

absl::StatusOr<TransferVariant> ParseTransferVariant(std::string_view name);
std::string_view TransferVariantName(TransferVariant variant);

enum class QueryFamily { kStatistical, kLowSensitivity, kConvexMinimization };
enum class QueryRegime { kFewQueries, kManyQueries };  // k << n^2, k >> n^2

struct SampleComplexityInput {
  QueryFamily family = QueryFamily::kStatistical;
  QueryRegime regime = QueryRegime::kFewQueries;
  double k = 1;
  double alpha = 0.1;
  double beta = 0.05;
  double universe_size = 2;
  double dimension = 1;
};

// Order-of-magnitude sample size from the summary table of results, with the
// hidden constants set to 1 and the polylog factors written out:
//   statistical / low-sens, k << n^2: sqrt(k log log k) log^1.5(1/ab) / a^2
//   statistical, k >> n^2:  sqrt(log|X|) log k log^1.5(1/ab) / a^3
//   low-sens, k >> n^2:     log|X| log k log^1.5(1/ab) / a^3
//   convex, k << n^2:       sqrt(d k) log^2(1/ab) / a^2
//   convex, k >> n^2:       (sqrt(d) + log k) sqrt(log|X|) log^1.5(1/ab) / a^3
// Every log factor is floored at 1 and the result at 1.
absl::StatusOr<double> SampleComplexity(const SampleComplexityInput& input);

absl::StatusOr<QueryFamily> ParseQueryFamily(std::string_view name);
absl::StatusOr<QueryRegime> ParseQueryRegime(std::string_view name);

}  // namespace asl

#endif  // ASL_STABILITY_PLANNER_H_
