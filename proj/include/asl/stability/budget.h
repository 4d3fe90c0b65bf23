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

#ifndef ASL_STABILITY_BUDGET_H_
#define ASL_STABILITY_BUDGET_H_

#include <cstddef>
#include <limits>
#include <optional>

#include "absl/status/statusor.h"
#include "nlohmann/json.hpp"

namespace asl {

// An (epsilon, delta) max-KL stability guarantee. epsilon may be +infinity,
// which together with delta = 1 denotes "no stability".
struct StabilityBudget {
  double epsilon = 0;
  double delta = 0;

  static absl::StatusOr<StabilityBudget> Create(double epsilon, double delta);
  static StabilityBudget None() {
    return {std::numeric_limits<double>::infinity(), 1.0};
  }
  bool is_finite() const { return epsilon < std::numeric_limits<double>::infinity(); }

  friend bool operator==(const StabilityBudget&, const StabilityBudget&) = default;
};

nlohmann::json ToJson(const StabilityBudget& budget);

// Advanced composition of k adaptively chosen (eps0, delta0)-stable
// interactions:
//   (eps0 * sqrt(k * ln(1/delta')) + 2 * eps0^2 * k,  delta' + k * delta0).
// Requires 0 <= eps0 <= 1 and delta' > 0. The log is natural.
absl::StatusOr<StabilityBudget> ComposeAdvanced(double eps0, double delta0,
                                                std::size_t k,
                                                double delta_prime);

// Basic composition: (k * eps0, k * delta0), delta capped at 1.
StabilityBudget ComposeBasic(const StabilityBudget& per_query, std::size_t k);

// Inverse of ComposeAdvanced. Finds by bisection the largest eps0 <= 1 whose
// k-fold advanced composition with delta' = delta_split stays within
// target.epsilon, and sets delta0 = (target.delta - delta_split) / k.
// delta_split defaults to target.delta / 2.
absl::StatusOr<StabilityBudget> CalibratePerQuery(
    const StabilityBudget& target, std::size_t k,
    std::optional<double> delta_split = std::nullopt);

// Pinsker: d_TV <= sqrt(KL / 2).
double TvFromKlDivergence(double divergence);
// eps-KL stability (divergence at most 2 eps^2) implies eps-TV stability.
double TvFromKl(double eps_kl);
// (eps, delta)-max-KL stability with eps <= 1 implies (2 eps + delta)-TV
// stability.
absl::StatusOr<double> TvFromMaxKl(const StabilityBudget& budget);

}  // namespace asl

#endif  // ASL_STABILITY_BUDGET_H_
