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

#include "asl/stability/budget.h"

#include <algorithm>
#include <cmath>

#include "absl/status/status.h"
#include "absl/strings/str_format.h"
#include "asl/status_macros.h"

namespace asl {

absl::StatusOr<StabilityBudget> StabilityBudget::Create(double epsilon,
                                                        double delta) {
  if (!(epsilon >= 0)) {
    return absl::InvalidArgumentError("epsilon must be >= 0");
  }
  if (!(delta >= 0 && delta <= 1)) {
    return absl::InvalidArgumentError("delta must lie in [0, 1]");
  }
  return StabilityBudget{epsilon, delta};
}

nlohmann::json ToJson(const StabilityBudget& budget) {
  nlohmann::json j;
  // JSON has no infinity; an unbounded epsilon serializes as null.
  if (budget.is_finite()) {
    j["epsilon"] = budget.epsilon;
  } else {
    j["epsilon"] = nullptr;
  }
  j["delta"] = budget.delta;
  return j;
}

absl::StatusOr<StabilityBudget> ComposeAdvanced(double eps0, double delta0,
                                                std::size_t k,
                                                double delta_prime) {
  if (!(eps0 >= 0 && eps0 <= 1)) {
    return absl::OutOfRangeError(absl::StrFormat(
        "advanced composition requires 0 <= eps0 <= 1, got %g", eps0));
  }
  if (!(delta0 >= 0 && delta0 <= 1)) {
    return absl::InvalidArgumentError("delta0 must lie in [0, 1]");
  }
  if (!(delta_prime > 0 && delta_prime <= 1)) {
    return absl::InvalidArgumentError("delta' must lie in (0, 1]");
  }
  const double kd = static_cast<double>(k);
  const double epsilon =
      eps0 * std::sqrt(kd * std::log(1.0 / delta_prime)) + 2.0 * eps0 * eps0 * kd;
  const double delta = std::min(1.0, delta_prime + kd * delta0);
  return StabilityBudget{epsilon, delta};
}

StabilityBudget ComposeBasic(const StabilityBudget& per_query, std::size_t k) {
  const double kd = static_cast<double>(k);
  return {per_query.epsilon * kd, std::min(1.0, per_query.delta * kd)};
}

absl::StatusOr<StabilityBudget> CalibratePerQuery(
    const StabilityBudget& target, std::size_t k,
    std::optional<double> delta_split) {
  if (!target.is_finite() || !(target.epsilon >= 0)) {
    return absl::InvalidArgumentError("target epsilon must be finite and >= 0");
  }
  if (k == 0) return absl::InvalidArgumentError("k must be >= 1");
  const double split = delta_split.value_or(target.delta / 2);
  if (!(split > 0 && split < target.delta)) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "delta split %g must lie in (0, target.delta = %g)", split, target.delta));
  }
  const double delta0 = (target.delta - split) / static_cast<double>(k);

  auto composed = [&](double eps0) -> absl::StatusOr<double> {
    ASSIGN_OR_RETURN(const StabilityBudget b,
                     ComposeAdvanced(eps0, delta0, k, split));
    return b.epsilon;
  };
  ASSIGN_OR_RETURN(const double at_zero, composed(0.0));
  if (at_zero > target.epsilon) {
    return absl::FailedPreconditionError("target budget is infeasible");
  }
  ASSIGN_OR_RETURN(const double at_one, composed(1.0));
  if (at_one <= target.epsilon) return StabilityBudget{1.0, delta0};

  double lo = 0.0;
  double hi = 1.0;
  while (hi - lo > 1e-12) {
    const double mid = 0.5 * (lo + hi);
    ASSIGN_OR_RETURN(const double e, composed(mid));
    if (e <= target.epsilon) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return StabilityBudget{lo, delta0};
}

double TvFromKlDivergence(double divergence) {
  return std::min(1.0, std::sqrt(std::max(0.0, divergence) / 2.0));
}

double TvFromKl(double eps_kl) { return TvFromKlDivergence(2.0 * eps_kl * eps_kl); }

absl::StatusOr<double> TvFromMaxKl(const StabilityBudget& budget) {
  if (!(budget.epsilon <= 1)) {
    return absl::OutOfRangeError("max-KL to TV conversion requires epsilon <= 1");
  }
  return std::min(1.0, 2.0 * budget.epsilon + budget.delta);
}

}  // namespace asl
