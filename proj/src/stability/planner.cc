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

#include "asl/stability/planner.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "absl/status/status.h"
#include "absl/strings/str_format.h"
#include "asl/status_macros.h"

namespace asl {
namespace {

bool InOpenInterval(double v, double lo, double hi) { return v > lo && v < hi; }

double FlooredLog(double v) { return std::max(1.0, std::log(v)); }

// Pr[max over k draws of |Laplace(b)| > t].
double LaplaceUnionTail(double b, double t, std::size_t k) {
  const double single = std::exp(-t / b);
  return -std::expm1(static_cast<double>(k) * std::log1p(-single));
}

}  // namespace

absl::StatusOr<TransferPlan> PlanTransfer(double alpha, double beta,
                                          double delta_sens, std::size_t n,
                                          std::size_t k,
                                          TransferVariant variant) {
  if (variant == TransferVariant::kLowSensitivity) {
    if (!InOpenInterval(alpha, 0, 0.1) || !InOpenInterval(beta, 0, 0.1)) {
      return absl::OutOfRangeError(absl::StrFormat(
          "transfer requires alpha, beta in (0, 0.1); got alpha=%g beta=%g",
          alpha, beta));
    }
  } else if (!(alpha > 0) || !InOpenInterval(beta, 0, 1)) {
    return absl::OutOfRangeError(absl::StrFormat(
        "minimization transfer requires alpha > 0 and beta in (0, 1); got "
        "alpha=%g beta=%g",
        alpha, beta));
  }
  if (!(delta_sens > 0) || n == 0 || k == 0) {
    return absl::OutOfRangeError("Delta, n and k must be positive");
  }

  const bool min_variant = variant == TransferVariant::kMinimization;
  const double scale = delta_sens * static_cast<double>(n);
  const double eps_den = min_variant ? 128.0 : 64.0;
  const double delta_den = min_variant ? 64.0 : 32.0;
  const double beta_den = min_variant ? 32.0 : 16.0;

  TransferPlan plan;
  plan.alpha = alpha;
  plan.beta = beta;
  plan.delta_sens = delta_sens;
  plan.n = n;
  plan.k = k;
  plan.variant = variant;
  plan.required_budget.epsilon = alpha / (eps_den * scale);
  plan.required_budget.delta = std::min(1.0, alpha * beta / (delta_den * scale));
  plan.required_alpha = alpha / 8.0;
  plan.required_beta = alpha * beta / (beta_den * scale);

  const absl::StatusOr<StabilityBudget> per_query =
      CalibratePerQuery(plan.required_budget, k);
  if (per_query.ok() && per_query->epsilon > 0) {
    const double b = delta_sens / per_query->epsilon;
    plan.per_query_epsilon = per_query->epsilon;
    if (LaplaceUnionTail(b, plan.required_alpha, k) <= plan.required_beta) {
      plan.feasible = true;
      plan.laplace_noise_scale = b;
    }
  }
  return plan;
}

nlohmann::json ToJson(const TransferPlan& plan) {
  return {
      {"alpha", plan.alpha},
      {"beta", plan.beta},
      {"delta_sens", plan.delta_sens},
      {"n", plan.n},
      {"k", plan.k},
      {"required_budget", ToJson(plan.required_budget)},
      {"required_sample_accuracy",
       {{"alpha_prime", plan.required_alpha},
        {"beta_prime", plan.required_beta}}},
      {"variant", std::string(TransferVariantName(plan.variant))},
      {"feasible", plan.feasible},
      {"per_query_epsilon", plan.per_query_epsilon},
      {"laplace_noise_scale", plan.laplace_noise_scale},
  };
}

absl::StatusOr<TransferVariant> ParseTransferVariant(std::string_view name) {
  if (name == "low_sensitivity") return TransferVariant::kLowSensitivity;
  if (name == "minimization") return TransferVariant::kMinimization;
  return absl::InvalidArgumentError(
      absl::StrFormat("unknown transfer variant '%s'", std::string(name)));
}

std::string_view TransferVariantName(TransferVariant variant) {
  return variant == TransferVariant::kMinimization ? "minimization"
                                                   : "low_sensitivity";
}

absl::StatusOr<double> SampleComplexity(const SampleComplexityInput& in) {
  if (!(in.alpha > 0 && in.alpha <= 1) || !(in.beta > 0 && in.beta < 1)) {
    return absl::OutOfRangeError("alpha must lie in (0,1] and beta in (0,1)");
  }
  if (!(in.k >= 1) || !(in.universe_size >= 1) || !(in.dimension >= 1)) {
    return absl::OutOfRangeError("k, |X| and d must be >= 1");
  }
  const double a = in.alpha;
  const double confidence = std::pow(FlooredLog(1.0 / (in.alpha * in.beta)), 1.5);
  const double log_k = FlooredLog(in.k);
  const double log_x = FlooredLog(in.universe_size);
  double value = 0;
  switch (in.family) {
    case QueryFamily::kStatistical:
    case QueryFamily::kLowSensitivity:
      if (in.regime == QueryRegime::kFewQueries) {
        value = std::sqrt(in.k * FlooredLog(log_k)) * confidence / (a * a);
      } else if (in.family == QueryFamily::kStatistical) {
        value = std::sqrt(log_x) * log_k * confidence / (a * a * a);
      } else {
        value = log_x * log_k * confidence / (a * a * a);
      }
      break;
    case QueryFamily::kConvexMinimization:
      if (in.regime == QueryRegime::kFewQueries) {
        const double log2 = FlooredLog(1.0 / (in.alpha * in.beta));
        value = std::sqrt(in.dimension * in.k) * log2 * log2 / (a * a);
      } else {
        value = (std::sqrt(in.dimension) + log_k) * std::sqrt(log_x) *
                confidence / (a * a * a);
      }
      break;
    default:
      return absl::InvalidArgumentError("unsupported query family");
  }
  return std::ceil(std::max(1.0, value));
}

absl::StatusOr<QueryFamily> ParseQueryFamily(std::string_view name) {
  if (name == "statistical") return QueryFamily::kStatistical;
  if (name == "low_sensitivity") return QueryFamily::kLowSensitivity;
  if (name == "convex_minimization") return QueryFamily::kConvexMinimization;
  return absl::InvalidArgumentError(
      absl::StrFormat("no sample-complexity row for query family '%s'", std::string(name)));
}

absl::StatusOr<QueryRegime> ParseQueryRegime(std::string_view name) {
  if (name == "few" || name == "k_small") return QueryRegime::kFewQueries;
  if (name == "many" || name == "k_large") return QueryRegime::kManyQueries;
  return absl::InvalidArgumentError(
      absl::StrFormat("unknown regime '%s' (expected k_small or k_large)", std::string(name)));
}

}  // namespace asl
