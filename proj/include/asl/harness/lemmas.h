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

#ifndef ASL_HARNESS_LEMMAS_H_
#define ASL_HARNESS_LEMMAS_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "absl/status/statusor.h"
#include "asl/core/universe.h"
#include "asl/harness/selectors.h"

namespace asl {

// A measured quantity checked against a bound.
// holds_within_ci == (|estimate| <= bound + ci_halfwidth).
struct LemmaVerdict {
  double estimate = 0;
  double ci_halfwidth = 0;
  double bound = 0;
  bool holds_within_ci = false;
  std::size_t trials = 0;
};

LemmaVerdict MakeVerdict(double estimate, double ci_halfwidth, double bound,
                         std::size_t trials);

// Verifiers refuse to run with fewer trials than this.
inline constexpr std::size_t kMinLemmaTrials = 100;

// Estimates E[q(P)] - E[q(x_t)] for (q, t) = W(x_1, ..., x_T) with
// x_t <- P^n (n taken from the menu), against e^eps - 1 + T delta. The menu
// must consist of statistical queries. If `per_trial` is set it receives the
// per-trial differences q(P) - q(x_t).
absl::StatusOr<LemmaVerdict> VerifyDecorrelatedSq(
    const Selector& w, const QueryMenu& menu, const Distribution& p,
    std::size_t T, double eps, double delta, std::size_t trials, uint64_t seed,
    std::vector<double>* per_trial = nullptr);

// As above for Delta-sensitive menus, against 2 (e^eps - 1 + T delta) Delta n.
// The CI also absorbs the Monte Carlo error of the menu's population values.
absl::StatusOr<LemmaVerdict> VerifyDecorrelatedLowSens(
    const Selector& w, const QueryMenu& menu, const Distribution& p,
    std::size_t T, double eps, double delta, std::size_t trials, uint64_t seed,
    std::vector<double>* per_trial = nullptr);

// Single-sample TV variant, against 2 eps_tv Delta n.
absl::StatusOr<LemmaVerdict> VerifyDecorrelatedTv(
    const Selector& w, const QueryMenu& menu, const Distribution& p,
    double eps_tv, std::size_t trials, uint64_t seed,
    std::vector<double>* per_trial = nullptr);

// E[f(X)] for Pr[X = i] proportional to exp(eta f_i), computed exactly.
absl::StatusOr<double> ExpectedUtility(std::span<const double> f, double eta);

// Exact check of E[f(X)] >= max f - ln|F| / eta. The verdict reports the
// shortfall max f - E[f(X)] as the estimate and ln|F| / eta as the bound.
absl::StatusOr<LemmaVerdict> VerifyEmUtility(std::span<const double> f,
                                             double eta);

struct EmSweepResult {
  std::size_t instances = 0;
  std::size_t holds = 0;
  // Smallest bound - shortfall over all instances.
  double min_slack = 0;
};

// Random instances with |F| uniform in [1, max_size], f_i uniform in
// [-f_abs, f_abs] and eta log-uniform in [eta_min, eta_max].
absl::StatusOr<EmSweepResult> EmUtilitySweep(std::size_t instances,
                                             std::size_t max_size, double f_abs,
                                             double eta_min, double eta_max,
                                             uint64_t seed);

struct LowerBoundResult {
  double frequency = 0;
  double ci_halfwidth = 0;
  double bound = 0;  // delta / (2 alpha)
  double exact = 0;  // 1 - (1 - delta)^(1/alpha)
  std::size_t trials = 0;
};

// Size of the grid standing in for the uniform distribution on [0, 1].
inline constexpr std::size_t kLowerBoundGrid = std::size_t{1} << 20;

// The (0, delta)-stable algorithm that leaks each of its 1/alpha blocks of
// alpha n sample elements with probability delta, followed by the indicator
// query of the leaked elements scaled to sensitivity Delta. Measures how often
// q(X) - q(U) >= alpha Delta n. 1/alpha and alpha n must be integers and
// 0 <= delta < alpha <= 1. The threshold is relaxed by Delta n^2 / 2^20, the
// most population mass the leaked grid points can carry.
absl::StatusOr<LowerBoundResult> RunLowerBoundDemo(
    double alpha, double delta, std::size_t n, double sensitivity,
    std::size_t trials, uint64_t seed,
    std::vector<double>* per_trial = nullptr);

// ceil((1 / eps^2) ln(4 eps / delta)).
std::size_t GeneralizationMinSampleSize(double eps, double delta);

// Frequency of |q(P) - q(x)| >= 18 eps Delta n for q = M(x), x <- P^n, against
// delta / eps. Requires eps in (0, 1/3), delta in (0, eps / 4) and
// n >= GeneralizationMinSampleSize(eps, delta), with n taken from the menu.
absl::StatusOr<LemmaVerdict> RunGeneralizationCheck(
    const Selector& m, const QueryMenu& menu, const Distribution& p, double eps,
    double delta, std::size_t trials, uint64_t seed,
    std::vector<double>* per_trial = nullptr);

}  // namespace asl

#endif  // ASL_HARNESS_LEMMAS_H_
