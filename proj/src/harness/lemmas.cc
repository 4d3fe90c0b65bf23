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

#include "asl/harness/lemmas.h"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "absl/status/status.h"
#include "absl/strings/str_format.h"
#include "asl/harness/parallel.h"
#include "asl/stats.h"
#include "asl/mechanisms/mechanism.h"
#include "asl/random.h"
#include "asl/status_macros.h"

namespace asl {
namespace {

absl::Status CheckTrials(std::size_t trials) {
  if (trials < kMinLemmaTrials) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "%d trials requested; at least %d are needed for a meaningful CI",
        trials, kMinLemmaTrials));
  }
  return absl::OkStatus();
}

absl::Status CheckBudget(double eps, double delta) {
  if (!(eps >= 0) || !(delta >= 0) || delta > 1) {
    return absl::OutOfRangeError("need eps >= 0 and delta in [0, 1]");
  }
  return absl::OkStatus();
}

// One trial of the de-correlation experiment: draws T samples, lets W pick,
// and returns q(P) - q(x_t).
absl::StatusOr<double> DecorrelationTrial(const Selector& w,
                                          const QueryMenu& menu,
                                          const Distribution& p, std::size_t T,
                                          uint64_t trial_seed) {
  Rng sample_rng(DeriveSeed(trial_seed, kSampleStream));
  std::vector<Sample> xs;
  xs.reserve(T);
  for (std::size_t t = 0; t < T; ++t) xs.push_back(p.Draw(menu.n(), sample_rng));
  Rng selector_rng(DeriveSeed(trial_seed, kSelectorStream));
  ASSIGN_OR_RETURN(const Selection s, w.Select(menu, xs, selector_rng));
  ASSIGN_OR_RETURN(const double on_sample,
                   menu.Evaluate(s.query_index, xs[s.sample_index]));
  return menu.population(s.query_index) - on_sample;
}

absl::StatusOr<std::vector<double>> RunDecorrelation(
    const Selector& w, const QueryMenu& menu, const Distribution& p,
    std::size_t T, std::size_t trials, uint64_t seed) {
  RETURN_IF_ERROR(CheckTrials(trials));
  if (T == 0) return absl::InvalidArgumentError("need T >= 1");
  auto results = RunTrials(trials, [&](std::size_t trial) {
    return DecorrelationTrial(w, menu, p, T, DeriveSeed(seed, trial));
  });
  std::vector<double> gaps;
  gaps.reserve(trials);
  for (auto& r : results) {
    RETURN_IF_ERROR(r.status());
    gaps.push_back(*r);
  }
  return gaps;
}

}  // namespace

LemmaVerdict MakeVerdict(double estimate, double ci_halfwidth, double bound,
                         std::size_t trials) {
  return {estimate, ci_halfwidth, bound,
          std::abs(estimate) <= bound + ci_halfwidth, trials};
}

absl::StatusOr<LemmaVerdict> VerifyDecorrelatedSq(
    const Selector& w, const QueryMenu& menu, const Distribution& p,
    std::size_t T, double eps, double delta, std::size_t trials, uint64_t seed,
    std::vector<double>* per_trial) {
  RETURN_IF_ERROR(CheckBudget(eps, delta));
  if (!menu.all_statistical()) {
    return absl::InvalidArgumentError(
        "the statistical-query verifier needs a menu of statistical queries");
  }
  ASSIGN_OR_RETURN(std::vector<double> gaps,
                   RunDecorrelation(w, menu, p, T, trials, seed));
  const MeanCi m = MeanWithCi(gaps);
  if (per_trial != nullptr) *per_trial = std::move(gaps);
  const double bound = std::expm1(eps) + static_cast<double>(T) * delta;
  return MakeVerdict(m.mean, m.ci_halfwidth, bound, trials);
}

absl::StatusOr<LemmaVerdict> VerifyDecorrelatedLowSens(
    const Selector& w, const QueryMenu& menu, const Distribution& p,
    std::size_t T, double eps, double delta, std::size_t trials, uint64_t seed,
    std::vector<double>* per_trial) {
  RETURN_IF_ERROR(CheckBudget(eps, delta));
  ASSIGN_OR_RETURN(std::vector<double> gaps,
                   RunDecorrelation(w, menu, p, T, trials, seed));
  const MeanCi m = MeanWithCi(gaps);
  if (per_trial != nullptr) *per_trial = std::move(gaps);
  const double delta_n = menu.sensitivity() * static_cast<double>(menu.n());
  const double bound =
      2 * (std::expm1(eps) + static_cast<double>(T) * delta) * delta_n;
  return MakeVerdict(m.mean, m.ci_halfwidth + menu.max_population_ci(), bound,
                     trials);
}

absl::StatusOr<LemmaVerdict> VerifyDecorrelatedTv(
    const Selector& w, const QueryMenu& menu, const Distribution& p,
    double eps_tv, std::size_t trials, uint64_t seed,
    std::vector<double>* per_trial) {
  if (!(eps_tv >= 0) || eps_tv > 1) {
    return absl::OutOfRangeError("TV parameter must lie in [0, 1]");
  }
  ASSIGN_OR_RETURN(std::vector<double> gaps,
                   RunDecorrelation(w, menu, p, 1, trials, seed));
  const MeanCi m = MeanWithCi(gaps);
  if (per_trial != nullptr) *per_trial = std::move(gaps);
  const double delta_n = menu.sensitivity() * static_cast<double>(menu.n());
  return MakeVerdict(m.mean, m.ci_halfwidth + menu.max_population_ci(),
                     2 * eps_tv * delta_n, trials);
}

absl::StatusOr<double> ExpectedUtility(std::span<const double> f, double eta) {
  if (f.empty()) return absl::InvalidArgumentError("F must be nonempty");
  if (!(eta >= 0) || !std::isfinite(eta)) {
    return absl::InvalidArgumentError("eta must be finite and >= 0");
  }
  std::vector<double> losses(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (!std::isfinite(f[i])) {
      return absl::InvalidArgumentError(
          absl::StrFormat("f[%d] is not finite", i));
    }
    losses[i] = -f[i];
  }
  const std::vector<double> probs = ExpMechProbabilities(losses, eta);
  double expected = 0;
  for (std::size_t i = 0; i < f.size(); ++i) expected += probs[i] * f[i];
  return expected;
}

absl::StatusOr<LemmaVerdict> VerifyEmUtility(std::span<const double> f,
                                             double eta) {
  if (!(eta > 0)) return absl::InvalidArgumentError("eta must be > 0");
  ASSIGN_OR_RETURN(const double expected, ExpectedUtility(f, eta));
  const double best = *std::max_element(f.begin(), f.end());
  const double bound = std::log(static_cast<double>(f.size())) / eta;
  return MakeVerdict(best - expected, 0.0, bound, 1);
}

absl::StatusOr<EmSweepResult> EmUtilitySweep(std::size_t instances,
                                             std::size_t max_size, double f_abs,
                                             double eta_min, double eta_max,
                                             uint64_t seed) {
  if (max_size == 0 || !(f_abs >= 0) || !(eta_min > 0) ||
      !(eta_max >= eta_min)) {
    return absl::InvalidArgumentError(
        "need max_size >= 1, f_abs >= 0 and 0 < eta_min <= eta_max");
  }
  EmSweepResult result;
  result.instances = instances;
  result.min_slack = std::numeric_limits<double>::infinity();
  const double log_lo = std::log(eta_min);
  const double log_hi = std::log(eta_max);
  for (std::size_t i = 0; i < instances; ++i) {
    Rng rng(DeriveSeed(seed, i));
    const std::size_t size =
        std::uniform_int_distribution<std::size_t>(1, max_size)(rng);
    std::vector<double> f(size);
    for (double& v : f) v = -f_abs + 2 * f_abs * Uniform01(rng);
    const double eta = std::exp(log_lo + (log_hi - log_lo) * Uniform01(rng));
    ASSIGN_OR_RETURN(const LemmaVerdict v, VerifyEmUtility(f, eta));
    if (v.holds_within_ci) ++result.holds;
    result.min_slack = std::min(result.min_slack, v.bound - v.estimate);
  }
  if (instances == 0) result.min_slack = 0;
  return result;
}

absl::StatusOr<LowerBoundResult> RunLowerBoundDemo(
    double alpha, double delta, std::size_t n, double sensitivity,
    std::size_t trials, uint64_t seed, std::vector<double>* per_trial) {
  if (!(alpha > 0) || alpha > 1 || !(delta >= 0) || !(delta < alpha)) {
    return absl::OutOfRangeError("need 0 <= delta < alpha <= 1");
  }
  if (!(sensitivity > 0)) {
    return absl::InvalidArgumentError("sensitivity must be > 0");
  }
  const double blocks_real = 1.0 / alpha;
  const double block_real = alpha * static_cast<double>(n);
  const auto blocks = static_cast<std::size_t>(std::llround(blocks_real));
  const auto block = static_cast<std::size_t>(std::llround(block_real));
  if (std::abs(blocks_real - static_cast<double>(blocks)) > 1e-9 ||
      std::abs(block_real - static_cast<double>(block)) > 1e-9 || block == 0) {
    return absl::InvalidArgumentError(
        "1/alpha and alpha * n must be positive integers");
  }
  if (trials == 0) return absl::InvalidArgumentError("need trials >= 1");

  const double nd = static_cast<double>(n);
  const double grid = static_cast<double>(kLowerBoundGrid);
  const double threshold = alpha * sensitivity * nd - sensitivity * nd * nd / grid;

  std::vector<double> hits = RunTrials(trials, [&](std::size_t trial) {
    const uint64_t trial_seed = DeriveSeed(seed, trial);
    Rng sample_rng(DeriveSeed(trial_seed, kSampleStream));
    std::uniform_int_distribution<std::size_t> draw(0, kLowerBoundGrid - 1);
    std::vector<std::size_t> x(n);
    for (auto& z : x) z = draw(sample_rng);

    // The algorithm: leak each block independently with probability delta.
    Rng coin_rng(DeriveSeed(trial_seed, kMechanismStream));
    std::unordered_set<std::size_t> leaked;
    for (std::size_t b = 0; b < blocks; ++b) {
      if (Uniform01(coin_rng) < delta) {
        for (std::size_t i = b * block; i < (b + 1) * block; ++i) {
          leaked.insert(x[i]);
        }
      }
    }
    // q(y) = Delta * #{i : y_i leaked}; q(U) = Delta n |leaked| / 2^20.
    double on_sample = 0;
    for (std::size_t z : x) on_sample += leaked.count(z) ? sensitivity : 0.0;
    const double on_population =
        sensitivity * nd * static_cast<double>(leaked.size()) / grid;
    return on_sample - on_population >= threshold ? 1.0 : 0.0;
  });

  std::size_t count = 0;
  for (double h : hits) count += h > 0 ? 1 : 0;
  const MeanCi freq = ProportionWithCi(count, trials);
  if (per_trial != nullptr) *per_trial = std::move(hits);
  LowerBoundResult result;
  result.frequency = freq.mean;
  result.ci_halfwidth = freq.ci_halfwidth;
  result.bound = delta / (2 * alpha);
  result.exact = 1 - std::pow(1 - delta, blocks_real);
  result.trials = trials;
  return result;
}

std::size_t GeneralizationMinSampleSize(double eps, double delta) {
  return static_cast<std::size_t>(
      std::ceil(std::log(4 * eps / delta) / (eps * eps)));
}

absl::StatusOr<LemmaVerdict> RunGeneralizationCheck(
    const Selector& m, const QueryMenu& menu, const Distribution& p, double eps,
    double delta, std::size_t trials, uint64_t seed,
    std::vector<double>* per_trial) {
  if (!(eps > 0) || !(eps < 1.0 / 3.0)) {
    return absl::OutOfRangeError("need eps in (0, 1/3)");
  }
  if (!(delta > 0) || !(delta < eps / 4)) {
    return absl::OutOfRangeError("need delta in (0, eps/4)");
  }
  const std::size_t min_n = GeneralizationMinSampleSize(eps, delta);
  if (menu.n() < min_n) {
    return absl::OutOfRangeError(absl::StrFormat(
        "n = %d is below the required (1/eps^2) ln(4 eps/delta) = %d",
        menu.n(), min_n));
  }
  ASSIGN_OR_RETURN(std::vector<double> gaps,
                   RunDecorrelation(m, menu, p, 1, trials, seed));
  const double threshold =
      18 * eps * menu.sensitivity() * static_cast<double>(menu.n());
  std::size_t hits = 0;
  for (double& g : gaps) {
    g = std::abs(g) >= threshold ? 1.0 : 0.0;
    hits += g > 0 ? 1 : 0;
  }
  const MeanCi freq = ProportionWithCi(hits, trials);
  if (per_trial != nullptr) *per_trial = std::move(gaps);
  return MakeVerdict(freq.mean, freq.ci_halfwidth, delta / eps, trials);
}

}  // namespace asl
