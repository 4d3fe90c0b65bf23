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

#include "asl/mechanisms/mechanism.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "absl/status/status.h"
#include "absl/strings/str_format.h"
#include "asl/status_macros.h"

namespace asl {

absl::StatusOr<double> Mechanism::AnswerLowSensitivity(
    const LowSensitivityQuery&) {
  return absl::UnimplementedError(
      absl::StrFormat("%s does not answer low-sensitivity queries", tag()));
}

absl::StatusOr<std::size_t> Mechanism::AnswerMinimization(
    const MinimizationQuery&) {
  return absl::UnimplementedError(
      absl::StrFormat("%s does not answer minimization queries", tag()));
}

ConfiguredMechanism::ConfiguredMechanism(const MechanismConfig& config,
                                         Sample sample, uint64_t seed)
    : config_(config), sample_(std::move(sample)), rng_(seed) {
  if (config_.kind == MechanismKind::kPmw) {
    pmw_weights_.assign(sample_.universe_size(), 1.0);
    pmw_threshold_noise_ = SampleLaplace(rng_, 2.0 * config_.noise_scale);
  }
}

absl::StatusOr<std::unique_ptr<ConfiguredMechanism>> ConfiguredMechanism::Create(
    const MechanismConfig& config, Sample sample, uint64_t seed) {
  RETURN_IF_ERROR(config.Validate());
  return std::unique_ptr<ConfiguredMechanism>(
      new ConfiguredMechanism(config, std::move(sample), seed));
}

std::string ConfiguredMechanism::tag() const {
  return std::string(MechanismKindName(config_.kind));
}

absl::Status ConfiguredMechanism::CheckBudget() const {
  if (answered_ >= config_.k_max) {
    return absl::ResourceExhaustedError(absl::StrFormat(
        "%s refused: answer budget of %d queries exhausted", tag(),
        config_.k_max));
  }
  return absl::OkStatus();
}

double ConfiguredMechanism::AddNoise(double value) {
  switch (config_.kind) {
    case MechanismKind::kLaplace:
      return value + SampleLaplace(rng_, config_.noise_scale);
    case MechanismKind::kGaussian:
      return value + SampleGaussian(rng_, config_.noise_scale);
    default:
      return value;
  }
}

double ConfiguredMechanism::Truncate(double answer, double exact,
                                     double sensitivity) const {
  if (!config_.truncation) return answer;
  // Width 2 * Delta * n, centered on the empirical answer.
  const double half_width = sensitivity * static_cast<double>(sample_.size());
  return std::clamp(answer, exact - half_width, exact + half_width);
}

absl::StatusOr<double> ConfiguredMechanism::AnswerStatistical(
    const StatisticalQuery& q) {
  RETURN_IF_ERROR(CheckBudget());
  ASSIGN_OR_RETURN(const double exact, EvalSample(q, sample_));
  double answer = 0;
  switch (config_.kind) {
    case MechanismKind::kEmpirical:
    case MechanismKind::kLaplace:
    case MechanismKind::kGaussian:
      answer = AddNoise(exact);
      break;
    case MechanismKind::kPmw: {
      ASSIGN_OR_RETURN(answer, AnswerPmw(q, exact));
      break;
    }
    case MechanismKind::kExpMechMin:
      return absl::UnimplementedError(
          "expmech_min answers only minimization queries");
  }
  ++answered_;
  return Truncate(answer, exact, 1.0 / static_cast<double>(sample_.size()));
}

absl::StatusOr<double> ConfiguredMechanism::AnswerPmw(const StatisticalQuery& q,
                                                      double exact) {
  if (q.universe_size() != pmw_weights_.size()) {
    return absl::InvalidArgumentError("query and pmw weights differ in universe");
  }
  double total = 0;
  double weighted = 0;
  for (std::size_t z = 0; z < pmw_weights_.size(); ++z) {
    total += pmw_weights_[z];
    weighted += pmw_weights_[z] * q(z);
  }
  const double synthetic = weighted / total;
  const double b = config_.noise_scale;
  const double noisy_gap = std::abs(exact - synthetic) + SampleLaplace(rng_, 4.0 * b);
  if (noisy_gap < config_.pmw_params.threshold + pmw_threshold_noise_) {
    return synthetic;
  }

  if (pmw_updates_ >= config_.pmw_params.failure_budget) {
    return absl::ResourceExhaustedError(absl::StrFormat(
        "pmw refused: update budget of %d exhausted",
        config_.pmw_params.failure_budget));
  }
  const double noisy = exact + SampleLaplace(rng_, b);
  const double direction = noisy > synthetic ? 1.0 : -1.0;
  const double rate = config_.pmw_params.update_rate;
  double largest = 0;
  for (std::size_t z = 0; z < pmw_weights_.size(); ++z) {
    pmw_weights_[z] *= std::exp(direction * rate * q(z));
    largest = std::max(largest, pmw_weights_[z]);
  }
  for (double& w : pmw_weights_) w /= largest;
  ++pmw_updates_;
  pmw_threshold_noise_ = SampleLaplace(rng_, 2.0 * b);
  return noisy;
}

absl::StatusOr<double> ConfiguredMechanism::AnswerLowSensitivity(
    const LowSensitivityQuery& q) {
  if (const StatisticalQuery* sq = q.lifted();
      sq != nullptr &&
      std::abs(q.sensitivity() * static_cast<double>(sample_.size()) - 1.0) <
          1e-9) {
    ASSIGN_OR_RETURN(const double a, AnswerStatistical(*sq));
    return q.negated() ? -a : a;
  }
  RETURN_IF_ERROR(CheckBudget());
  if (config_.kind == MechanismKind::kPmw ||
      config_.kind == MechanismKind::kExpMechMin) {
    return absl::UnimplementedError(absl::StrFormat(
        "%s does not answer general low-sensitivity queries", tag()));
  }
  ASSIGN_OR_RETURN(const double exact, q.Evaluate(sample_));
  const double answer = AddNoise(exact);
  ++answered_;
  return Truncate(answer, exact, q.sensitivity());
}

std::vector<double> ExpMechProbabilities(std::span<const double> losses,
                                         double eta) {
  std::vector<double> probs(losses.size());
  if (losses.empty()) return probs;
  double best = std::numeric_limits<double>::infinity();
  for (double l : losses) best = std::min(best, l);
  double total = 0;
  for (std::size_t t = 0; t < losses.size(); ++t) {
    probs[t] = std::exp(-eta * (losses[t] - best));
    total += probs[t];
  }
  for (double& p : probs) p /= total;
  return probs;
}

absl::StatusOr<std::size_t> ConfiguredMechanism::AnswerMinimization(
    const MinimizationQuery& l) {
  RETURN_IF_ERROR(CheckBudget());
  std::size_t theta = 0;
  if (config_.kind == MechanismKind::kEmpirical) {
    ASSIGN_OR_RETURN(theta, ArgminTheta(l, sample_));
  } else if (config_.kind == MechanismKind::kExpMechMin) {
    ASSIGN_OR_RETURN(const std::vector<double> losses, l.EvaluateAll(sample_));
    const std::vector<double> probs =
        ExpMechProbabilities(losses, config_.expmech_eta);
    const double u = Uniform01(rng_);
    double cumulative = 0;
    theta = probs.size() - 1;
    for (std::size_t t = 0; t < probs.size(); ++t) {
      cumulative += probs[t];
      if (u < cumulative) {
        theta = t;
        break;
      }
    }
  } else {
    return absl::UnimplementedError(
        absl::StrFormat("%s does not answer minimization queries", tag()));
  }
  ++answered_;
  return theta;
}

absl::StatusOr<std::unique_ptr<Mechanism>> CreateMechanism(
    const MechanismConfig& config, Sample sample, uint64_t seed) {
  ASSIGN_OR_RETURN(std::unique_ptr<ConfiguredMechanism> m,
                   ConfiguredMechanism::Create(config, std::move(sample), seed));
  return std::unique_ptr<Mechanism>(std::move(m));
}

MechanismFactory MakeMechanismFactory(const MechanismConfig& config) {
  return [config](Sample sample, uint64_t seed) {
    return CreateMechanism(config, std::move(sample), seed);
  };
}

StabilityBudget ClaimedBudget(const MechanismConfig& config, double sensitivity,
                              std::size_t n, std::size_t k,
                              const ClaimOptions& options) {
  (void)n;
  StabilityBudget per_round;
  std::size_t rounds = k;
  switch (config.kind) {
    case MechanismKind::kEmpirical:
      return StabilityBudget::None();
    case MechanismKind::kLaplace:
      if (config.noise_scale <= 0) return StabilityBudget::None();
      per_round = {sensitivity / config.noise_scale, 0.0};
      break;
    case MechanismKind::kGaussian:
      if (config.noise_scale <= 0) return StabilityBudget::None();
      // sigma = Delta * sqrt(2 ln(1.25 / delta0)) / eps0, solved for eps0.
      per_round = {sensitivity *
                       std::sqrt(2.0 * std::log(1.25 / options.gaussian_delta0)) /
                       config.noise_scale,
                   options.gaussian_delta0};
      break;
    case MechanismKind::kExpMechMin:
      per_round = {2.0 * config.expmech_eta * sensitivity, 0.0};
      break;
    case MechanismKind::kPmw:
      if (config.noise_scale <= 0) return StabilityBudget::None();
      // Answer noise b costs Delta/b; threshold noise 2b with gap noise 4b
      // costs another Delta/b. Only update rounds consume budget.
      per_round = {2.0 * sensitivity / config.noise_scale, 0.0};
      rounds = std::min(k, config.pmw_params.failure_budget);
      break;
  }
  if (rounds <= 1) return per_round;
  if (per_round.epsilon <= 1.0) {
    absl::StatusOr<StabilityBudget> composed = ComposeAdvanced(
        per_round.epsilon, per_round.delta, rounds, options.delta_prime);
    if (composed.ok()) return *composed;
  }
  return ComposeBasic(per_round, rounds);
}

}  // namespace asl
