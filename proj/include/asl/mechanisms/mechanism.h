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

#ifndef ASL_MECHANISMS_MECHANISM_H_
#define ASL_MECHANISMS_MECHANISM_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "asl/core/queries.h"
#include "asl/core/universe.h"
#include "asl/mechanisms/config.h"
#include "asl/random.h"
#include "asl/stability/budget.h"

namespace asl {

// An interactive mechanism M(x). It is handed the sample once, at
// construction, and afterwards sees only queries; it never sees the
// population. Refusals (answer budget exhausted) are reported as
// absl::StatusCode::kResourceExhausted.
class Mechanism {
 public:
  virtual ~Mechanism() = default;

  virtual absl::StatusOr<double> AnswerStatistical(const StatisticalQuery& q) = 0;
  virtual absl::StatusOr<double> AnswerLowSensitivity(
      const LowSensitivityQuery& q);
  virtual absl::StatusOr<std::size_t> AnswerMinimization(
      const MinimizationQuery& l);

  virtual std::size_t answered() const = 0;
  virtual std::string tag() const = 0;
};

using MechanismFactory =
    std::function<absl::StatusOr<std::unique_ptr<Mechanism>>(Sample, uint64_t)>;

// The configurable mechanism family: empirical, Laplace, Gaussian, private
// multiplicative weights, and the exponential mechanism for finite
// minimization queries.
class ConfiguredMechanism final : public Mechanism {
 public:
  static absl::StatusOr<std::unique_ptr<ConfiguredMechanism>> Create(
      const MechanismConfig& config, Sample sample, uint64_t seed);

  absl::StatusOr<double> AnswerStatistical(const StatisticalQuery& q) override;
  absl::StatusOr<double> AnswerLowSensitivity(
      const LowSensitivityQuery& q) override;
  // Samples theta with probability proportional to exp(-eta L(x; theta)).
  // The empirical kind returns the lowest-index argmin.
  absl::StatusOr<std::size_t> AnswerMinimization(
      const MinimizationQuery& l) override;

  std::size_t answered() const override { return answered_; }
  std::string tag() const override;

  const MechanismConfig& config() const { return config_; }
  std::size_t pmw_updates() const { return pmw_updates_; }
  std::span<const double> pmw_weights() const { return pmw_weights_; }

 private:
  ConfiguredMechanism(const MechanismConfig& config, Sample sample,
                      uint64_t seed);

  absl::Status CheckBudget() const;
  double AddNoise(double value);
  double Truncate(double answer, double exact, double sensitivity) const;
  absl::StatusOr<double> AnswerPmw(const StatisticalQuery& q, double exact);

  MechanismConfig config_;
  Sample sample_;
  Rng rng_;
  std::size_t answered_ = 0;

  std::vector<double> pmw_weights_;
  std::size_t pmw_updates_ = 0;
  double pmw_threshold_noise_ = 0;
};

absl::StatusOr<std::unique_ptr<Mechanism>> CreateMechanism(
    const MechanismConfig& config, Sample sample, uint64_t seed);
MechanismFactory MakeMechanismFactory(const MechanismConfig& config);

// Exact selection probabilities of the exponential mechanism,
// Pr[theta] proportional to exp(-eta * losses[theta]).
std::vector<double> ExpMechProbabilities(std::span<const double> losses,
                                         double eta);

struct ClaimOptions {
  double delta_prime = 1e-6;      // slack of advanced composition
  double gaussian_delta0 = 1e-6;  // per-query delta of the Gaussian bound
};

// The (epsilon, delta) this configuration guarantees over k queries of
// sensitivity `sensitivity` on samples of size n. A single query gets the
// per-query budget; k > 1 queries use advanced composition (basic
// composition when the per-query epsilon exceeds 1). Configurations without
// noise get StabilityBudget::None().
StabilityBudget ClaimedBudget(const MechanismConfig& config, double sensitivity,
                              std::size_t n, std::size_t k,
                              const ClaimOptions& options = {});

}  // namespace asl

#endif  // ASL_MECHANISMS_MECHANISM_H_
