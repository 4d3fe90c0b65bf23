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

#ifndef ASL_CORE_QUERIES_H_
#define ASL_CORE_QUERIES_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "asl/core/universe.h"

namespace asl {

// A statistical query q : X -> [0,1], stored as a table over the universe.
// Copies share the (immutable) table.
class StatisticalQuery {
 public:
  static absl::StatusOr<StatisticalQuery> Create(std::vector<double> table);
  static StatisticalQuery Constant(std::size_t universe_size, double value);

  std::size_t universe_size() const { return table_->size(); }
  std::span<const double> table() const { return *table_; }
  double operator()(Element z) const { return (*table_)[z]; }

 private:
  explicit StatisticalQuery(std::shared_ptr<const std::vector<double>> table)
      : table_(std::move(table)) {}

  std::shared_ptr<const std::vector<double>> table_;
};

// q(x) = (1/n) sum_i q(x_i).
absl::StatusOr<double> EvalSample(const StatisticalQuery& q, const Sample& x);
// q(P) = E_{z ~ P}[q(z)], computed exactly.
absl::StatusOr<double> EvalPopulation(const StatisticalQuery& q,
                                      const Distribution& p);

// A Monte Carlo estimate with a 95% normal-approximation half-width.
struct Estimate {
  double value = 0;
  double ci_halfwidth = 0;
};

// A Delta-sensitive query q : X^n -> R. The sensitivity is declared by the
// caller and checked probabilistically by ValidateSensitivity. The family is
// closed under negation.
class LowSensitivityQuery {
 public:
  using Evaluator = std::function<double(const Sample&)>;

  static absl::StatusOr<LowSensitivityQuery> Create(Evaluator evaluator,
                                                    double sensitivity);
  // A statistical query viewed as a 1/n-sensitive query on samples of size n.
  // Population values of lifted queries are computed exactly.
  static LowSensitivityQuery Lift(StatisticalQuery q, std::size_t n);

  // Fails on domain mismatch (lifted queries) or a non-finite value.
  absl::StatusOr<double> Evaluate(const Sample& x) const;
  LowSensitivityQuery Negated() const;

  double sensitivity() const { return sensitivity_; }
  bool negated() const { return negated_; }
  // The underlying statistical query, if this query was lifted from one.
  const StatisticalQuery* lifted() const {
    return lifted_ ? &*lifted_ : nullptr;
  }

 private:
  LowSensitivityQuery() = default;

  Evaluator evaluator_;
  std::shared_ptr<const StatisticalQuery> lifted_;
  double sensitivity_ = 0;
  bool negated_ = false;
};

// q(P) = E_{z ~ P^n}[q(z)]. Exact (ci_halfwidth = 0) for lifted statistical
// queries; otherwise a Monte Carlo average over `trials` fresh samples.
absl::StatusOr<Estimate> EstimatePopulation(const LowSensitivityQuery& q,
                                            const Distribution& p,
                                            std::size_t n, std::size_t trials,
                                            uint64_t seed);

// A minimization query over a finite parameter set Theta (|Theta| = D >= 1).
// L(x; theta) is Delta-sensitive in x for every theta and lies in [0, C].
class MinimizationQuery {
 public:
  using Loss = std::function<double(const Sample&, std::size_t)>;

  static absl::StatusOr<MinimizationQuery> Create(
      std::vector<std::string> theta_labels, Loss loss, double sensitivity,
      double loss_bound);

  std::size_t theta_count() const { return theta_labels_->size(); }
  const std::string& theta_label(std::size_t theta) const {
    return (*theta_labels_)[theta];
  }
  double sensitivity() const { return sensitivity_; }
  double loss_bound() const { return loss_bound_; }

  // Fails if theta is out of range or the loss is not finite.
  absl::StatusOr<double> Evaluate(const Sample& x, std::size_t theta) const;
  absl::StatusOr<std::vector<double>> EvaluateAll(const Sample& x) const;

 private:
  MinimizationQuery() = default;

  std::shared_ptr<const std::vector<std::string>> theta_labels_;
  Loss loss_;
  double sensitivity_ = 0;
  double loss_bound_ = 0;
};

// Lowest-index minimizer of L(x; .).
absl::StatusOr<std::size_t> ArgminTheta(const MinimizationQuery& l,
                                        const Sample& x);

// Signed errors, err_x(q, a) = a - q(x) and err_P(q, a) = a - q(P).
absl::StatusOr<double> SampleError(const StatisticalQuery& q, double answer,
                                   const Sample& x);
absl::StatusOr<double> PopulationError(const StatisticalQuery& q,
                                       double answer, const Distribution& p);
absl::StatusOr<double> SampleError(const LowSensitivityQuery& q, double answer,
                                   const Sample& x);
absl::StatusOr<Estimate> PopulationError(const LowSensitivityQuery& q,
                                         double answer, const Distribution& p,
                                         std::size_t n, std::size_t trials,
                                         uint64_t seed);
// err_x(L, theta) = L(x; theta) - min_theta* L(x; theta*), always >= 0.
absl::StatusOr<double> SampleError(const MinimizationQuery& l,
                                   std::size_t theta, const Sample& x);
// E_{z ~ P^n}[err_z(L, theta)], by Monte Carlo.
absl::StatusOr<Estimate> PopulationError(const MinimizationQuery& l,
                                         std::size_t theta,
                                         const Distribution& p, std::size_t n,
                                         std::size_t trials, uint64_t seed);

// Checks |q(x) - q(x')| <= Delta + 1e-12 on `pairs` random neighbor pairs
// (x ~ P^n, x' = x_{i -> z} with i and z uniform). This is a probabilistic
// check: passing it does not prove the declared sensitivity.
absl::Status ValidateSensitivity(const LowSensitivityQuery& q,
                                 const Distribution& p, std::size_t n,
                                 std::size_t pairs, uint64_t seed);
// Same check for every theta of a minimization query.
absl::Status ValidateSensitivity(const MinimizationQuery& l,
                                 const Distribution& p, std::size_t n,
                                 std::size_t pairs, uint64_t seed);

using Query =
    std::variant<StatisticalQuery, LowSensitivityQuery, MinimizationQuery>;
// A real-valued answer, or a theta index for minimization queries.
using Answer = std::variant<double, std::size_t>;

}  // namespace asl

#endif  // ASL_CORE_QUERIES_H_
