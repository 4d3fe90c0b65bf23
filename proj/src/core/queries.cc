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

#include "asl/core/queries.h"

#include <algorithm>
#include <cmath>

#include "absl/strings/str_format.h"
#include "asl/stats.h"
#include "asl/status_macros.h"

namespace asl {
namespace {

constexpr double kSensitivitySlack = 1e-12;

absl::Status CheckDomain(std::size_t query_universe, const Sample& x) {
  if (x.universe_size() != query_universe) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "domain mismatch: query over %d elements, sample over %d",
        query_universe, x.universe_size()));
  }
  return absl::OkStatus();
}

}  // namespace

absl::StatusOr<StatisticalQuery> StatisticalQuery::Create(
    std::vector<double> table) {
  if (table.empty()) {
    return absl::InvalidArgumentError("statistical query table is empty");
  }
  for (double v : table) {
    if (!(v >= 0.0 && v <= 1.0)) {
      return absl::InvalidArgumentError(
          absl::StrFormat("statistical query value %g outside [0,1]", v));
    }
  }
  return StatisticalQuery(
      std::make_shared<const std::vector<double>>(std::move(table)));
}

StatisticalQuery StatisticalQuery::Constant(std::size_t universe_size,
                                            double value) {
  return StatisticalQuery(std::make_shared<const std::vector<double>>(
      universe_size, std::clamp(value, 0.0, 1.0)));
}

absl::StatusOr<double> EvalSample(const StatisticalQuery& q, const Sample& x) {
  RETURN_IF_ERROR(CheckDomain(q.universe_size(), x));
  double sum = 0;
  for (Element z : x.elements()) sum += q(z);
  return sum / static_cast<double>(x.size());
}

absl::StatusOr<double> EvalPopulation(const StatisticalQuery& q,
                                      const Distribution& p) {
  if (p.size() != q.universe_size()) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "universe mismatch: query over %d elements, distribution over %d",
        q.universe_size(), p.size()));
  }
  double sum = 0;
  const auto pmf = p.pmf();
  const auto table = q.table();
  for (std::size_t z = 0; z < pmf.size(); ++z) sum += pmf[z] * table[z];
  return sum;
}

absl::StatusOr<LowSensitivityQuery> LowSensitivityQuery::Create(
    Evaluator evaluator, double sensitivity) {
  if (!evaluator) {
    return absl::InvalidArgumentError("low-sensitivity query has no evaluator");
  }
  if (!(sensitivity >= 0) || !std::isfinite(sensitivity)) {
    return absl::InvalidArgumentError("sensitivity must be finite and >= 0");
  }
  LowSensitivityQuery q;
  q.evaluator_ = std::move(evaluator);
  q.sensitivity_ = sensitivity;
  return q;
}

LowSensitivityQuery LowSensitivityQuery::Lift(StatisticalQuery sq,
                                              std::size_t n) {
  LowSensitivityQuery q;
  q.lifted_ = std::make_shared<const StatisticalQuery>(std::move(sq));
  q.sensitivity_ = 1.0 / static_cast<double>(n);
  return q;
}

absl::StatusOr<double> LowSensitivityQuery::Evaluate(const Sample& x) const {
  double value = 0;
  if (lifted_ != nullptr) {
    ASSIGN_OR_RETURN(value, EvalSample(*lifted_, x));
  } else {
    value = evaluator_(x);
    if (!std::isfinite(value)) {
      return absl::InvalidArgumentError("query evaluator returned a non-finite value");
    }
  }
  return negated_ ? -value : value;
}

LowSensitivityQuery LowSensitivityQuery::Negated() const {
  LowSensitivityQuery q = *this;
  q.negated_ = !negated_;
  return q;
}

absl::StatusOr<Estimate> EstimatePopulation(const LowSensitivityQuery& q,
                                            const Distribution& p,
                                            std::size_t n, std::size_t trials,
                                            uint64_t seed) {
  if (const StatisticalQuery* sq = q.lifted(); sq != nullptr) {
    ASSIGN_OR_RETURN(double value, EvalPopulation(*sq, p));
    return Estimate{q.negated() ? -value : value, 0.0};
  }
  if (trials < 2) {
    return absl::InvalidArgumentError("Monte Carlo estimate needs >= 2 trials");
  }
  if (n == 0) return absl::InvalidArgumentError("sample size must be >= 1");
  Rng rng(seed);
  std::vector<double> values(trials);
  for (auto& v : values) {
    const Sample z = p.Draw(n, rng);
    ASSIGN_OR_RETURN(v, q.Evaluate(z));
  }
  const MeanCi m = MeanWithCi(values);
  return Estimate{m.mean, m.ci_halfwidth};
}

absl::StatusOr<MinimizationQuery> MinimizationQuery::Create(
    std::vector<std::string> theta_labels, Loss loss, double sensitivity,
    double loss_bound) {
  if (theta_labels.empty()) {
    return absl::InvalidArgumentError("parameter set must be nonempty");
  }
  if (!loss) return absl::InvalidArgumentError("minimization query has no loss");
  if (!(sensitivity >= 0) || !std::isfinite(sensitivity)) {
    return absl::InvalidArgumentError("sensitivity must be finite and >= 0");
  }
  if (!(loss_bound >= 0)) {
    return absl::InvalidArgumentError("loss bound must be >= 0");
  }
  MinimizationQuery l;
  l.theta_labels_ =
      std::make_shared<const std::vector<std::string>>(std::move(theta_labels));
  l.loss_ = std::move(loss);
  l.sensitivity_ = sensitivity;
  l.loss_bound_ = loss_bound;
  return l;
}

absl::StatusOr<double> MinimizationQuery::Evaluate(const Sample& x,
                                                   std::size_t theta) const {
  if (theta >= theta_count()) {
    return absl::OutOfRangeError(absl::StrFormat(
        "theta index %d out of range (|Theta| = %d)", theta, theta_count()));
  }
  const double value = loss_(x, theta);
  if (!std::isfinite(value)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("loss for theta '%s' is not finite", theta_label(theta)));
  }
  return value;
}

absl::StatusOr<std::vector<double>> MinimizationQuery::EvaluateAll(
    const Sample& x) const {
  std::vector<double> losses(theta_count());
  for (std::size_t t = 0; t < losses.size(); ++t) {
    ASSIGN_OR_RETURN(losses[t], Evaluate(x, t));
  }
  return losses;
}

absl::StatusOr<std::size_t> ArgminTheta(const MinimizationQuery& l,
                                        const Sample& x) {
  ASSIGN_OR_RETURN(const std::vector<double> losses, l.EvaluateAll(x));
  // min_element returns the first minimum, i.e. the lowest index on ties.
  return static_cast<std::size_t>(std::distance(
      losses.begin(), std::min_element(losses.begin(), losses.end())));
}

absl::StatusOr<double> SampleError(const StatisticalQuery& q, double answer,
                                   const Sample& x) {
  ASSIGN_OR_RETURN(const double value, EvalSample(q, x));
  return answer - value;
}

absl::StatusOr<double> PopulationError(const StatisticalQuery& q,
                                       double answer, const Distribution& p) {
  ASSIGN_OR_RETURN(const double value, EvalPopulation(q, p));
  return answer - value;
}

absl::StatusOr<double> SampleError(const LowSensitivityQuery& q, double answer,
                                   const Sample& x) {
  ASSIGN_OR_RETURN(const double value, q.Evaluate(x));
  return answer - value;
}

absl::StatusOr<Estimate> PopulationError(const LowSensitivityQuery& q,
                                         double answer, const Distribution& p,
                                         std::size_t n, std::size_t trials,
                                         uint64_t seed) {
  ASSIGN_OR_RETURN(const Estimate value,
                   EstimatePopulation(q, p, n, trials, seed));
  return Estimate{answer - value.value, value.ci_halfwidth};
}

absl::StatusOr<double> SampleError(const MinimizationQuery& l,
                                   std::size_t theta, const Sample& x) {
  ASSIGN_OR_RETURN(const std::vector<double> losses, l.EvaluateAll(x));
  if (theta >= losses.size()) {
    return absl::OutOfRangeError("theta index out of range");
  }
  return losses[theta] - *std::min_element(losses.begin(), losses.end());
}

absl::StatusOr<Estimate> PopulationError(const MinimizationQuery& l,
                                         std::size_t theta,
                                         const Distribution& p, std::size_t n,
                                         std::size_t trials, uint64_t seed) {
  if (trials < 2) {
    return absl::InvalidArgumentError("Monte Carlo estimate needs >= 2 trials");
  }
  if (n == 0) return absl::InvalidArgumentError("sample size must be >= 1");
  Rng rng(seed);
  std::vector<double> values(trials);
  for (auto& v : values) {
    const Sample z = p.Draw(n, rng);
    ASSIGN_OR_RETURN(v, SampleError(l, theta, z));
  }
  const MeanCi m = MeanWithCi(values);
  return Estimate{m.mean, m.ci_halfwidth};
}

namespace {

template <typename Fn>
absl::Status CheckNeighborPairs(const Distribution& p, std::size_t n,
                                std::size_t pairs, uint64_t seed,
                                double sensitivity, Fn&& difference) {
  if (n == 0) return absl::InvalidArgumentError("sample size must be >= 1");
  Rng rng(seed);
  std::uniform_int_distribution<std::size_t> pick_index(0, n - 1);
  std::uniform_int_distribution<Element> pick_element(0, p.size() - 1);
  for (std::size_t k = 0; k < pairs; ++k) {
    const Sample x = p.Draw(n, rng);
    const std::size_t i = pick_index(rng);
    ASSIGN_OR_RETURN(const Sample neighbor,
                     ReplaceElement(x, i, pick_element(rng)));
    ASSIGN_OR_RETURN(const double gap, difference(x, neighbor));
    if (gap > sensitivity + kSensitivitySlack) {
      return absl::FailedPreconditionError(absl::StrFormat(
          "declared sensitivity %g violated: neighbor gap %.17g", sensitivity,
          gap));
    }
  }
  return absl::OkStatus();
}

}  // namespace

absl::Status ValidateSensitivity(const LowSensitivityQuery& q,
                                 const Distribution& p, std::size_t n,
                                 std::size_t pairs, uint64_t seed) {
  return CheckNeighborPairs(
      p, n, pairs, seed, q.sensitivity(),
      [&q](const Sample& a, const Sample& b) -> absl::StatusOr<double> {
        ASSIGN_OR_RETURN(const double qa, q.Evaluate(a));
        ASSIGN_OR_RETURN(const double qb, q.Evaluate(b));
        return std::abs(qa - qb);
      });
}

absl::Status ValidateSensitivity(const MinimizationQuery& l,
                                 const Distribution& p, std::size_t n,
                                 std::size_t pairs, uint64_t seed) {
  return CheckNeighborPairs(
      p, n, pairs, seed, l.sensitivity(),
      [&l](const Sample& a, const Sample& b) -> absl::StatusOr<double> {
        ASSIGN_OR_RETURN(const std::vector<double> la, l.EvaluateAll(a));
        ASSIGN_OR_RETURN(const std::vector<double> lb, l.EvaluateAll(b));
        double worst = 0;
        for (std::size_t t = 0; t < la.size(); ++t) {
          worst = std::max(worst, std::abs(la[t] - lb[t]));
        }
        return worst;
      });
}

}  // namespace asl
