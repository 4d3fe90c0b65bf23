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

#include "asl/cli/runner.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <memory>
#include <utility>

#include "absl/strings/str_format.h"
#include "asl/analysts/analyst.h"
#include "asl/core/json_io.h"
#include "asl/core/universe.h"
#include "asl/harness/games.h"
#include "asl/harness/lemmas.h"
#include "asl/harness/parallel.h"
#include "asl/harness/report_json.h"
#include "asl/harness/selectors.h"
#include "asl/stats.h"
#include "asl/mechanisms/config.h"
#include "asl/mechanisms/mechanism.h"
#include "asl/random.h"
#include "asl/stability/budget.h"
#include "asl/stability/planner.h"
#include "asl/status_macros.h"

namespace asl {
namespace {

using nlohmann::json;

// Stream reserved for drawing fixed query menus, far from the trial indices.
constexpr uint64_t kMenuStream = 0x6d656e75ULL << 32;

struct ExperimentEntry {
  Experiment experiment;
  const char* name;
  const char* command;
  std::size_t default_trials;
};

constexpr ExperimentEntry kExperiments[] = {
    {Experiment::kGame, "game", "game", 100},
    {Experiment::kAttackDemo, "attack_demo", "attack-demo", 100},
    {Experiment::kMonitor, "monitor", "monitor", 1000},
    {Experiment::kLemmaSq, "lemma_sq", "verify-lemma sq", 10000},
    {Experiment::kLemmaLowSens, "lemma_lowsens", "verify-lemma lowsens", 10000},
    {Experiment::kLemmaTv, "lemma_tv", "verify-lemma tv", 10000},
    {Experiment::kEmUtility, "em_utility", "em-utility", 1000},
    {Experiment::kLowerBound, "lower_bound", "lower-bound", 10000},
    {Experiment::kGeneralization, "generalization", "generalization", 10000},
    {Experiment::kPlan, "plan", "plan", 1},
};

// Parsed documents hold unsigned integers; documents built in code may hold
// signed ones.
bool IsCount(const json& v) {
  return v.is_number_unsigned() ||
         (v.is_number_integer() && v.get<int64_t>() >= 0);
}

const ExperimentEntry& Entry(Experiment experiment) {
  for (const auto& e : kExperiments) {
    if (e.experiment == experiment) return e;
  }
  return kExperiments[0];
}

// Typed, validated access to an experiment's "params" object.
class Params {
 public:
  explicit Params(const json& doc) : doc_(doc) {}

  bool has(const char* key) const { return doc_.contains(key); }
  const json& at(const char* key) const { return doc_.at(key); }

  absl::StatusOr<double> Number(const char* key) const {
    if (!has(key)) return Missing(key);
    if (!doc_[key].is_number()) return Wrong(key, "a number");
    const double v = doc_[key].get<double>();
    if (!std::isfinite(v)) return Wrong(key, "finite");
    return v;
  }
  absl::StatusOr<double> Number(const char* key, double fallback) const {
    return has(key) ? Number(key) : fallback;
  }
  absl::StatusOr<std::size_t> Count(const char* key) const {
    if (!has(key)) return Missing(key);
    if (!IsCount(doc_[key])) return Wrong(key, "a nonnegative integer");
    return doc_[key].get<std::size_t>();
  }
  absl::StatusOr<std::size_t> Count(const char* key,
                                    std::size_t fallback) const {
    return has(key) ? Count(key) : fallback;
  }
  absl::StatusOr<std::string> String(const char* key,
                                     std::string fallback) const {
    if (!has(key)) return fallback;
    if (!doc_[key].is_string()) return Wrong(key, "a string");
    return doc_[key].get<std::string>();
  }

 private:
  static absl::Status Missing(const char* key) {
    return absl::InvalidArgumentError(
        absl::StrFormat("missing required param '%s'", key));
  }
  static absl::Status Wrong(const char* key, const char* what) {
    return absl::InvalidArgumentError(
        absl::StrFormat("param '%s' must be %s", key, what));
  }

  const json& doc_;
};

absl::Status Require(bool condition, const std::string& message) {
  return condition ? absl::OkStatus() : absl::InvalidArgumentError(message);
}

json Number(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

void AddRow(ExperimentOutcome& outcome, std::string trial, std::string metric,
            double value) {
  outcome.rows.push_back({std::move(trial), std::move(metric), value});
}

void AddMetric(ExperimentOutcome& outcome, const std::string& name,
               double value) {
  outcome.metrics[name] = Number(value);
  AddRow(outcome, "all", name, value);
}

void AddVerdict(ExperimentOutcome& outcome, std::string name, bool holds,
                bool expected_to_hold, json detail) {
  outcome.verdicts.push_back(
      {std::move(name), holds, expected_to_hold, std::move(detail)});
}

absl::StatusOr<bool> ExpectHold(const Params& params) {
  ASSIGN_OR_RETURN(const std::string expect, params.String("expect", "hold"));
  if (expect == "hold") return true;
  if (expect == "violate") return false;
  return absl::InvalidArgumentError("param 'expect' must be hold or violate");
}

absl::StatusOr<Distribution> PopulationFromParams(const Params& params) {
  if (params.has("population")) {
    return DistributionFromJson(params.at("population"));
  }
  ASSIGN_OR_RETURN(const std::size_t size, params.Count("universe_size"));
  ASSIGN_OR_RETURN(Universe u, Universe::Indexed(size));
  return Distribution::Uniform(std::make_shared<const Universe>(std::move(u)));
}

template <typename T>
absl::StatusOr<std::vector<T>> Collect(
    std::vector<absl::StatusOr<T>> results) {
  std::vector<T> values;
  values.reserve(results.size());
  for (auto& r : results) {
    RETURN_IF_ERROR(r.status());
    values.push_back(std::move(*r));
  }
  return values;
}

std::vector<double> Abs(std::vector<double> v) {
  for (double& x : v) x = std::abs(x);
  return v;
}

// ---------------------------------------------------------------- game

absl::StatusOr<ExperimentOutcome> RunGameExperiment(
    const ExperimentConfig& config) {
  const Params params(config.params);
  ASSIGN_OR_RETURN(const Distribution p, PopulationFromParams(params));
  ASSIGN_OR_RETURN(const std::size_t n, params.Count("n"));
  RETURN_IF_ERROR(Require(n >= 1, "param 'n' must be >= 1"));

  AnalystKind kind = AnalystKind::kRandomNonadaptive;
  AttackParams attack;
  if (params.has("analyst")) {
    const json& a = params.at("analyst");
    RETURN_IF_ERROR(Require(a.is_object() && a.contains("kind") &&
                                a["kind"].is_string(),
                            "param 'analyst' needs a string 'kind'"));
    ASSIGN_OR_RETURN(kind, ParseAnalystKind(a["kind"].get<std::string>()));
    if (kind == AnalystKind::kOverfitAttack) {
      ASSIGN_OR_RETURN(attack, AttackParamsFromJson(a));
    }
  }
  const std::size_t default_k =
      kind == AnalystKind::kOverfitAttack ? attack.k_probe + 1 : 0;
  ASSIGN_OR_RETURN(const std::size_t k,
                   default_k > 0 ? params.Count("k", default_k)
                                 : params.Count("k"));
  RETURN_IF_ERROR(Require(k >= 1, "param 'k' must be >= 1"));

  RETURN_IF_ERROR(Require(params.has("mechanism"), "missing required param 'mechanism'"));
  json mechanism_doc = params.at("mechanism");
  if (mechanism_doc.is_object() && !mechanism_doc.contains("k_max")) {
    mechanism_doc["k_max"] = k;
  }
  ASSIGN_OR_RETURN(const MechanismConfig mechanism,
                   MechanismConfigFromJson(mechanism_doc));
  ASSIGN_OR_RETURN(const AnalystFactory analysts,
                   MakeAnalystFactory(kind, p, k, attack));
  const MechanismFactory factory = MakeMechanismFactory(mechanism);

  auto results = RunTrials(config.trials, [&](std::size_t trial)
                               -> absl::StatusOr<GameResult> {
    const uint64_t trial_seed = DeriveSeed(config.seed, trial);
    std::unique_ptr<Analyst> analyst =
        analysts(DeriveSeed(trial_seed, kAnalystStream));
    return RunAccuracyGame(p, n, k, factory, *analyst, trial_seed);
  });
  ASSIGN_OR_RETURN(const std::vector<GameResult> games,
                   Collect(std::move(results)));

  ExperimentOutcome outcome;
  std::vector<double> pop;
  std::vector<double> sample;
  std::size_t refused = 0;
  for (std::size_t t = 0; t < games.size(); ++t) {
    const std::string trial = std::to_string(t);
    AddRow(outcome, trial, "max_sample_err", games[t].max_sample_err);
    AddRow(outcome, trial, "max_pop_err", games[t].max_pop_err);
    AddRow(outcome, trial, "rounds",
           static_cast<double>(games[t].transcript.rounds()));
    pop.push_back(games[t].max_pop_err);
    sample.push_back(games[t].max_sample_err);
    refused += games[t].refused ? 1 : 0;
  }
  AddMetric(outcome, "mean_max_pop_err", MeanWithCi(pop).mean);
  AddMetric(outcome, "mean_max_sample_err", MeanWithCi(sample).mean);
  AddMetric(outcome, "refused_games", static_cast<double>(refused));
  outcome.report["claimed_budget"] =
      ToJson(ClaimedBudget(mechanism, 1.0 / static_cast<double>(n), n, k));
  if (!games.empty()) outcome.report["first_game"] = ToJson(games.front());

  if (params.has("pop_err_threshold")) {
    ASSIGN_OR_RETURN(const double threshold, params.Number("pop_err_threshold"));
    ASSIGN_OR_RETURN(const double needed, params.Number("success_fraction", 1.0));
    const std::size_t within = static_cast<std::size_t>(
        std::count_if(pop.begin(), pop.end(),
                      [&](double e) { return e <= threshold; }));
    const double fraction =
        games.empty() ? 0.0
                      : static_cast<double>(within) /
                            static_cast<double>(games.size());
    AddMetric(outcome, "fraction_within_threshold", fraction);
    AddVerdict(outcome, "max_pop_err_within_threshold", fraction >= needed,
               true,
               {{"fraction", fraction},
                {"required_fraction", needed},
                {"threshold", threshold}});
  }
  return outcome;
}

// ---------------------------------------------------------------- attack

struct AttackTrial {
  double empirical_err = 0;
  double empirical_gap = 0;
  double laplace_err = 0;
  double laplace_gap = 0;
  double baseline_err = 0;
};

absl::StatusOr<AttackTrial> PlayAttackTrial(const Distribution& p,
                                            std::size_t n,
                                            const AttackParams& attack,
                                            const MechanismFactory& empirical,
                                            const MechanismFactory& laplace,
                                            uint64_t trial_seed) {
  const std::size_t k = attack.k_probe + 1;
  const uint64_t analyst_seed = DeriveSeed(trial_seed, kAnalystStream);
  AttackTrial out;
  // The arms share the game seed, so they see the same sample and probes.
  for (int arm = 0; arm < 2; ++arm) {
    ASSIGN_OR_RETURN(auto analyst,
                     OverfitAttackAnalyst::Create(p, attack, analyst_seed));
    ASSIGN_OR_RETURN(const GameResult game,
                     RunAccuracyGame(p, n, k, arm == 0 ? empirical : laplace,
                                     *analyst, trial_seed));
    if (game.pop_errs.size() != k) {
      return absl::InternalError("attack game ended before the final query");
    }
    const double err = game.pop_errs.back();
    const double gap = err - game.sample_errs.back();  // q(x) - q(P)
    (arm == 0 ? out.empirical_err : out.laplace_err) = err;
    (arm == 0 ? out.empirical_gap : out.laplace_gap) = gap;
  }
  RandomNonadaptiveAnalyst baseline(p.size(), k, analyst_seed);
  ASSIGN_OR_RETURN(const GameResult game,
                   RunAccuracyGame(p, n, k, laplace, baseline, trial_seed));
  out.baseline_err = game.pop_errs.back();
  return out;
}

absl::StatusOr<ExperimentOutcome> RunAttackDemo(const ExperimentConfig& config) {
  const Params params(config.params);
  ASSIGN_OR_RETURN(const Distribution p, PopulationFromParams(params));
  ASSIGN_OR_RETURN(const std::size_t n, params.Count("n"));
  RETURN_IF_ERROR(Require(n >= 1, "param 'n' must be >= 1"));
  AttackParams attack;
  ASSIGN_OR_RETURN(attack.k_probe, params.Count("k_probe"));
  ASSIGN_OR_RETURN(attack.selection_fraction,
                   params.Number("selection_fraction", 0.5));
  RETURN_IF_ERROR(Require(
      attack.selection_fraction > 0 && attack.selection_fraction <= 1,
      "param 'selection_fraction' must lie in (0, 1]"));
  ASSIGN_OR_RETURN(const double success_threshold,
                   params.Number("success_threshold", 0.2));
  ASSIGN_OR_RETURN(const double success_fraction,
                   params.Number("success_fraction", 0.9));
  ASSIGN_OR_RETURN(const double median_ratio, params.Number("median_ratio", 0.5));
  ASSIGN_OR_RETURN(const double target_eps, params.Number("target_epsilon", 1.0));
  ASSIGN_OR_RETURN(const double target_delta,
                   params.Number("target_delta", 1e-6));
  ASSIGN_OR_RETURN(const StabilityBudget target,
                   StabilityBudget::Create(target_eps, target_delta));

  const std::size_t k = attack.k_probe + 1;
  ASSIGN_OR_RETURN(const StabilityBudget per_query, CalibratePerQuery(target, k));
  RETURN_IF_ERROR(Require(per_query.epsilon > 0,
                          "target budget leaves no per-query epsilon"));
  const double sensitivity = 1.0 / static_cast<double>(n);
  MechanismConfig empirical_config;
  empirical_config.kind = MechanismKind::kEmpirical;
  empirical_config.k_max = k;
  MechanismConfig laplace_config = empirical_config;
  laplace_config.kind = MechanismKind::kLaplace;
  laplace_config.noise_scale = sensitivity / per_query.epsilon;
  const MechanismFactory empirical = MakeMechanismFactory(empirical_config);
  const MechanismFactory laplace = MakeMechanismFactory(laplace_config);

  auto results = RunTrials(config.trials, [&](std::size_t trial) {
    return PlayAttackTrial(p, n, attack, empirical, laplace,
                           DeriveSeed(config.seed, trial));
  });
  ASSIGN_OR_RETURN(const std::vector<AttackTrial> trials,
                   Collect(std::move(results)));

  ExperimentOutcome outcome;
  std::vector<double> emp_err, emp_gap, lap_err, lap_gap, base_err;
  std::size_t successes = 0;
  for (std::size_t t = 0; t < trials.size(); ++t) {
    const AttackTrial& r = trials[t];
    const std::string trial = std::to_string(t);
    AddRow(outcome, trial, "empirical_final_pop_err", r.empirical_err);
    AddRow(outcome, trial, "laplace_final_pop_err", r.laplace_err);
    AddRow(outcome, trial, "baseline_final_pop_err", r.baseline_err);
    emp_err.push_back(r.empirical_err);
    emp_gap.push_back(r.empirical_gap);
    lap_err.push_back(r.laplace_err);
    lap_gap.push_back(r.laplace_gap);
    base_err.push_back(r.baseline_err);
    successes += r.empirical_err >= success_threshold ? 1 : 0;
  }
  const double success =
      trials.empty() ? 0.0
                     : static_cast<double>(successes) /
                           static_cast<double>(trials.size());
  const double emp_median = Median(Abs(emp_err));
  const double lap_median = Median(Abs(lap_err));
  const double ks = KolmogorovSmirnov(Abs(lap_err), Abs(base_err));
  const double ks_critical =
      KolmogorovSmirnovCritical01(trials.size(), trials.size());
  AddMetric(outcome, "per_query_epsilon", per_query.epsilon);
  AddMetric(outcome, "laplace_noise_scale", laplace_config.noise_scale);
  AddMetric(outcome, "empirical_success_fraction", success);
  AddMetric(outcome, "empirical_median_abs_pop_err", emp_median);
  AddMetric(outcome, "laplace_median_abs_pop_err", lap_median);
  AddMetric(outcome, "baseline_median_abs_pop_err", Median(Abs(base_err)));
  AddMetric(outcome, "ks_laplace_vs_baseline", ks);
  AddMetric(outcome, "ks_critical_01", ks_critical);
  // Diagnostics: how far the final query's sample value sits above its
  // population value, independently of the answer noise.
  AddMetric(outcome, "empirical_median_overfit_gap", Median(emp_gap));
  AddMetric(outcome, "laplace_median_overfit_gap", Median(lap_gap));

  AddVerdict(outcome, "empirical_attack_succeeds", success >= success_fraction,
             true,
             {{"fraction", success},
              {"required_fraction", success_fraction},
              {"threshold", success_threshold}});
  AddVerdict(outcome, "laplace_median_below_ratio_of_empirical",
             lap_median < median_ratio * emp_median, true,
             {{"laplace_median", lap_median},
              {"empirical_median", emp_median},
              {"ratio", median_ratio}});
  AddVerdict(outcome, "laplace_attack_matches_nonadaptive_baseline",
             ks <= ks_critical, true,
             {{"ks_statistic", ks}, {"critical_value_01", ks_critical}});
  return outcome;
}

// ---------------------------------------------------------------- monitor

absl::StatusOr<ExperimentOutcome> RunMonitorExperiment(
    const ExperimentConfig& config) {
  const Params params(config.params);
  ASSIGN_OR_RETURN(const Distribution p, PopulationFromParams(params));
  ASSIGN_OR_RETURN(const std::size_t n, params.Count("n"));
  ASSIGN_OR_RETURN(const std::size_t T, params.Count("T"));
  ASSIGN_OR_RETURN(const std::size_t k, params.Count("k"));
  ASSIGN_OR_RETURN(const double alpha, params.Number("alpha"));
  RETURN_IF_ERROR(Require(n >= 1 && T >= 1 && k >= 1,
                          "params 'n', 'T' and 'k' must be >= 1"));

  MechanismFactory factory;
  std::optional<double> expected;
  if (params.has("mechanism")) {
    json doc = params.at("mechanism");
    if (doc.is_object() && !doc.contains("k_max")) doc["k_max"] = k;
    ASSIGN_OR_RETURN(const MechanismConfig mechanism,
                     MechanismConfigFromJson(doc));
    factory = MakeMechanismFactory(mechanism);
  } else {
    ASSIGN_OR_RETURN(const double beta, params.Number("fail_probability"));
    ASSIGN_OR_RETURN(const double offset, params.Number("offset"));
    RETURN_IF_ERROR(Require(beta >= 0 && beta <= 1,
                            "param 'fail_probability' must lie in [0, 1]"));
    factory = MakeFlakyFactory(beta, offset);
    expected = 1 - std::pow(1 - beta, static_cast<double>(T));
  }
  ASSIGN_OR_RETURN(const AnalystFactory analysts,
                   MakeAnalystFactory(AnalystKind::kRandomNonadaptive, p, k, {}));

  auto results = RunTrials(config.trials, [&](std::size_t trial) {
    return RunMonitor(p, n, T, k, factory, analysts,
                      DeriveSeed(config.seed, trial));
  });
  ASSIGN_OR_RETURN(const std::vector<MonitorOutput> outputs,
                   Collect(std::move(results)));

  ExperimentOutcome outcome;
  std::size_t detected = 0;
  std::size_t sign_violations = 0;
  for (std::size_t t = 0; t < outputs.size(); ++t) {
    const MonitorOutput& m = outputs[t];
    AddRow(outcome, std::to_string(t), "selected_pop_err", m.selected_pop_err);
    detected += m.selected_pop_err > alpha ? 1 : 0;
    sign_violations += m.selected_pop_err < 0 ? 1 : 0;
  }
  const MeanCi freq = ProportionWithCi(detected, outputs.size());
  AddMetric(outcome, "detection_frequency", freq.mean);
  AddMetric(outcome, "detection_ci_halfwidth", freq.ci_halfwidth);
  AddMetric(outcome, "sign_violations", static_cast<double>(sign_violations));
  if (!outputs.empty()) outcome.report["first_meta_trial"] = ToJson(outputs[0]);
  AddVerdict(outcome, "sign_convention", sign_violations == 0, true,
             {{"violations", sign_violations}});
  if (expected.has_value()) {
    ASSIGN_OR_RETURN(const double tolerance, params.Number("tolerance", 0.03));
    AddMetric(outcome, "expected_frequency", *expected);
    AddVerdict(outcome, "detection_matches_amplification",
               std::abs(freq.mean - *expected) <= tolerance, true,
               {{"frequency", freq.mean},
                {"expected", *expected},
                {"tolerance", tolerance}});
  }
  return outcome;
}

// ---------------------------------------------------------------- lemmas

absl::StatusOr<QueryMenu> BuildMenu(const Params& params, const Distribution& p,
                                    std::size_t n, bool statistical,
                                    uint64_t seed) {
  ASSIGN_OR_RETURN(const std::size_t size, params.Count("menu_size", 2));
  RETURN_IF_ERROR(Require(size >= 1, "param 'menu_size' must be >= 1"));
  const uint64_t menu_seed = DeriveSeed(seed, kMenuStream);
  if (statistical) {
    return QueryMenu::FromStatistical(RandomBinaryMenu(p.size(), size, menu_seed),
                                      p, n);
  }
  ASSIGN_OR_RETURN(const std::size_t population_trials,
                   params.Count("population_trials", 20000));
  RETURN_IF_ERROR(Require(population_trials >= 2,
                          "param 'population_trials' must be >= 2"));
  std::vector<StatisticalQuery> pool =
      RandomBinaryMenu(p.size(), 2 * size, menu_seed);
  std::vector<LowSensitivityQuery> queries;
  for (std::size_t i = 0; i < size; ++i) {
    queries.push_back(MaxOfTwoQuery(pool[2 * i], pool[2 * i + 1], n));
  }
  return QueryMenu::FromLowSensitivity(std::move(queries), p, n,
                                       population_trials,
                                       DeriveSeed(menu_seed, 1));
}

absl::StatusOr<ExperimentOutcome> RunLemmaExperiment(
    const ExperimentConfig& config) {
  const Params params(config.params);
  ASSIGN_OR_RETURN(const Distribution p, PopulationFromParams(params));
  ASSIGN_OR_RETURN(const std::size_t n, params.Count("n"));
  RETURN_IF_ERROR(Require(n >= 1, "param 'n' must be >= 1"));
  const bool tv = config.experiment == Experiment::kLemmaTv;
  ASSIGN_OR_RETURN(const std::size_t T,
                   tv ? absl::StatusOr<std::size_t>(1) : params.Count("T"));
  RETURN_IF_ERROR(Require(T >= 1, "param 'T' must be >= 1"));
  ASSIGN_OR_RETURN(const bool expect_hold, ExpectHold(params));
  RETURN_IF_ERROR(Require(params.has("selector"), "missing required param 'selector'"));

  ASSIGN_OR_RETURN(
      const QueryMenu menu,
      BuildMenu(params, p, n, config.experiment != Experiment::kLemmaLowSens,
                config.seed));
  ASSIGN_OR_RETURN(const std::unique_ptr<Selector> selector,
                   SelectorFromJson(params.at("selector"), menu));

  std::vector<double> gaps;
  LemmaVerdict verdict;
  json detail;
  if (tv) {
    ASSIGN_OR_RETURN(const double eps_tv,
                     params.Number("bound_epsilon", selector->TvParameter(menu)));
    ASSIGN_OR_RETURN(verdict, VerifyDecorrelatedTv(*selector, menu, p, eps_tv,
                                                   config.trials, config.seed,
                                                   &gaps));
    detail["eps_tv"] = eps_tv;
  } else {
    const StabilityBudget claimed = selector->Budget(menu);
    ASSIGN_OR_RETURN(const double eps,
                     params.Number("bound_epsilon", claimed.epsilon));
    ASSIGN_OR_RETURN(const double delta,
                     params.Number("bound_delta", claimed.delta));
    if (!std::isfinite(eps)) {
      return absl::InvalidArgumentError(
          "selector has no finite budget; set 'bound_epsilon'");
    }
    if (config.experiment == Experiment::kLemmaSq) {
      ASSIGN_OR_RETURN(verdict,
                       VerifyDecorrelatedSq(*selector, menu, p, T, eps, delta,
                                            config.trials, config.seed, &gaps));
    } else {
      ASSIGN_OR_RETURN(verdict, VerifyDecorrelatedLowSens(
                                    *selector, menu, p, T, eps, delta,
                                    config.trials, config.seed, &gaps));
    }
    detail["epsilon"] = eps;
    detail["delta"] = delta;
  }

  ExperimentOutcome outcome;
  for (std::size_t t = 0; t < gaps.size(); ++t) {
    AddRow(outcome, std::to_string(t), "pop_minus_sample", gaps[t]);
  }
  AddMetric(outcome, "estimate", verdict.estimate);
  AddMetric(outcome, "ci_halfwidth", verdict.ci_halfwidth);
  AddMetric(outcome, "bound", verdict.bound);
  detail.update(ToJson(verdict));
  detail["selector"] = selector->tag();
  AddVerdict(outcome, "decorrelated_expectation", verdict.holds_within_ci,
             expect_hold, detail);
  return outcome;
}

// ---------------------------------------------------------------- em utility

absl::StatusOr<ExperimentOutcome> RunEmUtility(const ExperimentConfig& config) {
  const Params params(config.params);
  ExperimentOutcome outcome;
  if (params.has("f")) {
    RETURN_IF_ERROR(Require(params.at("f").is_array(), "param 'f' must be an array"));
    std::vector<double> f;
    for (const json& v : params.at("f")) {
      RETURN_IF_ERROR(Require(v.is_number(), "param 'f' must hold numbers"));
      f.push_back(v.get<double>());
    }
    ASSIGN_OR_RETURN(const double eta, params.Number("eta"));
    ASSIGN_OR_RETURN(const LemmaVerdict v, VerifyEmUtility(f, eta));
    ASSIGN_OR_RETURN(const double expected, ExpectedUtility(f, eta));
    AddMetric(outcome, "expected_utility", expected);
    AddMetric(outcome, "shortfall", v.estimate);
    AddMetric(outcome, "bound", v.bound);
    AddVerdict(outcome, "em_utility", v.holds_within_ci, true, ToJson(v));
    return outcome;
  }
  ASSIGN_OR_RETURN(const std::size_t max_size, params.Count("max_size", 50));
  ASSIGN_OR_RETURN(const double f_abs, params.Number("f_abs", 10));
  ASSIGN_OR_RETURN(const double eta_min, params.Number("eta_min", 0.01));
  ASSIGN_OR_RETURN(const double eta_max, params.Number("eta_max", 100));
  ASSIGN_OR_RETURN(const EmSweepResult sweep,
                   EmUtilitySweep(config.trials, max_size, f_abs, eta_min,
                                  eta_max, config.seed));
  AddMetric(outcome, "instances", static_cast<double>(sweep.instances));
  AddMetric(outcome, "holds", static_cast<double>(sweep.holds));
  AddMetric(outcome, "min_slack", sweep.min_slack);
  AddVerdict(outcome, "em_utility_sweep", sweep.holds == sweep.instances, true,
             ToJson(sweep));
  return outcome;
}

// ---------------------------------------------------------------- lower bound

absl::StatusOr<ExperimentOutcome> RunLowerBound(const ExperimentConfig& config) {
  const Params params(config.params);
  ASSIGN_OR_RETURN(const double alpha, params.Number("alpha"));
  ASSIGN_OR_RETURN(const double delta, params.Number("delta"));
  ASSIGN_OR_RETURN(const std::size_t n, params.Count("n"));
  RETURN_IF_ERROR(Require(n >= 1, "param 'n' must be >= 1"));
  ASSIGN_OR_RETURN(const double sensitivity,
                   params.Number("sensitivity", 1.0 / static_cast<double>(n)));
  std::vector<double> hits;
  ASSIGN_OR_RETURN(const LowerBoundResult r,
                   RunLowerBoundDemo(alpha, delta, n, sensitivity,
                                     config.trials, config.seed, &hits));
  ExperimentOutcome outcome;
  for (std::size_t t = 0; t < hits.size(); ++t) {
    AddRow(outcome, std::to_string(t), "overfit", hits[t]);
  }
  AddMetric(outcome, "frequency", r.frequency);
  AddMetric(outcome, "ci_halfwidth", r.ci_halfwidth);
  AddMetric(outcome, "bound", r.bound);
  AddMetric(outcome, "exact", r.exact);
  AddVerdict(outcome, "frequency_at_least_bound", r.frequency >= r.bound, true,
             ToJson(r));
  if (params.has("tolerance")) {
    ASSIGN_OR_RETURN(const double tolerance, params.Number("tolerance"));
    AddVerdict(outcome, "frequency_matches_exact",
               std::abs(r.frequency - r.exact) <= tolerance, true,
               {{"frequency", r.frequency},
                {"exact", r.exact},
                {"tolerance", tolerance}});
  }
  return outcome;
}

// ---------------------------------------------------------------- generalization

absl::StatusOr<ExperimentOutcome> RunGeneralization(
    const ExperimentConfig& config) {
  const Params params(config.params);
  ASSIGN_OR_RETURN(const Distribution p, PopulationFromParams(params));
  ASSIGN_OR_RETURN(const double eps, params.Number("epsilon"));
  ASSIGN_OR_RETURN(const double delta, params.Number("delta"));
  RETURN_IF_ERROR(Require(eps > 0 && delta > 0,
                          "params 'epsilon' and 'delta' must be > 0"));
  ASSIGN_OR_RETURN(const std::size_t n,
                   params.Count("n", GeneralizationMinSampleSize(eps, delta)));
  RETURN_IF_ERROR(Require(n >= 1, "param 'n' must be >= 1"));
  ASSIGN_OR_RETURN(const bool expect_hold, ExpectHold(params));
  RETURN_IF_ERROR(Require(params.has("selector"), "missing required param 'selector'"));
  ASSIGN_OR_RETURN(const QueryMenu menu, BuildMenu(params, p, n, true, config.seed));
  ASSIGN_OR_RETURN(const std::unique_ptr<Selector> selector,
                   SelectorFromJson(params.at("selector"), menu));
  std::vector<double> hits;
  ASSIGN_OR_RETURN(const LemmaVerdict verdict,
                   RunGeneralizationCheck(*selector, menu, p, eps, delta,
                                          config.trials, config.seed, &hits));
  ExperimentOutcome outcome;
  for (std::size_t t = 0; t < hits.size(); ++t) {
    AddRow(outcome, std::to_string(t), "exceeds_threshold", hits[t]);
  }
  const double threshold = 18 * eps * menu.sensitivity() * static_cast<double>(n);
  AddMetric(outcome, "n", static_cast<double>(n));
  AddMetric(outcome, "threshold", threshold);
  AddMetric(outcome, "frequency", verdict.estimate);
  AddMetric(outcome, "ci_halfwidth", verdict.ci_halfwidth);
  AddMetric(outcome, "bound", verdict.bound);
  json detail = ToJson(verdict);
  detail["selector"] = selector->tag();
  detail["threshold"] = threshold;
  AddVerdict(outcome, "generalization_bound", verdict.holds_within_ci,
             expect_hold, detail);
  return outcome;
}

// ---------------------------------------------------------------- plan

absl::StatusOr<ExperimentOutcome> RunPlan(const ExperimentConfig& config) {
  const Params params(config.params);
  ASSIGN_OR_RETURN(const double alpha, params.Number("alpha"));
  ASSIGN_OR_RETURN(const double beta, params.Number("beta"));
  ASSIGN_OR_RETURN(const std::size_t n, params.Count("n"));
  ASSIGN_OR_RETURN(const std::size_t k, params.Count("k"));
  RETURN_IF_ERROR(Require(n >= 1 && k >= 1, "params 'n' and 'k' must be >= 1"));
  ASSIGN_OR_RETURN(const double sensitivity,
                   params.Number("sensitivity", 1.0 / static_cast<double>(n)));
  ASSIGN_OR_RETURN(const std::string variant_name,
                   params.String("variant", "low_sensitivity"));
  ASSIGN_OR_RETURN(const TransferVariant variant,
                   ParseTransferVariant(variant_name));
  ASSIGN_OR_RETURN(const TransferPlan plan,
                   PlanTransfer(alpha, beta, sensitivity, n, k, variant));

  ExperimentOutcome outcome;
  outcome.report["plan"] = ToJson(plan);
  AddMetric(outcome, "required_epsilon", plan.required_budget.epsilon);
  AddMetric(outcome, "required_delta", plan.required_budget.delta);
  AddMetric(outcome, "required_alpha", plan.required_alpha);
  AddMetric(outcome, "required_beta", plan.required_beta);
  AddMetric(outcome, "feasible", plan.feasible ? 1.0 : 0.0);

  const double eps_const = variant == TransferVariant::kLowSensitivity ? 64 : 128;
  const double delta_const = variant == TransferVariant::kLowSensitivity ? 32 : 64;
  const double dn = sensitivity * static_cast<double>(n);
  const double eps_residual =
      std::abs(plan.required_budget.epsilon * eps_const * dn - alpha);
  const double delta_residual =
      std::abs(plan.required_budget.delta * delta_const * dn - alpha * beta);
  AddMetric(outcome, "epsilon_identity_residual", eps_residual);
  AddMetric(outcome, "delta_identity_residual", delta_residual);
  AddVerdict(outcome, "plan_identities",
             eps_residual <= 1e-12 && delta_residual <= 1e-12, true,
             {{"epsilon_residual", eps_residual},
              {"delta_residual", delta_residual}});

  if (params.has("sample_complexity")) {
    const Params sc(params.at("sample_complexity"));
    SampleComplexityInput input;
    ASSIGN_OR_RETURN(const std::string family,
                     sc.String("family", "statistical"));
    ASSIGN_OR_RETURN(input.family, ParseQueryFamily(family));
    ASSIGN_OR_RETURN(const std::string regime, sc.String("regime", "k_small"));
    ASSIGN_OR_RETURN(input.regime, ParseQueryRegime(regime));
    input.k = static_cast<double>(k);
    input.alpha = alpha;
    input.beta = beta;
    ASSIGN_OR_RETURN(input.universe_size, sc.Number("universe_size", 2));
    ASSIGN_OR_RETURN(input.dimension, sc.Number("dimension", 1));
    ASSIGN_OR_RETURN(const double samples, SampleComplexity(input));
    outcome.report["sample_complexity"] = {
        {"family", family},
        {"regime", regime},
        {"order_of_magnitude_n", samples},
        {"note", "hidden constants set to 1; order of magnitude only"}};
    AddMetric(outcome, "sample_complexity", samples);
  }
  return outcome;
}

absl::StatusOr<json> ReadJsonFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    return absl::NotFoundError(absl::StrFormat("cannot open '%s'", path));
  }
  json doc = json::parse(in, nullptr, /*allow_exceptions=*/false);
  if (doc.is_discarded()) {
    return absl::InvalidArgumentError(
        absl::StrFormat("'%s' is not valid JSON", path));
  }
  return doc;
}

int Fail(const absl::Status& status, std::ostream& err) {
  err << ErrorJson(status).dump() << "\n";
  return kExitInvalidConfig;
}

void ApplyOverrides(const RunOverrides& overrides, ExperimentConfig& config) {
  if (overrides.seed.has_value()) config.seed = *overrides.seed;
  if (overrides.trials.has_value()) config.trials = *overrides.trials;
  if (overrides.out.has_value()) config.out_path = *overrides.out;
}

// Round-trips through text so that values compare exactly as stored.
json Normalize(const json& doc) { return json::parse(doc.dump()); }

}  // namespace

std::string_view ExperimentName(Experiment experiment) {
  return Entry(experiment).name;
}

absl::StatusOr<Experiment> ParseExperiment(std::string_view name) {
  for (const auto& e : kExperiments) {
    std::string dashed = e.name;
    std::replace(dashed.begin(), dashed.end(), '_', '-');
    if (name == e.name || name == dashed) return e.experiment;
  }
  return absl::InvalidArgumentError(
      absl::StrFormat("unknown experiment '%s'", std::string(name)));
}

std::size_t DefaultTrials(Experiment experiment) {
  return Entry(experiment).default_trials;
}

absl::StatusOr<ExperimentConfig> ExperimentConfigFromJson(const json& doc) {
  if (!doc.is_object()) {
    return absl::InvalidArgumentError("config must be a JSON object");
  }
  ExperimentConfig config;
  if (!doc.contains("experiment") || !doc["experiment"].is_string()) {
    return absl::InvalidArgumentError("config needs a string 'experiment'");
  }
  ASSIGN_OR_RETURN(config.experiment,
                   ParseExperiment(doc["experiment"].get<std::string>()));
  if (doc.contains("params")) {
    if (!doc["params"].is_object()) {
      return absl::InvalidArgumentError("'params' must be an object");
    }
    config.params = doc["params"];
  }
  if (doc.contains("seed")) {
    if (!IsCount(doc["seed"])) {
      return absl::InvalidArgumentError("'seed' must be a nonnegative integer");
    }
    config.seed = doc["seed"].get<uint64_t>();
  }
  config.trials = DefaultTrials(config.experiment);
  if (doc.contains("trials")) {
    if (!IsCount(doc["trials"])) {
      return absl::InvalidArgumentError("'trials' must be a nonnegative integer");
    }
    config.trials = doc["trials"].get<std::size_t>();
  }
  if (doc.contains("out")) {
    if (!doc["out"].is_string()) {
      return absl::InvalidArgumentError("'out' must be a string");
    }
    config.out_path = doc["out"].get<std::string>();
  }
  return config;
}

json ToJson(const ExperimentConfig& config) {
  return {{"experiment", ExperimentName(config.experiment)},
          {"params", config.params},
          {"seed", config.seed},
          {"trials", config.trials},
          {"out", config.out_path}};
}

bool ExperimentOutcome::all_passed() const {
  return std::all_of(verdicts.begin(), verdicts.end(),
                     [](const VerdictRecord& v) { return v.passed(); });
}

absl::StatusOr<ExperimentOutcome> RunExperiment(const ExperimentConfig& config) {
  if (config.trials == 0 && config.experiment != Experiment::kPlan) {
    return absl::InvalidArgumentError("'trials' must be >= 1");
  }
  try {
    switch (config.experiment) {
      case Experiment::kGame:
        return RunGameExperiment(config);
      case Experiment::kAttackDemo:
        return RunAttackDemo(config);
      case Experiment::kMonitor:
        return RunMonitorExperiment(config);
      case Experiment::kLemmaSq:
      case Experiment::kLemmaLowSens:
      case Experiment::kLemmaTv:
        return RunLemmaExperiment(config);
      case Experiment::kEmUtility:
        return RunEmUtility(config);
      case Experiment::kLowerBound:
        return RunLowerBound(config);
      case Experiment::kGeneralization:
        return RunGeneralization(config);
      case Experiment::kPlan:
        return RunPlan(config);
    }
  } catch (const json::exception& e) {
    return absl::InvalidArgumentError(
        absl::StrFormat("malformed params: %s", e.what()));
  }
  return absl::InternalError("unhandled experiment");
}

std::string TrialDigest(const std::vector<CsvRow>& rows) {
  uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](const void* data, std::size_t size) {
    const auto* bytes = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < size; ++i) {
      h ^= bytes[i];
      h *= 0x100000001b3ULL;
    }
  };
  for (const CsvRow& row : rows) {
    mix(row.trial.data(), row.trial.size());
    mix("|", 1);
    mix(row.metric.data(), row.metric.size());
    const uint64_t bits = std::bit_cast<uint64_t>(row.value);
    mix(&bits, sizeof bits);
  }
  return absl::StrFormat("%016x", h);
}

json SummaryJson(const ExperimentConfig& config,
                 const ExperimentOutcome& outcome) {
  json verdicts = json::array();
  for (const VerdictRecord& v : outcome.verdicts) {
    verdicts.push_back({{"name", v.name},
                        {"holds", v.holds},
                        {"expected", v.expected_to_hold ? "hold" : "violate"},
                        {"passed", v.passed()},
                        {"detail", v.detail}});
  }
  return {{"version", kVersionTag},
          {"config", ToJson(config)},
          {"metrics", outcome.metrics},
          {"verdicts", verdicts},
          {"report", outcome.report},
          {"trial_digest", TrialDigest(outcome.rows)},
          {"rows", outcome.rows.size()}};
}

absl::Status WriteOutputs(const ExperimentConfig& config,
                          const ExperimentOutcome& outcome) {
  if (config.out_path.empty()) return absl::OkStatus();
  const std::string csv_path = config.out_path + ".csv";
  const bool fresh = !std::filesystem::exists(csv_path);
  std::ofstream csv(csv_path, std::ios::app);
  if (!csv) {
    return absl::PermissionDeniedError(
        absl::StrFormat("cannot write '%s'", csv_path));
  }
  if (fresh) csv << "experiment,seed,trial,metric,value\n";
  const std::string_view name = ExperimentName(config.experiment);
  for (const CsvRow& row : outcome.rows) {
    csv << absl::StrFormat("%s,%d,%s,%s,%.17g\n", std::string(name),
                           config.seed, row.trial, row.metric, row.value);
  }
  std::ofstream summary(config.out_path + ".json");
  if (!summary) {
    return absl::PermissionDeniedError(
        absl::StrFormat("cannot write '%s.json'", config.out_path));
  }
  summary << SummaryJson(config, outcome).dump(2) << "\n";
  return absl::OkStatus();
}

json ErrorJson(const absl::Status& status) {
  return {{"error",
           {{"code", absl::StatusCodeToString(status.code())},
            {"message", std::string(status.message())}}}};
}

int RunCommand(Experiment experiment, const std::string& config_path,
               const RunOverrides& overrides, std::ostream& out,
               std::ostream& err) {
  absl::StatusOr<json> doc = ReadJsonFile(config_path);
  if (!doc.ok()) return Fail(doc.status(), err);
  if (doc->is_object() && !doc->contains("experiment")) {
    (*doc)["experiment"] = ExperimentName(experiment);
  }
  absl::StatusOr<ExperimentConfig> config = ExperimentConfigFromJson(*doc);
  if (!config.ok()) return Fail(config.status(), err);
  if (config->experiment != experiment) {
    return Fail(absl::InvalidArgumentError(absl::StrFormat(
                    "config is for '%s', not '%s'",
                    std::string(ExperimentName(config->experiment)),
                    std::string(ExperimentName(experiment)))),
                err);
  }
  ApplyOverrides(overrides, *config);
  absl::StatusOr<ExperimentOutcome> outcome = RunExperiment(*config);
  if (!outcome.ok()) return Fail(outcome.status(), err);
  if (absl::Status s = WriteOutputs(*config, *outcome); !s.ok()) {
    return Fail(s, err);
  }
  if (experiment == Experiment::kPlan) {
    out << outcome->report["plan"].dump(2) << "\n";
  } else {
    out << SummaryJson(*config, *outcome).dump(2) << "\n";
  }
  return outcome->all_passed() ? kExitOk : kExitVerdictFailed;
}

int ReplayCommand(const std::string& summary_path,
                  const RunOverrides& overrides, std::ostream& out,
                  std::ostream& err) {
  absl::StatusOr<json> summary = ReadJsonFile(summary_path);
  if (!summary.ok()) return Fail(summary.status(), err);
  if (!summary->is_object() || !summary->contains("config") ||
      !summary->contains("metrics") || !summary->contains("trial_digest")) {
    return Fail(absl::InvalidArgumentError(
                    "summary lacks config, metrics or trial_digest"),
                err);
  }
  if (summary->value("version", std::string()) != kVersionTag) {
    return Fail(absl::InvalidArgumentError(absl::StrFormat(
                    "summary version '%s' does not match '%s'",
                    summary->value("version", std::string()), kVersionTag)),
                err);
  }
  absl::StatusOr<ExperimentConfig> config =
      ExperimentConfigFromJson((*summary)["config"]);
  if (!config.ok()) return Fail(config.status(), err);
  if (overrides.trials.has_value() && *overrides.trials != config->trials) {
    return Fail(absl::InvalidArgumentError(absl::StrFormat(
                    "config mismatch: summary has %d trials, override asks %d",
                    config->trials, *overrides.trials)),
                err);
  }
  if (overrides.seed.has_value()) config->seed = *overrides.seed;
  config->out_path.clear();

  absl::StatusOr<ExperimentOutcome> outcome = RunExperiment(*config);
  if (!outcome.ok()) return Fail(outcome.status(), err);
  const json fresh = Normalize(SummaryJson(*config, *outcome));

  json diff = json::object();
  const json& old_metrics = (*summary)["metrics"];
  for (const auto& [name, value] : fresh["metrics"].items()) {
    if (!old_metrics.contains(name) || old_metrics[name] != value) {
      diff[name] = {{"recorded", old_metrics.value(name, json())},
                    {"replayed", value}};
    }
  }
  for (const auto& [name, value] : old_metrics.items()) {
    if (!fresh["metrics"].contains(name)) {
      diff[name] = {{"recorded", value}, {"replayed", nullptr}};
    }
  }
  if (fresh["trial_digest"] != (*summary)["trial_digest"]) {
    diff["trial_digest"] = {{"recorded", (*summary)["trial_digest"]},
                            {"replayed", fresh["trial_digest"]}};
  }
  if (!diff.empty()) {
    err << json{{"replay", "mismatch"}, {"diff", diff}}.dump(2) << "\n";
    return kExitReplayMismatch;
  }
  out << json{{"replay", "identical"},
              {"experiment", ExperimentName(config->experiment)},
              {"trial_digest", fresh["trial_digest"]}}
             .dump()
      << "\n";
  return kExitOk;
}

}  // namespace asl
