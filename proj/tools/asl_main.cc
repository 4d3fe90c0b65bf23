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

// Experiment runner. Each subcommand takes a JSON config file:
//
//   asl game config.json --seed 7 --trials 100 --out runs/game
//   asl verify-lemma sq config.json
//   asl replay runs/game.json
//
// Exit status: 0 success, 1 invalid config, 2 a verdict failed, 3 replay
// mismatch.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "asl/cli/runner.h"

namespace {

struct Flags {
  std::string config_path;
  std::optional<uint64_t> seed;
  std::optional<std::size_t> trials;
  std::optional<std::string> out;

  asl::RunOverrides overrides() const { return {seed, trials, out}; }
};

void AddRunFlags(CLI::App* cmd, Flags& flags, const char* positional) {
  cmd->add_option(positional, flags.config_path)->required();
  cmd->add_option("--seed", flags.seed, "Root seed override");
  cmd->add_option("--trials", flags.trials, "Trial count override");
  cmd->add_option("--out", flags.out, "Output prefix for .csv and .json");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adaptive data analysis experiment runner"};
  app.require_subcommand(1);
  Flags flags;
  std::optional<asl::Experiment> experiment;
  bool replay = false;

  struct Simple {
    const char* command;
    asl::Experiment experiment;
    const char* help;
  };
  const Simple simple[] = {
      {"game", asl::Experiment::kGame, "Play the accuracy game"},
      {"attack-demo", asl::Experiment::kAttackDemo,
       "Overfitting attack against empirical and Laplace answers"},
      {"monitor", asl::Experiment::kMonitor, "Run the monitor over T games"},
      {"em-utility", asl::Experiment::kEmUtility,
       "Exact exponential-mechanism utility check"},
      {"lower-bound", asl::Experiment::kLowerBound,
       "Leaky-block lower-bound construction"},
      {"generalization", asl::Experiment::kGeneralization,
       "Stability-implies-generalization frequency check"},
      {"plan", asl::Experiment::kPlan, "Transfer parameter planner"},
  };
  for (const Simple& s : simple) {
    CLI::App* cmd = app.add_subcommand(s.command, s.help);
    AddRunFlags(cmd, flags, "config");
    cmd->callback([&experiment, e = s.experiment] { experiment = e; });
  }

  CLI::App* lemma =
      app.add_subcommand("verify-lemma", "De-correlated expectation checks");
  lemma->require_subcommand(1);
  struct Variant {
    const char* name;
    asl::Experiment experiment;
  };
  for (const Variant& v : {Variant{"sq", asl::Experiment::kLemmaSq},
                           Variant{"lowsens", asl::Experiment::kLemmaLowSens},
                           Variant{"tv", asl::Experiment::kLemmaTv}}) {
    CLI::App* cmd = lemma->add_subcommand(v.name);
    AddRunFlags(cmd, flags, "config");
    cmd->callback([&experiment, e = v.experiment] { experiment = e; });
  }

  CLI::App* replay_cmd =
      app.add_subcommand("replay", "Re-run a summary and compare bit for bit");
  AddRunFlags(replay_cmd, flags, "summary");
  replay_cmd->callback([&replay] { replay = true; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : asl::kExitInvalidConfig;
  }

  if (replay) {
    return asl::ReplayCommand(flags.config_path, flags.overrides(), std::cout,
                              std::cerr);
  }
  return asl::RunCommand(*experiment, flags.config_path, flags.overrides(),
                         std::cout, std::cerr);
}
