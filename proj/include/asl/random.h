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

#ifndef ASL_RANDOM_H_
#define ASL_RANDOM_H_

#include <cstdint>
#include <random>

namespace asl {

// All randomness in the library is drawn from this engine. Its output
// sequence is fixed by the standard, so a seed fully determines a run on a
// given build.
using Rng = std::mt19937_64;

// SplitMix64 finalizer.
uint64_t SplitMix64(uint64_t x);

// Derives an independent child seed for `stream` from `root`. Trials use
// DeriveSeed(root, trial_index); sub-streams inside a trial (sample draw,
// mechanism coins, analyst coins) use DeriveSeed(trial_seed, slot).
uint64_t DeriveSeed(uint64_t root, uint64_t stream);

// Fixed sub-stream slots used by the games and harness.
inline constexpr uint64_t kSampleStream = 0;
inline constexpr uint64_t kMechanismStream = 1;
inline constexpr uint64_t kAnalystStream = 2;
inline constexpr uint64_t kSelectorStream = 3;

double Uniform01(Rng& rng);
double SampleLaplace(Rng& rng, double scale);
double SampleGaussian(Rng& rng, double sigma);

}  // namespace asl

#endif  // ASL_RANDOM_H_
