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

#include "asl/random.h"

#include <cmath>

namespace asl {

uint64_t SplitMix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

uint64_t DeriveSeed(uint64_t root, uint64_t stream) {
  return SplitMix64(root ^ SplitMix64(stream + 0x632be59bd9b4e019ULL));
}

double Uniform01(Rng& rng) {
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

double SampleLaplace(Rng& rng, double scale) {
  if (scale <= 0) return 0.0;
  // Difference of two unit exponentials is a unit Laplace variate.
  std::exponential_distribution<double> exp1(1.0);
  const double e1 = exp1(rng);
  const double e2 = exp1(rng);
  return scale * (e1 - e2);
}

double SampleGaussian(Rng& rng, double sigma) {
  if (sigma <= 0) return 0.0;
  return std::normal_distribution<double>(0.0, sigma)(rng);
}

}  // namespace asl
