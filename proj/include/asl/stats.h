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

#ifndef ASL_STATS_H_
#define ASL_STATS_H_

#include <cstddef>
#include <span>
#include <vector>

namespace asl {

inline constexpr double kZ95 = 1.959963984540054;

struct MeanCi {
  double mean = 0;
  double ci_halfwidth = 0;
};

// Sample mean with a 95% normal-approximation half-width.
MeanCi MeanWithCi(std::span<const double> values);
// Frequency of `hits` out of `trials`, 95% normal-approximation half-width.
MeanCi ProportionWithCi(std::size_t hits, std::size_t trials);

double Median(std::vector<double> values);

// Two-sample Kolmogorov-Smirnov statistic sup |F_a - F_b|.
double KolmogorovSmirnov(std::vector<double> a, std::vector<double> b);
// Asymptotic critical value c(alpha) sqrt((m + n) / (m n)) at alpha = 0.01.
double KolmogorovSmirnovCritical01(std::size_t m, std::size_t n);

// Standard Laplace(0, b) quantile.
double LaplaceQuantile(double p, double b);

}  // namespace asl

#endif  // ASL_STATS_H_
