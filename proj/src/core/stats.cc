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

#include "asl/stats.h"

#include <algorithm>
#include <cmath>

namespace asl {

MeanCi MeanWithCi(std::span<const double> values) {
  if (values.empty()) return {};
  const double m = static_cast<double>(values.size());
  // Accumulate deviations from the first value, so constant data gives an
  // exact mean and a zero-width interval.
  const double shift = values.front();
  double sum = 0;
  for (double v : values) sum += v - shift;
  const double offset = sum / m;
  if (values.size() < 2) return {shift + offset, 0.0};
  double ss = 0;
  for (double v : values) ss += (v - shift - offset) * (v - shift - offset);
  return {shift + offset, kZ95 * std::sqrt(ss / (m - 1)) / std::sqrt(m)};
}

MeanCi ProportionWithCi(std::size_t hits, std::size_t trials) {
  if (trials == 0) return {};
  const double p = static_cast<double>(hits) / static_cast<double>(trials);
  return {p, kZ95 * std::sqrt(p * (1 - p) / static_cast<double>(trials))};
}

double Median(std::vector<double> values) {
  if (values.empty()) return 0;
  std::sort(values.begin(), values.end());
  const std::size_t mid = values.size() / 2;
  if (values.size() % 2 == 1) return values[mid];
  return 0.5 * (values[mid - 1] + values[mid]);
}

double KolmogorovSmirnov(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) return 1.0;
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::size_t i = 0;
  std::size_t j = 0;
  double worst = 0;
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  while (i < a.size() && j < b.size()) {
    const double v = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == v) ++i;
    while (j < b.size() && b[j] == v) ++j;
    worst = std::max(worst, std::abs(static_cast<double>(i) / na -
                                     static_cast<double>(j) / nb));
  }
  return worst;
}

double KolmogorovSmirnovCritical01(std::size_t m, std::size_t n) {
  const double md = static_cast<double>(m);
  const double nd = static_cast<double>(n);
  return 1.6276 * std::sqrt((md + nd) / (md * nd));
}

double LaplaceQuantile(double p, double b) {
  return p < 0.5 ? b * std::log(2 * p) : -b * std::log(2 * (1 - p));
}

}  // namespace asl
