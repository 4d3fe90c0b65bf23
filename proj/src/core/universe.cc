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

#include "asl/core/universe.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "absl/status/status.h"
#include "absl/strings/str_format.h"

namespace asl {

absl::StatusOr<Universe> Universe::Create(std::vector<std::string> labels) {
  if (labels.empty()) {
    return absl::InvalidArgumentError("universe must be nonempty");
  }
  Universe u;
  u.size_ = labels.size();
  u.index_.reserve(labels.size());
  for (Element i = 0; i < labels.size(); ++i) {
    if (!u.index_.emplace(labels[i], i).second) {
      return absl::InvalidArgumentError(
          absl::StrFormat("duplicate universe element '%s'", labels[i]));
    }
  }
  u.labels_ = std::move(labels);
  return u;
}

absl::StatusOr<Universe> Universe::Indexed(std::size_t size) {
  if (size == 0) {
    return absl::InvalidArgumentError("universe must be nonempty");
  }
  Universe u;
  u.size_ = size;
  return u;
}

std::string Universe::label(Element z) const {
  if (!labels_.empty()) return labels_[z];
  return std::to_string(z);
}

std::optional<Element> Universe::Find(std::string_view label) const {
  if (labels_.empty()) {
    Element z = 0;
    for (char c : label) {
      if (c < '0' || c > '9') return std::nullopt;
      z = z * 10 + static_cast<Element>(c - '0');
    }
    if (label.empty() || z >= size_) return std::nullopt;
    return z;
  }
  auto it = index_.find(std::string(label));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

absl::StatusOr<Sample> Sample::Create(std::size_t universe_size,
                                      std::vector<Element> elements) {
  if (elements.empty()) {
    return absl::InvalidArgumentError("sample must contain at least one element");
  }
  for (Element z : elements) {
    if (z >= universe_size) {
      return absl::OutOfRangeError(absl::StrFormat(
          "element %d is not in a universe of size %d", z, universe_size));
    }
  }
  return Sample(universe_size, std::move(elements));
}

absl::StatusOr<Sample> ReplaceElement(const Sample& x, std::size_t i,
                                      Element z) {
  if (i >= x.size()) {
    return absl::OutOfRangeError(
        absl::StrFormat("index %d out of range for sample of size %d", i,
                        x.size()));
  }
  std::vector<Element> elements(x.elements().begin(), x.elements().end());
  elements[i] = z;
  return Sample::Create(x.universe_size(), std::move(elements));
}

std::size_t HammingDistance(const Sample& a, const Sample& b) {
  std::size_t d = 0;
  const std::size_t n = std::min(a.size(), b.size());
  for (std::size_t i = 0; i < n; ++i) d += a[i] != b[i];
  return d + std::max(a.size(), b.size()) - n;
}

Distribution::Distribution(std::shared_ptr<const Universe> universe,
                           std::vector<double> pmf)
    : universe_(std::move(universe)), pmf_(std::move(pmf)) {
  cdf_.resize(pmf_.size());
  std::partial_sum(pmf_.begin(), pmf_.end(), cdf_.begin());
  const double first = pmf_.front();
  uniform_ = std::all_of(pmf_.begin(), pmf_.end(),
                         [first](double p) { return p == first; });
}

absl::StatusOr<Distribution> Distribution::Create(
    std::shared_ptr<const Universe> universe, std::vector<double> pmf) {
  if (universe == nullptr) {
    return absl::InvalidArgumentError("distribution requires a universe");
  }
  if (pmf.size() != universe->size()) {
    return absl::InvalidArgumentError(
        absl::StrFormat("pmf has %d entries but universe has %d", pmf.size(),
                        universe->size()));
  }
  double total = 0;
  for (double p : pmf) {
    if (!(p >= 0) || !std::isfinite(p)) {
      return absl::InvalidArgumentError("pmf entries must be finite and >= 0");
    }
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    return absl::InvalidArgumentError(
        absl::StrFormat("pmf sums to %.17g, not 1", total));
  }
  return Distribution(std::move(universe), std::move(pmf));
}

Distribution Distribution::Uniform(std::shared_ptr<const Universe> universe) {
  const std::size_t size = universe->size();
  return Distribution(std::move(universe),
                      std::vector<double>(size, 1.0 / static_cast<double>(size)));
}

absl::StatusOr<Distribution> Distribution::Empirical(
    std::shared_ptr<const Universe> universe, const Sample& x) {
  if (universe == nullptr || x.universe_size() != universe->size()) {
    return absl::InvalidArgumentError("sample and universe do not match");
  }
  std::vector<double> pmf(universe->size(), 0.0);
  const double w = 1.0 / static_cast<double>(x.size());
  for (Element z : x.elements()) pmf[z] += w;
  return Distribution(std::move(universe), std::move(pmf));
}

Element Distribution::DrawOne(Rng& rng) const {
  if (uniform_) {
    return std::uniform_int_distribution<Element>(0, pmf_.size() - 1)(rng);
  }
  // The last bucket absorbs any rounding shortfall in the cumulative sum.
  const double u = Uniform01(rng) * cdf_.back();
  auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
  Element z = static_cast<Element>(std::distance(cdf_.begin(), it));
  if (z >= pmf_.size()) z = pmf_.size() - 1;
  while (pmf_[z] == 0 && z > 0) --z;
  return z;
}

Sample Distribution::Draw(std::size_t n, Rng& rng) const {
  std::vector<Element> elements(n);
  for (auto& z : elements) z = DrawOne(rng);
  return *Sample::Create(pmf_.size(), std::move(elements));
}

}  // namespace asl
