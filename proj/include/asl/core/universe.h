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

#ifndef ASL_CORE_UNIVERSE_H_
#define ASL_CORE_UNIVERSE_H_

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "absl/status/statusor.h"
#include "asl/random.h"

namespace asl {

// Elements are dense indices into a universe.
using Element = std::size_t;

// A finite, nonempty ground set X. Labels are opaque tokens used only for
// I/O; every computation runs on dense indices.
class Universe {
 public:
  // Labels must be nonempty and unique.
  static absl::StatusOr<Universe> Create(std::vector<std::string> labels);

  // A label-free universe {0, ..., size-1}. Used for large universes that are
  // never enumerated by label (e.g. the 2^20-point grid of the lower bound).
  static absl::StatusOr<Universe> Indexed(std::size_t size);

  std::size_t size() const { return size_; }
  bool contains(Element z) const { return z < size_; }

  std::string label(Element z) const;
  std::optional<Element> Find(std::string_view label) const;

 private:
  Universe() = default;

  std::size_t size_ = 0;
  std::vector<std::string> labels_;
  std::unordered_map<std::string, Element> index_;
};

// A sample x = (x_1, ..., x_n) of elements of a universe. Order matters only
// for replace-one operations.
class Sample {
 public:
  static absl::StatusOr<Sample> Create(std::size_t universe_size,
                                       std::vector<Element> elements);

  std::size_t size() const { return elements_.size(); }
  std::size_t universe_size() const { return universe_size_; }
  Element operator[](std::size_t i) const { return elements_[i]; }
  std::span<const Element> elements() const { return elements_; }

  friend bool operator==(const Sample& a, const Sample& b) = default;

 private:
  Sample(std::size_t universe_size, std::vector<Element> elements)
      : universe_size_(universe_size), elements_(std::move(elements)) {}

  std::size_t universe_size_ = 0;
  std::vector<Element> elements_;
};

// x_{i -> z}: a copy of `x` with position `i` replaced by `z`.
absl::StatusOr<Sample> ReplaceElement(const Sample& x, std::size_t i,
                                      Element z);

// Number of positions at which two equal-length samples differ.
std::size_t HammingDistance(const Sample& a, const Sample& b);

// A probability mass function over a universe: the population P.
class Distribution {
 public:
  // Probabilities must be nonnegative and sum to 1 within 1e-12.
  static absl::StatusOr<Distribution> Create(
      std::shared_ptr<const Universe> universe, std::vector<double> pmf);
  static Distribution Uniform(std::shared_ptr<const Universe> universe);
  // The empirical distribution of `x`.
  static absl::StatusOr<Distribution> Empirical(
      std::shared_ptr<const Universe> universe, const Sample& x);

  const Universe& universe() const { return *universe_; }
  const std::shared_ptr<const Universe>& universe_ptr() const {
    return universe_;
  }
  std::size_t size() const { return pmf_.size(); }
  std::span<const double> pmf() const { return pmf_; }
  double mass(Element z) const { return pmf_[z]; }

  Element DrawOne(Rng& rng) const;
  // x <- P^n.
  Sample Draw(std::size_t n, Rng& rng) const;

 private:
  Distribution(std::shared_ptr<const Universe> universe,
               std::vector<double> pmf);

  std::shared_ptr<const Universe> universe_;
  std::vector<double> pmf_;
  std::vector<double> cdf_;
  bool uniform_ = false;
};

}  // namespace asl

#endif  // ASL_CORE_UNIVERSE_H_
