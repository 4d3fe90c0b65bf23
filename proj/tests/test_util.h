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

#ifndef ASL_TESTS_TEST_UTIL_H_
#define ASL_TESTS_TEST_UTIL_H_

#include <memory>
#include <vector>

#include "absl/status/statusor.h"
#include "asl/core/queries.h"
#include "asl/core/universe.h"
#include "gtest/gtest.h"

namespace asl::testing {

template <typename T>
T ValueOrDie(absl::StatusOr<T> v) {
  EXPECT_TRUE(v.ok()) << v.status();
  return std::move(v).value();
}

inline std::shared_ptr<const Universe> IndexedUniverse(std::size_t size) {
  return std::make_shared<const Universe>(ValueOrDie(Universe::Indexed(size)));
}

inline Distribution UniformOn(std::size_t size) {
  return Distribution::Uniform(IndexedUniverse(size));
}

inline Distribution WithPmf(std::vector<double> pmf) {
  return ValueOrDie(Distribution::Create(IndexedUniverse(pmf.size()), pmf));
}

inline Sample MakeSample(std::size_t universe_size,
                         std::vector<Element> elements) {
  return ValueOrDie(Sample::Create(universe_size, std::move(elements)));
}

inline StatisticalQuery MakeQuery(std::vector<double> table) {
  return ValueOrDie(StatisticalQuery::Create(std::move(table)));
}

}  // namespace asl::testing

#endif  // ASL_TESTS_TEST_UTIL_H_
