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

#ifndef ASL_HARNESS_PARALLEL_H_
#define ASL_HARNESS_PARALLEL_H_

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdlib>
#include <optional>
#include <string>
#include <thread>
#include <vector>

namespace asl {

// Worker count: hardware concurrency, capped by the ASL_THREADS environment
// variable when it is set to a positive integer.
inline std::size_t WorkerCount() {
  std::size_t workers = std::max(1u, std::thread::hardware_concurrency());
  if (const char* cap = std::getenv("ASL_THREADS"); cap != nullptr) {
    char* end = nullptr;
    const long value = std::strtol(cap, &end, 10);
    if (end != cap && value > 0) {
      workers = std::min(workers, static_cast<std::size_t>(value));
    }
  }
  return workers;
}

// Runs fn(trial) for trial in [0, trials) and returns the results in trial
// order. Each trial must own all of its state (including its seed), so the
// output does not depend on the worker count.
template <typename Fn>
auto RunTrials(std::size_t trials, Fn fn) -> std::vector<decltype(fn(std::size_t{}))> {
  using Result = decltype(fn(std::size_t{}));
  std::vector<Result> results;
  results.reserve(trials);
  const std::size_t workers = std::min(WorkerCount(), trials);
  if (workers <= 1) {
    for (std::size_t t = 0; t < trials; ++t) results.push_back(fn(t));
    return results;
  }
  std::vector<std::optional<Result>> slots(trials);
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t t = next++; t < trials; t = next++) slots[t].emplace(fn(t));
    });
  }
  for (auto& th : pool) th.join();
  for (auto& slot : slots) results.push_back(std::move(*slot));
  return results;
}

}  // namespace asl

#endif  // ASL_HARNESS_PARALLEL_H_
