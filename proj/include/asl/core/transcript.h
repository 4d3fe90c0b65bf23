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

#ifndef ASL_CORE_TRANSCRIPT_H_
#define ASL_CORE_TRANSCRIPT_H_

#include <cstdint>
#include <string>
#include <vector>

#include "asl/core/queries.h"

namespace asl {

struct TranscriptRecord {
  Query query;
  Answer answer;
};

// The ordered query/answer pairs exchanged in one run of a game.
struct Transcript {
  std::vector<TranscriptRecord> records;
  std::string mechanism_tag;
  std::string analyst_tag;
  uint64_t seed = 0;

  std::size_t rounds() const { return records.size(); }
};

}  // namespace asl

#endif  // ASL_CORE_TRANSCRIPT_H_
