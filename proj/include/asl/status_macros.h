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

#ifndef ASL_STATUS_MACROS_H_
#define ASL_STATUS_MACROS_H_

#include "absl/status/status.h"
#include "absl/status/statusor.h"

#define ASL_STATUS_CONCAT_INNER_(a, b) a##b
#define ASL_STATUS_CONCAT_(a, b) ASL_STATUS_CONCAT_INNER_(a, b)

#define RETURN_IF_ERROR(expr)                \
  do {                                       \
    const absl::Status _asl_status = (expr); \
    if (!_asl_status.ok()) return _asl_status; \
  } while (0)

#define ASL_ASSIGN_OR_RETURN_IMPL_(statusor, lhs, rexpr) \
  auto statusor = (rexpr);                               \
  if (!statusor.ok()) return statusor.status();          \
  lhs = std::move(statusor).value()

#define ASSIGN_OR_RETURN(lhs, rexpr) \
  ASL_ASSIGN_OR_RETURN_IMPL_(        \
      ASL_STATUS_CONCAT_(_asl_statusor_, __LINE__), lhs, rexpr)

#endif  // ASL_STATUS_MACROS_H_
