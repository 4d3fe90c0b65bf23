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

#ifndef ASL_MECHANISMS_CONFIG_H_
#define ASL_MECHANISMS_CONFIG_H_

#include <cstddef>
#include <string_view>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "nlohmann/json.hpp"

namespace asl {

enum class MechanismKind { kEmpirical, kLaplace, kGaussian, kPmw, kExpMechMin };

std::string_view MechanismKindName(MechanismKind kind);
absl::StatusOr<MechanismKind> ParseMechanismKind(std::string_view name);

// Private multiplicative weights. `noise_scale` of the enclosing config is the
// Laplace scale b of the released answer; the sparse-vector threshold noise
// uses 2b and the gap noise 4b, so each update round spends half its epsilon
// on the threshold test and half on the answer.
struct PmwParams {
  double threshold = 0;            // T_pmw
  double update_rate = 0;          // eta_pmw
  std::size_t failure_budget = 0;  // maximum number of weight updates
};

// Threshold alpha/2 and update rate alpha/4.
PmwParams DefaultPmwParams(double alpha, std::size_t failure_budget);

struct MechanismConfig {
  MechanismKind kind = MechanismKind::kEmpirical;
  double noise_scale = 0;  // Laplace b or Gaussian sigma
  PmwParams pmw_params;
  double expmech_eta = 0;
  std::size_t k_max = 1;
  bool truncation = false;

  absl::Status Validate() const;
};

nlohmann::json ToJson(const MechanismConfig& config);
absl::StatusOr<MechanismConfig> MechanismConfigFromJson(
    const nlohmann::json& doc);

}  // namespace asl

#endif  // ASL_MECHANISMS_CONFIG_H_
