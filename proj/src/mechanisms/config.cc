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

#include "asl/mechanisms/config.h"

#include <cmath>
#include <string>

#include "absl/strings/str_format.h"
#include "asl/status_macros.h"

namespace asl {

std::string_view MechanismKindName(MechanismKind kind) {
  switch (kind) {
    case MechanismKind::kEmpirical:
      return "empirical";
    case MechanismKind::kLaplace:
      return "laplace";
    case MechanismKind::kGaussian:
      return "gaussian";
    case MechanismKind::kPmw:
      return "pmw";
    case MechanismKind::kExpMechMin:
      return "expmech_min";
  }
  return "unknown";
}

absl::StatusOr<MechanismKind> ParseMechanismKind(std::string_view name) {
  for (MechanismKind kind :
       {MechanismKind::kEmpirical, MechanismKind::kLaplace,
        MechanismKind::kGaussian, MechanismKind::kPmw,
        MechanismKind::kExpMechMin}) {
    if (MechanismKindName(kind) == name) return kind;
  }
  return absl::InvalidArgumentError(
      absl::StrFormat("unknown mechanism kind '%s'", std::string(name)));
}

PmwParams DefaultPmwParams(double alpha, std::size_t failure_budget) {
  return {alpha / 2.0, alpha / 4.0, failure_budget};
}

absl::Status MechanismConfig::Validate() const {
  if (!(noise_scale >= 0) || !std::isfinite(noise_scale)) {
    return absl::InvalidArgumentError("noise_scale must be finite and >= 0");
  }
  if (k_max < 1) return absl::InvalidArgumentError("k_max must be >= 1");
  if (!(expmech_eta >= 0) || !std::isfinite(expmech_eta)) {
    return absl::InvalidArgumentError("expmech_eta must be finite and >= 0");
  }
  if (kind == MechanismKind::kPmw) {
    if (!(pmw_params.threshold >= 0) || !(pmw_params.update_rate > 0)) {
      return absl::InvalidArgumentError(
          "pmw requires threshold >= 0 and update_rate > 0");
    }
  }
  return absl::OkStatus();
}

nlohmann::json ToJson(const MechanismConfig& config) {
  return {
      {"kind", std::string(MechanismKindName(config.kind))},
      {"noise_scale", config.noise_scale},
      {"pmw_params",
       {{"threshold", config.pmw_params.threshold},
        {"update_rate", config.pmw_params.update_rate},
        {"failure_budget", config.pmw_params.failure_budget}}},
      {"expmech_eta", config.expmech_eta},
      {"k_max", config.k_max},
      {"truncation", config.truncation},
  };
}

namespace {

template <typename T>
absl::Status ReadField(const nlohmann::json& doc, const char* name, T& out) {
  if (!doc.contains(name)) return absl::OkStatus();
  try {
    out = doc.at(name).get<T>();
  } catch (const nlohmann::json::exception& e) {
    return absl::InvalidArgumentError(
        absl::StrFormat("field '%s': %s", name, e.what()));
  }
  return absl::OkStatus();
}

}  // namespace

absl::StatusOr<MechanismConfig> MechanismConfigFromJson(
    const nlohmann::json& doc) {
  if (!doc.is_object() || !doc.contains("kind") || !doc["kind"].is_string()) {
    return absl::InvalidArgumentError(
        "mechanism config must be an object with a string 'kind'");
  }
  MechanismConfig config;
  ASSIGN_OR_RETURN(config.kind,
                   ParseMechanismKind(doc["kind"].get<std::string>()));
  RETURN_IF_ERROR(ReadField(doc, "noise_scale", config.noise_scale));
  RETURN_IF_ERROR(ReadField(doc, "expmech_eta", config.expmech_eta));
  RETURN_IF_ERROR(ReadField(doc, "k_max", config.k_max));
  RETURN_IF_ERROR(ReadField(doc, "truncation", config.truncation));
  if (doc.contains("pmw_params")) {
    const auto& pmw = doc["pmw_params"];
    RETURN_IF_ERROR(ReadField(pmw, "threshold", config.pmw_params.threshold));
    RETURN_IF_ERROR(ReadField(pmw, "update_rate", config.pmw_params.update_rate));
    RETURN_IF_ERROR(
        ReadField(pmw, "failure_budget", config.pmw_params.failure_budget));
  }
  RETURN_IF_ERROR(config.Validate());
  return config;
}

}  // namespace asl
