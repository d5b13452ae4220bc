//
// Copyright 2026 The Amplipriv Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#include "amplipriv/budget.h"

#include <cmath>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"

namespace amplipriv {

absl::StatusOr<PrivacyBudget> PrivacyBudget::Create(double epsilon,
                                                    double delta) {
  if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) {
    return absl::InvalidArgumentError(
        absl::StrCat("epsilon must be finite and >= 0, got ", epsilon));
  }
  if (!(delta >= 0.0 && delta <= 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("delta must lie in [0, 1], got ", delta));
  }
  return PrivacyBudget{epsilon, delta};
}

absl::string_view NoiseFamilyName(NoiseFamily family) {
  return family == NoiseFamily::kLaplace ? "laplace" : "gaussian";
}

absl::StatusOr<NoiseFamily> ParseNoiseFamily(absl::string_view name) {
  if (name == "laplace") return NoiseFamily::kLaplace;
  if (name == "gaussian") return NoiseFamily::kGaussian;
  return absl::InvalidArgumentError(absl::StrCat(
      "unknown noise family '", name, "' (expected laplace or gaussian)"));
}

}  // namespace amplipriv
