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

#ifndef AMPLIPRIV_BUDGET_H_
#define AMPLIPRIV_BUDGET_H_

#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"

namespace amplipriv {

// An (epsilon, delta) pair; epsilon = 0 is the perfect-privacy corner.
struct PrivacyBudget {
  double epsilon = 0.0;
  double delta = 0.0;

  static absl::StatusOr<PrivacyBudget> Create(double epsilon, double delta);

  friend bool operator==(const PrivacyBudget&, const PrivacyBudget&) = default;
};

enum class NoiseFamily { kLaplace, kGaussian };

absl::string_view NoiseFamilyName(NoiseFamily family);
absl::StatusOr<NoiseFamily> ParseNoiseFamily(absl::string_view name);

}  // namespace amplipriv

#endif  // AMPLIPRIV_BUDGET_H_
