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

#ifndef AMPLIPRIV_TESTS_ORACLE_VALUES_H_
#define AMPLIPRIV_TESTS_ORACLE_VALUES_H_

// Evaluated at 50-digit precision by tools/compute_oracles.py; rerun it to
// audit a value rather than editing one by hand.

namespace amplipriv::oracle {

inline constexpr double kGenericHalf = 0.62011450695827752;
inline constexpr double kFwlThreeQuarters = 0.39645191304295056;
inline constexpr double kCorollaryTenth = 0.085914091422952262;
inline constexpr double kLogGaussianRatio = 11.736069016284438;
inline constexpr double kGaussianFactorNoMargin = 4.8448052626053894;
inline constexpr double kSigmaUnitSensitivity = 4.844810107410652;
inline constexpr double kNormalTv = 0.38292492254802621;
inline constexpr double kStdNormalAtZero = 0.39894228040143268;
inline constexpr double kRrAmplified = 0.69314718055994531;

}  // namespace amplipriv::oracle

#endif  // AMPLIPRIV_TESTS_ORACLE_VALUES_H_
