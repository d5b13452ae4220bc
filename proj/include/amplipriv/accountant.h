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

#ifndef AMPLIPRIV_ACCOUNTANT_H_
#define AMPLIPRIV_ACCOUNTANT_H_

#include <optional>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "amplipriv/budget.h"
#include "amplipriv/fwl_query.h"

namespace amplipriv {

enum class Route { kGeneric, kFwlLaplace, kFwlGaussian, kCorollary };

absl::string_view RouteName(Route route);

// Budgets before and after amplification. The amplified budget is an upper
// bound on the privacy level of the composed mechanism, not an exact value.
struct AmplificationReport {
  PrivacyBudget base;
  PrivacyBudget amplified;
  double p_star = 1.0;
  std::optional<double> rho;
  std::optional<double> c;
  std::optional<double> c_tilde;
  Route route = Route::kGeneric;
  // eps_0 = (C~/C) eps on the FWL routes.
  std::optional<double> scaled_epsilon;
  // p* (C~/C) eps.
  std::optional<double> first_order;
  // Hypotheses the caller vouched for rather than the accountant checked.
  std::vector<std::string> attestations;
};

// ln(1 + p (e^eps - 1)) at extended precision, rounded upward and capped at
// eps. Exact at p = 0 and p = 1.
double AmplifiedEpsilon(double epsilon, double p_star);

// (ln(1 + p*(e^eps - 1)), p* delta).
absl::StatusOr<AmplificationReport> AmplifyGeneric(const PrivacyBudget& base,
                                                   double p_star);

// eps_0 = (C~/C) eps, eps'_0 = ln(1 + p*(e^{eps_0} - 1)); delta' = 0 for
// Laplace (which requires delta = 0) and p* delta for Gaussian (which
// requires eps in (0, 1]).
absl::StatusOr<AmplificationReport> AmplifyFwl(double epsilon, double delta,
                                               double p_star,
                                               const SensitivityBounds& bounds,
                                               NoiseFamily family);

// min((e - 1) p*, 1) rho eps for eps in (0, 1]. Valid when all L_j are equal
// and rho d is an integer; the caller attests to that regime.
absl::StatusOr<double> CorollaryBound(double epsilon, double p_star,
                                      double rho);

// CorollaryBound packaged as a report, recording the attestation.
absl::StatusOr<AmplificationReport> CorollaryReport(double epsilon,
                                                    double delta, double p_star,
                                                    double rho,
                                                    NoiseFamily family);

}  // namespace amplipriv

#endif  // AMPLIPRIV_ACCOUNTANT_H_
