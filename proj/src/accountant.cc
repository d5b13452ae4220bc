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

#include "amplipriv/accountant.h"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "amplipriv/status_macros.h"

namespace amplipriv {
namespace {

// Nearest double at or above x.
double RoundUp(long double x) {
  double y = static_cast<double>(x);
  if (static_cast<long double>(y) < x) y = std::nextafter(y, INFINITY);
  return y;
}

absl::Status CheckPStar(double p_star) {
  if (!(p_star >= 0.0 && p_star <= 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("p* must lie in [0, 1], got ", p_star));
  }
  return absl::OkStatus();
}

absl::Status CheckUnitEpsilon(double epsilon) {
  if (!(epsilon > 0.0 && epsilon <= 1.0)) {
    return absl::OutOfRangeError(absl::StrCat(
        "the Gaussian guarantee holds for epsilon in (0, 1], got ", epsilon));
  }
  return absl::OkStatus();
}

long double AmplifiedLong(long double epsilon, long double p_star) {
  return std::log1p(p_star * std::expm1(epsilon));
}

double ScaledDelta(double delta, double p_star) {
  if (p_star == 1.0) return delta;
  return std::min(delta, RoundUp(static_cast<long double>(p_star) * delta));
}

}  // namespace

absl::string_view RouteName(Route route) {
  switch (route) {
    case Route::kGeneric:
      return "generic";
    case Route::kFwlLaplace:
      return "fwl_laplace";
    case Route::kFwlGaussian:
      return "fwl_gaussian";
    case Route::kCorollary:
      return "corollary_bound";
  }
  return "unknown";
}

double AmplifiedEpsilon(double epsilon, double p_star) {
  if (p_star <= 0.0 || epsilon == 0.0) return 0.0;
  if (p_star >= 1.0) return epsilon;
  return std::min(epsilon, RoundUp(AmplifiedLong(epsilon, p_star)));
}

absl::StatusOr<AmplificationReport> AmplifyGeneric(const PrivacyBudget& base,
                                                   double p_star) {
  RETURN_IF_ERROR(CheckPStar(p_star));
  ASSIGN_OR_RETURN(PrivacyBudget checked,
                   PrivacyBudget::Create(base.epsilon, base.delta));
  AmplificationReport report;
  report.base = checked;
  report.p_star = p_star;
  report.route = Route::kGeneric;
  report.amplified = {AmplifiedEpsilon(checked.epsilon, p_star),
                      ScaledDelta(checked.delta, p_star)};
  return report;
}

absl::StatusOr<AmplificationReport> AmplifyFwl(double epsilon, double delta,
                                               double p_star,
                                               const SensitivityBounds& bounds,
                                               NoiseFamily family) {
  RETURN_IF_ERROR(CheckPStar(p_star));
  ASSIGN_OR_RETURN(PrivacyBudget base, PrivacyBudget::Create(epsilon, delta));
  if (family == NoiseFamily::kLaplace && delta != 0.0) {
    return absl::InvalidArgumentError(
        "the Laplace route is pure DP and needs delta = 0");
  }
  if (family == NoiseFamily::kGaussian)
    RETURN_IF_ERROR(CheckUnitEpsilon(epsilon));
  if (!(bounds.c > 0.0)) {
    return absl::FailedPreconditionError(
        "complete-data sensitivity C is 0: the query is constant and there is "
        "nothing to amplify");
  }
  if (!(bounds.c_tilde >= 0.0 && bounds.c_tilde <= bounds.c)) {
    return absl::InvalidArgumentError(
        "masked sensitivity must satisfy 0 <= C~ <= C");
  }
  const long double ratio = static_cast<long double>(bounds.c_tilde) / bounds.c;
  const long double eps0 = ratio * epsilon;
  AmplificationReport report;
  report.base = base;
  report.p_star = p_star;
  report.rho = bounds.rho;
  report.c = bounds.c;
  report.c_tilde = bounds.c_tilde;
  report.route = family == NoiseFamily::kLaplace ? Route::kFwlLaplace
                                                 : Route::kFwlGaussian;
  const double eps0_up = std::min(epsilon, RoundUp(eps0));
  report.scaled_epsilon = eps0_up;
  report.first_order = RoundUp(static_cast<long double>(p_star) * eps0);
  double amplified;
  if (p_star <= 0.0 || eps0 == 0.0L) {
    amplified = 0.0;
  } else if (p_star >= 1.0) {
    amplified = eps0_up;
  } else {
    amplified = std::min(eps0_up, RoundUp(AmplifiedLong(eps0, p_star)));
  }
  report.amplified = {amplified, family == NoiseFamily::kLaplace
                                     ? 0.0
                                     : ScaledDelta(delta, p_star)};
  return report;
}

absl::StatusOr<double> CorollaryBound(double epsilon, double p_star,
                                      double rho) {
  RETURN_IF_ERROR(CheckPStar(p_star));
  if (!(epsilon > 0.0 && epsilon <= 1.0)) {
    return absl::OutOfRangeError(absl::StrCat(
        "the corollary bound holds for epsilon in (0, 1], got ", epsilon));
  }
  if (!(rho > 0.0 && rho <= 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("rho must lie in (0, 1], got ", rho));
  }
  const long double factor = std::min<long double>(
      (std::numbers::e_v<long double> - 1.0L) * p_star, 1.0L);
  return RoundUp(factor * rho * epsilon);
}

absl::StatusOr<AmplificationReport> CorollaryReport(double epsilon,
                                                    double delta, double p_star,
                                                    double rho,
                                                    NoiseFamily family) {
  ASSIGN_OR_RETURN(double bound, CorollaryBound(epsilon, p_star, rho));
  ASSIGN_OR_RETURN(PrivacyBudget base, PrivacyBudget::Create(epsilon, delta));
  if (family == NoiseFamily::kLaplace && delta != 0.0) {
    return absl::InvalidArgumentError(
        "the Laplace route is pure DP and needs delta = 0");
  }
  AmplificationReport report;
  report.base = base;
  report.p_star = p_star;
  report.rho = rho;
  report.route = Route::kCorollary;
  report.amplified = {
      std::min(epsilon, bound),
      family == NoiseFamily::kLaplace ? 0.0 : ScaledDelta(delta, p_star)};
  report.attestations.push_back(
      "all feature-wise Lipschitz constants are equal and rho * d is an "
      "integer (caller attested)");
  return report;
}

}  // namespace amplipriv
