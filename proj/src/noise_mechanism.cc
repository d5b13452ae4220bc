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

#include "amplipriv/noise_mechanism.h"

#include <openssl/sha.h>

#include <cmath>
#include <numbers>

#include "absl/status/status.h"
#include "absl/strings/escaping.h"
#include "absl/strings/str_cat.h"
#include "amplipriv/random.h"
#include "amplipriv/status_macros.h"

namespace amplipriv {
namespace {

constexpr double kGaussianMargin = 1.0 + 1e-6;

absl::Status CheckEpsilon(double epsilon) {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    return absl::InvalidArgumentError(
        absl::StrCat("epsilon must be finite and > 0, got ", epsilon));
  }
  return absl::OkStatus();
}

}  // namespace

absl::StatusOr<NoiseMechanism> NoiseMechanism::Create(
    FwlQuery query, NoiseFamily family, double scale, PrivacyBudget budget,
    double sensitivity, double bound) {
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    return absl::InvalidArgumentError(
        absl::StrCat("noise scale must be finite and > 0, got ", scale));
  }
  return NoiseMechanism(std::move(query), family, scale, budget, sensitivity,
                        bound);
}

double GaussianFactor(double delta) {
  return kGaussianMargin * std::sqrt(2.0 * std::log(1.25 / delta));
}

absl::StatusOr<NoiseMechanism> CalibrateLaplace(const FwlQuery& q,
                                                double epsilon, double bound) {
  RETURN_IF_ERROR(CheckEpsilon(epsilon));
  if (q.norm() != Norm::kL1) {
    return absl::InvalidArgumentError(
        "Laplace calibration needs l1 feature-wise Lipschitz constants");
  }
  ASSIGN_OR_RETURN(double c1, SensitivityComplete(q, bound));
  if (!(c1 > 0.0)) {
    return absl::FailedPreconditionError(
        "C_1 = 0: the query is constant and would be released without noise");
  }
  return NoiseMechanism::Create(q, NoiseFamily::kLaplace, c1 / epsilon,
                                {epsilon, 0.0}, c1, bound);
}

absl::StatusOr<NoiseMechanism> CalibrateGaussian(const FwlQuery& q,
                                                 double epsilon, double delta,
                                                 double bound) {
  if (!(epsilon > 0.0 && epsilon <= 1.0)) {
    return absl::OutOfRangeError(absl::StrCat(
        "Gaussian calibration needs epsilon in (0, 1], got ", epsilon));
  }
  if (!(delta > 0.0 && delta <= 1.0)) {
    return absl::OutOfRangeError(absl::StrCat(
        "Gaussian calibration needs delta in (0, 1], got ", delta));
  }
  ASSIGN_OR_RETURN(FwlQuery l2, q.AsNorm(Norm::kL2));
  ASSIGN_OR_RETURN(double c2, SensitivityComplete(l2, bound));
  if (!(c2 > 0.0)) {
    return absl::FailedPreconditionError(
        "C_2 = 0: the query is constant and would be released without noise");
  }
  return NoiseMechanism::Create(std::move(l2), NoiseFamily::kGaussian,
                                GaussianFactor(delta) * c2 / epsilon,
                                {epsilon, delta}, c2, bound);
}

absl::StatusOr<NoiseMechanism> Recalibrate(const NoiseMechanism& m,
                                           const PrivacyBudget& budget) {
  if (m.family() == NoiseFamily::kLaplace) {
    return CalibrateLaplace(m.query(), budget.epsilon, m.bound());
  }
  return CalibrateGaussian(m.query(), budget.epsilon, budget.delta, m.bound());
}

absl::StatusOr<std::vector<double>> RunMechanism(const NoiseMechanism& m,
                                                 const IncompleteDataset& data,
                                                 uint64_t seed) {
  ASSIGN_OR_RETURN(std::vector<double> out, m.query().Evaluate(data));
  RandomStream rng(DeriveSeed(seed, "noise"));
  for (double& v : out) {
    v += m.family() == NoiseFamily::kLaplace ? rng.Laplace(m.scale())
                                             : rng.Gaussian(m.scale());
  }
  return out;
}

absl::StatusOr<Release> RunComposed(const ComposedMechanism& cm,
                                    const CompleteDataset& data, uint64_t seed,
                                    ReleaseMode mode) {
  ASSIGN_OR_RETURN(MaskMatrix mask,
                   SampleMask(cm.missing, data, DeriveSeed(seed, "mask")));
  ASSIGN_OR_RETURN(IncompleteDataset masked, ApplyMask(data, mask));
  ASSIGN_OR_RETURN(std::vector<double> output,
                   RunMechanism(cm.noise, masked, seed));
  Release release{std::move(output), std::nullopt};
  if (mode == ReleaseMode::kAudit) release.mask = std::move(mask);
  return release;
}

double NoiseLogDensity(NoiseFamily family, double scale, double x) {
  if (family == NoiseFamily::kLaplace) {
    return -std::log(2.0 * scale) - std::fabs(x) / scale;
  }
  const double r = x / scale;
  return -0.5 * r * r - std::log(scale) -
         0.5 * std::log(2.0 * std::numbers::pi);
}

absl::StatusOr<double> LogOutputDensity(const NoiseMechanism& m,
                                        const IncompleteDataset& data,
                                        const std::vector<double>& point) {
  ASSIGN_OR_RETURN(std::vector<double> center, m.query().Evaluate(data));
  if (point.size() != center.size()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "point has length ", point.size(), ", release has ", center.size()));
  }
  double total = 0.0;
  for (size_t r = 0; r < point.size(); ++r) {
    total += NoiseLogDensity(m.family(), m.scale(), point[r] - center[r]);
  }
  return total;
}

absl::StatusOr<double> OutputDensity(const NoiseMechanism& m,
                                     const IncompleteDataset& data,
                                     const std::vector<double>& point) {
  ASSIGN_OR_RETURN(double log_density, LogOutputDensity(m, data, point));
  return std::exp(log_density);
}

std::string SeedCommitment(uint64_t seed) {
  const std::string text = absl::StrCat("amplipriv-seed:", seed);
  unsigned char digest[SHA256_DIGEST_LENGTH];
  SHA256(reinterpret_cast<const unsigned char*>(text.data()), text.size(),
         digest);
  return absl::BytesToHexString(absl::string_view(
      reinterpret_cast<const char*>(digest), SHA256_DIGEST_LENGTH));
}

}  // namespace amplipriv
