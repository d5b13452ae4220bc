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

#ifndef AMPLIPRIV_NOISE_MECHANISM_H_
#define AMPLIPRIV_NOISE_MECHANISM_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "amplipriv/budget.h"
#include "amplipriv/dataset.h"
#include "amplipriv/fwl_query.h"
#include "amplipriv/missingness.h"

namespace amplipriv {

// Additive-noise release f(z) + Y with i.i.d. Laplace(b) or N(0, sigma^2)
// components.
class NoiseMechanism {
 public:
  // Unchecked construction from an explicit scale; `sensitivity` is the
  // constant the scale was derived from, recorded for reports.
  static absl::StatusOr<NoiseMechanism> Create(FwlQuery query,
                                               NoiseFamily family, double scale,
                                               PrivacyBudget budget,
                                               double sensitivity,
                                               double bound);

  const FwlQuery& query() const { return query_; }
  NoiseFamily family() const { return family_; }
  double scale() const { return scale_; }
  const PrivacyBudget& budget() const { return budget_; }
  double sensitivity() const { return sensitivity_; }
  double bound() const { return bound_; }

 private:
  NoiseMechanism(FwlQuery query, NoiseFamily family, double scale,
                 PrivacyBudget budget, double sensitivity, double bound)
      : query_(std::move(query)),
        family_(family),
        scale_(scale),
        budget_(budget),
        sensitivity_(sensitivity),
        bound_(bound) {}

  FwlQuery query_;
  NoiseFamily family_;
  double scale_;
  PrivacyBudget budget_;
  double sensitivity_;
  double bound_;
};

// Margin-adjusted Gaussian factor (1 + 1e-6) sqrt(2 ln(1.25 / delta)).
double GaussianFactor(double delta);

// b = C_1 / eps with C_1 = 2B sum_j L_j; needs an l1 query and C_1 > 0.
absl::StatusOr<NoiseMechanism> CalibrateLaplace(const FwlQuery& q,
                                                double epsilon, double bound);
// sigma = c C_2 / eps with c = GaussianFactor(delta), eps in (0, 1].
absl::StatusOr<NoiseMechanism> CalibrateGaussian(const FwlQuery& q,
                                                 double epsilon, double delta,
                                                 double bound);
// Same query, family and bound, calibrated for another budget.
absl::StatusOr<NoiseMechanism> Recalibrate(const NoiseMechanism& m,
                                           const PrivacyBudget& budget);

absl::StatusOr<std::vector<double>> RunMechanism(const NoiseMechanism& m,
                                                 const IncompleteDataset& data,
                                                 uint64_t seed);

// Draw a mask, apply it, query, add noise.
struct ComposedMechanism {
  NoiseMechanism noise;
  DatasetMechanism missing;
};

enum class ReleaseMode { kPrivate, kAudit };

struct Release {
  std::vector<double> output;
  // Set only in audit mode; a private release never exposes the mask.
  std::optional<MaskMatrix> mask;
};

absl::StatusOr<Release> RunComposed(const ComposedMechanism& cm,
                                    const CompleteDataset& data, uint64_t seed,
                                    ReleaseMode mode = ReleaseMode::kPrivate);

// Product density of the release at `point`, centred at f(data).
absl::StatusOr<double> LogOutputDensity(const NoiseMechanism& m,
                                        const IncompleteDataset& data,
                                        const std::vector<double>& point);
absl::StatusOr<double> OutputDensity(const NoiseMechanism& m,
                                     const IncompleteDataset& data,
                                     const std::vector<double>& point);

// Log density of one noise component at offset x from its centre.
double NoiseLogDensity(NoiseFamily family, double scale, double x);

// Hex SHA-256 of the seed's decimal rendering; lets a release commit to its
// seed without revealing it.
std::string SeedCommitment(uint64_t seed);

}  // namespace amplipriv

#endif  // AMPLIPRIV_NOISE_MECHANISM_H_
