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

#ifndef AMPLIPRIV_AUDIT_H_
#define AMPLIPRIV_AUDIT_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "amplipriv/accountant.h"
#include "amplipriv/dataset.h"
#include "amplipriv/divergence.h"
#include "amplipriv/missingness.h"
#include "amplipriv/noise_mechanism.h"

namespace amplipriv {

struct WeightedMask {
  MaskMatrix mask;
  double weight = 0.0;
};

// Every mask matrix with positive probability under D(data), in
// lexicographic row order, with its probability. Fails when the support
// exceeds `max_matrices`.
absl::StatusOr<std::vector<WeightedMask>> EnumerateMaskSupport(
    const DatasetMechanism& missing, const CompleteDataset& data,
    size_t max_matrices = size_t{1} << 20);

// Output law of the composed mechanism on `data`: one component per mask
// matrix, components with bit-identical centres merged.
absl::StatusOr<MixtureSpec> OutputMixture(const ComposedMechanism& cm,
                                          const CompleteDataset& data);

// Output law of a discrete base mechanism run on the masked data.
using DiscreteMechanism = std::function<absl::StatusOr<DiscreteDistribution>(
    const IncompleteDataset&)>;
absl::StatusOr<DiscreteDistribution> ComposeDiscrete(
    const DatasetMechanism& missing, const CompleteDataset& data,
    const DiscreteMechanism& base);

// Mask laws of a neighbour pair split on H* (row i* not all-missing).
// w0 is the normalized law on the complement, shared by both datasets;
// w1 and w1p are the normalized laws on H* for left and right.
struct MixtureDecompositionResult {
  double p_star = 0.0;
  size_t differing_index = 0;
  std::vector<WeightedMask> w0;
  std::vector<WeightedMask> w1;
  std::vector<WeightedMask> w1p;
};

absl::StatusOr<MixtureDecompositionResult> MixtureDecomposition(
    const DatasetMechanism& missing, const NeighborPair<CompleteDataset>& pair);

enum class AuditMethod { kExact, kMonteCarlo };

absl::string_view AuditMethodName(AuditMethod method);
absl::StatusOr<AuditMethod> ParseAuditMethod(absl::string_view name);

struct AuditOptions {
  AuditMethod method = AuditMethod::kExact;
  double tolerance = 1e-7;
  size_t samples = 1000000;
  uint64_t seed = 0;
  // Support bound for the accountant; the tight value when absent.
  std::optional<double> rho;
};

// One line of the audit table.
struct AuditRow {
  double base_epsilon = 0.0;
  // eps'_0, where the divergence is evaluated.
  double epsilon = 0.0;
  // The accountant's delta' at epsilon.
  double bound = 0.0;
  double empirical = 0.0;
  AuditMethod method = AuditMethod::kExact;
  double tolerance = 0.0;
  bool pass = false;
  AmplificationReport report;
  DivergenceEstimate left_right;
  DivergenceEstimate right_left;
};

// For each base epsilon: recalibrate the noise, ask the accountant for
// (eps'_0, delta'), and measure the composed divergence in both directions
// at eps'_0. Exact rows pass when empirical <= bound + 10 tolerance, Monte
// Carlo rows when empirical <= bound + the CI half-width.
absl::StatusOr<std::vector<AuditRow>> VerifyAmplification(
    const ComposedMechanism& cm, const NeighborPair<CompleteDataset>& pair,
    const std::vector<double>& base_epsilons, const AuditOptions& options);

// The p* = 1 construction: a MAR mechanism that always observes (i*, j0)
// and the Gaussian release of that coordinate. The composed and the base
// mechanism have the same output law, so amplification cannot occur.
struct TightnessResult {
  double epsilon = 0.0;
  double delta = 0.0;
  double p_star = 0.0;
  double composed_delta = 0.0;
  double base_delta = 0.0;
  double equality_gap = 0.0;
  AmplificationReport generic_report;
};

absl::StatusOr<TightnessResult> TightnessCounterexample(double epsilon,
                                                        double delta,
                                                        double tol = 1e-10);

// The pieces of the construction, exposed for inspection.
struct TightnessConstruction {
  ComposedMechanism composed;
  NeighborPair<CompleteDataset> pair;
};
absl::StatusOr<TightnessConstruction> MakeTightnessConstruction(double epsilon,
                                                                double delta);

}  // namespace amplipriv

#endif  // AMPLIPRIV_AUDIT_H_
