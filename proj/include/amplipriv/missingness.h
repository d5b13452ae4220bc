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

#ifndef AMPLIPRIV_MISSINGNESS_H_
#define AMPLIPRIV_MISSINGNESS_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "amplipriv/dataset.h"

namespace amplipriv {

enum class MechanismClass { kMcar, kMar, kMnar };

absl::string_view MechanismClassName(MechanismClass c);

// Feature j missing independently with probability pi[j].
struct McarBernoulli {
  std::vector<double> pi;
};

// McarBernoulli conditioned on observing at most `max_observed` features.
struct CappedBernoulli {
  std::vector<double> pi;
  size_t max_observed = 0;
};

struct PatternEntry {
  Mask mask;
  double prob = 0.0;
};

// Data-independent distribution over an explicit list of masks.
struct McarPattern {
  std::vector<PatternEntry> patterns;
};

// Scores over the candidate list as a function of the anchor values. Each
// anchor coordinate is discretized by its sorted cut list (bin = number of
// cuts <= value) and the bin tuple, read as a mixed-radix number with the
// first anchor most significant, indexes `table`.
struct AnchorScoreRule {
  std::vector<std::vector<double>> cuts;
  std::vector<std::vector<double>> table;
};

// With probability q_all the whole sample is missing; otherwise a candidate
// mask is drawn from the anchor-dependent scores. Every candidate observes
// the anchor, so the law depends on observed values only.
struct MarAnchoredPattern {
  std::vector<size_t> anchor;
  double q_all = 0.0;
  std::vector<Mask> candidates;
  AnchorScoreRule rule;
};

// Feature j missing independently with probability prob_below when
// z_j < threshold and prob_above otherwise. Not MAR; carried so that the
// taxonomy and the error paths have something to reject.
struct MnarSelfMasking {
  double threshold = 0.0;
  double prob_below = 0.0;
  double prob_above = 0.0;
  size_t d = 0;
};

using MechanismFamily =
    std::variant<McarBernoulli, CappedBernoulli, McarPattern,
                 MarAnchoredPattern, MnarSelfMasking>;

// A per-sample missing feature mechanism F on R^d.
class FeatureMechanism {
 public:
  // Validates the family invariants (probabilities in range and normalized,
  // masks of a common length, candidates observing the anchor).
  static absl::StatusOr<FeatureMechanism> Create(MechanismFamily family);

  size_t d() const { return d_; }
  const MechanismFamily& family() const { return family_; }
  absl::string_view kind() const;

 private:
  FeatureMechanism(MechanismFamily family, size_t d)
      : family_(std::move(family)), d_(d) {}

  MechanismFamily family_;
  size_t d_ = 0;
};

// The dataset-level product mechanism D = F^n.
struct DatasetMechanism {
  FeatureMechanism feature;
  size_t n = 0;
};

// P[F(z) = m].
absl::StatusOr<double> MaskProbability(const FeatureMechanism& mech,
                                       std::span<const double> sample,
                                       const Mask& mask);

// Product of row probabilities in row order; summed in log space when
// n > 64.
absl::StatusOr<double> DatasetMaskProbability(const DatasetMechanism& mech,
                                              const CompleteDataset& data,
                                              const MaskMatrix& mask);

// Masks with positive probability for this sample, in ascending mask order.
// Bernoulli families are enumerated and limited to d <= 20.
absl::StatusOr<std::vector<PatternEntry>> SupportOf(
    const FeatureMechanism& mech, std::span<const double> sample);

// Draws one mask row per sample from an independent per-row stream.
absl::StatusOr<MaskMatrix> SampleMask(const DatasetMechanism& mech,
                                      const CompleteDataset& data,
                                      uint64_t seed);

// 1 - P[F(.) = all-missing]. Fails for MNAR mechanisms.
absl::StatusOr<double> PStar(const FeatureMechanism& mech);
absl::StatusOr<double> PStar(const DatasetMechanism& mech);

// Largest observed fraction over all masks any sample can receive.
absl::StatusOr<double> TightRho(const FeatureMechanism& mech);

// True iff no supported mask observes more than a fraction rho of features.
absl::StatusOr<bool> VerifyRho(const FeatureMechanism& mech, double rho);
absl::StatusOr<bool> VerifyRho(const DatasetMechanism& mech, double rho);

// MCAR/MAR by construction, confirmed by a randomized certificate: samples
// agreeing on obs(m) must get bit-identical probabilities for m.
absl::StatusOr<MechanismClass> Classify(const FeatureMechanism& mech);

}  // namespace amplipriv

#endif  // AMPLIPRIV_MISSINGNESS_H_
