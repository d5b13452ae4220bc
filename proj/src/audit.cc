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

#include "amplipriv/audit.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <map>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "amplipriv/parallel.h"
#include "amplipriv/random.h"
#include "amplipriv/status_macros.h"

namespace amplipriv {
namespace {

// Row index where two same-shape datasets differ, requiring every other row
// to agree position by position; 0 when they are identical.
absl::StatusOr<size_t> PositionalDifference(const CompleteDataset& a,
                                            const CompleteDataset& b) {
  if (a.n() != b.n() || a.d() != b.d()) {
    return absl::InvalidArgumentError("neighbour datasets differ in shape");
  }
  std::optional<size_t> star;
  for (size_t i = 0; i < a.n(); ++i) {
    bool same = true;
    for (size_t j = 0; j < a.d(); ++j) {
      if (std::bit_cast<uint64_t>(a.at(i, j)) !=
          std::bit_cast<uint64_t>(b.at(i, j))) {
        same = false;
      }
    }
    if (same) continue;
    if (star.has_value()) {
      return absl::InvalidArgumentError(absl::StrCat(
          "rows ", *star, " and ", i,
          " both differ: the audit needs a pair aligned row by row"));
    }
    star = i;
  }
  return star.value_or(0);
}

absl::Status RequireMar(const DatasetMechanism& missing) {
  ASSIGN_OR_RETURN(MechanismClass c, Classify(missing.feature));
  if (c == MechanismClass::kMnar) {
    return absl::FailedPreconditionError(
        "the audit needs an MCAR or MAR mechanism; MNAR mechanisms have no "
        "pair-independent p*");
  }
  return absl::OkStatus();
}

using CenterKey = std::vector<uint64_t>;

CenterKey KeyOf(const std::vector<double>& center) {
  CenterKey key;
  for (double v : center) key.push_back(std::bit_cast<uint64_t>(v));
  return key;
}

}  // namespace

absl::StatusOr<std::vector<WeightedMask>> EnumerateMaskSupport(
    const DatasetMechanism& missing, const CompleteDataset& data,
    size_t max_matrices) {
  if (data.d() != missing.feature.d()) {
    return absl::InvalidArgumentError(absl::StrCat("dataset has d = ", data.d(),
                                                   ", mechanism expects ",
                                                   missing.feature.d()));
  }
  std::vector<std::vector<PatternEntry>> per_row;
  size_t total = 1;
  for (size_t i = 0; i < data.n(); ++i) {
    ASSIGN_OR_RETURN(std::vector<PatternEntry> support,
                     SupportOf(missing.feature, data.row(i)));
    if (support.empty()) {
      return absl::InternalError(absl::StrCat("row ", i, " has empty support"));
    }
    if (total > max_matrices / support.size()) {
      return absl::ResourceExhaustedError(
          absl::StrCat("mask support exceeds ", max_matrices, " matrices"));
    }
    total *= support.size();
    per_row.push_back(std::move(support));
  }
  std::vector<WeightedMask> out;
  out.reserve(total);
  std::vector<size_t> digits(data.n(), 0);
  for (size_t count = 0; count < total; ++count) {
    std::vector<Mask> rows;
    rows.reserve(data.n());
    double weight = 1.0;
    for (size_t i = 0; i < data.n(); ++i) {
      rows.push_back(per_row[i][digits[i]].mask);
      weight *= per_row[i][digits[i]].prob;
    }
    ASSIGN_OR_RETURN(MaskMatrix m, MaskMatrix::Create(std::move(rows)));
    out.push_back({std::move(m), weight});
    // Odometer with the last row fastest.
    for (size_t i = data.n(); i-- > 0;) {
      if (++digits[i] < per_row[i].size()) break;
      digits[i] = 0;
    }
  }
  return out;
}

absl::StatusOr<MixtureSpec> OutputMixture(const ComposedMechanism& cm,
                                          const CompleteDataset& data) {
  ASSIGN_OR_RETURN(std::vector<WeightedMask> support,
                   EnumerateMaskSupport(cm.missing, data));
  std::vector<absl::StatusOr<std::vector<double>>> centers(
      support.size(), absl::UnknownError("not evaluated"));
  ParallelFor(support.size(), [&](size_t k) {
    absl::StatusOr<IncompleteDataset> masked = ApplyMask(data, support[k].mask);
    if (!masked.ok()) {
      centers[k] = masked.status();
      return;
    }
    centers[k] = cm.noise.query().Evaluate(*masked);
  });
  std::map<CenterKey, std::pair<std::vector<double>, long double>> merged;
  for (size_t k = 0; k < support.size(); ++k) {
    if (!centers[k].ok()) return centers[k].status();
    auto& slot = merged[KeyOf(*centers[k])];
    slot.first = *centers[k];
    slot.second += support[k].weight;
  }
  const ComponentFamily family = cm.noise.family() == NoiseFamily::kLaplace
                                     ? ComponentFamily::kLaplace
                                     : ComponentFamily::kGaussian;
  std::vector<MixtureComponent> components;
  for (auto& [key, slot] : merged) {
    components.push_back({static_cast<double>(slot.second), family,
                          std::move(slot.first), cm.noise.scale()});
  }
  return MixtureSpec::Create(std::move(components));
}

absl::StatusOr<DiscreteDistribution> ComposeDiscrete(
    const DatasetMechanism& missing, const CompleteDataset& data,
    const DiscreteMechanism& base) {
  ASSIGN_OR_RETURN(std::vector<WeightedMask> support,
                   EnumerateMaskSupport(missing, data));
  std::vector<double> weights;
  std::vector<DiscreteDistribution> parts;
  long double total = 0.0L;
  for (const WeightedMask& wm : support) total += wm.weight;
  for (const WeightedMask& wm : support) {
    ASSIGN_OR_RETURN(IncompleteDataset masked, ApplyMask(data, wm.mask));
    ASSIGN_OR_RETURN(DiscreteDistribution out, base(masked));
    weights.push_back(static_cast<double>(wm.weight / total));
    parts.push_back(std::move(out));
  }
  return MixDiscrete(weights, parts);
}

absl::StatusOr<MixtureDecompositionResult> MixtureDecomposition(
    const DatasetMechanism& missing,
    const NeighborPair<CompleteDataset>& pair) {
  RETURN_IF_ERROR(RequireMar(missing));
  ASSIGN_OR_RETURN(size_t star, PositionalDifference(pair.left, pair.right));
  ASSIGN_OR_RETURN(double p_star, PStar(missing));
  ASSIGN_OR_RETURN(std::vector<WeightedMask> left,
                   EnumerateMaskSupport(missing, pair.left));
  ASSIGN_OR_RETURN(std::vector<WeightedMask> right,
                   EnumerateMaskSupport(missing, pair.right));

  MixtureDecompositionResult out;
  out.p_star = p_star;
  out.differing_index = star;
  std::map<MaskMatrix, double> complement_left, complement_right;
  long double complement_mass = 0.0L;
  for (const WeightedMask& wm : left) {
    if (wm.mask.row(star).IsAllMissing()) {
      complement_left[wm.mask] = wm.weight;
      complement_mass += wm.weight;
    } else {
      out.w1.push_back(wm);
    }
  }
  for (const WeightedMask& wm : right) {
    if (wm.mask.row(star).IsAllMissing()) {
      complement_right[wm.mask] = wm.weight;
    } else {
      out.w1p.push_back(wm);
    }
  }
  if (complement_left != complement_right) {
    return absl::InternalError(
        "mask probabilities off H* differ between the two datasets: the "
        "mechanism is not MAR as constructed");
  }
  const double measured = 1.0 - static_cast<double>(complement_mass);
  if (std::fabs(measured - p_star) > 1e-12) {
    return absl::InternalError(absl::StrCat("enumerated P[H*] = ", measured,
                                            " disagrees with p* = ", p_star));
  }
  if (p_star < 1.0) {
    for (const auto& [mask, w] : complement_left) {
      out.w0.push_back({mask, w / (1.0 - p_star)});
    }
  }
  for (auto* table : {&out.w1, &out.w1p}) {
    for (WeightedMask& wm : *table) wm.weight /= p_star;
  }
  return out;
}

absl::string_view AuditMethodName(AuditMethod method) {
  return method == AuditMethod::kExact ? "exact" : "mc";
}

absl::StatusOr<AuditMethod> ParseAuditMethod(absl::string_view name) {
  if (name == "exact" || name == "quadrature") return AuditMethod::kExact;
  if (name == "mc" || name == "monte_carlo") return AuditMethod::kMonteCarlo;
  return absl::InvalidArgumentError(
      absl::StrCat("unknown audit method '", name, "' (expected exact or mc)"));
}

absl::StatusOr<std::vector<AuditRow>> VerifyAmplification(
    const ComposedMechanism& cm, const NeighborPair<CompleteDataset>& pair,
    const std::vector<double>& base_epsilons, const AuditOptions& options) {
  RETURN_IF_ERROR(RequireMar(cm.missing));
  RETURN_IF_ERROR(PositionalDifference(pair.left, pair.right).status());
  if (options.method == AuditMethod::kExact &&
      cm.noise.query().output_dim() != 1) {
    return absl::InvalidArgumentError(
        absl::StrCat("exact audit needs a 1-D release, the query has k = ",
                     cm.noise.query().output_dim(), "; use the mc method"));
  }
  ASSIGN_OR_RETURN(double p_star, PStar(cm.missing));
  double rho;
  if (options.rho.has_value()) {
    ASSIGN_OR_RETURN(bool ok, VerifyRho(cm.missing, *options.rho));
    if (!ok) {
      return absl::FailedPreconditionError(absl::StrCat(
          "the mask support observes more than rho = ", *options.rho,
          " of the features"));
    }
    rho = *options.rho;
  } else {
    ASSIGN_OR_RETURN(rho, TightRho(cm.missing.feature));
    // A support that never observes anything still needs rho > 0; the
    // observed cap stays 0.
    if (rho == 0.0) rho = std::numeric_limits<double>::min();
  }

  std::vector<AuditRow> rows;
  for (size_t e = 0; e < base_epsilons.size(); ++e) {
    const double eps = base_epsilons[e];
    const double delta = cm.noise.family() == NoiseFamily::kLaplace
                             ? 0.0
                             : cm.noise.budget().delta;
    ASSIGN_OR_RETURN(NoiseMechanism noise,
                     Recalibrate(cm.noise, PrivacyBudget{eps, delta}));
    ASSIGN_OR_RETURN(SensitivityBounds bounds,
                     SensitivityMasked(noise.query(), noise.bound(), rho));
    ASSIGN_OR_RETURN(AmplificationReport report,
                     AmplifyFwl(eps, delta, p_star, bounds, noise.family()));
    const ComposedMechanism calibrated{noise, cm.missing};
    ASSIGN_OR_RETURN(MixtureSpec p, OutputMixture(calibrated, pair.left));
    ASSIGN_OR_RETURN(MixtureSpec q, OutputMixture(calibrated, pair.right));
    AuditRow row;
    row.base_epsilon = eps;
    row.epsilon = report.amplified.epsilon;
    row.bound = report.amplified.delta;
    row.method = options.method;
    row.report = report;
    if (options.method == AuditMethod::kExact) {
      ASSIGN_OR_RETURN(row.left_right, HockeyStickMixture1d(p, q, row.epsilon,
                                                            options.tolerance));
      ASSIGN_OR_RETURN(row.right_left, HockeyStickMixture1d(q, p, row.epsilon,
                                                            options.tolerance));
      row.empirical = std::max(row.left_right.value, row.right_left.value);
      row.tolerance =
          std::max(row.left_right.tolerance, row.right_left.tolerance);
      row.pass = row.empirical <= row.bound + 10.0 * row.tolerance;
    } else {
      ASSIGN_OR_RETURN(
          row.left_right,
          McDeltaEstimate(p, q, row.epsilon, options.samples,
                          DeriveSeed(options.seed, "audit-left-right", e)));
      ASSIGN_OR_RETURN(
          row.right_left,
          McDeltaEstimate(q, p, row.epsilon, options.samples,
                          DeriveSeed(options.seed, "audit-right-left", e)));
      const DivergenceEstimate& worse =
          row.left_right.value >= row.right_left.value ? row.left_right
                                                       : row.right_left;
      row.empirical = worse.value;
      row.tolerance = worse.tolerance;
      row.pass = row.empirical <= row.bound + row.tolerance;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

absl::StatusOr<TightnessConstruction> MakeTightnessConstruction(double epsilon,
                                                                double delta) {
  constexpr size_t kStar = 0;
  constexpr size_t kFeature = 0;
  constexpr double kBound = 1.0;
  ASSIGN_OR_RETURN(CompleteDataset left,
                   CompleteDataset::Create(
                       {{kBound, 0.5, -0.5}, {0.25, -0.75, 0.5}}, kBound));
  ASSIGN_OR_RETURN(CompleteDataset right,
                   left.WithRow(kStar, {-kBound, 0.5, -0.5}));
  // Every candidate observes the anchor feature j0; the scores depend on
  // its sign, so the mechanism is MAR but not MCAR.
  MarAnchoredPattern mar;
  mar.anchor = {kFeature};
  mar.q_all = 0.0;
  mar.candidates = {Mask({0, 0, 0}), Mask({0, 1, 1}), Mask({0, 1, 0})};
  mar.rule.cuts = {{0.0}};
  mar.rule.table = {{0.2, 0.5, 0.3}, {0.6, 0.1, 0.3}};
  ASSIGN_OR_RETURN(FeatureMechanism feature, FeatureMechanism::Create(mar));
  ASSIGN_OR_RETURN(FwlQuery query,
                   MakeCoordinateQuery(left.n(), left.d(), kStar, kFeature));
  ASSIGN_OR_RETURN(NoiseMechanism noise,
                   CalibrateGaussian(query, epsilon, delta, kBound));
  return TightnessConstruction{
      ComposedMechanism{std::move(noise), DatasetMechanism{feature, left.n()}},
      NeighborPair<CompleteDataset>{left, right, kStar}};
}

absl::StatusOr<TightnessResult> TightnessCounterexample(double epsilon,
                                                        double delta,
                                                        double tol) {
  if (!(delta > 0.0 && delta < 1.0)) {
    return absl::OutOfRangeError("the construction needs delta in (0, 1)");
  }
  ASSIGN_OR_RETURN(TightnessConstruction c,
                   MakeTightnessConstruction(epsilon, delta));
  const NoiseMechanism& noise = c.composed.noise;
  TightnessResult out;
  out.epsilon = epsilon;
  out.delta = delta;
  ASSIGN_OR_RETURN(out.p_star, PStar(c.composed.missing));

  ASSIGN_OR_RETURN(MixtureSpec composed_left,
                   OutputMixture(c.composed, c.pair.left));
  ASSIGN_OR_RETURN(MixtureSpec composed_right,
                   OutputMixture(c.composed, c.pair.right));
  ASSIGN_OR_RETURN(
      std::vector<double> base_left,
      noise.query().Evaluate(IncompleteDataset::FromComplete(c.pair.left)));
  ASSIGN_OR_RETURN(
      std::vector<double> base_right,
      noise.query().Evaluate(IncompleteDataset::FromComplete(c.pair.right)));
  ASSIGN_OR_RETURN(MixtureSpec plain_left,
                   MixtureSpec::Create({{1.0, ComponentFamily::kGaussian,
                                         base_left, noise.scale()}}));
  ASSIGN_OR_RETURN(MixtureSpec plain_right,
                   MixtureSpec::Create({{1.0, ComponentFamily::kGaussian,
                                         base_right, noise.scale()}}));

  ASSIGN_OR_RETURN(
      DivergenceEstimate c_lr,
      HockeyStickMixture1d(composed_left, composed_right, epsilon, tol));
  ASSIGN_OR_RETURN(
      DivergenceEstimate c_rl,
      HockeyStickMixture1d(composed_right, composed_left, epsilon, tol));
  ASSIGN_OR_RETURN(DivergenceEstimate b_lr,
                   HockeyStickMixture1d(plain_left, plain_right, epsilon, tol));
  ASSIGN_OR_RETURN(DivergenceEstimate b_rl,
                   HockeyStickMixture1d(plain_right, plain_left, epsilon, tol));
  out.composed_delta = std::max(c_lr.value, c_rl.value);
  out.base_delta = std::max(b_lr.value, b_rl.value);
  out.equality_gap = std::fabs(out.composed_delta - out.base_delta);
  ASSIGN_OR_RETURN(out.generic_report,
                   AmplifyGeneric(PrivacyBudget{epsilon, delta}, out.p_star));
  return out;
}

}  // namespace amplipriv
