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

#include "amplipriv/missingness.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <set>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "amplipriv/random.h"
#include "amplipriv/status_macros.h"

namespace amplipriv {
namespace {

constexpr double kNormTolerance = 1e-12;
constexpr size_t kMaxEnumeratedFeatures = 20;
constexpr size_t kLogSpaceRows = 64;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

absl::Status CheckProbability(double p, absl::string_view what) {
  if (!(p >= 0.0 && p <= 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat(what, " must lie in [0, 1], got ", p));
  }
  return absl::OkStatus();
}

absl::Status CheckProbabilities(const std::vector<double>& pi) {
  if (pi.empty()) {
    return absl::InvalidArgumentError("pi must have at least one entry");
  }
  for (size_t j = 0; j < pi.size(); ++j) {
    RETURN_IF_ERROR(CheckProbability(pi[j], absl::StrCat("pi[", j, "]")));
  }
  return absl::OkStatus();
}

absl::Status CheckNormalized(const std::vector<double>& probs,
                             absl::string_view what) {
  double total = 0.0;
  for (double p : probs) {
    RETURN_IF_ERROR(CheckProbability(p, what));
    total += p;
  }
  if (std::fabs(total - 1.0) > kNormTolerance) {
    return absl::InvalidArgumentError(
        absl::StrCat(what, " sum to ", total, ", expected 1"));
  }
  return absl::OkStatus();
}

// counts[j][c] = P(exactly c of the features j..d-1 are observed).
std::vector<std::vector<long double>> SuffixObservedCounts(
    const std::vector<double>& pi) {
  const size_t d = pi.size();
  std::vector<std::vector<long double>> counts(d + 1);
  counts[d] = {1.0L};
  for (size_t j = d; j-- > 0;) {
    const std::vector<long double>& next = counts[j + 1];
    std::vector<long double>& cur = counts[j];
    cur.assign(next.size() + 1, 0.0L);
    const long double miss = pi[j];
    for (size_t c = 0; c < next.size(); ++c) {
      cur[c] += miss * next[c];
      cur[c + 1] += (1.0L - miss) * next[c];
    }
  }
  return counts;
}

long double AtMost(const std::vector<long double>& counts, long long r) {
  if (r < 0) return 0.0L;
  long double total = 0.0L;
  for (size_t c = 0; c < counts.size() && static_cast<long long>(c) <= r; ++c) {
    total += counts[c];
  }
  return total;
}

long double CappedNormalizer(const CappedBernoulli& f) {
  return AtMost(SuffixObservedCounts(f.pi)[0],
                static_cast<long long>(f.max_observed));
}

double BernoulliProduct(const std::vector<double>& pi, const Mask& mask) {
  double p = 1.0;
  for (size_t j = 0; j < pi.size(); ++j) {
    p *= mask.missing(j) ? pi[j] : 1.0 - pi[j];
  }
  return p;
}

size_t ScoreRow(const MarAnchoredPattern& f, std::span<const double> sample) {
  size_t index = 0;
  for (size_t a = 0; a < f.anchor.size(); ++a) {
    const std::vector<double>& cuts = f.rule.cuts[a];
    const double value = sample[f.anchor[a]];
    const size_t bin = static_cast<size_t>(
        std::upper_bound(cuts.begin(), cuts.end(), value) - cuts.begin());
    index = index * (cuts.size() + 1) + bin;
  }
  return index;
}

std::vector<double> MnarMissProbs(const MnarSelfMasking& f,
                                  std::span<const double> sample) {
  std::vector<double> pi(f.d);
  for (size_t j = 0; j < f.d; ++j) {
    pi[j] = sample[j] < f.threshold ? f.prob_below : f.prob_above;
  }
  return pi;
}

absl::StatusOr<std::vector<PatternEntry>> EnumerateBernoulli(
    size_t d, const std::function<double(const Mask&)>& prob) {
  if (d > kMaxEnumeratedFeatures) {
    return absl::ResourceExhaustedError(absl::StrCat(
        "support enumeration limited to d <= ", kMaxEnumeratedFeatures,
        ", got d = ", d));
  }
  std::vector<PatternEntry> out;
  for (uint64_t code = 0; code < (uint64_t{1} << d); ++code) {
    std::vector<uint8_t> bits(d);
    // Most significant bit first so codes ascend in mask order.
    for (size_t j = 0; j < d; ++j) bits[j] = (code >> (d - 1 - j)) & 1;
    Mask mask(std::move(bits));
    const double p = prob(mask);
    if (p > 0.0) out.push_back({std::move(mask), p});
  }
  return out;
}

size_t CountBelowOne(const std::vector<double>& pi) {
  return static_cast<size_t>(
      std::count_if(pi.begin(), pi.end(), [](double p) { return p < 1.0; }));
}

}  // namespace

absl::string_view MechanismClassName(MechanismClass c) {
  switch (c) {
    case MechanismClass::kMcar:
      return "MCAR";
    case MechanismClass::kMar:
      return "MAR";
    case MechanismClass::kMnar:
      return "MNAR";
  }
  return "unknown";
}

absl::StatusOr<FeatureMechanism> FeatureMechanism::Create(
    MechanismFamily family) {
  absl::StatusOr<size_t> d = std::visit(
      Overloaded{
          [](const McarBernoulli& f) -> absl::StatusOr<size_t> {
            RETURN_IF_ERROR(CheckProbabilities(f.pi));
            return f.pi.size();
          },
          [](const CappedBernoulli& f) -> absl::StatusOr<size_t> {
            RETURN_IF_ERROR(CheckProbabilities(f.pi));
            if (f.max_observed > f.pi.size()) {
              return absl::InvalidArgumentError(
                  absl::StrCat("max_observed = ", f.max_observed,
                               " exceeds d = ", f.pi.size()));
            }
            if (CappedNormalizer(f) <= 0.0L) {
              return absl::InvalidArgumentError(
                  "capped Bernoulli has empty support");
            }
            return f.pi.size();
          },
          [](const McarPattern& f) -> absl::StatusOr<size_t> {
            if (f.patterns.empty()) {
              return absl::InvalidArgumentError(
                  "pattern mechanism needs at least one pattern");
            }
            const size_t d = f.patterns.front().mask.size();
            if (d == 0) return absl::InvalidArgumentError("empty mask");
            std::vector<double> probs;
            std::set<Mask> seen;
            for (const PatternEntry& e : f.patterns) {
              if (e.mask.size() != d) {
                return absl::InvalidArgumentError(
                    absl::StrCat("pattern mask ", e.mask.ToString(),
                                 " does not have length ", d));
              }
              if (!seen.insert(e.mask).second) {
                return absl::InvalidArgumentError(absl::StrCat(
                    "pattern mask ", e.mask.ToString(), " listed twice"));
              }
              probs.push_back(e.prob);
            }
            RETURN_IF_ERROR(CheckNormalized(probs, "pattern probabilities"));
            return d;
          },
          [](const MarAnchoredPattern& f) -> absl::StatusOr<size_t> {
            if (f.candidates.empty()) {
              return absl::InvalidArgumentError(
                  "anchored mechanism needs at least one candidate mask");
            }
            const size_t d = f.candidates.front().size();
            if (d == 0) return absl::InvalidArgumentError("empty mask");
            RETURN_IF_ERROR(CheckProbability(f.q_all, "q_all"));
            std::set<size_t> anchors;
            for (size_t a : f.anchor) {
              if (a >= d) {
                return absl::InvalidArgumentError(absl::StrCat(
                    "anchor index ", a, " out of range for d = ", d));
              }
              if (!anchors.insert(a).second) {
                return absl::InvalidArgumentError(
                    absl::StrCat("anchor index ", a, " listed twice"));
              }
            }
            std::set<Mask> seen;
            for (const Mask& m : f.candidates) {
              if (m.size() != d) {
                return absl::InvalidArgumentError(
                    absl::StrCat("candidate mask ", m.ToString(),
                                 " does not have length ", d));
              }
              for (size_t a : f.anchor) {
                if (m.missing(a)) {
                  return absl::InvalidArgumentError(
                      absl::StrCat("candidate mask ", m.ToString(),
                                   " hides anchor feature ", a));
                }
              }
              if (!seen.insert(m).second) {
                return absl::InvalidArgumentError(absl::StrCat(
                    "candidate mask ", m.ToString(), " listed twice"));
              }
            }
            if (f.rule.cuts.size() != f.anchor.size()) {
              return absl::InvalidArgumentError(
                  "score rule needs one cut list per anchor feature");
            }
            size_t rows = 1;
            for (const std::vector<double>& cuts : f.rule.cuts) {
              for (size_t c = 0; c < cuts.size(); ++c) {
                if (!std::isfinite(cuts[c]) ||
                    (c > 0 && !(cuts[c - 1] < cuts[c]))) {
                  return absl::InvalidArgumentError(
                      "cut lists must be finite and strictly increasing");
                }
              }
              rows *= cuts.size() + 1;
            }
            if (f.rule.table.size() != rows) {
              return absl::InvalidArgumentError(
                  absl::StrCat("score table has ", f.rule.table.size(),
                               " rows, the cut lists define ", rows));
            }
            for (const std::vector<double>& scores : f.rule.table) {
              if (scores.size() != f.candidates.size()) {
                return absl::InvalidArgumentError(absl::StrCat(
                    "score row has ", scores.size(), " entries for ",
                    f.candidates.size(), " candidates"));
              }
              RETURN_IF_ERROR(CheckNormalized(scores, "scores"));
            }
            return d;
          },
          [](const MnarSelfMasking& f) -> absl::StatusOr<size_t> {
            if (f.d == 0) return absl::InvalidArgumentError("d must be >= 1");
            if (!std::isfinite(f.threshold)) {
              return absl::InvalidArgumentError("threshold must be finite");
            }
            RETURN_IF_ERROR(CheckProbability(f.prob_below, "prob_below"));
            RETURN_IF_ERROR(CheckProbability(f.prob_above, "prob_above"));
            return f.d;
          },
      },
      family);
  if (!d.ok()) return d.status();
  return FeatureMechanism(std::move(family), *d);
}

absl::string_view FeatureMechanism::kind() const {
  return std::visit(
      Overloaded{
          [](const McarBernoulli&) {
            return absl::string_view("mcar_bernoulli");
          },
          [](const CappedBernoulli&) {
            return absl::string_view("capped_bernoulli");
          },
          [](const McarPattern&) { return absl::string_view("mcar_pattern"); },
          [](const MarAnchoredPattern&) {
            return absl::string_view("mar_anchored");
          },
          [](const MnarSelfMasking&) {
            return absl::string_view("mnar_self_masking");
          },
      },
      family_);
}

absl::StatusOr<double> MaskProbability(const FeatureMechanism& mech,
                                       std::span<const double> sample,
                                       const Mask& mask) {
  if (sample.size() != mech.d() || mask.size() != mech.d()) {
    return absl::InvalidArgumentError(
        absl::StrCat("sample has length ", sample.size(), " and mask length ",
                     mask.size(), ", mechanism expects ", mech.d()));
  }
  return std::visit(
      Overloaded{
          [&](const McarBernoulli& f) { return BernoulliProduct(f.pi, mask); },
          [&](const CappedBernoulli& f) {
            if (mask.ObservedCount() > f.max_observed) return 0.0;
            return static_cast<double>(
                static_cast<long double>(BernoulliProduct(f.pi, mask)) /
                CappedNormalizer(f));
          },
          [&](const McarPattern& f) {
            for (const PatternEntry& e : f.patterns) {
              if (e.mask == mask) return e.prob;
            }
            return 0.0;
          },
          [&](const MarAnchoredPattern& f) {
            double p = mask.IsAllMissing() ? f.q_all : 0.0;
            const std::vector<double>& scores =
                f.rule.table[ScoreRow(f, sample)];
            for (size_t c = 0; c < f.candidates.size(); ++c) {
              if (f.candidates[c] == mask) p += (1.0 - f.q_all) * scores[c];
            }
            return p;
          },
          [&](const MnarSelfMasking& f) {
            return BernoulliProduct(MnarMissProbs(f, sample), mask);
          },
      },
      mech.family());
}

absl::StatusOr<double> DatasetMaskProbability(const DatasetMechanism& mech,
                                              const CompleteDataset& data,
                                              const MaskMatrix& mask) {
  if (data.n() != mask.n() || data.d() != mask.d()) {
    return absl::InvalidArgumentError(absl::StrCat("mask is ", mask.n(), " x ",
                                                   mask.d(), " but dataset is ",
                                                   data.n(), " x ", data.d()));
  }
  if (mech.n != 0 && mech.n != data.n()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "mechanism is for n = ", mech.n, ", dataset has n = ", data.n()));
  }
  const bool log_space = data.n() > kLogSpaceRows;
  double product = 1.0;
  double log_sum = 0.0;
  for (size_t i = 0; i < data.n(); ++i) {
    ASSIGN_OR_RETURN(double p,
                     MaskProbability(mech.feature, data.row(i), mask.row(i)));
    if (p == 0.0) return 0.0;
    if (log_space) {
      log_sum += std::log(p);
    } else {
      product *= p;
    }
  }
  return log_space ? std::exp(log_sum) : product;
}

absl::StatusOr<std::vector<PatternEntry>> SupportOf(
    const FeatureMechanism& mech, std::span<const double> sample) {
  if (sample.size() != mech.d()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "sample has length ", sample.size(), ", mechanism expects ", mech.d()));
  }
  auto prob = [&](const Mask& m) { return *MaskProbability(mech, sample, m); };
  absl::StatusOr<std::vector<PatternEntry>> support = std::visit(
      Overloaded{
          [&](const McarPattern& f)
              -> absl::StatusOr<std::vector<PatternEntry>> {
            std::vector<PatternEntry> out;
            for (const PatternEntry& e : f.patterns) {
              if (e.prob > 0.0) out.push_back(e);
            }
            return out;
          },
          [&](const MarAnchoredPattern& f)
              -> absl::StatusOr<std::vector<PatternEntry>> {
            std::set<Mask> masks(f.candidates.begin(), f.candidates.end());
            masks.insert(Mask::AllMissing(mech.d()));
            std::vector<PatternEntry> out;
            for (const Mask& m : masks) {
              const double p = prob(m);
              if (p > 0.0) out.push_back({m, p});
            }
            return out;
          },
          [&](const auto&) -> absl::StatusOr<std::vector<PatternEntry>> {
            return EnumerateBernoulli(mech.d(), prob);
          },
      },
      mech.family());
  if (!support.ok()) return support.status();
  std::sort(support->begin(), support->end(),
            [](const PatternEntry& a, const PatternEntry& b) {
              return a.mask < b.mask;
            });
  return support;
}

namespace {

Mask SampleBernoulliRow(const std::vector<double>& pi, RandomStream& rng) {
  std::vector<uint8_t> bits(pi.size());
  for (size_t j = 0; j < pi.size(); ++j) bits[j] = rng.Bernoulli(pi[j]) ? 1 : 0;
  return Mask(std::move(bits));
}

// Exact draw from the Bernoulli law conditioned on the observed-count cap,
// one feature at a time.
Mask SampleCappedRow(const CappedBernoulli& f,
                     const std::vector<std::vector<long double>>& counts,
                     RandomStream& rng) {
  const size_t d = f.pi.size();
  std::vector<uint8_t> bits(d, 1);
  long long budget = static_cast<long long>(f.max_observed);
  for (size_t j = 0; j < d; ++j) {
    const long double total = AtMost(counts[j], budget);
    const long double observe =
        (1.0L - f.pi[j]) * AtMost(counts[j + 1], budget - 1);
    const double p_obs =
        total > 0.0L ? static_cast<double>(observe / total) : 0.0;
    if (rng.Bernoulli(p_obs)) {
      bits[j] = 0;
      --budget;
    }
  }
  return Mask(std::move(bits));
}

// Inverse CDF over a probability vector; returns the last positive index
// when rounding leaves the uniform above the cumulative sum.
size_t SampleIndex(const std::vector<double>& probs, RandomStream& rng) {
  const double u = rng.Uniform01();
  double cumulative = 0.0;
  size_t last_positive = 0;
  for (size_t k = 0; k < probs.size(); ++k) {
    if (probs[k] <= 0.0) continue;
    cumulative += probs[k];
    last_positive = k;
    if (u < cumulative) return k;
  }
  return last_positive;
}

}  // namespace

absl::StatusOr<MaskMatrix> SampleMask(const DatasetMechanism& mech,
                                      const CompleteDataset& data,
                                      uint64_t seed) {
  if (data.d() != mech.feature.d()) {
    return absl::InvalidArgumentError(absl::StrCat("dataset has d = ", data.d(),
                                                   ", mechanism expects ",
                                                   mech.feature.d()));
  }
  std::vector<std::vector<long double>> capped_counts;
  if (const auto* f = std::get_if<CappedBernoulli>(&mech.feature.family())) {
    capped_counts = SuffixObservedCounts(f->pi);
  }
  std::vector<Mask> rows;
  rows.reserve(data.n());
  for (size_t i = 0; i < data.n(); ++i) {
    RandomStream rng(DeriveSeed(seed, "mask-row", i));
    const Row& z = data.row(i);
    rows.push_back(std::visit(
        Overloaded{
            [&](const McarBernoulli& f) {
              return SampleBernoulliRow(f.pi, rng);
            },
            [&](const CappedBernoulli& f) {
              return SampleCappedRow(f, capped_counts, rng);
            },
            [&](const McarPattern& f) {
              std::vector<double> probs;
              for (const PatternEntry& e : f.patterns) probs.push_back(e.prob);
              return f.patterns[SampleIndex(probs, rng)].mask;
            },
            [&](const MarAnchoredPattern& f) {
              if (rng.Bernoulli(f.q_all)) return Mask::AllMissing(data.d());
              const std::vector<double>& scores = f.rule.table[ScoreRow(f, z)];
              return f.candidates[SampleIndex(scores, rng)];
            },
            [&](const MnarSelfMasking& f) {
              return SampleBernoulliRow(MnarMissProbs(f, z), rng);
            },
        },
        mech.feature.family()));
  }
  return MaskMatrix::Create(std::move(rows));
}

absl::StatusOr<double> PStar(const FeatureMechanism& mech) {
  return std::visit(
      Overloaded{
          [](const McarBernoulli& f) -> absl::StatusOr<double> {
            double all_missing = 1.0;
            for (double p : f.pi) all_missing *= p;
            return 1.0 - all_missing;
          },
          [](const CappedBernoulli& f) -> absl::StatusOr<double> {
            long double all_missing = 1.0L;
            for (double p : f.pi) all_missing *= p;
            return static_cast<double>(1.0L -
                                       all_missing / CappedNormalizer(f));
          },
          [](const McarPattern& f) -> absl::StatusOr<double> {
            for (const PatternEntry& e : f.patterns) {
              if (e.mask.IsAllMissing()) return 1.0 - e.prob;
            }
            return 1.0;
          },
          [](const MarAnchoredPattern& f) -> absl::StatusOr<double> {
            // Only an empty anchor admits an all-missing candidate, and then
            // the table has a single row.
            double q = f.q_all;
            for (size_t c = 0; c < f.candidates.size(); ++c) {
              if (f.candidates[c].IsAllMissing()) {
                q += (1.0 - f.q_all) * f.rule.table.front()[c];
              }
            }
            return 1.0 - q;
          },
          [](const MnarSelfMasking&) -> absl::StatusOr<double> {
            return absl::FailedPreconditionError(
                "p* is defined only under the MAR hypothesis (MCAR included): "
                "this MNAR mechanism's all-missing probability depends on the "
                "record itself, so no pair-independent p* exists");
          },
      },
      mech.family());
}

absl::StatusOr<double> PStar(const DatasetMechanism& mech) {
  return PStar(mech.feature);
}

absl::StatusOr<double> TightRho(const FeatureMechanism& mech) {
  const double d = static_cast<double>(mech.d());
  return std::visit(
      Overloaded{
          [&](const McarBernoulli& f) -> absl::StatusOr<double> {
            return CountBelowOne(f.pi) / d;
          },
          [&](const CappedBernoulli& f) -> absl::StatusOr<double> {
            return std::min(CountBelowOne(f.pi), f.max_observed) / d;
          },
          [&](const McarPattern& f) -> absl::StatusOr<double> {
            size_t most = 0;
            for (const PatternEntry& e : f.patterns) {
              if (e.prob > 0.0) most = std::max(most, e.mask.ObservedCount());
            }
            return most / d;
          },
          [&](const MarAnchoredPattern& f) -> absl::StatusOr<double> {
            size_t most = 0;
            if (f.q_all < 1.0) {
              for (size_t c = 0; c < f.candidates.size(); ++c) {
                const bool reachable = std::any_of(
                    f.rule.table.begin(), f.rule.table.end(),
                    [c](const std::vector<double>& s) { return s[c] > 0.0; });
                if (reachable) {
                  most = std::max(most, f.candidates[c].ObservedCount());
                }
              }
            }
            return most / d;
          },
          [&](const MnarSelfMasking& f) -> absl::StatusOr<double> {
            const double least = std::min(f.prob_below, f.prob_above);
            return least < 1.0 ? 1.0 : 0.0;
          },
      },
      mech.family());
}

absl::StatusOr<bool> VerifyRho(const FeatureMechanism& mech, double rho) {
  if (!(rho > 0.0 && rho <= 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("rho must lie in (0, 1], got ", rho));
  }
  if (rho == 1.0) return true;
  ASSIGN_OR_RETURN(double tight, TightRho(mech));
  const double d = static_cast<double>(mech.d());
  // Compare counts, not fractions, so 0.3 * 10 still admits 3 features.
  return std::round(tight * d) <= rho * d * (1.0 + 1e-12);
}

absl::StatusOr<bool> VerifyRho(const DatasetMechanism& mech, double rho) {
  return VerifyRho(mech.feature, rho);
}

namespace {

constexpr uint64_t kCertificateSeed = 0x6d61722d63657274ULL;
constexpr int kCertificateTrials = 256;

// Values that exercise every bin of every anchor, plus generic draws.
double CertificateValue(const FeatureMechanism& mech, size_t j,
                        RandomStream& rng) {
  if (const auto* f = std::get_if<MarAnchoredPattern>(&mech.family())) {
    for (size_t a = 0; a < f->anchor.size(); ++a) {
      if (f->anchor[a] != j || f->rule.cuts[a].empty()) continue;
      const std::vector<double>& cuts = f->rule.cuts[a];
      const double cut = cuts[rng.UniformIndex(cuts.size())];
      switch (rng.UniformIndex(4)) {
        case 0:
          return cut;
        case 1:
          return std::nextafter(cut, -INFINITY);
        case 2:
          return cut + rng.Uniform(-1.0, 1.0);
        default:
          break;
      }
    }
  }
  if (const auto* f = std::get_if<MnarSelfMasking>(&mech.family())) {
    return f->threshold + rng.Uniform(-1.0, 1.0);
  }
  return rng.Uniform(-10.0, 10.0);
}

bool ConstantScores(const MarAnchoredPattern& f) {
  return std::all_of(
      f.rule.table.begin(), f.rule.table.end(),
      [&](const std::vector<double>& s) { return s == f.rule.table.front(); });
}

}  // namespace

absl::StatusOr<MechanismClass> Classify(const FeatureMechanism& mech) {
  MechanismClass claimed = std::visit(
      Overloaded{
          [](const MarAnchoredPattern& f) {
            return ConstantScores(f) ? MechanismClass::kMcar
                                     : MechanismClass::kMar;
          },
          [](const MnarSelfMasking&) { return MechanismClass::kMnar; },
          [](const auto&) { return MechanismClass::kMcar; },
      },
      mech.family());
  if (claimed == MechanismClass::kMnar) return claimed;

  const size_t d = mech.d();
  RandomStream rng(kCertificateSeed);
  for (int trial = 0; trial < kCertificateTrials; ++trial) {
    Row z(d);
    for (size_t j = 0; j < d; ++j) z[j] = CertificateValue(mech, j, rng);
    Mask m;
    if (rng.Bernoulli(0.5) && d <= kMaxEnumeratedFeatures) {
      ASSIGN_OR_RETURN(std::vector<PatternEntry> support, SupportOf(mech, z));
      m = support[rng.UniformIndex(support.size())].mask;
    } else {
      std::vector<uint8_t> bits(d);
      for (auto& b : bits) b = rng.Bernoulli(0.5) ? 1 : 0;
      m = Mask(std::move(bits));
    }
    // MCAR must ignore every coordinate; MAR only the hidden ones.
    Row z2 = z;
    for (size_t j = 0; j < d; ++j) {
      if (claimed == MechanismClass::kMcar || m.missing(j)) {
        z2[j] = CertificateValue(mech, j, rng);
      }
    }
    ASSIGN_OR_RETURN(double p1, MaskProbability(mech, z, m));
    ASSIGN_OR_RETURN(double p2, MaskProbability(mech, z2, m));
    if (p1 != p2) {
      return absl::InternalError(absl::StrCat(
          "classification certificate failed for ", mech.kind(), ": mask ",
          m.ToString(), " gets probabilities ", p1, " and ", p2,
          " on samples that agree where it observes"));
    }
  }
  return claimed;
}

}  // namespace amplipriv
