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

#ifndef AMPLIPRIV_TESTS_TEST_SUPPORT_H_
#define AMPLIPRIV_TESTS_TEST_SUPPORT_H_

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "amplipriv/dataset.h"
#include "amplipriv/fwl_query.h"
#include "amplipriv/missingness.h"
#include "amplipriv/random.h"

namespace amplipriv::testing {

// max ||f(z) - f(z')|| over every mask of row `star` observing at most
// floor(rho d) features and every pair of corner values {-B, B} on the
// observed coordinates. The other rows are drawn once from `seed` and share
// a random mask.
inline absl::StatusOr<double> BruteForceMaskedSensitivity(
    const FwlQuery& q, double bound, double rho, size_t star, uint64_t seed) {
  const size_t n = q.n();
  const size_t d = q.d();
  const size_t cap = ObservedCap(rho, d);
  RandomStream rng(DeriveSeed(seed, "brute-force"));
  std::vector<Row> rows(n, Row(d));
  std::vector<Mask> masks(n);
  for (size_t i = 0; i < n; ++i) {
    std::vector<uint8_t> bits(d);
    for (size_t j = 0; j < d; ++j) {
      rows[i][j] = rng.Uniform(-bound, bound);
      bits[j] = rng.Bernoulli(0.5) ? 1 : 0;
    }
    masks[i] = Mask(std::move(bits));
  }
  double best = 0.0;
  for (uint32_t code = 0; code < (1u << d); ++code) {
    std::vector<uint8_t> bits(d);
    std::vector<size_t> observed;
    for (size_t j = 0; j < d; ++j) {
      bits[j] = (code >> j) & 1u;
      if (bits[j] == 0) observed.push_back(j);
    }
    if (observed.size() > cap) continue;
    masks[star] = Mask(bits);
    auto mask = MaskMatrix::Create(masks);
    if (!mask.ok()) return mask.status();
    const size_t k = observed.size();
    for (uint32_t a = 0; a < (1u << k); ++a) {
      for (uint32_t b = 0; b < (1u << k); ++b) {
        std::vector<Row> left = rows;
        std::vector<Row> right = rows;
        for (size_t t = 0; t < k; ++t) {
          left[star][observed[t]] = ((a >> t) & 1u) ? bound : -bound;
          right[star][observed[t]] = ((b >> t) & 1u) ? bound : -bound;
        }
        auto zl = CompleteDataset::Create(left);
        auto zr = CompleteDataset::Create(right);
        if (!zl.ok()) return zl.status();
        if (!zr.ok()) return zr.status();
        auto ml = ApplyMask(*zl, *mask);
        auto mr = ApplyMask(*zr, *mask);
        auto fl = q.Evaluate(*ml);
        auto fr = q.Evaluate(*mr);
        if (!fl.ok()) return fl.status();
        if (!fr.ok()) return fr.status();
        std::vector<double> diff(fl->size());
        for (size_t r = 0; r < diff.size(); ++r) diff[r] = (*fl)[r] - (*fr)[r];
        best = std::max(best, VectorNorm(diff, q.norm()));
      }
    }
  }
  return best;
}

inline Mask MaskOf(const std::string& bits) {
  std::vector<int> b;
  for (char c : bits) b.push_back(c - '0');
  return *Mask::FromBits(b);
}

// sum_j (1/n) sum_i clip(z_ij, [-B, B]): a 1-D query with L_j = 1/n.
inline absl::StatusOr<FwlQuery> ClippedMeanSum(size_t n, size_t d,
                                               double bound) {
  auto q = MakeClippedMeanQuery(n, d, bound);
  if (!q.ok()) return q.status();
  auto sum = MakeSumMap();
  if (!sum.ok()) return sum.status();
  return LipschitzPostprocess(*q, *sum, 1.0);
}

// d = 4, anchor {0}, never all-missing, each candidate observes {0, j}; the
// scores depend on the sign of z_0. p* = 1 and rho = 0.5.
inline FeatureMechanism AnchoredPairs() {
  MarAnchoredPattern mar;
  mar.anchor = {0};
  mar.q_all = 0.0;
  mar.candidates = {MaskOf("0011"), MaskOf("0101"), MaskOf("0110")};
  mar.rule.cuts = {{0.0}};
  mar.rule.table = {{0.5, 0.3, 0.2}, {0.2, 0.3, 0.5}};
  return *FeatureMechanism::Create(mar);
}

// d = 4: all-missing 0.5, observe {0, 1} 0.25, observe {2, 3} 0.25.
inline FeatureMechanism HalfPattern() {
  return *FeatureMechanism::Create(McarPattern{
      {{MaskOf("1111"), 0.5}, {MaskOf("0011"), 0.25}, {MaskOf("1100"), 0.25}}});
}

}  // namespace amplipriv::testing

#endif  // AMPLIPRIV_TESTS_TEST_SUPPORT_H_
