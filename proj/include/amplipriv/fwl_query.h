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

#ifndef AMPLIPRIV_FWL_QUERY_H_
#define AMPLIPRIV_FWL_QUERY_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "amplipriv/dataset.h"

namespace amplipriv {

enum class Norm { kL1, kL2 };

absl::string_view NormName(Norm norm);
double VectorNorm(const std::vector<double>& v, Norm norm);

// Which constructor or combinator produced a query, with its parameters and
// the descriptors of its inputs.
struct QueryDescriptor {
  std::string name;
  std::vector<std::pair<std::string, std::string>> params;
  std::vector<QueryDescriptor> inputs;

  std::string ToString() const;
};

using Evaluator = std::function<std::vector<double>(const IncompleteDataset&)>;

// A dataset-level query f on n x d incomplete datasets with feature-wise
// Lipschitz constants L_1..L_d: for two datasets sharing a mask and
// differing in row i*, ||f(z) - f(z')|| <= sum_j L_j |z_{i*j} - z'_{i*j}|.
class FwlQuery {
 public:
  static absl::StatusOr<FwlQuery> Create(Evaluator evaluate,
                                         std::vector<double> constants,
                                         Norm norm, size_t output_dim, size_t n,
                                         QueryDescriptor descriptor);

  // Shape-checked evaluation; the output has length output_dim().
  absl::StatusOr<std::vector<double>> Evaluate(
      const IncompleteDataset& data) const;

  const std::vector<double>& constants() const { return constants_; }
  Norm norm() const { return norm_; }
  size_t output_dim() const { return output_dim_; }
  size_t n() const { return n_; }
  size_t d() const { return constants_.size(); }
  const QueryDescriptor& descriptor() const { return descriptor_; }

  // An l1 query is FWL under l2 with the same constants.
  absl::StatusOr<FwlQuery> AsNorm(Norm target) const;
  // Same evaluator with other constants; the result carries no guarantee
  // and exists for adversarial checks and hand-derived constants.
  absl::StatusOr<FwlQuery> WithConstants(std::vector<double> constants) const;

 private:
  FwlQuery(Evaluator evaluate, std::vector<double> constants, Norm norm,
           size_t output_dim, size_t n, QueryDescriptor descriptor)
      : evaluate_(std::move(evaluate)),
        constants_(std::move(constants)),
        norm_(norm),
        output_dim_(output_dim),
        n_(n),
        descriptor_(std::move(descriptor)) {}

  Evaluator evaluate_;
  std::vector<double> constants_;
  Norm norm_;
  size_t output_dim_;
  size_t n_;
  QueryDescriptor descriptor_;
};

// Row-major k x d matrix.
struct Matrix {
  size_t rows = 0;
  size_t cols = 0;
  std::vector<double> values;

  double at(size_t r, size_t c) const { return values[r * cols + c]; }
};

// f(z) = sum_i B_i z_i with NA read as 0; L_j = max_i ||B_i e_j||_1 (l1).
absl::StatusOr<FwlQuery> MakeLinearQuery(std::vector<Matrix> per_row);
// The single coordinate z_{ij}; a linear query with one nonzero entry.
absl::StatusOr<FwlQuery> MakeCoordinateQuery(size_t n, size_t d, size_t row,
                                             size_t feature);
// (1/n) sum_i z_i, NA read as 0; L_j = 1/n (l1). Callers keep entries in
// [-B, B].
absl::StatusOr<FwlQuery> MakeBoundedMeanQuery(size_t n, size_t d);
// (1/n) sum_i clip(z_i, [-clip, clip]); L_j = 1/n (l1).
absl::StatusOr<FwlQuery> MakeClippedMeanQuery(size_t n, size_t d, double clip);
// Vectorized (1/n) sum_i c_i c_i^T with c_i = clip(z_i, [-B, B]) and NA read
// as 0; L_j = 2Bd/n (l1).
absl::StatusOr<FwlQuery> MakeCovarianceQuery(size_t n, size_t d, double bound);
// P (1/n) sum_i z_i for a k x d projection P; L_j = ||P e_j||_2 / n (l2).
absl::StatusOr<FwlQuery> MakeMeanProjectionQuery(size_t n, Matrix projection);

// Soft histogram: each observed value of a contributing feature spreads unit
// mass over the two nearest of `bins` evenly spaced centers on [lo, hi] by
// linear interpolation (clamped at the ends); the concatenated per-feature
// mass vectors are divided by n. L_j = 2 / (n w) for contributing features,
// w = (hi - lo) / (bins - 1), and 0 otherwise (l1).
absl::StatusOr<FwlQuery> MakeHistogramQuery(size_t n, size_t d, double lo,
                                            double hi, size_t bins,
                                            std::vector<size_t> features = {});

// A named map R^k -> R^k' for post-processing.
struct PostMap {
  std::string name;
  std::function<std::vector<double>(const std::vector<double>&)> apply;
  // Output length for a given input length k; nullopt when k is invalid.
  std::function<std::optional<size_t>(size_t)> output_dim;
  // Smallest valid Lipschitz constant under each norm for input length k.
  std::function<double(size_t, Norm)> lipschitz;
};

// identity | scale(factor) | projection(indices) | clamp(lo, hi) | sum
absl::StatusOr<PostMap> MakeIdentityMap();
absl::StatusOr<PostMap> MakeScaleMap(double factor);
absl::StatusOr<PostMap> MakeProjectionMap(std::vector<size_t> indices);
absl::StatusOr<PostMap> MakeClampMap(double lo, double hi);
absl::StatusOr<PostMap> MakeSumMap();

// psi o f with constants Lambda L_j. The caller asserts psi is
// Lambda-Lipschitz under q.norm(); random point pairs are checked and a
// violation is a contract error.
absl::StatusOr<FwlQuery> LipschitzPostprocess(const FwlQuery& q,
                                              const PostMap& map, double lambda,
                                              uint64_t seed = 0);

// sum_l a_l f_l with constants sum_l |a_l| L^(l).
absl::StatusOr<FwlQuery> LinearCombination(const std::vector<FwlQuery>& queries,
                                           const std::vector<double>& coeffs);

struct SensitivityBounds {
  double c = 0.0;
  double c_tilde = 0.0;
  double rho = 1.0;
  double bound = 0.0;
  size_t observed_cap = 0;  // floor(rho d)

  double ratio() const { return c > 0.0 ? c_tilde / c : 0.0; }
};

// floor(rho d), tolerant of the representation error in rho (0.29 * 100).
size_t ObservedCap(double rho, size_t d);

// C_p = 2B sum_j L_j.
absl::StatusOr<double> SensitivityComplete(const FwlQuery& q, double bound);
// C~_p = 2B times the sum of the floor(rho d) largest L_j (ties by index).
absl::StatusOr<SensitivityBounds> SensitivityMasked(const FwlQuery& q,
                                                    double bound, double rho);

struct FwlCheckReport {
  // max over trials of ||f(z) - f(z')|| - sum_j L_j gap_j; <= 0 means no
  // counterexample was found.
  double max_violation = 0.0;
  size_t trials = 0;
  std::optional<NeighborPair<IncompleteDataset>> worst_case;
};

// Random neighbour pairs sharing a mask, entries in [-B, B], half of them on
// the corners {-B, B}^d.
absl::StatusOr<FwlCheckReport> VerifyFwl(const FwlQuery& q, size_t trials,
                                         double bound, uint64_t seed);

}  // namespace amplipriv

#endif  // AMPLIPRIV_FWL_QUERY_H_
