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

#include "amplipriv/fwl_query.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_join.h"
#include "amplipriv/csv.h"
#include "amplipriv/parallel.h"
#include "amplipriv/random.h"
#include "amplipriv/status_macros.h"

namespace amplipriv {
namespace {

std::string Num(double v) { return FormatDouble(v); }

absl::Status CheckShape(size_t n, size_t d) {
  if (n == 0 || d == 0) {
    return absl::InvalidArgumentError(absl::StrCat(
        "query needs n >= 1 and d >= 1, got n = ", n, ", d = ", d));
  }
  return absl::OkStatus();
}

double ClipTo(double v, double c) { return std::clamp(v, -c, c); }

}  // namespace

absl::string_view NormName(Norm norm) {
  return norm == Norm::kL1 ? "l1" : "l2";
}

double VectorNorm(const std::vector<double>& v, Norm norm) {
  long double total = 0.0L;
  if (norm == Norm::kL1) {
    for (double x : v) total += std::fabs(x);
    return static_cast<double>(total);
  }
  // Scaled to avoid overflow on large entries.
  double scale = 0.0;
  for (double x : v) scale = std::max(scale, std::fabs(x));
  if (scale == 0.0) return 0.0;
  for (double x : v) {
    const long double r = x / scale;
    total += r * r;
  }
  return scale * static_cast<double>(std::sqrt(total));
}

std::string QueryDescriptor::ToString() const {
  std::vector<std::string> parts;
  for (const auto& [key, value] : params) parts.push_back(key + "=" + value);
  for (const QueryDescriptor& in : inputs) parts.push_back(in.ToString());
  return absl::StrCat(name, "(", absl::StrJoin(parts, ", "), ")");
}

absl::StatusOr<FwlQuery> FwlQuery::Create(Evaluator evaluate,
                                          std::vector<double> constants,
                                          Norm norm, size_t output_dim,
                                          size_t n,
                                          QueryDescriptor descriptor) {
  RETURN_IF_ERROR(CheckShape(n, constants.size()));
  if (output_dim == 0) {
    return absl::InvalidArgumentError("query output dimension must be >= 1");
  }
  for (size_t j = 0; j < constants.size(); ++j) {
    if (!(constants[j] >= 0.0) || !std::isfinite(constants[j])) {
      return absl::InvalidArgumentError(absl::StrCat(
          "L_", j, " must be finite and nonnegative, got ", constants[j]));
    }
  }
  if (!evaluate) return absl::InvalidArgumentError("query has no evaluator");
  return FwlQuery(std::move(evaluate), std::move(constants), norm, output_dim,
                  n, std::move(descriptor));
}

absl::StatusOr<std::vector<double>> FwlQuery::Evaluate(
    const IncompleteDataset& data) const {
  if (data.n() != n_ || data.d() != d()) {
    return absl::InvalidArgumentError(absl::StrCat("query expects an ", n_,
                                                   " x ", d(), " dataset, got ",
                                                   data.n(), " x ", data.d()));
  }
  std::vector<double> out = evaluate_(data);
  if (out.size() != output_dim_) {
    return absl::InternalError(absl::StrCat(descriptor_.name, " returned ",
                                            out.size(), " values, declared ",
                                            output_dim_));
  }
  return out;
}

absl::StatusOr<FwlQuery> FwlQuery::AsNorm(Norm target) const {
  if (target == norm_) return *this;
  if (norm_ == Norm::kL2 && target == Norm::kL1) {
    return absl::InvalidArgumentError(
        "an l2 query does not carry l1 constants; rebuild it for l1");
  }
  FwlQuery copy = *this;
  copy.norm_ = target;
  copy.descriptor_ = {
      "as_norm", {{"norm", std::string(NormName(target))}}, {descriptor_}};
  return copy;
}

absl::StatusOr<FwlQuery> FwlQuery::WithConstants(
    std::vector<double> constants) const {
  if (constants.size() != d()) {
    return absl::InvalidArgumentError(
        absl::StrCat("expected ", d(), " constants, got ", constants.size()));
  }
  return Create(evaluate_, std::move(constants), norm_, output_dim_, n_,
                {"with_constants", {}, {descriptor_}});
}

absl::StatusOr<FwlQuery> MakeLinearQuery(std::vector<Matrix> per_row) {
  if (per_row.empty()) {
    return absl::InvalidArgumentError("linear query needs one matrix per row");
  }
  const size_t k = per_row.front().rows;
  const size_t d = per_row.front().cols;
  RETURN_IF_ERROR(CheckShape(per_row.size(), d));
  if (k == 0) return absl::InvalidArgumentError("matrices must have k >= 1");
  std::vector<double> constants(d, 0.0);
  for (size_t i = 0; i < per_row.size(); ++i) {
    const Matrix& b = per_row[i];
    if (b.rows != k || b.cols != d || b.values.size() != k * d) {
      return absl::InvalidArgumentError(
          absl::StrCat("matrix ", i, " is not ", k, " x ", d));
    }
    for (size_t j = 0; j < d; ++j) {
      double column = 0.0;
      for (size_t r = 0; r < k; ++r) column += std::fabs(b.at(r, j));
      constants[j] = std::max(constants[j], column);
    }
  }
  const size_t n = per_row.size();
  auto evaluate = [per_row = std::move(per_row), k,
                   d](const IncompleteDataset& z) {
    std::vector<double> out(k, 0.0);
    for (size_t i = 0; i < z.n(); ++i) {
      for (size_t j = 0; j < d; ++j) {
        const double v = z.cell(i, j).ValueOrZero();
        if (v == 0.0) continue;
        for (size_t r = 0; r < k; ++r) out[r] += per_row[i].at(r, j) * v;
      }
    }
    return out;
  };
  return FwlQuery::Create(
      std::move(evaluate), std::move(constants), Norm::kL1, k, n,
      {"linear",
       {{"n", absl::StrCat(n)}, {"d", absl::StrCat(d)}, {"k", absl::StrCat(k)}},
       {}});
}

absl::StatusOr<FwlQuery> MakeCoordinateQuery(size_t n, size_t d, size_t row,
                                             size_t feature) {
  RETURN_IF_ERROR(CheckShape(n, d));
  if (row >= n || feature >= d) {
    return absl::InvalidArgumentError(absl::StrCat(
        "coordinate (", row, ", ", feature, ") outside ", n, " x ", d));
  }
  std::vector<double> constants(d, 0.0);
  constants[feature] = 1.0;
  auto evaluate = [row, feature](const IncompleteDataset& z) {
    return std::vector<double>{z.cell(row, feature).ValueOrZero()};
  };
  return FwlQuery::Create(std::move(evaluate), std::move(constants), Norm::kL1,
                          1, n,
                          {"coordinate",
                           {{"n", absl::StrCat(n)},
                            {"d", absl::StrCat(d)},
                            {"row", absl::StrCat(row)},
                            {"feature", absl::StrCat(feature)}},
                           {}});
}

namespace {

absl::StatusOr<FwlQuery> MeanQuery(size_t n, size_t d,
                                   std::optional<double> clip,
                                   QueryDescriptor descriptor) {
  RETURN_IF_ERROR(CheckShape(n, d));
  auto evaluate = [n, d, clip](const IncompleteDataset& z) {
    std::vector<long double> sums(d, 0.0L);
    for (size_t i = 0; i < z.n(); ++i) {
      for (size_t j = 0; j < d; ++j) {
        const double v = z.cell(i, j).ValueOrZero();
        sums[j] += clip.has_value() ? ClipTo(v, *clip) : v;
      }
    }
    std::vector<double> out(d);
    for (size_t j = 0; j < d; ++j) {
      out[j] = static_cast<double>(sums[j] / static_cast<long double>(n));
    }
    return out;
  };
  return FwlQuery::Create(std::move(evaluate),
                          std::vector<double>(d, 1.0 / static_cast<double>(n)),
                          Norm::kL1, d, n, std::move(descriptor));
}

}  // namespace

absl::StatusOr<FwlQuery> MakeBoundedMeanQuery(size_t n, size_t d) {
  return MeanQuery(
      n, d, std::nullopt,
      {"bounded_mean", {{"n", absl::StrCat(n)}, {"d", absl::StrCat(d)}}, {}});
}

absl::StatusOr<FwlQuery> MakeClippedMeanQuery(size_t n, size_t d, double clip) {
  if (!(clip > 0.0) || !std::isfinite(clip)) {
    return absl::InvalidArgumentError("clip bound must be finite and > 0");
  }
  return MeanQuery(
      n, d, clip,
      {"clipped_mean",
       {{"n", absl::StrCat(n)}, {"d", absl::StrCat(d)}, {"clip", Num(clip)}},
       {}});
}

absl::StatusOr<FwlQuery> MakeCovarianceQuery(size_t n, size_t d, double bound) {
  RETURN_IF_ERROR(CheckShape(n, d));
  if (!(bound > 0.0) || !std::isfinite(bound)) {
    return absl::InvalidArgumentError(
        "covariance bound B must be finite and > 0");
  }
  auto evaluate = [n, d, bound](const IncompleteDataset& z) {
    std::vector<long double> sums(d * d, 0.0L);
    std::vector<double> c(d);
    for (size_t i = 0; i < z.n(); ++i) {
      for (size_t j = 0; j < d; ++j) {
        c[j] = ClipTo(z.cell(i, j).ValueOrZero(), bound);
      }
      for (size_t a = 0; a < d; ++a) {
        for (size_t b = 0; b < d; ++b) sums[a * d + b] += c[a] * c[b];
      }
    }
    std::vector<double> out(d * d);
    for (size_t t = 0; t < d * d; ++t) {
      out[t] = static_cast<double>(sums[t] / static_cast<long double>(n));
    }
    return out;
  };
  const double l =
      2.0 * bound * static_cast<double>(d) / static_cast<double>(n);
  return FwlQuery::Create(
      std::move(evaluate), std::vector<double>(d, l), Norm::kL1, d * d, n,
      {"covariance",
       {{"n", absl::StrCat(n)}, {"d", absl::StrCat(d)}, {"B", Num(bound)}},
       {}});
}

absl::StatusOr<FwlQuery> MakeMeanProjectionQuery(size_t n, Matrix projection) {
  const size_t k = projection.rows;
  const size_t d = projection.cols;
  RETURN_IF_ERROR(CheckShape(n, d));
  if (k == 0 || projection.values.size() != k * d) {
    return absl::InvalidArgumentError(
        "projection must be a k x d matrix, k >= 1");
  }
  std::vector<double> constants(d);
  for (size_t j = 0; j < d; ++j) {
    std::vector<double> column(k);
    for (size_t r = 0; r < k; ++r) column[r] = projection.at(r, j);
    constants[j] = VectorNorm(column, Norm::kL2) / static_cast<double>(n);
  }
  auto evaluate = [n, k, d, projection](const IncompleteDataset& z) {
    std::vector<long double> mean(d, 0.0L);
    for (size_t i = 0; i < z.n(); ++i) {
      for (size_t j = 0; j < d; ++j) mean[j] += z.cell(i, j).ValueOrZero();
    }
    std::vector<double> out(k, 0.0);
    for (size_t r = 0; r < k; ++r) {
      long double acc = 0.0L;
      for (size_t j = 0; j < d; ++j) acc += projection.at(r, j) * mean[j];
      out[r] = static_cast<double>(acc / static_cast<long double>(n));
    }
    return out;
  };
  return FwlQuery::Create(
      std::move(evaluate), std::move(constants), Norm::kL2, k, n,
      {"mean_projection",
       {{"n", absl::StrCat(n)}, {"d", absl::StrCat(d)}, {"k", absl::StrCat(k)}},
       {}});
}

absl::StatusOr<FwlQuery> MakeHistogramQuery(size_t n, size_t d, double lo,
                                            double hi, size_t bins,
                                            std::vector<size_t> features) {
  RETURN_IF_ERROR(CheckShape(n, d));
  if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi)) {
    return absl::InvalidArgumentError("histogram range needs finite lo < hi");
  }
  if (bins < 2) return absl::InvalidArgumentError("histogram needs >= 2 bins");
  if (features.empty()) {
    features.resize(d);
    std::iota(features.begin(), features.end(), size_t{0});
  }
  std::vector<bool> used(d, false);
  for (size_t j : features) {
    if (j >= d) {
      return absl::InvalidArgumentError(
          absl::StrCat("histogram feature ", j, " out of range for d = ", d));
    }
    if (used[j]) {
      return absl::InvalidArgumentError(
          absl::StrCat("histogram feature ", j, " listed twice"));
    }
    used[j] = true;
  }
  const double width = (hi - lo) / static_cast<double>(bins - 1);
  std::vector<double> constants(d, 0.0);
  for (size_t j : features) {
    constants[j] = 2.0 / (static_cast<double>(n) * width);
  }
  const size_t k = features.size() * bins;
  auto evaluate = [n, lo, hi, bins, width, features,
                   k](const IncompleteDataset& z) {
    std::vector<long double> mass(k, 0.0L);
    for (size_t i = 0; i < z.n(); ++i) {
      for (size_t f = 0; f < features.size(); ++f) {
        const Cell& cell = z.cell(i, features[f]);
        if (cell.is_na()) continue;
        const double t = (std::clamp(cell.value(), lo, hi) - lo) / width;
        const size_t left =
            std::min(static_cast<size_t>(std::floor(t)), bins - 2);
        const double frac = std::clamp(t - static_cast<double>(left), 0.0, 1.0);
        mass[f * bins + left] += 1.0 - frac;
        mass[f * bins + left + 1] += frac;
      }
    }
    std::vector<double> out(k);
    for (size_t t = 0; t < k; ++t) {
      out[t] = static_cast<double>(mass[t] / static_cast<long double>(n));
    }
    return out;
  };
  return FwlQuery::Create(std::move(evaluate), std::move(constants), Norm::kL1,
                          k, n,
                          {"histogram",
                           {{"n", absl::StrCat(n)},
                            {"d", absl::StrCat(d)},
                            {"lo", Num(lo)},
                            {"hi", Num(hi)},
                            {"bins", absl::StrCat(bins)}},
                           {}});
}

absl::StatusOr<PostMap> MakeIdentityMap() {
  return PostMap{"identity", [](const std::vector<double>& x) { return x; },
                 [](size_t k) -> std::optional<size_t> { return k; },
                 [](size_t, Norm) { return 1.0; }};
}

absl::StatusOr<PostMap> MakeScaleMap(double factor) {
  if (!std::isfinite(factor)) {
    return absl::InvalidArgumentError("scale factor must be finite");
  }
  return PostMap{absl::StrCat("scale(", Num(factor), ")"),
                 [factor](const std::vector<double>& x) {
                   std::vector<double> y(x);
                   for (double& v : y) v *= factor;
                   return y;
                 },
                 [](size_t k) -> std::optional<size_t> { return k; },
                 [factor](size_t, Norm) { return std::fabs(factor); }};
}

absl::StatusOr<PostMap> MakeProjectionMap(std::vector<size_t> indices) {
  if (indices.empty()) {
    return absl::InvalidArgumentError("projection needs at least one index");
  }
  const size_t top = *std::max_element(indices.begin(), indices.end());
  return PostMap{absl::StrCat("projection(", absl::StrJoin(indices, " "), ")"),
                 [indices](const std::vector<double>& x) {
                   std::vector<double> y;
                   y.reserve(indices.size());
                   for (size_t i : indices) y.push_back(x[i]);
                   return y;
                 },
                 [indices, top](size_t k) -> std::optional<size_t> {
                   if (top >= k) return std::nullopt;
                   return indices.size();
                 },
                 [indices](size_t k, Norm norm) {
                   // Repeated indices copy a coordinate several times.
                   std::vector<double> multiplicity(k, 0.0);
                   for (size_t i : indices) {
                     if (i < k) multiplicity[i] += 1.0;
                   }
                   double worst = 0.0;
                   for (double m : multiplicity) {
                     worst =
                         std::max(worst, norm == Norm::kL1 ? m : std::sqrt(m));
                   }
                   return worst;
                 }};
}

absl::StatusOr<PostMap> MakeClampMap(double lo, double hi) {
  if (!(lo <= hi)) return absl::InvalidArgumentError("clamp needs lo <= hi");
  return PostMap{absl::StrCat("clamp(", Num(lo), " ", Num(hi), ")"),
                 [lo, hi](const std::vector<double>& x) {
                   std::vector<double> y(x);
                   for (double& v : y) v = std::clamp(v, lo, hi);
                   return y;
                 },
                 [](size_t k) -> std::optional<size_t> { return k; },
                 [](size_t, Norm) { return 1.0; }};
}

absl::StatusOr<PostMap> MakeSumMap() {
  return PostMap{"sum",
                 [](const std::vector<double>& x) {
                   long double total = 0.0L;
                   for (double v : x) total += v;
                   return std::vector<double>{static_cast<double>(total)};
                 },
                 [](size_t) -> std::optional<size_t> { return 1; },
                 [](size_t k, Norm norm) {
                   return norm == Norm::kL1 ? 1.0
                                            : std::sqrt(static_cast<double>(k));
                 }};
}

absl::StatusOr<FwlQuery> LipschitzPostprocess(const FwlQuery& q,
                                              const PostMap& map, double lambda,
                                              uint64_t seed) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    return absl::InvalidArgumentError("Lipschitz constant must be >= 0");
  }
  const size_t k = q.output_dim();
  const std::optional<size_t> out_dim = map.output_dim(k);
  if (!out_dim.has_value() || *out_dim == 0) {
    return absl::InvalidArgumentError(absl::StrCat(
        "map ", map.name, " does not accept inputs of length ", k));
  }
  // Spot check on random pairs at several scales.
  RandomStream rng(DeriveSeed(seed, "postprocess-check"));
  constexpr int kPairs = 256;
  for (int t = 0; t < kPairs; ++t) {
    const double spread = std::ldexp(1.0, static_cast<int>(t % 12) - 6);
    std::vector<double> x(k), y(k);
    for (size_t r = 0; r < k; ++r) {
      x[r] = rng.Uniform(-4.0, 4.0);
      y[r] = x[r] + spread * rng.Uniform(-1.0, 1.0);
    }
    std::vector<double> fx = map.apply(x);
    std::vector<double> fy = map.apply(y);
    std::vector<double> diff_in(k), diff_out(fx.size());
    for (size_t r = 0; r < k; ++r) diff_in[r] = x[r] - y[r];
    for (size_t r = 0; r < fx.size(); ++r) diff_out[r] = fx[r] - fy[r];
    const double lhs = VectorNorm(diff_out, q.norm());
    const double rhs = lambda * VectorNorm(diff_in, q.norm());
    if (lhs > rhs * (1.0 + 1e-9) + 1e-12) {
      return absl::FailedPreconditionError(absl::StrCat(
          "map ", map.name, " is not ", Num(lambda), "-Lipschitz under ",
          NormName(q.norm()), ": a pair at distance ",
          Num(VectorNorm(diff_in, q.norm())), " maps to distance ", Num(lhs)));
    }
  }
  std::vector<double> constants = q.constants();
  for (double& l : constants) l *= lambda;
  FwlQuery inner = q;
  auto apply = map.apply;
  auto evaluate = [inner, apply](const IncompleteDataset& z) {
    return apply(*inner.Evaluate(z));
  };
  return FwlQuery::Create(std::move(evaluate), std::move(constants), q.norm(),
                          *out_dim, q.n(),
                          {"lipschitz_postprocess",
                           {{"map", map.name}, {"lipschitz", Num(lambda)}},
                           {q.descriptor()}});
}

absl::StatusOr<FwlQuery> LinearCombination(const std::vector<FwlQuery>& queries,
                                           const std::vector<double>& coeffs) {
  if (queries.empty() || queries.size() != coeffs.size()) {
    return absl::InvalidArgumentError(
        "linear combination needs one coefficient per query, at least one");
  }
  const FwlQuery& first = queries.front();
  std::vector<double> constants(first.d(), 0.0);
  QueryDescriptor descriptor{"linear_combination", {}, {}};
  for (size_t l = 0; l < queries.size(); ++l) {
    const FwlQuery& q = queries[l];
    if (q.output_dim() != first.output_dim() || q.norm() != first.norm() ||
        q.d() != first.d() || q.n() != first.n()) {
      return absl::InvalidArgumentError(
          absl::StrCat("query ", l,
                       " does not share output dimension, norm, n and d "
                       "with query 0"));
    }
    if (!std::isfinite(coeffs[l])) {
      return absl::InvalidArgumentError("coefficients must be finite");
    }
    for (size_t j = 0; j < constants.size(); ++j) {
      constants[j] += std::fabs(coeffs[l]) * q.constants()[j];
    }
    descriptor.params.push_back({absl::StrCat("a", l), Num(coeffs[l])});
    descriptor.inputs.push_back(q.descriptor());
  }
  auto evaluate = [queries, coeffs](const IncompleteDataset& z) {
    std::vector<long double> acc(queries.front().output_dim(), 0.0L);
    for (size_t l = 0; l < queries.size(); ++l) {
      const std::vector<double> v = *queries[l].Evaluate(z);
      for (size_t r = 0; r < acc.size(); ++r) acc[r] += coeffs[l] * v[r];
    }
    return std::vector<double>(acc.begin(), acc.end());
  };
  return FwlQuery::Create(std::move(evaluate), std::move(constants),
                          first.norm(), first.output_dim(), first.n(),
                          std::move(descriptor));
}

size_t ObservedCap(double rho, size_t d) {
  const double scaled = rho * static_cast<double>(d);
  return std::min(d, static_cast<size_t>(std::floor(scaled * (1.0 + 1e-12))));
}

namespace {

// Descending order, ties broken by original index.
std::vector<double> SortedConstants(const FwlQuery& q) {
  std::vector<double> sorted = q.constants();
  std::stable_sort(sorted.begin(), sorted.end(), std::greater<>());
  return sorted;
}

double TwoBPrefixSum(const std::vector<double>& sorted, size_t count,
                     double bound) {
  long double total = 0.0L;
  for (size_t j = 0; j < count; ++j) total += sorted[j];
  return static_cast<double>(2.0L * bound * total);
}

absl::Status CheckBound(double bound) {
  if (!(bound >= 0.0) || !std::isfinite(bound)) {
    return absl::InvalidArgumentError(
        absl::StrCat("B must be finite and >= 0, got ", bound));
  }
  return absl::OkStatus();
}

}  // namespace

absl::StatusOr<double> SensitivityComplete(const FwlQuery& q, double bound) {
  RETURN_IF_ERROR(CheckBound(bound));
  const std::vector<double> sorted = SortedConstants(q);
  return TwoBPrefixSum(sorted, sorted.size(), bound);
}

absl::StatusOr<SensitivityBounds> SensitivityMasked(const FwlQuery& q,
                                                    double bound, double rho) {
  RETURN_IF_ERROR(CheckBound(bound));
  if (!(rho > 0.0 && rho <= 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("rho must lie in (0, 1], got ", rho));
  }
  const std::vector<double> sorted = SortedConstants(q);
  SensitivityBounds out;
  out.bound = bound;
  out.rho = rho;
  out.observed_cap = ObservedCap(rho, q.d());
  out.c = TwoBPrefixSum(sorted, sorted.size(), bound);
  out.c_tilde = TwoBPrefixSum(sorted, out.observed_cap, bound);
  return out;
}

namespace {

struct TrialResult {
  double violation = -INFINITY;
  std::optional<NeighborPair<IncompleteDataset>> pair;
};

double DrawEntry(bool corner, double bound, RandomStream& rng) {
  if (corner) return rng.Bernoulli(0.5) ? bound : -bound;
  return rng.Uniform(-bound, bound);
}

}  // namespace

absl::StatusOr<FwlCheckReport> VerifyFwl(const FwlQuery& q, size_t trials,
                                         double bound, uint64_t seed) {
  RETURN_IF_ERROR(CheckBound(bound));
  if (trials == 0) return absl::InvalidArgumentError("trials must be >= 1");
  const size_t n = q.n();
  const size_t d = q.d();
  std::vector<TrialResult> results(trials);
  std::vector<absl::Status> errors(trials);
  ParallelFor(trials, [&](size_t t) {
    RandomStream rng(DeriveSeed(seed, "fwl-trial", t));
    const bool corner = t % 2 == 0;
    std::vector<Row> rows(n, Row(d));
    for (Row& row : rows) {
      for (double& v : row) v = DrawEntry(corner, bound, rng);
    }
    const size_t star = rng.UniformIndex(n);
    std::vector<Row> rows2 = rows;
    for (double& v : rows2[star]) v = DrawEntry(corner, bound, rng);
    std::vector<Mask> masks(n);
    for (Mask& m : masks) {
      std::vector<uint8_t> bits(d);
      // Every fourth trial runs unmasked on the corners.
      for (auto& b : bits) b = (t % 4 == 0) ? 0 : (rng.Bernoulli(0.5) ? 1 : 0);
      m = Mask(std::move(bits));
    }
    auto z = CompleteDataset::Create(rows);
    auto z2 = CompleteDataset::Create(rows2);
    auto mask = MaskMatrix::Create(masks);
    auto left = ApplyMask(*z, *mask);
    auto right = ApplyMask(*z2, *mask);
    auto f1 = q.Evaluate(*left);
    auto f2 = q.Evaluate(*right);
    if (!f1.ok() || !f2.ok()) {
      errors[t] = !f1.ok() ? f1.status() : f2.status();
      return;
    }
    std::vector<double> diff(f1->size());
    for (size_t r = 0; r < diff.size(); ++r) diff[r] = (*f1)[r] - (*f2)[r];
    long double rhs = 0.0L;
    for (size_t j = 0; j < d; ++j) {
      const double gap = *FeatureGap(left->cell(star, j), right->cell(star, j));
      rhs += q.constants()[j] * gap;
    }
    results[t].violation =
        VectorNorm(diff, q.norm()) - static_cast<double>(rhs);
    results[t].pair = NeighborPair<IncompleteDataset>{*left, *right, star};
  });
  FwlCheckReport report;
  report.trials = trials;
  report.max_violation = -INFINITY;
  for (size_t t = 0; t < trials; ++t) {
    if (!errors[t].ok()) return errors[t];
    if (results[t].violation > report.max_violation) {
      report.max_violation = results[t].violation;
      report.worst_case = std::move(results[t].pair);
    }
  }
  return report;
}

}  // namespace amplipriv
