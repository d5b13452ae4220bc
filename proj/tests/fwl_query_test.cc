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

#include <cmath>

#include "amplipriv/random.h"
#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "test_support.h"

namespace amplipriv {
namespace {

using ::testing::DoubleEq;
using ::testing::Each;
using ::testing::ElementsAre;
using ::testing::Pointwise;

Matrix Identity(size_t d) {
  Matrix m{d, d, std::vector<double>(d * d, 0.0)};
  for (size_t i = 0; i < d; ++i) m.values[i * d + i] = 1.0;
  return m;
}

// Constant-output query with arbitrary declared constants.
FwlQuery ConstantQuery(size_t n, std::vector<double> constants) {
  return *FwlQuery::Create(
      [](const IncompleteDataset&) { return std::vector<double>{1.0, 2.0}; },
      std::move(constants), Norm::kL1, 2, n, QueryDescriptor{"constant"});
}

IncompleteDataset Observed(std::vector<Row> rows) {
  return IncompleteDataset::FromComplete(*CompleteDataset::Create(rows));
}

TEST(StandardQueryTest, CovarianceConstants) {
  auto q = *MakeCovarianceQuery(10, 3, 1.0);
  EXPECT_THAT(q.constants(), Each(DoubleEq(0.6)));
  EXPECT_EQ(q.output_dim(), 9u);
}

TEST(StandardQueryTest, LinearIdentity) {
  std::vector<Matrix> per_row(3, Identity(4));
  auto q = *MakeLinearQuery(per_row);
  EXPECT_THAT(q.constants(), Each(DoubleEq(1.0)));
  auto out = *q.Evaluate(Observed({{1, 2, 3, 4}, {0, 0, 0, 1}, {1, 1, 1, 1}}));
  EXPECT_THAT(out, ElementsAre(2, 3, 4, 6));
}

TEST(StandardQueryTest, LinearConstantsAreColumnMaxima) {
  Matrix a{2, 2, {1, -2, 3, 0}};
  Matrix b{2, 2, {0, 1, 1, 1}};
  auto q = *MakeLinearQuery({a, b});
  EXPECT_THAT(q.constants(), ElementsAre(4, 2));
}

TEST(StandardQueryTest, LinearShapeErrors) {
  EXPECT_FALSE(MakeLinearQuery({}).ok());
  EXPECT_FALSE(MakeLinearQuery({Identity(2), Identity(3)}).ok());
  EXPECT_FALSE(MakeLinearQuery({Matrix{2, 2, {1, 2, 3}}}).ok());
}

TEST(StandardQueryTest, BoundedMean) {
  auto q = *MakeBoundedMeanQuery(4, 2);
  EXPECT_THAT(q.constants(), ElementsAre(0.25, 0.25));
}

// Exhaustive neighbour pairs on the {-1, 1} grid attain the bounded-mean
// constants exactly.
TEST(StandardQueryTest, BoundedMeanGridIsTight) {
  auto q = *MakeBoundedMeanQuery(4, 2);
  double worst = 0.0;
  for (int code = 0; code < 16; ++code) {
    for (int a = 0; a < 4; ++a) {
      std::vector<Row> rows(4, Row{0.5, 0.5});
      rows[0] = {(a & 1) ? 1.0 : -1.0, (a & 2) ? 1.0 : -1.0};
      std::vector<Row> other = rows;
      other[0] = {(code & 1) ? 1.0 : -1.0, (code & 2) ? 1.0 : -1.0};
      auto f = *q.Evaluate(Observed(rows));
      auto g = *q.Evaluate(Observed(other));
      double lhs = std::abs(f[0] - g[0]) + std::abs(f[1] - g[1]);
      double rhs = 0.25 * (std::abs(rows[0][0] - other[0][0]) +
                           std::abs(rows[0][1] - other[0][1]));
      EXPECT_LE(lhs, rhs + 1e-15);
      worst = std::max(worst, lhs);
    }
  }
  EXPECT_DOUBLE_EQ(worst, 1.0);
}

TEST(StandardQueryTest, NaContributesZeroWithFixedDenominator) {
  auto q = *MakeBoundedMeanQuery(2, 2);
  auto z = *CompleteDataset::Create({{1, 3}, {2, 4}});
  auto m =
      *MaskMatrix::Create({*Mask::FromBits({0, 1}), *Mask::FromBits({1, 1})});
  EXPECT_THAT(*q.Evaluate(*ApplyMask(z, m)), ElementsAre(0.5, 0.0));
}

TEST(StandardQueryTest, ClippedMean) {
  auto q = *MakeClippedMeanQuery(2, 1, 1.0);
  EXPECT_THAT(q.constants(), ElementsAre(0.5));
  EXPECT_THAT(*q.Evaluate(Observed({{5}, {-0.5}})), ElementsAre(0.25));
  EXPECT_FALSE(MakeClippedMeanQuery(2, 1, -1.0).ok());
  EXPECT_FALSE(MakeClippedMeanQuery(0, 1, 1.0).ok());
}

TEST(StandardQueryTest, MeanProjectionUsesL2Columns) {
  Matrix p{2, 2, {3, 0, 4, 1}};
  auto q = *MakeMeanProjectionQuery(2, p);
  EXPECT_EQ(q.norm(), Norm::kL2);
  EXPECT_THAT(q.constants(), ElementsAre(2.5, 0.5));
}

TEST(StandardQueryTest, HistogramConstants) {
  auto q = *MakeHistogramQuery(5, 3, -1.0, 1.0, 5, {0, 2});
  EXPECT_THAT(q.constants(), Pointwise(DoubleEq(), {0.8, 0.0, 0.8}));
  EXPECT_EQ(q.output_dim(), 10u);
  auto out = *q.Evaluate(Observed(
      {{0.25, 0, -1}, {1, 0, 1}, {0, 0, 0}, {-1, 0, -1}, {0.5, 0, 0.5}}));
  double total = 0;
  for (double v : out) total += v;
  EXPECT_NEAR(total, 2.0, 1e-15);
  EXPECT_FALSE(MakeHistogramQuery(5, 3, 1.0, -1.0, 5).ok());
  EXPECT_FALSE(MakeHistogramQuery(5, 3, -1.0, 1.0, 1).ok());
  EXPECT_FALSE(MakeHistogramQuery(5, 3, -1.0, 1.0, 4, {3}).ok());
}

TEST(StandardQueryTest, CoordinateQuery) {
  auto q = *MakeCoordinateQuery(2, 3, 1, 2);
  EXPECT_THAT(q.constants(), ElementsAre(0, 0, 1));
  EXPECT_THAT(*q.Evaluate(Observed({{1, 2, 3}, {4, 5, 6}})), ElementsAre(6));
  EXPECT_FALSE(MakeCoordinateQuery(2, 3, 2, 0).ok());
}

TEST(EvaluateTest, ShapeChecked) {
  auto q = *MakeBoundedMeanQuery(2, 2);
  EXPECT_FALSE(q.Evaluate(Observed({{1, 2}})).ok());
  EXPECT_FALSE(q.Evaluate(Observed({{1, 2, 3}, {1, 2, 3}})).ok());
}

TEST(PostprocessTest, IdentityKeepsConstants) {
  auto q = *MakeBoundedMeanQuery(4, 2);
  auto p = *LipschitzPostprocess(q, *MakeIdentityMap(), 1.0);
  EXPECT_EQ(p.constants(), q.constants());
}

TEST(PostprocessTest, ConstantMapWithLambdaZero) {
  auto q = *MakeBoundedMeanQuery(4, 2);
  auto p = *LipschitzPostprocess(q, *MakeScaleMap(0.0), 0.0);
  EXPECT_THAT(p.constants(), Each(DoubleEq(0.0)));
}

TEST(PostprocessTest, LambdaScalesConstants) {
  auto q = *MakeBoundedMeanQuery(4, 2);
  auto p = *LipschitzPostprocess(q, *MakeScaleMap(2.0), 2.0);
  EXPECT_THAT(p.constants(), ElementsAre(0.5, 0.5));
}

TEST(PostprocessTest, UnderstatedLambdaIsContractError) {
  auto q = *MakeBoundedMeanQuery(4, 2);
  auto p = LipschitzPostprocess(q, *MakeScaleMap(3.0), 1.0);
  ASSERT_FALSE(p.ok());
  EXPECT_EQ(p.status().code(), absl::StatusCode::kFailedPrecondition);
}

TEST(PostprocessTest, SumIsOneLipschitzUnderL1) {
  auto q = *MakeClippedMeanQuery(3, 4, 0.5);
  auto map = *MakeSumMap();
  EXPECT_EQ(map.lipschitz(4, Norm::kL1), 1.0);
  EXPECT_EQ(map.lipschitz(4, Norm::kL2), 2.0);
  auto p = *LipschitzPostprocess(q, map, 1.0);
  EXPECT_EQ(p.output_dim(), 1u);
  EXPECT_EQ(p.constants(), q.constants());
}

TEST(PostprocessTest, ProjectionAndClamp) {
  auto q = *MakeBoundedMeanQuery(1, 3);
  auto proj = *LipschitzPostprocess(q, *MakeProjectionMap({2, 0}), 1.0);
  EXPECT_THAT(*proj.Evaluate(Observed({{1, 2, 3}})), ElementsAre(3, 1));
  auto clamp = *LipschitzPostprocess(q, *MakeClampMap(0, 2), 1.0);
  EXPECT_THAT(*clamp.Evaluate(Observed({{-1, 1, 3}})), ElementsAre(0, 1, 2));
  EXPECT_FALSE(LipschitzPostprocess(q, *MakeProjectionMap({3}), 1.0).ok());
  EXPECT_FALSE(MakeClampMap(1, 0).ok());
}

TEST(LinearCombinationTest, SingleUnchanged) {
  auto q = *MakeBoundedMeanQuery(4, 2);
  auto c = *LinearCombination({q}, {1.0});
  EXPECT_EQ(c.constants(), q.constants());
}

TEST(LinearCombinationTest, CancellationKeepsBound) {
  auto q = *MakeBoundedMeanQuery(4, 2);
  auto c = *LinearCombination({q, q}, {1.0, -1.0});
  EXPECT_THAT(c.constants(), ElementsAre(0.5, 0.5));
  auto out = *c.Evaluate(Observed({{1, 2}, {3, 4}, {5, 6}, {7, 8}}));
  EXPECT_THAT(out, Each(DoubleEq(0.0)));
}

TEST(LinearCombinationTest, PerCoordinateSum) {
  auto a = *MakeCoordinateQuery(1, 2, 0, 0);
  auto b = *MakeCoordinateQuery(1, 2, 0, 1);
  auto c = *LinearCombination({a, b}, {2.0, 3.0});
  EXPECT_THAT(c.constants(), ElementsAre(2, 3));
  EXPECT_FALSE(LinearCombination({a, b}, {1.0}).ok());
  EXPECT_FALSE(
      LinearCombination({a, *MakeBoundedMeanQuery(1, 1)}, {1, 1}).ok());
}

TEST(SensitivityTest, Complete) {
  auto q = *MakeLinearQuery({Identity(4)});
  EXPECT_DOUBLE_EQ(*SensitivityComplete(q, 0.5), 4.0);
  EXPECT_EQ(*SensitivityComplete(*q.WithConstants({0, 0, 0, 0}), 0.5), 0.0);
  EXPECT_EQ(*SensitivityComplete(q, 0.0), 0.0);
  EXPECT_FALSE(SensitivityComplete(q, -1.0).ok());
}

TEST(SensitivityTest, CompleteMatchesGridWorstCase) {
  auto q = *MakeLinearQuery({Identity(4)});
  auto brute = *testing::BruteForceMaskedSensitivity(q, 0.5, 1.0, 0, 1);
  EXPECT_DOUBLE_EQ(brute, 4.0);
}

TEST(SensitivityTest, MaskedEqualConstants) {
  auto q = *MakeLinearQuery({Identity(4)});
  auto s = *SensitivityMasked(q, 0.5, 0.5);
  EXPECT_DOUBLE_EQ(s.c_tilde, 2.0);
  EXPECT_DOUBLE_EQ(s.ratio(), 0.5);
  EXPECT_EQ(s.observed_cap, 2u);
}

TEST(SensitivityTest, MaskedLargestDominates) {
  auto q = *MakeLinearQuery({Identity(4)})->WithConstants({4, 1, 1, 1});
  auto s = *SensitivityMasked(q, 0.5, 0.25);
  EXPECT_DOUBLE_EQ(s.c_tilde, 4.0);
  Matrix m = Identity(4);
  m.values[0] = 4;
  auto real = *MakeLinearQuery({m});
  EXPECT_DOUBLE_EQ(*testing::BruteForceMaskedSensitivity(real, 0.5, 0.25, 0, 2),
                   4.0);
}

TEST(SensitivityTest, RhoOneEqualsComplete) {
  RandomStream rng(8);
  for (int t = 0; t < 100; ++t) {
    std::vector<double> l(1 + rng.UniformIndex(10));
    for (double& x : l) x = rng.Uniform(0, 3);
    auto q = ConstantQuery(1, l);
    auto s = *SensitivityMasked(q, 0.7, 1.0);
    EXPECT_EQ(s.c_tilde, *SensitivityComplete(q, 0.7));
    EXPECT_EQ(s.c_tilde, s.c);
  }
}

TEST(SensitivityTest, ObservedCapTolerance) {
  EXPECT_EQ(ObservedCap(0.29, 100), 29u);
  EXPECT_EQ(ObservedCap(0.5, 5), 2u);
  EXPECT_EQ(ObservedCap(1.0, 7), 7u);
  EXPECT_EQ(ObservedCap(0.0, 7), 0u);
}

// Property: C~ is monotone in rho and never exceeds C.
TEST(SensitivityTest, MonotoneInRho) {
  RandomStream rng(9);
  for (int t = 0; t < 100; ++t) {
    std::vector<double> l(1 + rng.UniformIndex(8));
    for (double& x : l) x = rng.Uniform(0, 1);
    auto q = ConstantQuery(1, l);
    double prev = 0;
    for (double rho = 0.05; rho <= 1.0; rho += 0.05) {
      auto s = *SensitivityMasked(q, 1.0, rho);
      EXPECT_GE(s.c_tilde, prev);
      EXPECT_LE(s.c_tilde, s.c);
      prev = s.c_tilde;
    }
  }
}

TEST(VerifyFwlTest, ConstructorsSatisfyBound) {
  std::vector<FwlQuery> queries = {
      *MakeBoundedMeanQuery(5, 3),
      *MakeClippedMeanQuery(5, 3, 1.0),
      *MakeCovarianceQuery(5, 3, 1.0),
      *MakeHistogramQuery(5, 3, -1.0, 1.0, 4),
      *MakeMeanProjectionQuery(5, Matrix{2, 3, {1, -2, 0.5, 0, 3, 1}}),
      *MakeLinearQuery({Identity(3), Identity(3), Identity(3), Identity(3),
                        Matrix{3, 3, {2, 0, 0, 0, -1, 0, 1, 1, 1}}}),
  };
  for (const FwlQuery& q : queries) {
    auto report = *VerifyFwl(q, 10000, 1.0, 42);
    EXPECT_LE(report.max_violation, 1e-12) << q.descriptor().ToString();
    EXPECT_EQ(report.trials, 10000u);
  }
}

TEST(VerifyFwlTest, HalvedConstantsAreCaught) {
  auto q = *MakeCovarianceQuery(5, 3, 1.0);
  std::vector<double> halved = q.constants();
  for (double& x : halved) x /= 2;
  auto report = *VerifyFwl(*q.WithConstants(halved), 2000, 1.0, 7);
  EXPECT_GT(report.max_violation, 0.0);
  ASSERT_TRUE(report.worst_case.has_value());
}

TEST(VerifyFwlTest, ConstantQueryNeverViolates) {
  auto report = *VerifyFwl(ConstantQuery(3, {0, 0}), 500, 1.0, 1);
  EXPECT_LE(report.max_violation, 0.0);
}

TEST(VerifyFwlTest, Deterministic) {
  auto q = *MakeCovarianceQuery(4, 2, 1.0);
  auto a = *VerifyFwl(*q.WithConstants({0.1, 0.1}), 300, 1.0, 5);
  auto b = *VerifyFwl(*q.WithConstants({0.1, 0.1}), 300, 1.0, 5);
  EXPECT_EQ(a.max_violation, b.max_violation);
}

TEST(NormTest, AsNorm) {
  auto q = *MakeBoundedMeanQuery(2, 2);
  auto l2 = *q.AsNorm(Norm::kL2);
  EXPECT_EQ(l2.norm(), Norm::kL2);
  EXPECT_EQ(l2.constants(), q.constants());
  EXPECT_FALSE(l2.AsNorm(Norm::kL1).ok());
  EXPECT_DOUBLE_EQ(VectorNorm({3, -4}, Norm::kL2), 5.0);
  EXPECT_DOUBLE_EQ(VectorNorm({3, -4}, Norm::kL1), 7.0);
}

}  // namespace
}  // namespace amplipriv
