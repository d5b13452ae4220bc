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

#include "amplipriv/divergence.h"

#include <cmath>

#include "amplipriv/random.h"
#include "gtest/gtest.h"
#include "oracle_values.h"

namespace amplipriv {
namespace {

DiscreteDistribution Dist(std::vector<double> support, std::vector<double> p) {
  return *DiscreteDistribution::Create(std::move(support), std::move(p));
}

MixtureSpec Single(ComponentFamily family, double center, double scale) {
  return *MixtureSpec::Create({{1.0, family, {center}, scale}});
}

TEST(DiscreteDistributionTest, Validation) {
  EXPECT_FALSE(DiscreteDistribution::Create({0, 0}, {0.5, 0.5}).ok());
  EXPECT_FALSE(DiscreteDistribution::Create({0, 1}, {0.5, 0.6}).ok());
  EXPECT_FALSE(DiscreteDistribution::Create({0, 1}, {-0.1, 1.1}).ok());
  auto merged =
      *DiscreteDistribution::FromMasses({{1, 0.25}, {0, 0.5}, {1, 0.25}});
  EXPECT_EQ(merged.support(), (std::vector<double>{0, 1}));
  EXPECT_EQ(merged.ProbabilityOf(1), 0.5);
  EXPECT_EQ(merged.ProbabilityOf(7), 0.0);
}

TEST(HockeyStickDiscreteTest, Identical) {
  auto p = Dist({0, 1, 2}, {0.2, 0.3, 0.5});
  for (double eps : {0.0, 0.3, 2.0}) {
    EXPECT_EQ(HockeyStickDiscrete(p, p, eps)->value, 0.0);
  }
}

TEST(HockeyStickDiscreteTest, TotalVariationCase) {
  auto est = *HockeyStickDiscrete(Dist({0, 1}, {0.5, 0.5}),
                                  Dist({0, 1}, {0.25, 0.75}), 0.0);
  EXPECT_DOUBLE_EQ(est.value, 0.25);
  EXPECT_EQ(est.method, DivergenceMethod::kExactDiscrete);
}

TEST(HockeyStickDiscreteTest, RandomizedResponseAtItsEpsilon) {
  const double eps0 = std::log(3.0);
  auto p = Dist({0, 1}, {0.75, 0.25});
  auto q = Dist({0, 1}, {0.25, 0.75});
  EXPECT_LE(HockeyStickDiscrete(p, q, eps0)->value, 1e-15);
  EXPECT_GT(HockeyStickDiscrete(p, q, 0.5 * eps0)->value, 0.0);
}

TEST(HockeyStickDiscreteTest, DisjointSupports) {
  auto est = *HockeyStickDiscrete(Dist({0}, {1}), Dist({1}, {1}), 5.0);
  EXPECT_EQ(est.value, 1.0);
}

// Property: delta(eps) is nonincreasing in eps and lies in [0, 1].
TEST(HockeyStickDiscreteTest, MonotoneInEpsilon) {
  RandomStream rng(2);
  for (int t = 0; t < 200; ++t) {
    std::vector<double> a(5), b(5);
    double sa = 0, sb = 0;
    for (int i = 0; i < 5; ++i) {
      a[i] = rng.Uniform01();
      b[i] = rng.Uniform01();
      sa += a[i];
      sb += b[i];
    }
    for (int i = 0; i < 5; ++i) {
      a[i] /= sa;
      b[i] /= sb;
    }
    auto p = Dist({0, 1, 2, 3, 4}, a);
    auto q = Dist({0, 1, 2, 3, 4}, b);
    double prev = 1.0;
    for (double eps = 0; eps < 3; eps += 0.25) {
      double v = HockeyStickDiscrete(p, q, eps)->value;
      EXPECT_LE(v, prev + 1e-15);
      EXPECT_GE(v, 0.0);
      prev = v;
    }
  }
}

TEST(HockeyStickMixtureTest, PureLaplace) {
  const double delta = 1.3, b = 0.7;
  auto p = Single(ComponentFamily::kLaplace, 0, b);
  auto q = Single(ComponentFamily::kLaplace, delta, b);
  auto est = *HockeyStickMixture1d(p, q, delta / b, 1e-10);
  EXPECT_LE(est.value, est.tolerance + 1e-10);
  EXPECT_EQ(est.method, DivergenceMethod::kQuadrature);
}

TEST(HockeyStickMixtureTest, LaplaceClosedForm) {
  // delta(eps) = 1 - exp((eps - Delta/b) / 2) for Laplace(0, b) vs (Delta, b).
  const double delta = 1.0, b = 1.0, eps = 0.4;
  auto est = *HockeyStickMixture1d(Single(ComponentFamily::kLaplace, 0, b),
                                   Single(ComponentFamily::kLaplace, delta, b),
                                   eps, 1e-10);
  EXPECT_NEAR(est.value, 1 - std::exp((eps - delta / b) / 2), 1e-9);
}

TEST(HockeyStickMixtureTest, GaussianTotalVariation) {
  auto est = *HockeyStickMixture1d(Single(ComponentFamily::kGaussian, 0, 1),
                                   Single(ComponentFamily::kGaussian, 1, 1),
                                   0.0, 1e-10);
  EXPECT_NEAR(est.value, oracle::kNormalTv, 1e-9);
  EXPECT_NEAR(est.value, 0.382925, 1e-6);
}

TEST(HockeyStickMixtureTest, GaussianClosedForm) {
  // Phi(D/2 - eps/D) - e^eps Phi(-D/2 - eps/D) for unit variance, shift D.
  auto phi = [](double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); };
  for (double eps : {0.1, 0.5, 1.0, 2.0}) {
    const double d = 1.5;
    double expect =
        phi(d / 2 - eps / d) - std::exp(eps) * phi(-d / 2 - eps / d);
    auto est = *HockeyStickMixture1d(Single(ComponentFamily::kGaussian, 0, 1),
                                     Single(ComponentFamily::kGaussian, d, 1),
                                     eps, 1e-11);
    EXPECT_NEAR(est.value, expect, 1e-10) << eps;
  }
}

TEST(HockeyStickMixtureTest, EqualMixtures) {
  auto p = *MixtureSpec::Create({{0.3, ComponentFamily::kLaplace, {0}, 1},
                                 {0.7, ComponentFamily::kLaplace, {2}, 1}});
  auto est = *HockeyStickMixture1d(p, p, 0.0, 1e-9);
  EXPECT_LE(est.value, 1e-9);
}

TEST(HockeyStickMixtureTest, PointMasses) {
  auto p = *MixtureSpec::Create({{0.5, ComponentFamily::kPointMass, {0}, 0},
                                 {0.5, ComponentFamily::kGaussian, {0}, 1}});
  auto q = *MixtureSpec::Create({{1.0, ComponentFamily::kGaussian, {0}, 1}});
  auto est = *HockeyStickMixture1d(p, q, 0.0, 1e-9);
  EXPECT_NEAR(est.value, 0.5, 1e-9);
}

TEST(HockeyStickMixtureTest, RejectsMultivariate) {
  auto p = *MixtureSpec::Create({{1.0, ComponentFamily::kGaussian, {0, 0}, 1}});
  EXPECT_FALSE(HockeyStickMixture1d(p, p, 0.0, 1e-9).ok());
}

TEST(McDeltaTest, IdenticalDistributions) {
  auto p = Single(ComponentFamily::kGaussian, 0, 1);
  auto est = *McDeltaEstimate(p, p, 0.0, 100000, 1);
  EXPECT_EQ(est.value, 0.0);
  ASSERT_TRUE(est.ci.has_value());
  EXPECT_LE(est.ci->first, 0.0);
  EXPECT_GE(est.ci->second, 0.0);
}

TEST(McDeltaTest, GaussianOracleInsideCi) {
  auto est = *McDeltaEstimate(Single(ComponentFamily::kGaussian, 0, 1),
                              Single(ComponentFamily::kGaussian, 1, 1), 0.0,
                              1000000, 2024);
  EXPECT_LE(est.ci->first, oracle::kNormalTv);
  EXPECT_GE(est.ci->second, oracle::kNormalTv);
  EXPECT_EQ(est.samples, 1000000u);
  EXPECT_EQ(est.seed, 2024u);
}

TEST(McDeltaTest, Deterministic) {
  auto p = Single(ComponentFamily::kLaplace, 0, 1);
  auto q = Single(ComponentFamily::kLaplace, 1, 1);
  EXPECT_EQ(McDeltaEstimate(p, q, 0.2, 50000, 9)->value,
            McDeltaEstimate(p, q, 0.2, 50000, 9)->value);
}

TEST(McDeltaTest, Preconditions) {
  auto p = Single(ComponentFamily::kLaplace, 0, 1);
  EXPECT_FALSE(McDeltaEstimate(p, p, 0.0, 10, 1).ok());
}

TEST(MixtureSpecTest, Validation) {
  EXPECT_FALSE(MixtureSpec::Create({}).ok());
  EXPECT_FALSE(
      MixtureSpec::Create({{0.5, ComponentFamily::kGaussian, {0}, 1}}).ok());
  EXPECT_FALSE(
      MixtureSpec::Create({{1.0, ComponentFamily::kGaussian, {0}, 0}}).ok());
  EXPECT_FALSE(
      MixtureSpec::Create({{0.5, ComponentFamily::kGaussian, {0}, 1},
                           {0.5, ComponentFamily::kGaussian, {0, 1}, 1}})
          .ok());
}

}  // namespace
}  // namespace amplipriv
