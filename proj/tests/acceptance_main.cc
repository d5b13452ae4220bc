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

// Acceptance suite: one PASS/FAIL line per criterion, each at its stated
// tolerance and runtime budget. Exits nonzero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "absl/strings/str_cat.h"
#include "amplipriv/accountant.h"
#include "amplipriv/audit.h"
#include "amplipriv/csv.h"
#include "amplipriv/divergence.h"
#include "amplipriv/fwl_query.h"
#include "amplipriv/missingness.h"
#include "amplipriv/noise_mechanism.h"
#include "amplipriv/random.h"
#include "oracle_values.h"
#include "test_support.h"

namespace amplipriv {
namespace {

using testing::AnchoredPairs;
using testing::ClippedMeanSum;
using testing::HalfPattern;
using testing::MaskOf;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string Num(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", x);
  return buf;
}

// Criterion 1.
Outcome FormulaGrid() {
  double worst_endpoint = 0.0;
  double worst_reference = 0.0;
  bool ok = true;
  for (int i = 1; i <= 100; ++i) {
    const double eps = 2.0 * i / 100.0;
    double prev = -1.0;
    for (int j = 0; j < 100; ++j) {
      const double p = j / 99.0;
      const double e = AmplifiedEpsilon(eps, p);
      const long double ref =
          std::log1p(static_cast<long double>(p) *
                     std::expm1(static_cast<long double>(eps)));
      worst_reference =
          std::max(worst_reference, static_cast<double>(std::fabs(e - ref)));
      if (e > eps || e < prev) ok = false;
      prev = e;
    }
    worst_endpoint =
        std::max({worst_endpoint, std::fabs(AmplifiedEpsilon(eps, 1.0) - eps),
                  std::fabs(AmplifiedEpsilon(eps, 0.0))});
  }
  ok = ok && worst_endpoint <= 1e-12 && worst_reference <= 1e-12;
  return {ok,
          absl::StrCat("endpoint error ", Num(worst_endpoint),
                       ", max deviation from reference ", Num(worst_reference),
                       ", bounded and monotone on the 100x100 grid")};
}

// Criterion 2: randomized response on the parity of the observed ones,
// composed with a one-feature MCAR pattern, p* = 0.5.
Outcome DiscreteAudit() {
  const double eps0 = std::log(3.0);
  auto mech = *FeatureMechanism::Create(
      McarPattern{{{MaskOf("1"), 0.5}, {MaskOf("0"), 0.5}}});
  DatasetMechanism dm{mech, 3};
  DiscreteMechanism rr =
      [](const IncompleteDataset& z) -> absl::StatusOr<DiscreteDistribution> {
    int parity = 0;
    for (size_t i = 0; i < z.n(); ++i) {
      parity ^= static_cast<int>(z.cell(i, 0).ValueOrZero() != 0.0);
    }
    return DiscreteDistribution::Create(
        {0.0, 1.0}, parity ? std::vector<double>{0.25, 0.75}
                           : std::vector<double>{0.75, 0.25});
  };
  const double p_star = *PStar(dm);
  const double eps = AmplifiedEpsilon(eps0, p_star);
  double worst = 0.0;
  for (int code = 0; code < 8; ++code) {
    std::vector<Row> rows = {{double(code & 1)},
                             {double((code >> 1) & 1)},
                             {double((code >> 2) & 1)}};
    auto z = *CompleteDataset::Create(rows);
    for (size_t i = 0; i < 3; ++i) {
      auto w = *z.WithRow(i, {1.0 - rows[i][0]});
      auto a = *ComposeDiscrete(dm, z, rr);
      auto b = *ComposeDiscrete(dm, w, rr);
      worst = std::max({worst, HockeyStickDiscrete(a, b, eps)->value,
                        HockeyStickDiscrete(b, a, eps)->value});
    }
  }
  bool ok = p_star == 0.5 && std::fabs(eps - oracle::kRrAmplified) <= 1e-15 &&
            worst <= 1e-12;
  return {ok, absl::StrCat("p* ", Num(p_star),
                           ", max delta at ln 2 over 24 "
                           "neighbour pairs ",
                           Num(worst))};
}

std::vector<NeighborPair<CompleteDataset>> AuditPairs(uint64_t seed) {
  std::vector<NeighborPair<CompleteDataset>> pairs;
  auto z = *CompleteDataset::Create({{0.5, 0.5, 0.5, 0.5},
                                     {-0.5, 0.25, 0.5, -0.125},
                                     {0.25, 0.0, -0.375, 0.5}},
                                    0.5);
  pairs.push_back({z, *z.WithRow(0, {-0.5, -0.5, -0.5, -0.5}), 0});
  pairs.push_back({z, *z.WithRow(1, {0.5, -0.5, -0.5, 0.5}), 1});
  RandomStream rng(seed);
  for (int t = 0; t < 4; ++t) {
    std::vector<Row> rows(3, Row(4));
    for (Row& r : rows) {
      for (double& x : r) x = rng.Bernoulli(0.5) ? rng.Uniform(-0.5, 0.5) : 0.5;
    }
    auto a = *CompleteDataset::Create(rows, 0.5);
    size_t star = rng.UniformIndex(3);
    Row other(4);
    for (double& x : other) x = rng.Bernoulli(0.5) ? -0.5 : 0.5;
    pairs.push_back({a, *a.WithRow(star, other), star});
  }
  return pairs;
}

// Criterion 3.
Outcome LaplaceQuadratureAudit() {
  auto m = *CalibrateLaplace(*ClippedMeanSum(3, 4, 0.5), 1.0, 0.5);
  ComposedMechanism cm{m, DatasetMechanism{AnchoredPairs(), 3}};
  AuditOptions options;
  options.tolerance = 1e-7;
  options.rho = 0.5;
  double worst = 0.0;
  bool ok = true;
  for (const auto& pair : AuditPairs(3)) {
    auto rows = VerifyAmplification(cm, pair, {0.25, 0.5, 1.0}, options);
    if (!rows.ok()) return {false, std::string(rows.status().message())};
    for (const AuditRow& row : *rows) {
      ok = ok && row.report.p_star == 1.0 &&
           row.epsilon == 0.5 * row.base_epsilon;
      worst = std::max(worst, row.empirical);
    }
  }
  ok = ok && worst <= 1e-6;
  return {ok, absl::StrCat("max delta at eps'_0 = 0.5 eps over 6 pairs x 3 "
                           "epsilons ",
                           Num(worst), " (limit 1e-6)")};
}

// Criterion 4.
Outcome GaussianQuadratureAudit() {
  auto m = *CalibrateGaussian(*ClippedMeanSum(3, 4, 0.5), 1.0, 1e-4, 0.5);
  ComposedMechanism cm{m, DatasetMechanism{HalfPattern(), 3}};
  AuditOptions options;
  options.tolerance = 1e-7;
  double worst = 0.0;
  bool ok = true;
  for (const auto& pair : AuditPairs(4)) {
    auto rows = VerifyAmplification(cm, pair, {0.25, 0.5, 1.0}, options);
    if (!rows.ok()) return {false, std::string(rows.status().message())};
    for (const AuditRow& row : *rows) {
      ok = ok && row.report.p_star == 0.5 && row.bound == 0.5e-4;
      worst = std::max(worst, row.empirical);
    }
  }
  ok = ok && worst <= 0.5e-4 + 1e-6;
  return {ok, absl::StrCat("max delta at eps'_0 ", Num(worst),
                           " (limit 0.5e-4 + 1e-6)")};
}

// Criterion 5.
Outcome Counterexample() {
  double worst = 0.0;
  bool ok = true;
  for (double delta : {1e-5, 1e-3}) {
    for (double eps : {0.1, 0.5, 1.0}) {
      auto r = TightnessCounterexample(eps, delta);
      if (!r.ok()) return {false, std::string(r.status().message())};
      ok = ok && r->p_star == 1.0;
      worst = std::max(worst, r->equality_gap);
    }
  }
  ok = ok && worst <= 1e-9;
  return {ok,
          absl::StrCat("max equality gap ", Num(worst), ", p* = 1 exactly")};
}

// A random FWL query on n x d data from one of the standard families.
FwlQuery RandomQuery(RandomStream& rng, size_t n, size_t d, double bound) {
  switch (rng.UniformIndex(7)) {
    case 0: {
      const size_t k = 1 + rng.UniformIndex(3);
      std::vector<Matrix> per_row;
      for (size_t i = 0; i < n; ++i) {
        Matrix m{k, d, std::vector<double>(k * d)};
        for (double& x : m.values) x = rng.Uniform(-2, 2);
        per_row.push_back(std::move(m));
      }
      return *MakeLinearQuery(per_row);
    }
    case 1:
      return *MakeClippedMeanQuery(n, d, rng.Uniform(0.1, 1.5) * bound);
    case 2:
      return *MakeBoundedMeanQuery(n, d);
    case 3:
      return *MakeCovarianceQuery(n, d, bound);
    case 4:
      return *MakeHistogramQuery(n, d, -bound, bound, 2 + rng.UniformIndex(5));
    case 5: {
      const size_t k = 1 + rng.UniformIndex(3);
      Matrix p{k, d, std::vector<double>(k * d)};
      for (double& x : p.values) x = rng.Uniform(-1, 1);
      return *MakeMeanProjectionQuery(n, p);
    }
    default: {
      auto a = *MakeClippedMeanQuery(n, d, bound);
      auto b = *MakeCovarianceQuery(n, d, bound);
      auto proj = *LipschitzPostprocess(b, *MakeProjectionMap([&] {
                                          std::vector<size_t> idx;
                                          for (size_t j = 0; j < d; ++j)
                                            idx.push_back(j * d + j);
                                          return idx;
                                        }()),
                                        1.0);
      return *LinearCombination({a, proj},
                                {rng.Uniform(-1, 1), rng.Uniform(-1, 1)});
    }
  }
}

// Criterion 6.
Outcome BruteForceSensitivity() {
  RandomStream rng(DeriveSeed(2024, "criterion-6"));
  double min_slack = INFINITY;
  for (int t = 0; t < 50; ++t) {
    const size_t d = 1 + rng.UniformIndex(8);
    const size_t n = 2 + rng.UniformIndex(3);
    const double bound = rng.Uniform(0.5, 2.0);
    const std::vector<double> rhos = {0.25, 0.375, 0.5};
    const double rho = rhos[rng.UniformIndex(rhos.size())];
    FwlQuery q = RandomQuery(rng, n, d, bound);
    auto bounds = SensitivityMasked(q, bound, rho);
    auto brute = testing::BruteForceMaskedSensitivity(
        q, bound, rho, rng.UniformIndex(n), DeriveSeed(2024, "brute", t));
    if (!bounds.ok() || !brute.ok()) {
      return {false, std::string(!bounds.ok() ? bounds.status().message()
                                              : brute.status().message())};
    }
    min_slack = std::min(min_slack, bounds->c_tilde - *brute);
  }
  return {min_slack >= -1e-10,
          absl::StrCat("50 queries, min slack C~ - brute force ",
                       Num(min_slack), " (limit -1e-10)")};
}

// Criterion 7.
Outcome FirstOrderFactor() {
  double worst = 0.0;
  for (int i = 0; i < 10; ++i) {
    for (int j = 0; j < 10; ++j) {
      const double p = 0.1 + 0.1 * i;
      const double ratio = 0.1 + 0.1 * j;
      SensitivityBounds b{1.0, ratio, ratio, 0.5, 0};
      auto r = *AmplifyFwl(0.01, 0.0, p, b, NoiseFamily::kLaplace);
      const double factor = r.amplified.epsilon / 0.01;
      worst = std::max(worst, std::fabs(factor - p * ratio) / (p * ratio));
    }
  }
  return {worst <= 0.05, absl::StrCat("max relative deviation from p* C~/C ",
                                      Num(worst), " (limit 0.05)")};
}

// Criterion 8.
Outcome CorollaryDominance() {
  RandomStream rng(DeriveSeed(2024, "criterion-8"));
  double worst = -INFINITY;
  for (int t = 0; t < 10000; ++t) {
    const double eps = 1.0 - rng.Uniform01();  // (0, 1]
    const double p = rng.Uniform01();
    const size_t d = 1 + rng.UniformIndex(16);
    const size_t k = 1 + rng.UniformIndex(d);
    const double rho = static_cast<double>(k) / static_cast<double>(d);
    auto q = *MakeBoundedMeanQuery(1 + rng.UniformIndex(5), d);
    auto bounds = *SensitivityMasked(q, rng.Uniform(0.1, 2.0), rho);
    const bool gaussian = rng.Bernoulli(0.5);
    auto r =
        *AmplifyFwl(eps, gaussian ? 1e-5 : 0.0, p, bounds,
                    gaussian ? NoiseFamily::kGaussian : NoiseFamily::kLaplace);
    const double cap = *CorollaryBound(eps, p, rho);
    worst = std::max(worst, r.amplified.epsilon - cap);
  }
  return {worst <= 1e-12,
          absl::StrCat("max excess over min((e-1)p*, 1) rho eps across 1e4 "
                       "tuples ",
                       Num(worst), " (limit 1e-12)")};
}

MixtureSpec RandomMixture(RandomStream& rng) {
  const size_t parts = 1 + rng.UniformIndex(3);
  std::vector<MixtureComponent> comps;
  double total = 0;
  for (size_t c = 0; c < parts; ++c) {
    MixtureComponent comp;
    comp.weight = rng.Uniform(0.1, 1.0);
    total += comp.weight;
    comp.family = rng.Bernoulli(0.5) ? ComponentFamily::kLaplace
                                     : ComponentFamily::kGaussian;
    comp.center = {rng.Uniform(-2, 2)};
    comp.scale = rng.Uniform(0.5, 2.0);
    comps.push_back(std::move(comp));
  }
  for (auto& c : comps) c.weight /= total;
  double sum = 0;
  for (size_t c = 0; c + 1 < comps.size(); ++c) sum += comps[c].weight;
  comps.back().weight = 1.0 - sum;
  return *MixtureSpec::Create(std::move(comps));
}

// Criterion 9.
Outcome EstimatorCrossValidation() {
  auto p =
      *MixtureSpec::Create({{1.0, ComponentFamily::kGaussian, {0.0}, 1.0}});
  auto q =
      *MixtureSpec::Create({{1.0, ComponentFamily::kGaussian, {1.0}, 1.0}});
  auto oracle_est =
      *McDeltaEstimate(p, q, 0.0, 1000000, DeriveSeed(2024, "mc-oracle"));
  bool ok = oracle_est.ci->first <= oracle::kNormalTv &&
            oracle::kNormalTv <= oracle_est.ci->second;
  RandomStream rng(DeriveSeed(2024, "criterion-9"));
  double worst = 0.0;
  for (int t = 0; t < 20; ++t) {
    auto a = RandomMixture(rng);
    auto b = RandomMixture(rng);
    const double eps = rng.Uniform(0.0, 1.5);
    auto quad = HockeyStickMixture1d(a, b, eps, 1e-9);
    auto mc = McDeltaEstimate(a, b, eps, 1000000, DeriveSeed(2024, "mc", t));
    if (!quad.ok() || !mc.ok()) {
      return {false, std::string(!quad.ok() ? quad.status().message()
                                            : mc.status().message())};
    }
    const double allowed = 3 * mc->tolerance + quad->tolerance;
    worst = std::max(worst, std::fabs(mc->value - quad->value) / allowed);
  }
  ok = ok && worst <= 1.0;
  return {ok, absl::StrCat("N(0,1) vs N(1,1) CI [", Num(oracle_est.ci->first),
                           ", ", Num(oracle_est.ci->second),
                           "] covers 0.382925; worst |mc - quad| / 3 hw ",
                           Num(worst))};
}

DiscreteDistribution RandomDiscrete(RandomStream& rng, size_t size) {
  std::vector<double> support(size), probs(size);
  long double total = 0;
  for (size_t i = 0; i < size; ++i) {
    support[i] = static_cast<double>(i);
    probs[i] = rng.Bernoulli(0.2) ? 0.0 : rng.Uniform01();
    total += probs[i];
  }
  if (total == 0) {
    probs[0] = 1.0;
    total = 1.0;
  }
  for (double& p : probs) p = static_cast<double>(p / total);
  return *DiscreteDistribution::Create(support, probs);
}

// Criterion 10: joint convexity and the decomposition identity for the
// hockey-stick divergence D_a(P || Q) = sum (P - a Q)_+.
Outcome DivergenceIdentities() {
  RandomStream rng(DeriveSeed(2024, "criterion-10"));
  double min_convexity = INFINITY;
  double max_identity = 0.0;
  for (int t = 0; t < 1000; ++t) {
    const size_t size = 2 + rng.UniformIndex(6);
    auto x0 = RandomDiscrete(rng, size);
    auto x1 = RandomDiscrete(rng, size);
    auto x1p = RandomDiscrete(rng, size);
    const double eps = rng.Uniform(0.0, 2.0);
    const double alpha = std::exp(eps);
    const double beta = rng.Uniform01();

    auto mix = *MixDiscrete({1 - beta, beta}, {x0, x1p});
    const double lhs = HockeyStickDiscrete(x1, mix, eps)->value;
    const double rhs = (1 - beta) * HockeyStickDiscrete(x1, x0, eps)->value +
                       beta * HockeyStickDiscrete(x1, x1p, eps)->value;
    min_convexity = std::min(min_convexity, rhs - lhs);

    const double eta = 1.0 - rng.Uniform01();
    const double alpha_p = 1 + eta * (alpha - 1);
    const double beta_p = alpha_p / alpha;
    auto x = *MixDiscrete({1 - eta, eta}, {x0, x1});
    auto xp = *MixDiscrete({1 - eta, eta}, {x0, x1p});
    auto inner = *MixDiscrete({1 - beta_p, beta_p}, {x0, x1p});
    const double outer = HockeyStickDiscrete(x, xp, std::log(alpha_p))->value;
    const double scaled = eta * HockeyStickDiscrete(x1, inner, eps)->value;
    max_identity = std::max(max_identity, std::fabs(outer - scaled));
  }
  bool ok = min_convexity >= -1e-12 && max_identity <= 1e-12;
  return {ok, absl::StrCat("1e3 triples: convexity min slack ",
                           Num(min_convexity), ", decomposition max error ",
                           Num(max_identity), " (limits 1e-12)")};
}

struct Criterion {
  int id;
  const char* title;
  double budget_seconds;
  std::function<Outcome()> run;
};

}  // namespace
}  // namespace amplipriv

int main() {
  using amplipriv::Criterion;
  const std::vector<Criterion> criteria = {
      {1, "amplified epsilon formula grid", 1, amplipriv::FormulaGrid},
      {2, "exact discrete audit, randomized response", 1,
       amplipriv::DiscreteAudit},
      {3, "Laplace FWL quadrature audit, p* = 1, rho = 0.5", 60,
       amplipriv::LaplaceQuadratureAudit},
      {4, "Gaussian FWL quadrature audit, p* = 0.5", 60,
       amplipriv::GaussianQuadratureAudit},
      {5, "p* = 1 counterexample", 30, amplipriv::Counterexample},
      {6, "masked sensitivity brute force", 120,
       amplipriv::BruteForceSensitivity},
      {7, "first-order factor", 1, amplipriv::FirstOrderFactor},
      {8, "corollary dominance", 1, amplipriv::CorollaryDominance},
      {9, "estimator cross-validation", 120,
       amplipriv::EstimatorCrossValidation},
      {10, "convexity and decomposition identities", 10,
       amplipriv::DivergenceIdentities},
  };
  int failures = 0;
  for (const Criterion& c : criteria) {
    auto start = std::chrono::steady_clock::now();
    amplipriv::Outcome out = c.run();
    double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    bool pass = out.pass && seconds < c.budget_seconds;
    if (!pass) ++failures;
    std::printf("criterion %2d %s  %s: %s [%.2f s, limit %.0f s]\n", c.id,
                pass ? "PASS" : "FAIL", c.title, out.detail.c_str(), seconds,
                c.budget_seconds);
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n",
              static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
