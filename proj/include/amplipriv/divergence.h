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

#ifndef AMPLIPRIV_DIVERGENCE_H_
#define AMPLIPRIV_DIVERGENCE_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "amplipriv/random.h"

namespace amplipriv {

// Finite distribution over distinct real outcomes, stored in ascending
// outcome order.
class DiscreteDistribution {
 public:
  // Outcomes must be distinct and finite; probabilities nonnegative and
  // summing to 1 within 1e-12.
  static absl::StatusOr<DiscreteDistribution> Create(
      std::vector<double> support, std::vector<double> probs);
  // Like Create, but repeated outcomes have their masses added.
  static absl::StatusOr<DiscreteDistribution> FromMasses(
      std::vector<std::pair<double, double>> masses);

  const std::vector<double>& support() const { return support_; }
  const std::vector<double>& probs() const { return probs_; }
  double ProbabilityOf(double outcome) const;

 private:
  DiscreteDistribution(std::vector<double> support, std::vector<double> probs)
      : support_(std::move(support)), probs_(std::move(probs)) {}

  std::vector<double> support_;
  std::vector<double> probs_;
};

// sum_l weights[l] * parts[l].
absl::StatusOr<DiscreteDistribution> MixDiscrete(
    const std::vector<double>& weights,
    const std::vector<DiscreteDistribution>& parts);

enum class ComponentFamily { kLaplace, kGaussian, kPointMass };

absl::string_view ComponentFamilyName(ComponentFamily family);

// One mixture component: a product of i.i.d. Laplace/Gaussian coordinates
// around `center`, or an atom at `center`.
struct MixtureComponent {
  double weight = 0.0;
  ComponentFamily family = ComponentFamily::kGaussian;
  std::vector<double> center;
  double scale = 0.0;
};

class MixtureSpec {
 public:
  // Weights nonnegative and summing to 1 within 1e-12; common dimension;
  // scale > 0 for continuous components.
  static absl::StatusOr<MixtureSpec> Create(
      std::vector<MixtureComponent> components);

  const std::vector<MixtureComponent>& components() const {
    return components_;
  }
  size_t dim() const { return components_.front().center.size(); }
  bool HasPointMass() const;

  // Log density of the continuous part (log-sum-exp over components);
  // -inf where it vanishes.
  double LogDensity(const std::vector<double>& point) const;
  std::vector<double> Sample(RandomStream& rng) const;

 private:
  explicit MixtureSpec(std::vector<MixtureComponent> components)
      : components_(std::move(components)) {}

  std::vector<MixtureComponent> components_;
};

enum class DivergenceMethod { kExactDiscrete, kQuadrature, kMonteCarlo };

absl::string_view DivergenceMethodName(DivergenceMethod method);

// An evaluation of delta(eps) = sup_S P(S) - e^eps Q(S).
struct DivergenceEstimate {
  double value = 0.0;
  DivergenceMethod method = DivergenceMethod::kExactDiscrete;
  // Error bound (exact and quadrature) or 99% CI half-width (Monte Carlo).
  double tolerance = 0.0;
  std::optional<std::pair<double, double>> ci;
  double epsilon_at = 0.0;
  std::optional<uint64_t> seed;
  size_t samples = 0;
  size_t panels = 0;
};

// Sum_x (P(x) - e^eps Q(x))_+ over the union support.
absl::StatusOr<DivergenceEstimate> HockeyStickDiscrete(
    const DiscreteDistribution& p, const DiscreteDistribution& q,
    double epsilon);

// Integral of (p - e^eps q)_+ for 1-D mixtures plus the atom terms, by
// adaptive Gauss-Kronrod quadrature on panels split at the Laplace kinks
// and at the crossings p = e^eps q. Fails if the error bound exceeds tol.
absl::StatusOr<DivergenceEstimate> HockeyStickMixture1d(const MixtureSpec& p,
                                                        const MixtureSpec& q,
                                                        double epsilon,
                                                        double tol);

using Sampler = std::function<std::vector<double>(RandomStream&)>;
using LogDensityFn = std::function<double(const std::vector<double>&)>;

// Mean of (1 - e^eps q(X)/p(X))_+ over X ~ P with a 99% normal CI. The
// functions are called concurrently and must be pure.
absl::StatusOr<DivergenceEstimate> McDeltaEstimate(
    const Sampler& sample_p, const LogDensityFn& log_p,
    const LogDensityFn& log_q, double epsilon, size_t n_samples, uint64_t seed);

// McDeltaEstimate with both sides given as continuous mixtures.
absl::StatusOr<DivergenceEstimate> McDeltaEstimate(const MixtureSpec& p,
                                                   const MixtureSpec& q,
                                                   double epsilon,
                                                   size_t n_samples,
                                                   uint64_t seed);

}  // namespace amplipriv

#endif  // AMPLIPRIV_DIVERGENCE_H_
