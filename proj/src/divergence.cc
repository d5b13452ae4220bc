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

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <numbers>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "amplipriv/parallel.h"
#include "amplipriv/status_macros.h"

namespace amplipriv {
namespace {

constexpr double kNormTolerance = 1e-12;
// Two-sided 99% normal quantile.
constexpr double kZ99 = 2.5758293035489004;
constexpr double kTailScales = 40.0;
constexpr size_t kBatch = size_t{1} << 14;

absl::Status CheckNormalization(const std::vector<double>& probs) {
  long double total = 0.0L;
  for (double p : probs) {
    if (!(p >= 0.0) || !std::isfinite(p)) {
      return absl::InvalidArgumentError(
          absl::StrCat("probabilities must be finite and >= 0, got ", p));
    }
    total += p;
  }
  if (std::fabs(static_cast<double>(total) - 1.0) > kNormTolerance) {
    return absl::InvalidArgumentError(absl::StrCat(
        "probabilities sum to ", static_cast<double>(total), ", expected 1"));
  }
  return absl::OkStatus();
}

double Clamp01(long double v) {
  return static_cast<double>(std::clamp<long double>(v, 0.0L, 1.0L));
}

}  // namespace

absl::StatusOr<DiscreteDistribution> DiscreteDistribution::Create(
    std::vector<double> support, std::vector<double> probs) {
  if (support.size() != probs.size() || support.empty()) {
    return absl::InvalidArgumentError(
        "support and probabilities must be nonempty and of equal length");
  }
  RETURN_IF_ERROR(CheckNormalization(probs));
  std::vector<size_t> order(support.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  for (double x : support) {
    if (!std::isfinite(x)) {
      return absl::InvalidArgumentError("outcomes must be finite");
    }
  }
  std::sort(order.begin(), order.end(),
            [&](size_t a, size_t b) { return support[a] < support[b]; });
  std::vector<double> s(order.size()), p(order.size());
  for (size_t i = 0; i < order.size(); ++i) {
    s[i] = support[order[i]];
    p[i] = probs[order[i]];
    if (i > 0 && s[i] == s[i - 1]) {
      return absl::InvalidArgumentError(
          absl::StrCat("outcome ", s[i], " listed twice"));
    }
  }
  return DiscreteDistribution(std::move(s), std::move(p));
}

absl::StatusOr<DiscreteDistribution> DiscreteDistribution::FromMasses(
    std::vector<std::pair<double, double>> masses) {
  std::map<double, long double> merged;
  for (const auto& [x, p] : masses) merged[x] += p;
  std::vector<double> support, probs;
  for (const auto& [x, p] : merged) {
    support.push_back(x);
    probs.push_back(static_cast<double>(p));
  }
  return Create(std::move(support), std::move(probs));
}

double DiscreteDistribution::ProbabilityOf(double outcome) const {
  auto it = std::lower_bound(support_.begin(), support_.end(), outcome);
  if (it == support_.end() || *it != outcome) return 0.0;
  return probs_[static_cast<size_t>(it - support_.begin())];
}

absl::StatusOr<DiscreteDistribution> MixDiscrete(
    const std::vector<double>& weights,
    const std::vector<DiscreteDistribution>& parts) {
  if (weights.size() != parts.size() || parts.empty()) {
    return absl::InvalidArgumentError("need one weight per distribution");
  }
  RETURN_IF_ERROR(CheckNormalization(weights));
  std::vector<std::pair<double, double>> masses;
  for (size_t l = 0; l < parts.size(); ++l) {
    for (size_t i = 0; i < parts[l].support().size(); ++i) {
      masses.push_back(
          {parts[l].support()[i], weights[l] * parts[l].probs()[i]});
    }
  }
  return DiscreteDistribution::FromMasses(std::move(masses));
}

absl::string_view ComponentFamilyName(ComponentFamily family) {
  switch (family) {
    case ComponentFamily::kLaplace:
      return "laplace";
    case ComponentFamily::kGaussian:
      return "gaussian";
    case ComponentFamily::kPointMass:
      return "point_mass";
  }
  return "unknown";
}

absl::string_view DivergenceMethodName(DivergenceMethod method) {
  switch (method) {
    case DivergenceMethod::kExactDiscrete:
      return "exact_discrete";
    case DivergenceMethod::kQuadrature:
      return "quadrature";
    case DivergenceMethod::kMonteCarlo:
      return "monte_carlo";
  }
  return "unknown";
}

absl::StatusOr<MixtureSpec> MixtureSpec::Create(
    std::vector<MixtureComponent> components) {
  if (components.empty()) {
    return absl::InvalidArgumentError("mixture needs at least one component");
  }
  const size_t dim = components.front().center.size();
  if (dim == 0) return absl::InvalidArgumentError("mixture dimension is 0");
  std::vector<double> weights;
  for (const MixtureComponent& c : components) {
    if (c.center.size() != dim) {
      return absl::InvalidArgumentError(
          "mixture components differ in dimension");
    }
    for (double x : c.center) {
      if (!std::isfinite(x)) {
        return absl::InvalidArgumentError("component centres must be finite");
      }
    }
    if (c.family != ComponentFamily::kPointMass &&
        (!(c.scale > 0.0) || !std::isfinite(c.scale))) {
      return absl::InvalidArgumentError(
          "continuous components need a finite scale > 0");
    }
    weights.push_back(c.weight);
  }
  RETURN_IF_ERROR(CheckNormalization(weights));
  return MixtureSpec(std::move(components));
}

bool MixtureSpec::HasPointMass() const {
  return std::any_of(components_.begin(), components_.end(),
                     [](const MixtureComponent& c) {
                       return c.family == ComponentFamily::kPointMass;
                     });
}

namespace {

double ComponentLogDensity(const MixtureComponent& c,
                           const std::vector<double>& point) {
  double total = std::log(c.weight);
  for (size_t r = 0; r < point.size(); ++r) {
    const double x = point[r] - c.center[r];
    if (c.family == ComponentFamily::kLaplace) {
      total += -std::log(2.0 * c.scale) - std::fabs(x) / c.scale;
    } else {
      const double z = x / c.scale;
      total += -0.5 * z * z - std::log(c.scale) -
               0.5 * std::log(2.0 * std::numbers::pi);
    }
  }
  return total;
}

}  // namespace

double MixtureSpec::LogDensity(const std::vector<double>& point) const {
  double top = -INFINITY;
  std::vector<double> terms;
  terms.reserve(components_.size());
  for (const MixtureComponent& c : components_) {
    if (c.family == ComponentFamily::kPointMass || c.weight <= 0.0) continue;
    terms.push_back(ComponentLogDensity(c, point));
    top = std::max(top, terms.back());
  }
  if (!std::isfinite(top)) return -INFINITY;
  long double total = 0.0L;
  for (double t : terms) total += std::exp(static_cast<long double>(t - top));
  return top + static_cast<double>(std::log(total));
}

std::vector<double> MixtureSpec::Sample(RandomStream& rng) const {
  const double u = rng.Uniform01();
  double cumulative = 0.0;
  size_t pick = 0;
  for (size_t l = 0; l < components_.size(); ++l) {
    if (components_[l].weight <= 0.0) continue;
    pick = l;
    cumulative += components_[l].weight;
    if (u < cumulative) break;
  }
  const MixtureComponent& c = components_[pick];
  std::vector<double> x = c.center;
  if (c.family == ComponentFamily::kPointMass) return x;
  for (double& v : x) {
    v += c.family == ComponentFamily::kLaplace ? rng.Laplace(c.scale)
                                               : rng.Gaussian(c.scale);
  }
  return x;
}

absl::StatusOr<DivergenceEstimate> HockeyStickDiscrete(
    const DiscreteDistribution& p, const DiscreteDistribution& q,
    double epsilon) {
  if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) {
    return absl::InvalidArgumentError("epsilon must be finite and >= 0");
  }
  const long double alpha = std::exp(static_cast<long double>(epsilon));
  long double total = 0.0L;
  for (size_t i = 0; i < p.support().size(); ++i) {
    const long double gap =
        p.probs()[i] - alpha * q.ProbabilityOf(p.support()[i]);
    if (gap > 0.0L) total += gap;
  }
  DivergenceEstimate out;
  out.value = Clamp01(total);
  out.method = DivergenceMethod::kExactDiscrete;
  // Rounding of the inputs, not of the sum, dominates.
  out.tolerance = 4.0 * std::numeric_limits<double>::epsilon() *
                  static_cast<double>(p.support().size());
  out.epsilon_at = epsilon;
  return out;
}

namespace {

// Gauss-Kronrod 7/15 nodes on [-1, 1].
constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct GkResult {
  long double integral = 0.0L;
  long double error = 0.0L;
};

template <typename F>
GkResult Gk15(const F& f, double a, double b) {
  const long double center = 0.5L * (static_cast<long double>(a) + b);
  const long double half = 0.5L * (static_cast<long double>(b) - a);
  const long double fc = f(static_cast<double>(center));
  long double kronrod = fc * kWgk[7];
  long double gauss = fc * kWg[3];
  for (size_t j = 0; j < 7; ++j) {
    const long double dx = half * kXgk[j];
    const long double f1 = f(static_cast<double>(center - dx));
    const long double f2 = f(static_cast<double>(center + dx));
    kronrod += kWgk[j] * (f1 + f2);
    if (j % 2 == 1) gauss += kWg[j / 2] * (f1 + f2);
  }
  return {kronrod * half, std::fabs((kronrod - gauss) * half)};
}

template <typename F>
GkResult AdaptiveGk(const F& f, double a, double b, long double tol,
                    int depth) {
  GkResult whole = Gk15(f, a, b);
  if (whole.error <= tol || depth >= 48 || !(a < b)) return whole;
  const double mid = 0.5 * (a + b);
  if (!(a < mid && mid < b)) return whole;
  GkResult left = AdaptiveGk(f, a, mid, 0.5L * tol, depth + 1);
  GkResult right = AdaptiveGk(f, mid, b, 0.5L * tol, depth + 1);
  return {left.integral + right.integral, left.error + right.error};
}

struct Densities {
  std::vector<MixtureComponent> p;
  std::vector<MixtureComponent> q;
  long double alpha = 1.0L;

  static long double Density(const std::vector<MixtureComponent>& cs,
                             double t) {
    long double total = 0.0L;
    for (const MixtureComponent& c : cs) {
      const long double x = static_cast<long double>(t) - c.center[0];
      if (c.family == ComponentFamily::kLaplace) {
        total +=
            c.weight * std::exp(-std::fabs(x) / c.scale) / (2.0L * c.scale);
      } else {
        const long double z = x / c.scale;
        total += c.weight * std::exp(-0.5L * z * z) /
                 (c.scale * std::sqrt(2.0L * std::numbers::pi_v<long double>));
      }
    }
    return total;
  }

  long double Gap(double t) const {
    return Density(p, t) - alpha * Density(q, t);
  }
};

}  // namespace

absl::StatusOr<DivergenceEstimate> HockeyStickMixture1d(const MixtureSpec& p,
                                                        const MixtureSpec& q,
                                                        double epsilon,
                                                        double tol) {
  if (p.dim() != 1 || q.dim() != 1) {
    return absl::InvalidArgumentError(
        absl::StrCat("quadrature handles 1-D mixtures only, got dimensions ",
                     p.dim(), " and ", q.dim()));
  }
  if (!(tol > 0.0)) return absl::InvalidArgumentError("tol must be > 0");
  if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) {
    return absl::InvalidArgumentError("epsilon must be finite and >= 0");
  }
  Densities dens;
  dens.alpha = std::exp(static_cast<long double>(epsilon));
  std::map<double, std::pair<long double, long double>> atoms;
  for (const MixtureComponent& c : p.components()) {
    if (c.weight <= 0.0) continue;
    if (c.family == ComponentFamily::kPointMass) {
      atoms[c.center[0]].first += c.weight;
    } else {
      dens.p.push_back(c);
    }
  }
  for (const MixtureComponent& c : q.components()) {
    if (c.weight <= 0.0) continue;
    if (c.family == ComponentFamily::kPointMass) {
      atoms[c.center[0]].second += c.weight;
    } else {
      dens.q.push_back(c);
    }
  }
  long double atom_part = 0.0L;
  for (const auto& [x, w] : atoms) {
    const long double gap = w.first - dens.alpha * w.second;
    if (gap > 0.0L) atom_part += gap;
  }

  DivergenceEstimate out;
  out.method = DivergenceMethod::kQuadrature;
  out.epsilon_at = epsilon;
  if (dens.p.empty()) {
    out.value = Clamp01(atom_part);
    return out;
  }

  double lo = INFINITY, hi = -INFINITY, max_scale = 0.0;
  std::vector<const MixtureComponent*> all;
  for (const auto& c : dens.p) all.push_back(&c);
  for (const auto& c : dens.q) all.push_back(&c);
  for (const MixtureComponent* c : all) {
    lo = std::min(lo, c->center[0]);
    hi = std::max(hi, c->center[0]);
    max_scale = std::max(max_scale, c->scale);
  }
  lo -= kTailScales * max_scale;
  hi += kTailScales * max_scale;

  // Panel edges: range ends, Laplace kinks, and a geometric ladder around
  // every centre so narrow components are resolved.
  std::vector<double> edges = {lo, hi};
  for (const MixtureComponent* c : all) {
    edges.push_back(c->center[0]);
    for (double k = 0.25; k <= kTailScales; k *= 2.0) {
      edges.push_back(c->center[0] - k * c->scale);
      edges.push_back(c->center[0] + k * c->scale);
    }
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  edges.erase(std::remove_if(edges.begin(), edges.end(),
                             [&](double e) { return e < lo || e > hi; }),
              edges.end());

  // Split every panel at the sign changes of p - e^eps q.
  const size_t n_panels = edges.size() - 1;
  std::vector<std::vector<double>> roots(n_panels);
  ParallelFor(n_panels, [&](size_t k) {
    constexpr int kProbes = 32;
    const double a = edges[k], b = edges[k + 1];
    double prev_t = a;
    long double prev_g = dens.Gap(a);
    for (int s = 1; s <= kProbes; ++s) {
      const double t = s == kProbes ? b : a + (b - a) * s / kProbes;
      const long double g = dens.Gap(t);
      if ((prev_g > 0.0L) != (g > 0.0L)) {
        double l = prev_t, r = t;
        const bool left_positive = prev_g > 0.0L;
        for (int it = 0; it < 200; ++it) {
          const double m = 0.5 * (l + r);
          if (!(l < m && m < r)) break;
          if ((dens.Gap(m) > 0.0L) == left_positive) {
            l = m;
          } else {
            r = m;
          }
        }
        roots[k].push_back(0.5 * (l + r));
      }
      prev_t = t;
      prev_g = g;
    }
  });
  std::vector<double> fine;
  for (size_t k = 0; k < n_panels; ++k) {
    fine.push_back(edges[k]);
    for (double r : roots[k]) {
      if (r > fine.back() && r < edges[k + 1]) fine.push_back(r);
    }
  }
  fine.push_back(edges.back());

  // Apportion half the budget across panels by length; the rest covers the
  // truncated tails and rounding.
  const double span = hi - lo;
  const long double budget = 0.5L * tol;
  auto integrand = [&dens](double t) {
    const long double g = dens.Gap(t);
    return g > 0.0L ? g : 0.0L;
  };
  const size_t m_panels = fine.size() - 1;
  std::vector<GkResult> parts(m_panels);
  ParallelFor(m_panels, [&](size_t k) {
    const long double local = budget * (fine[k + 1] - fine[k]) / span + 1e-30L;
    parts[k] = AdaptiveGk(integrand, fine[k], fine[k + 1], local, 0);
  });
  long double integral = 0.0L, error = 0.0L;
  for (const GkResult& part : parts) {
    integral += part.integral;
    error += part.error;
  }
  // Continuous P-mass beyond 40 scales of every centre.
  const long double tail = std::exp(-kTailScales);
  out.value = Clamp01(integral + atom_part);
  out.tolerance = static_cast<double>(error + tail) +
                  64.0 * std::numeric_limits<double>::epsilon() * out.value;
  out.panels = m_panels;
  if (out.tolerance > tol) {
    return absl::DeadlineExceededError(absl::StrCat(
        "quadrature error bound ", out.tolerance, " exceeds tol ", tol));
  }
  return out;
}

absl::StatusOr<DivergenceEstimate> McDeltaEstimate(const Sampler& sample_p,
                                                   const LogDensityFn& log_p,
                                                   const LogDensityFn& log_q,
                                                   double epsilon,
                                                   size_t n_samples,
                                                   uint64_t seed) {
  if (n_samples < 1000) {
    return absl::InvalidArgumentError(
        absl::StrCat("need at least 1000 samples, got ", n_samples));
  }
  if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) {
    return absl::InvalidArgumentError("epsilon must be finite and >= 0");
  }
  const size_t batches = (n_samples + kBatch - 1) / kBatch;
  struct BatchSums {
    long double sum = 0.0L;
    long double sum_sq = 0.0L;
    bool zero_density = false;
  };
  std::vector<BatchSums> sums(batches);
  ParallelFor(batches, [&](size_t b) {
    RandomStream rng(DeriveSeed(seed, "mc-batch", b));
    const size_t count = std::min(kBatch, n_samples - b * kBatch);
    BatchSums& s = sums[b];
    for (size_t i = 0; i < count; ++i) {
      const std::vector<double> x = sample_p(rng);
      const double lp = log_p(x);
      if (!std::isfinite(lp)) {
        s.zero_density = true;
        return;
      }
      const double lq = log_q(x);
      const double stat = std::max(0.0, -std::expm1(epsilon + lq - lp));
      s.sum += stat;
      s.sum_sq += static_cast<long double>(stat) * stat;
    }
  });
  long double sum = 0.0L, sum_sq = 0.0L;
  for (const BatchSums& s : sums) {
    if (s.zero_density) {
      return absl::FailedPreconditionError(
          "P density evaluated to 0 at a point sampled from P");
    }
    sum += s.sum;
    sum_sq += s.sum_sq;
  }
  const long double n = static_cast<long double>(n_samples);
  const long double mean = sum / n;
  const long double var =
      std::max(0.0L, (sum_sq - n * mean * mean) / (n - 1.0L));
  const double half_width = static_cast<double>(kZ99 * std::sqrt(var / n));
  DivergenceEstimate out;
  out.value = Clamp01(mean);
  out.method = DivergenceMethod::kMonteCarlo;
  out.tolerance = half_width;
  out.ci = std::make_pair(std::max(0.0, out.value - half_width),
                          std::min(1.0, out.value + half_width));
  out.epsilon_at = epsilon;
  out.seed = seed;
  out.samples = n_samples;
  return out;
}

absl::StatusOr<DivergenceEstimate> McDeltaEstimate(const MixtureSpec& p,
                                                   const MixtureSpec& q,
                                                   double epsilon,
                                                   size_t n_samples,
                                                   uint64_t seed) {
  if (p.HasPointMass() || q.HasPointMass()) {
    return absl::InvalidArgumentError(
        "Monte Carlo estimation needs continuous mixtures");
  }
  if (p.dim() != q.dim()) {
    return absl::InvalidArgumentError("mixtures differ in dimension");
  }
  return McDeltaEstimate(
      [&p](RandomStream& rng) { return p.Sample(rng); },
      [&p](const std::vector<double>& x) { return p.LogDensity(x); },
      [&q](const std::vector<double>& x) { return q.LogDensity(x); }, epsilon,
      n_samples, seed);
}

}  // namespace amplipriv
