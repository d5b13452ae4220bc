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

// Python bindings for the accountant, divergence and scenario entry points.
// Structured results cross the boundary as JSON text; the package decodes
// them into dicts.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "absl/status/statusor.h"
#include "amplipriv/accountant.h"
#include "amplipriv/audit.h"
#include "amplipriv/budget.h"
#include "amplipriv/divergence.h"
#include "amplipriv/fwl_query.h"
#include "amplipriv/noise_mechanism.h"
#include "amplipriv/report.h"
#include "amplipriv/scenario.h"

namespace py = pybind11;

namespace amplipriv {
namespace {

template <typename T>
T Unwrap(absl::StatusOr<T> value) {
  if (!value.ok()) throw py::value_error(std::string(value.status().message()));
  return *std::move(value);
}

std::string AmplifyGenericJson(double epsilon, double delta, double p_star) {
  auto base = Unwrap(PrivacyBudget::Create(epsilon, delta));
  return ToJson(Unwrap(AmplifyGeneric(base, p_star))).dump();
}

std::string AmplifyFwlJson(double epsilon, double delta, double p_star,
                           double c, double c_tilde, double rho,
                           const std::string& family) {
  SensitivityBounds bounds;
  bounds.c = c;
  bounds.c_tilde = c_tilde;
  bounds.rho = rho;
  return ToJson(Unwrap(AmplifyFwl(epsilon, delta, p_star, bounds,
                                  Unwrap(ParseNoiseFamily(family)))))
      .dump();
}

double HockeyStick(const std::vector<double>& support,
                   const std::vector<double>& p, const std::vector<double>& q,
                   double epsilon) {
  auto dp = Unwrap(DiscreteDistribution::Create(support, p));
  auto dq = Unwrap(DiscreteDistribution::Create(support, q));
  return Unwrap(HockeyStickDiscrete(dp, dq, epsilon)).value;
}

std::string ScenarioReport(const std::string& command, const std::string& path,
                           std::optional<uint64_t> seed) {
  Scenario s = Unwrap(LoadScenario(path));
  if (seed) s.seed = *seed;
  return Unwrap(CommandReport(command, s, nullptr)).dump();
}

std::tuple<int, std::string, std::vector<std::string>> Run(
    const std::string& command, const std::string& path,
    std::optional<std::string> out, std::optional<uint64_t> seed,
    const std::string& format) {
  RunOverrides overrides;
  overrides.out = std::move(out);
  overrides.seed = seed;
  overrides.format = format;
  RunResult r = RunCommand(command, path, overrides);
  return {r.exit_code, r.summary, r.files};
}

}  // namespace
}  // namespace amplipriv

PYBIND11_MODULE(_core, m) {
  using namespace amplipriv;
  m.def("amplified_epsilon", &AmplifiedEpsilon, py::arg("epsilon"),
        py::arg("p_star"));
  m.def("amplify_generic", &AmplifyGenericJson, py::arg("epsilon"),
        py::arg("delta"), py::arg("p_star"));
  m.def("amplify_fwl", &AmplifyFwlJson, py::arg("epsilon"), py::arg("delta"),
        py::arg("p_star"), py::arg("c"), py::arg("c_tilde"), py::arg("rho"),
        py::arg("family"));
  m.def(
      "corollary_bound",
      [](double epsilon, double p_star, double rho) {
        return Unwrap(CorollaryBound(epsilon, p_star, rho));
      },
      py::arg("epsilon"), py::arg("p_star"), py::arg("rho"));
  m.def("gaussian_factor", &GaussianFactor, py::arg("delta"));
  m.def(
      "tightness_counterexample",
      [](double epsilon, double delta) {
        return ToJson(Unwrap(TightnessCounterexample(epsilon, delta))).dump();
      },
      py::arg("epsilon"), py::arg("delta"));
  m.def("hockey_stick_discrete", &HockeyStick, py::arg("support"), py::arg("p"),
        py::arg("q"), py::arg("epsilon"));
  m.def("scenario_report", &ScenarioReport, py::arg("command"), py::arg("path"),
        py::arg("seed") = py::none());
  m.def("run", &Run, py::arg("command"), py::arg("path"),
        py::arg("out") = py::none(), py::arg("seed") = py::none(),
        py::arg("format") = "json");
}
