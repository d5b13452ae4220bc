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

#ifndef AMPLIPRIV_SCENARIO_H_
#define AMPLIPRIV_SCENARIO_H_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "amplipriv/audit.h"
#include "amplipriv/budget.h"
#include "amplipriv/dataset.h"
#include "amplipriv/fwl_query.h"
#include "amplipriv/missingness.h"
#include "json.hpp"

namespace amplipriv {

// Line of every JSON value in a document, keyed by JSON pointer ("" is the
// root). Built by a separate scan because the parsed tree keeps no
// positions.
class JsonLineIndex {
 public:
  // The text must already be valid JSON.
  static JsonLineIndex Build(absl::string_view text);
  // Line of `pointer`, or of its nearest recorded ancestor.
  int LineOf(const std::string& pointer) const;

 private:
  std::map<std::string, int> lines_;
};

// Status payload key carrying the JSON pointer of a schema error.
inline constexpr char kPointerPayload[] = "amplipriv/pointer";

struct AuditSection {
  AuditOptions options;
  std::vector<double> epsilons;
  size_t index = 0;
  Row row;
};

struct CounterexampleSection {
  std::vector<double> epsilons;
  double delta = 0.0;
  double tolerance = 1e-10;
};

struct Scenario {
  std::string path;
  std::string name;
  uint64_t seed = 0;
  std::optional<CompleteDataset> data;
  double bound = 0.0;
  std::optional<FeatureMechanism> mechanism;
  std::optional<FwlQuery> query;
  std::optional<NoiseFamily> family;
  PrivacyBudget budget;
  std::optional<double> rho;
  bool attest_equal_constants = false;
  std::optional<AuditSection> audit;
  std::optional<bool> simulate_audit_mode;
  std::optional<CounterexampleSection> counterexample;
  std::string output_dir;
};

// Parses and validates a scenario. `path` labels diagnostics and anchors
// relative CSV paths; errors read "path:line: /pointer: message".
absl::StatusOr<Scenario> ParseScenario(absl::string_view text,
                                       const std::string& path);
absl::StatusOr<Scenario> LoadScenario(const std::string& path);

inline constexpr const char* kCommands[] = {
    "calibrate", "amplify", "audit", "simulate", "counterexample", "report"};

struct RunOverrides {
  std::optional<uint64_t> seed;
  std::optional<std::string> out;
  std::string format = "json";
};

struct RunResult {
  // 0 success, 1 error, 2 audit FAIL.
  int exit_code = 0;
  std::string summary;
  std::vector<std::string> files;
};

RunResult RunCommand(absl::string_view command, const std::string& path,
                     const RunOverrides& overrides);

// The command's report without writing anything.
absl::StatusOr<nlohmann::json> CommandReport(absl::string_view command,
                                             const Scenario& scenario,
                                             std::vector<AuditRow>* audit_rows);

// 2 when an audit or counterexample section reports FAIL, else 0.
int VerdictExitCode(const nlohmann::json& report);

// One line per step; audit rows echo (epsilon, bound, empirical).
std::string SummarizeReport(const nlohmann::json& report);

}  // namespace amplipriv

#endif  // AMPLIPRIV_SCENARIO_H_
