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

#include "amplipriv/report.h"

#include "absl/strings/str_cat.h"
#include "amplipriv/csv.h"

namespace amplipriv {

nlohmann::json Decimal(double value) { return FormatDouble(value); }

nlohmann::json ToJson(const PrivacyBudget& budget) {
  return {{"epsilon", Decimal(budget.epsilon)},
          {"delta", Decimal(budget.delta)}};
}

nlohmann::json ToJson(const AmplificationReport& report) {
  nlohmann::json out = {
      {"base", ToJson(report.base)},
      {"amplified", ToJson(report.amplified)},
      {"amplified_is_upper_bound", true},
      {"p_star", Decimal(report.p_star)},
      {"route", std::string(RouteName(report.route))},
      {"attestations", report.attestations},
  };
  if (report.rho) out["rho"] = Decimal(*report.rho);
  if (report.c) out["C"] = Decimal(*report.c);
  if (report.c_tilde) out["C_tilde"] = Decimal(*report.c_tilde);
  if (report.scaled_epsilon) out["epsilon_0"] = Decimal(*report.scaled_epsilon);
  if (report.first_order) out["first_order"] = Decimal(*report.first_order);
  return out;
}

nlohmann::json ToJson(const SensitivityBounds& bounds) {
  return {{"C", Decimal(bounds.c)},
          {"C_tilde", Decimal(bounds.c_tilde)},
          {"ratio", Decimal(bounds.ratio())},
          {"rho", Decimal(bounds.rho)},
          {"B", Decimal(bounds.bound)},
          {"observed_cap", bounds.observed_cap}};
}

nlohmann::json ToJson(const QueryDescriptor& descriptor) {
  nlohmann::json params = nlohmann::json::object();
  for (const auto& [key, value] : descriptor.params) params[key] = value;
  nlohmann::json inputs = nlohmann::json::array();
  for (const QueryDescriptor& in : descriptor.inputs) {
    inputs.push_back(ToJson(in));
  }
  return {{"name", descriptor.name}, {"params", params}, {"inputs", inputs}};
}

nlohmann::json ToJson(const DivergenceEstimate& estimate) {
  nlohmann::json out = {
      {"value", Decimal(estimate.value)},
      {"method", std::string(DivergenceMethodName(estimate.method))},
      {"tolerance", Decimal(estimate.tolerance)},
      {"epsilon_at", Decimal(estimate.epsilon_at)},
  };
  if (estimate.ci) {
    out["ci"] = {Decimal(estimate.ci->first), Decimal(estimate.ci->second)};
  }
  if (estimate.seed) out["seed"] = *estimate.seed;
  if (estimate.samples > 0) out["samples"] = estimate.samples;
  if (estimate.panels > 0) out["panels"] = estimate.panels;
  return out;
}

nlohmann::json ToJson(const AuditRow& row) {
  return {{"base_epsilon", Decimal(row.base_epsilon)},
          {"epsilon", Decimal(row.epsilon)},
          {"bound", Decimal(row.bound)},
          {"empirical", Decimal(row.empirical)},
          {"method", std::string(AuditMethodName(row.method))},
          {"tolerance", Decimal(row.tolerance)},
          {"verdict", row.pass ? "PASS" : "FAIL"},
          {"accountant", ToJson(row.report)},
          {"left_vs_right", ToJson(row.left_right)},
          {"right_vs_left", ToJson(row.right_left)}};
}

nlohmann::json ToJson(const TightnessResult& result) {
  return {{"epsilon", Decimal(result.epsilon)},
          {"delta", Decimal(result.delta)},
          {"p_star", Decimal(result.p_star)},
          {"composed_delta", Decimal(result.composed_delta)},
          {"base_delta", Decimal(result.base_delta)},
          {"equality_gap", Decimal(result.equality_gap)},
          {"generic", ToJson(result.generic_report)}};
}

nlohmann::json ToJson(const MaskMatrix& mask) {
  nlohmann::json rows = nlohmann::json::array();
  for (const Mask& m : mask.rows()) {
    nlohmann::json bits = nlohmann::json::array();
    for (uint8_t b : m.bits()) bits.push_back(static_cast<int>(b));
    rows.push_back(bits);
  }
  return rows;
}

nlohmann::json CalibrationJson(const NoiseMechanism& m) {
  return {{"family", std::string(NoiseFamilyName(m.family()))},
          {"scale", Decimal(m.scale())},
          {"sensitivity", Decimal(m.sensitivity())},
          {"norm", std::string(NormName(m.query().norm()))},
          {"B", Decimal(m.bound())},
          {"budget", ToJson(m.budget())},
          {"query", ToJson(m.query().descriptor())},
          {"constants_L", [&] {
             nlohmann::json l = nlohmann::json::array();
             for (double v : m.query().constants()) l.push_back(Decimal(v));
             return l;
           }()}};
}

nlohmann::json ReleaseRecord(const NoiseMechanism& m, const Release& release,
                             uint64_t seed) {
  nlohmann::json output = nlohmann::json::array();
  for (double v : release.output) output.push_back(Decimal(v));
  nlohmann::json out = {
      {"output", output},
      {"epsilon_base", Decimal(m.budget().epsilon)},
      {"family", std::string(NoiseFamilyName(m.family()))},
      {"scale", Decimal(m.scale())},
      {"seed_commitment", SeedCommitment(seed)},
  };
  if (release.mask) out["mask"] = ToJson(*release.mask);
  return out;
}

std::string AuditCsv(const std::vector<AuditRow>& rows) {
  std::string out = absl::StrCat(kAuditCsvHeader, "\n");
  for (const AuditRow& row : rows) {
    absl::StrAppend(
        &out, FormatDouble(row.epsilon), ",", FormatDouble(row.bound), ",",
        FormatDouble(row.empirical), ",", AuditMethodName(row.method), ",",
        FormatDouble(row.tolerance), ",", row.pass ? "PASS" : "FAIL", "\n");
  }
  return out;
}

std::string Render(const nlohmann::json& value) { return value.dump(2) + "\n"; }

namespace {

void Flatten(const nlohmann::json& value, const std::string& prefix,
             std::string& out) {
  if (value.is_object()) {
    for (auto it = value.begin(); it != value.end(); ++it) {
      Flatten(it.value(), prefix + "/" + it.key(), out);
    }
    return;
  }
  if (value.is_array()) {
    for (size_t i = 0; i < value.size(); ++i) {
      Flatten(value[i], absl::StrCat(prefix, "/", i), out);
    }
    return;
  }
  std::string text =
      value.is_string() ? value.get<std::string>() : value.dump();
  if (text.find_first_of(",\"\n") != std::string::npos) {
    std::string quoted = "\"";
    for (char c : text) {
      if (c == '"') quoted += '"';
      quoted += c;
    }
    text = quoted + "\"";
  }
  absl::StrAppend(&out, prefix, ",", text, "\n");
}

}  // namespace

std::string FlattenToCsv(const nlohmann::json& value) {
  std::string out = "key,value\n";
  Flatten(value, "", out);
  return out;
}

}  // namespace amplipriv
