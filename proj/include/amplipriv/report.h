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

#ifndef AMPLIPRIV_REPORT_H_
#define AMPLIPRIV_REPORT_H_

#include <string>
#include <vector>

#include "amplipriv/accountant.h"
#include "amplipriv/audit.h"
#include "amplipriv/fwl_query.h"
#include "amplipriv/noise_mechanism.h"
#include "json.hpp"

namespace amplipriv {

// Budgets and other reals go into reports as shortest round-trip decimal
// strings so every reader recovers the same double.
nlohmann::json Decimal(double value);

nlohmann::json ToJson(const PrivacyBudget& budget);
nlohmann::json ToJson(const AmplificationReport& report);
nlohmann::json ToJson(const SensitivityBounds& bounds);
nlohmann::json ToJson(const QueryDescriptor& descriptor);
nlohmann::json ToJson(const DivergenceEstimate& estimate);
nlohmann::json ToJson(const AuditRow& row);
nlohmann::json ToJson(const TightnessResult& result);
nlohmann::json ToJson(const MaskMatrix& mask);
nlohmann::json CalibrationJson(const NoiseMechanism& m);

// {"output", "epsilon_base", "family", "scale", "seed_commitment"}, plus
// "mask" for an audit-mode release.
nlohmann::json ReleaseRecord(const NoiseMechanism& m, const Release& release,
                             uint64_t seed);

inline constexpr char kAuditCsvHeader[] =
    "epsilon,bound,empirical,method,tolerance,verdict";

std::string AuditCsv(const std::vector<AuditRow>& rows);

// Two-space indent with sorted keys and a trailing newline.
std::string Render(const nlohmann::json& value);

// key,value lines for the leaves of a JSON object, keys as JSON pointers.
std::string FlattenToCsv(const nlohmann::json& value);

}  // namespace amplipriv

#endif  // AMPLIPRIV_REPORT_H_
