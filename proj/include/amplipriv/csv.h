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

#ifndef AMPLIPRIV_CSV_H_
#define AMPLIPRIV_CSV_H_

#include <optional>
#include <string>

#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "amplipriv/dataset.h"

namespace amplipriv {

// Shortest decimal string that parses back to exactly `value`.
std::string FormatDouble(double value);

// Strict decimal parse of the whole token; no leading/trailing junk.
absl::StatusOr<double> ParseDouble(absl::string_view token);

// CSV with header f1,...,fd. The complete reader rejects NA cells.
absl::StatusOr<CompleteDataset> ParseCompleteCsv(
    absl::string_view text, std::optional<double> bound = std::nullopt);
absl::StatusOr<IncompleteDataset> ParseIncompleteCsv(absl::string_view text);

std::string FormatCsv(const CompleteDataset& data);
std::string FormatCsv(const IncompleteDataset& data);

absl::StatusOr<std::string> ReadFile(const std::string& path);
absl::Status WriteFile(const std::string& path, absl::string_view contents);

}  // namespace amplipriv

#endif  // AMPLIPRIV_CSV_H_
