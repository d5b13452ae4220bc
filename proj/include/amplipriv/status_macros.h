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

#ifndef AMPLIPRIV_STATUS_MACROS_H_
#define AMPLIPRIV_STATUS_MACROS_H_

#include <utility>

#include "absl/status/status.h"
#include "absl/status/statusor.h"

#define AMPLIPRIV_STATUS_CONCAT_INNER_(a, b) a##b
#define AMPLIPRIV_STATUS_CONCAT_(a, b) AMPLIPRIV_STATUS_CONCAT_INNER_(a, b)

// Returns early from the enclosing function if `expr` yields a non-OK status.
#define RETURN_IF_ERROR(expr)                  \
  do {                                         \
    const absl::Status _status_value = (expr); \
    if (!_status_value.ok()) {                 \
      return _status_value;                    \
    }                                          \
  } while (0)

#define AMPLIPRIV_ASSIGN_OR_RETURN_IMPL_(statusor, lhs, rexpr) \
  auto statusor = (rexpr);                                     \
  if (!statusor.ok()) {                                        \
    return std::move(statusor).status();                       \
  }                                                            \
  lhs = *std::move(statusor)

// Evaluates `rexpr` (a StatusOr), returning its status on failure and
// otherwise move-assigning the value to `lhs`.
#define ASSIGN_OR_RETURN(lhs, rexpr) \
  AMPLIPRIV_ASSIGN_OR_RETURN_IMPL_(  \
      AMPLIPRIV_STATUS_CONCAT_(_statusor_value_, __LINE__), lhs, rexpr)

#endif  // AMPLIPRIV_STATUS_MACROS_H_
