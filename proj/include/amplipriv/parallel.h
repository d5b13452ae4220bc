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

#ifndef AMPLIPRIV_PARALLEL_H_
#define AMPLIPRIV_PARALLEL_H_

#include <cstddef>
#include <functional>

namespace amplipriv {

// Worker cap: AMPLIPRIV_THREADS if set to a positive integer, otherwise the
// hardware concurrency (at least 1).
int MaxThreads();

// Runs body(i) for every i in [0, count). Iterations must be independent and
// write only to per-index state; callers reduce afterwards in index order so
// results never depend on the thread count.
void ParallelFor(size_t count, const std::function<void(size_t)>& body);

}  // namespace amplipriv

#endif  // AMPLIPRIV_PARALLEL_H_
