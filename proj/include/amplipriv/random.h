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

#ifndef AMPLIPRIV_RANDOM_H_
#define AMPLIPRIV_RANDOM_H_

#include <cstdint>
#include <optional>
#include <random>

#include "absl/strings/string_view.h"

namespace amplipriv {

// SplitMix64 finalizer. Bijective on 64-bit words.
uint64_t MixBits(uint64_t x);

// Derives an independent sub-stream seed from a parent seed, a label naming
// the consumer ("mask", "noise", ...) and an index (row, trial, batch).
// Streams derived from distinct (label, index) pairs do not depend on the
// order in which they are consumed.
uint64_t DeriveSeed(uint64_t seed, absl::string_view label, uint64_t index = 0);

// Seeded stream of variates. All transforms from raw bits are written out
// here rather than delegated to <random> distributions, whose algorithms are
// implementation-defined; this keeps draws bit-reproducible across standard
// libraries for a fixed seed.
class RandomStream {
 public:
  explicit RandomStream(uint64_t seed) : engine_(seed) {}

  uint64_t NextBits() { return engine_(); }

  // Uniform on [0, 1) with 53 random bits.
  double Uniform01();
  // Uniform on the open interval (0, 1).
  double UniformOpen();
  double Uniform(double lo, double hi);
  bool Bernoulli(double p);
  // Uniform on {0, ..., n - 1}; requires n > 0.
  uint64_t UniformIndex(uint64_t n);

  // Laplace(0, scale) by inverse CDF.
  double Laplace(double scale);
  // N(0, sigma^2) by the Box-Muller pair transform; the second variate of
  // each pair is cached for the next call.
  double Gaussian(double sigma);

 private:
  std::mt19937_64 engine_;
  std::optional<double> spare_normal_;
};

}  // namespace amplipriv

#endif  // AMPLIPRIV_RANDOM_H_
