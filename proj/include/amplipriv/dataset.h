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

#ifndef AMPLIPRIV_DATASET_H_
#define AMPLIPRIV_DATASET_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "absl/status/statusor.h"

namespace amplipriv {

using Row = std::vector<double>;

// A complete n x d real dataset, optionally carrying the entry-magnitude
// bound B (|z_ij| <= B for every entry).
class CompleteDataset {
 public:
  // Requires n >= 1, d >= 1, rectangular, finite entries, and every entry
  // within `bound` when one is given.
  static absl::StatusOr<CompleteDataset> Create(
      std::vector<Row> rows, std::optional<double> bound = std::nullopt);

  size_t n() const { return rows_.size(); }
  size_t d() const { return rows_.front().size(); }
  const Row& row(size_t i) const { return rows_[i]; }
  double at(size_t i, size_t j) const { return rows_[i][j]; }
  const std::vector<Row>& rows() const { return rows_; }
  std::optional<double> bound() const { return bound_; }

  // Copy with row i replaced; the replacement must satisfy the same
  // invariants (length d, within the bound).
  absl::StatusOr<CompleteDataset> WithRow(size_t i, Row replacement) const;

  friend bool operator==(const CompleteDataset&,
                         const CompleteDataset&) = default;

 private:
  CompleteDataset(std::vector<Row> rows, std::optional<double> bound)
      : rows_(std::move(rows)), bound_(bound) {}

  std::vector<Row> rows_;
  std::optional<double> bound_;
};

// Missingness indicator for one sample; bit j == 1 means feature j is
// missing.
class Mask {
 public:
  Mask() = default;
  explicit Mask(std::vector<uint8_t> bits) : bits_(std::move(bits)) {}
  // Accepts only 0/1 entries.
  static absl::StatusOr<Mask> FromBits(const std::vector<int>& bits);
  static Mask AllObserved(size_t d) { return Mask(std::vector<uint8_t>(d, 0)); }
  static Mask AllMissing(size_t d) { return Mask(std::vector<uint8_t>(d, 1)); }

  size_t size() const { return bits_.size(); }
  bool missing(size_t j) const { return bits_[j] != 0; }
  size_t ObservedCount() const;
  bool IsAllMissing() const;
  const std::vector<uint8_t>& bits() const { return bits_; }
  // "0101"-style rendering, one character per feature.
  std::string ToString() const;

  friend bool operator==(const Mask&, const Mask&) = default;
  friend auto operator<=>(const Mask&, const Mask&) = default;
  template <typename H>
  friend H AbslHashValue(H h, const Mask& m) {
    return H::combine(std::move(h), m.bits_);
  }

 private:
  std::vector<uint8_t> bits_;
};

// Ascending indices of the observed (bit 0) features.
std::vector<size_t> ObservedIndices(const Mask& mask);

// One mask per dataset row, all of common length d.
class MaskMatrix {
 public:
  static absl::StatusOr<MaskMatrix> Create(std::vector<Mask> rows);
  static MaskMatrix AllObserved(size_t n, size_t d);
  static MaskMatrix AllMissing(size_t n, size_t d);

  size_t n() const { return rows_.size(); }
  size_t d() const { return rows_.empty() ? 0 : rows_.front().size(); }
  const Mask& row(size_t i) const { return rows_[i]; }
  const std::vector<Mask>& rows() const { return rows_; }

  friend bool operator==(const MaskMatrix&, const MaskMatrix&) = default;
  friend auto operator<=>(const MaskMatrix&, const MaskMatrix&) = default;
  template <typename H>
  friend H AbslHashValue(H h, const MaskMatrix& m) {
    return H::combine(std::move(h), m.rows_);
  }

 private:
  explicit MaskMatrix(std::vector<Mask> rows) : rows_(std::move(rows)) {}
  std::vector<Mask> rows_;
};

// A cell of an incomplete dataset: either a real value or NA. NA is a tag,
// not a NaN sentinel, so it can never leak into arithmetic by accident.
class Cell {
 public:
  static constexpr Cell Na() { return Cell(); }
  static constexpr Cell Real(double value) { return Cell(value); }

  constexpr bool is_na() const { return na_; }
  // Requires !is_na().
  constexpr double value() const { return value_; }
  // Contribution of the cell to a sum: NA + 0 = 0.
  constexpr double ValueOrZero() const { return na_ ? 0.0 : value_; }

  friend constexpr bool operator==(const Cell& a, const Cell& b) {
    return a.na_ == b.na_ && (a.na_ || a.value_ == b.value_);
  }

 private:
  constexpr Cell() = default;
  constexpr explicit Cell(double value) : na_(false), value_(value) {}

  bool na_ = true;
  double value_ = 0.0;
};

class IncompleteDataset {
 public:
  // `cells` is row-major; every row must have the same length d >= 1.
  static absl::StatusOr<IncompleteDataset> Create(
      std::vector<std::vector<Cell>> rows);
  // Fully observed view of a complete dataset.
  static IncompleteDataset FromComplete(const CompleteDataset& data);

  size_t n() const { return n_; }
  size_t d() const { return d_; }
  const Cell& cell(size_t i, size_t j) const { return cells_[i * d_ + j]; }
  std::span<const Cell> row(size_t i) const {
    return std::span<const Cell>(cells_).subspan(i * d_, d_);
  }
  size_t NaCount() const;

  friend bool operator==(const IncompleteDataset&,
                         const IncompleteDataset&) = default;

 private:
  IncompleteDataset(size_t n, size_t d, std::vector<Cell> cells)
      : n_(n), d_(d), cells_(std::move(cells)) {}

  size_t n_ = 0;
  size_t d_ = 0;
  std::vector<Cell> cells_;
};

// z ⊙ (1 - m) + NA ⊙ m, cell by cell.
absl::StatusOr<IncompleteDataset> ApplyMask(const CompleteDataset& data,
                                            const MaskMatrix& mask);

// Two datasets of the same kind and shape at substitute-one distance <= 1.
// `differing_index` is the row of `left` left unmatched by the multiset
// alignment, and is empty when the datasets are equal as multisets.
template <typename Dataset>
struct NeighborPair {
  Dataset left;
  Dataset right;
  std::optional<size_t> differing_index;
};

// Multiset row overlap test with bit-exact row comparison. Returns
// std::nullopt (inside an OK status) when the distance is >= 2, and an
// error on shape mismatch.
absl::StatusOr<std::optional<NeighborPair<CompleteDataset>>> IsNeighbor(
    const CompleteDataset& a, const CompleteDataset& b);
absl::StatusOr<std::optional<NeighborPair<IncompleteDataset>>> IsNeighbor(
    const IncompleteDataset& a, const IncompleteDataset& b);

// |x - y| when both are real, 0 when both are NA. A mixed pair cannot arise
// from two datasets sharing one mask and is reported as an internal error.
absl::StatusOr<double> FeatureGap(const Cell& x, const Cell& y);

}  // namespace amplipriv

#endif  // AMPLIPRIV_DATASET_H_
