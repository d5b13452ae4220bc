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

#include "amplipriv/dataset.h"

#include <algorithm>
#include <bit>
#include <cmath>

#include "absl/container/flat_hash_map.h"
#include "absl/status/status.h"
#include "absl/strings/str_cat.h"

namespace amplipriv {
namespace {

absl::Status ValidateRow(const Row& row, size_t d, std::optional<double> bound,
                         size_t index) {
  if (row.size() != d) {
    return absl::InvalidArgumentError(absl::StrCat(
        "row ", index, " has length ", row.size(), ", expected ", d));
  }
  for (size_t j = 0; j < d; ++j) {
    if (!std::isfinite(row[j])) {
      return absl::InvalidArgumentError(
          absl::StrCat("entry (", index, ", ", j, ") is not finite"));
    }
    if (bound.has_value() && std::fabs(row[j]) > *bound) {
      return absl::InvalidArgumentError(
          absl::StrCat("entry (", index, ", ", j, ") = ", row[j],
                       " exceeds the bound B = ", *bound));
    }
  }
  return absl::OkStatus();
}

using RowKey = std::vector<uint64_t>;

RowKey KeyOf(const Row& row) {
  RowKey key;
  key.reserve(row.size());
  for (double v : row) key.push_back(std::bit_cast<uint64_t>(v));
  return key;
}

RowKey KeyOf(std::span<const Cell> row) {
  RowKey key;
  key.reserve(2 * row.size());
  for (const Cell& c : row) {
    key.push_back(c.is_na() ? 1 : 0);
    key.push_back(c.is_na() ? 0 : std::bit_cast<uint64_t>(c.value()));
  }
  return key;
}

// Returns the indices of rows of `a` that are not matched by a row of `b`
// under greedy multiset matching in row order.
template <typename KeyFn>
std::vector<size_t> UnmatchedRows(size_t n, KeyFn key_a, KeyFn key_b) {
  absl::flat_hash_map<RowKey, size_t> available;
  for (size_t i = 0; i < n; ++i) ++available[key_b(i)];
  std::vector<size_t> unmatched;
  for (size_t i = 0; i < n; ++i) {
    auto it = available.find(key_a(i));
    if (it != available.end() && it->second > 0) {
      --it->second;
    } else {
      unmatched.push_back(i);
      if (unmatched.size() > 1) break;
    }
  }
  return unmatched;
}

}  // namespace

absl::StatusOr<CompleteDataset> CompleteDataset::Create(
    std::vector<Row> rows, std::optional<double> bound) {
  if (rows.empty()) {
    return absl::InvalidArgumentError("dataset must have at least one row");
  }
  if (rows.front().empty()) {
    return absl::InvalidArgumentError("dataset must have at least one feature");
  }
  if (bound.has_value() && !(*bound >= 0.0 && std::isfinite(*bound))) {
    return absl::InvalidArgumentError("bound B must be finite and >= 0");
  }
  const size_t d = rows.front().size();
  for (size_t i = 0; i < rows.size(); ++i) {
    if (absl::Status s = ValidateRow(rows[i], d, bound, i); !s.ok()) return s;
  }
  return CompleteDataset(std::move(rows), bound);
}

absl::StatusOr<CompleteDataset> CompleteDataset::WithRow(
    size_t i, Row replacement) const {
  if (i >= n()) {
    return absl::OutOfRangeError(
        absl::StrCat("row index ", i, " out of range for n = ", n()));
  }
  if (absl::Status s = ValidateRow(replacement, d(), bound_, i); !s.ok()) {
    return s;
  }
  std::vector<Row> rows = rows_;
  rows[i] = std::move(replacement);
  return CompleteDataset(std::move(rows), bound_);
}

absl::StatusOr<Mask> Mask::FromBits(const std::vector<int>& bits) {
  std::vector<uint8_t> out;
  out.reserve(bits.size());
  for (int b : bits) {
    if (b != 0 && b != 1) {
      return absl::InvalidArgumentError(
          absl::StrCat("mask bits must be 0 or 1, got ", b));
    }
    out.push_back(static_cast<uint8_t>(b));
  }
  return Mask(std::move(out));
}

size_t Mask::ObservedCount() const {
  return static_cast<size_t>(std::count(bits_.begin(), bits_.end(), 0));
}

bool Mask::IsAllMissing() const {
  return std::all_of(bits_.begin(), bits_.end(),
                     [](uint8_t b) { return b != 0; });
}

std::string Mask::ToString() const {
  std::string out;
  out.reserve(bits_.size());
  for (uint8_t b : bits_) out.push_back(b ? '1' : '0');
  return out;
}

std::vector<size_t> ObservedIndices(const Mask& mask) {
  std::vector<size_t> out;
  for (size_t j = 0; j < mask.size(); ++j) {
    if (!mask.missing(j)) out.push_back(j);
  }
  return out;
}

absl::StatusOr<MaskMatrix> MaskMatrix::Create(std::vector<Mask> rows) {
  if (rows.empty()) {
    return absl::InvalidArgumentError("mask matrix must have at least one row");
  }
  const size_t d = rows.front().size();
  for (size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != d) {
      return absl::InvalidArgumentError(absl::StrCat(
          "mask row ", i, " has length ", rows[i].size(), ", expected ", d));
    }
  }
  return MaskMatrix(std::move(rows));
}

MaskMatrix MaskMatrix::AllObserved(size_t n, size_t d) {
  return MaskMatrix(std::vector<Mask>(n, Mask::AllObserved(d)));
}

MaskMatrix MaskMatrix::AllMissing(size_t n, size_t d) {
  return MaskMatrix(std::vector<Mask>(n, Mask::AllMissing(d)));
}

absl::StatusOr<IncompleteDataset> IncompleteDataset::Create(
    std::vector<std::vector<Cell>> rows) {
  if (rows.empty() || rows.front().empty()) {
    return absl::InvalidArgumentError(
        "incomplete dataset must be at least 1 x 1");
  }
  const size_t n = rows.size();
  const size_t d = rows.front().size();
  std::vector<Cell> cells;
  cells.reserve(n * d);
  for (size_t i = 0; i < n; ++i) {
    if (rows[i].size() != d) {
      return absl::InvalidArgumentError(absl::StrCat(
          "row ", i, " has length ", rows[i].size(), ", expected ", d));
    }
    for (const Cell& c : rows[i]) {
      if (!c.is_na() && !std::isfinite(c.value())) {
        return absl::InvalidArgumentError(
            absl::StrCat("row ", i, " holds a non-finite value"));
      }
      cells.push_back(c);
    }
  }
  return IncompleteDataset(n, d, std::move(cells));
}

IncompleteDataset IncompleteDataset::FromComplete(const CompleteDataset& data) {
  std::vector<Cell> cells;
  cells.reserve(data.n() * data.d());
  for (const Row& row : data.rows()) {
    for (double v : row) cells.push_back(Cell::Real(v));
  }
  return IncompleteDataset(data.n(), data.d(), std::move(cells));
}

size_t IncompleteDataset::NaCount() const {
  return static_cast<size_t>(std::count_if(
      cells_.begin(), cells_.end(), [](const Cell& c) { return c.is_na(); }));
}

absl::StatusOr<IncompleteDataset> ApplyMask(const CompleteDataset& data,
                                            const MaskMatrix& mask) {
  if (mask.n() != data.n() || mask.d() != data.d()) {
    return absl::InvalidArgumentError(absl::StrCat("mask is ", mask.n(), " x ",
                                                   mask.d(), " but dataset is ",
                                                   data.n(), " x ", data.d()));
  }
  std::vector<std::vector<Cell>> rows(data.n());
  for (size_t i = 0; i < data.n(); ++i) {
    rows[i].reserve(data.d());
    for (size_t j = 0; j < data.d(); ++j) {
      rows[i].push_back(mask.row(i).missing(j) ? Cell::Na()
                                               : Cell::Real(data.at(i, j)));
    }
  }
  return IncompleteDataset::Create(std::move(rows));
}

absl::StatusOr<std::optional<NeighborPair<CompleteDataset>>> IsNeighbor(
    const CompleteDataset& a, const CompleteDataset& b) {
  if (a.n() != b.n() || a.d() != b.d()) {
    return absl::InvalidArgumentError(
        absl::StrCat("cannot compare a ", a.n(), " x ", a.d(),
                     " dataset with a ", b.n(), " x ", b.d(), " dataset"));
  }
  const std::vector<size_t> unmatched = UnmatchedRows(
      a.n(),
      std::function<RowKey(size_t)>([&](size_t i) { return KeyOf(a.row(i)); }),
      std::function<RowKey(size_t)>([&](size_t i) { return KeyOf(b.row(i)); }));
  if (unmatched.size() > 1) return std::nullopt;
  NeighborPair<CompleteDataset> pair{a, b, std::nullopt};
  if (!unmatched.empty()) pair.differing_index = unmatched.front();
  return pair;
}

absl::StatusOr<std::optional<NeighborPair<IncompleteDataset>>> IsNeighbor(
    const IncompleteDataset& a, const IncompleteDataset& b) {
  if (a.n() != b.n() || a.d() != b.d()) {
    return absl::InvalidArgumentError(
        absl::StrCat("cannot compare a ", a.n(), " x ", a.d(),
                     " dataset with a ", b.n(), " x ", b.d(), " dataset"));
  }
  const std::vector<size_t> unmatched = UnmatchedRows(
      a.n(),
      std::function<RowKey(size_t)>([&](size_t i) { return KeyOf(a.row(i)); }),
      std::function<RowKey(size_t)>([&](size_t i) { return KeyOf(b.row(i)); }));
  if (unmatched.size() > 1) return std::nullopt;
  NeighborPair<IncompleteDataset> pair{a, b, std::nullopt};
  if (!unmatched.empty()) pair.differing_index = unmatched.front();
  return pair;
}

absl::StatusOr<double> FeatureGap(const Cell& x, const Cell& y) {
  if (x.is_na() && y.is_na()) return 0.0;
  if (x.is_na() != y.is_na()) {
    return absl::InternalError(
        "feature gap between NA and a real value: the two datasets do not "
        "share a mask");
  }
  return std::fabs(x.value() - y.value());
}

}  // namespace amplipriv
