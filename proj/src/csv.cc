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

#include "amplipriv/csv.h"

#include <charconv>
#include <fstream>
#include <sstream>
#include <system_error>
#include <vector>

#include "absl/status/status.h"
#include "absl/strings/ascii.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_split.h"
#include "absl/strings/strip.h"

namespace amplipriv {
namespace {

constexpr absl::string_view kNaToken = "NA";

struct TableLine {
  size_t line_number;
  std::vector<absl::string_view> fields;
};

// Splits into non-empty lines with the header checked and removed.
absl::StatusOr<std::vector<TableLine>> SplitTable(absl::string_view text) {
  std::vector<TableLine> table;
  size_t header_width = 0;
  bool saw_header = false;
  size_t line_number = 0;
  for (absl::string_view line : absl::StrSplit(text, '\n')) {
    ++line_number;
    line = absl::StripTrailingAsciiWhitespace(line);
    if (line.empty()) continue;
    std::vector<absl::string_view> fields = absl::StrSplit(line, ',');
    for (auto& f : fields) f = absl::StripAsciiWhitespace(f);
    if (!saw_header) {
      for (size_t j = 0; j < fields.size(); ++j) {
        if (fields[j] != absl::StrCat("f", j + 1)) {
          return absl::InvalidArgumentError(absl::StrCat(
              "line ", line_number, ": header must be f1,...,fd, found '",
              fields[j], "' in column ", j + 1));
        }
      }
      header_width = fields.size();
      saw_header = true;
      continue;
    }
    if (fields.size() != header_width) {
      return absl::InvalidArgumentError(
          absl::StrCat("line ", line_number, ": expected ", header_width,
                       " fields, found ", fields.size()));
    }
    table.push_back({line_number, std::move(fields)});
  }
  if (!saw_header) return absl::InvalidArgumentError("CSV has no header");
  return table;
}

}  // namespace

std::string FormatDouble(double value) {
  char buffer[64];
  auto [end, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, end);
}

absl::StatusOr<double> ParseDouble(absl::string_view token) {
  if (!token.empty() && token.front() == '+') token.remove_prefix(1);
  double value = 0.0;
  auto [ptr, ec] =
      std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc() || ptr != token.data() + token.size() ||
      token.empty()) {
    return absl::InvalidArgumentError(
        absl::StrCat("'", token, "' is not a decimal number"));
  }
  return value;
}

absl::StatusOr<CompleteDataset> ParseCompleteCsv(absl::string_view text,
                                                 std::optional<double> bound) {
  auto table = SplitTable(text);
  if (!table.ok()) return table.status();
  std::vector<Row> rows;
  for (size_t i = 0; i < table->size(); ++i) {
    Row row;
    for (absl::string_view field : (*table)[i].fields) {
      if (field == kNaToken) {
        return absl::InvalidArgumentError(
            absl::StrCat("line ", (*table)[i].line_number,
                         ": NA is not allowed in a complete dataset"));
      }
      auto v = ParseDouble(field);
      if (!v.ok()) {
        return absl::InvalidArgumentError(absl::StrCat(
            "line ", (*table)[i].line_number, ": ", v.status().message()));
      }
      row.push_back(*v);
    }
    rows.push_back(std::move(row));
  }
  return CompleteDataset::Create(std::move(rows), bound);
}

absl::StatusOr<IncompleteDataset> ParseIncompleteCsv(absl::string_view text) {
  auto table = SplitTable(text);
  if (!table.ok()) return table.status();
  std::vector<std::vector<Cell>> rows;
  for (size_t i = 0; i < table->size(); ++i) {
    std::vector<Cell> row;
    for (absl::string_view field : (*table)[i].fields) {
      if (field == kNaToken) {
        row.push_back(Cell::Na());
        continue;
      }
      auto v = ParseDouble(field);
      if (!v.ok()) {
        return absl::InvalidArgumentError(absl::StrCat(
            "line ", (*table)[i].line_number, ": ", v.status().message()));
      }
      row.push_back(Cell::Real(*v));
    }
    rows.push_back(std::move(row));
  }
  return IncompleteDataset::Create(std::move(rows));
}

namespace {

std::string Header(size_t d) {
  std::string out;
  for (size_t j = 0; j < d; ++j) {
    if (j > 0) out += ',';
    absl::StrAppend(&out, "f", j + 1);
  }
  out += '\n';
  return out;
}

}  // namespace

std::string FormatCsv(const CompleteDataset& data) {
  std::string out = Header(data.d());
  for (const Row& row : data.rows()) {
    for (size_t j = 0; j < row.size(); ++j) {
      if (j > 0) out += ',';
      out += FormatDouble(row[j]);
    }
    out += '\n';
  }
  return out;
}

std::string FormatCsv(const IncompleteDataset& data) {
  std::string out = Header(data.d());
  for (size_t i = 0; i < data.n(); ++i) {
    for (size_t j = 0; j < data.d(); ++j) {
      if (j > 0) out += ',';
      const Cell& c = data.cell(i, j);
      out += c.is_na() ? std::string(kNaToken) : FormatDouble(c.value());
    }
    out += '\n';
  }
  return out;
}

absl::StatusOr<std::string> ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open ", path));
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

absl::Status WriteFile(const std::string& path, absl::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    return absl::PermissionDeniedError(absl::StrCat("cannot write ", path));
  }
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) return absl::DataLossError(absl::StrCat("short write to ", path));
  return absl::OkStatus();
}

}  // namespace amplipriv
