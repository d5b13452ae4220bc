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

#include "amplipriv/scenario.h"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <set>
#include <utility>

#include "absl/status/status.h"
#include "absl/strings/ascii.h"
#include "absl/strings/cord.h"
#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_join.h"
#include "absl/strings/str_split.h"
#include "amplipriv/accountant.h"
#include "amplipriv/csv.h"
#include "amplipriv/noise_mechanism.h"
#include "amplipriv/random.h"
#include "amplipriv/report.h"
#include "amplipriv/status_macros.h"

namespace amplipriv {

using nlohmann::json;

namespace {

std::string EscapeToken(absl::string_view key) {
  std::string out;
  for (char c : key) {
    if (c == '~') {
      out += "~0";
    } else if (c == '/') {
      out += "~1";
    } else {
      out += c;
    }
  }
  return out;
}

class LineScanner {
 public:
  LineScanner(absl::string_view text, std::map<std::string, int>& lines)
      : text_(text), lines_(lines) {}

  void Value(const std::string& pointer) {
    SkipSpace();
    lines_.emplace(pointer, line_);
    char c = Peek();
    if (c == '{') {
      ++pos_;
      SkipSpace();
      if (Peek() == '}') {
        ++pos_;
        return;
      }
      while (pos_ < text_.size()) {
        SkipSpace();
        std::string key = String();
        SkipSpace();
        ++pos_;  // ':'
        Value(absl::StrCat(pointer, "/", EscapeToken(key)));
        SkipSpace();
        if (Peek() == ',') {
          ++pos_;
          continue;
        }
        ++pos_;  // '}'
        return;
      }
    } else if (c == '[') {
      ++pos_;
      SkipSpace();
      if (Peek() == ']') {
        ++pos_;
        return;
      }
      for (size_t i = 0; pos_ < text_.size(); ++i) {
        Value(absl::StrCat(pointer, "/", i));
        SkipSpace();
        if (Peek() == ',') {
          ++pos_;
          continue;
        }
        ++pos_;  // ']'
        return;
      }
    } else if (c == '"') {
      String();
    } else {
      while (pos_ < text_.size() && !absl::ascii_isspace(text_[pos_]) &&
             text_[pos_] != ',' && text_[pos_] != ']' && text_[pos_] != '}') {
        ++pos_;
      }
    }
  }

 private:
  char Peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }

  void SkipSpace() {
    while (pos_ < text_.size() && absl::ascii_isspace(text_[pos_])) {
      if (text_[pos_] == '\n') ++line_;
      ++pos_;
    }
  }

  // Keys are only needed for pointers, so \u escapes are kept verbatim.
  std::string String() {
    std::string out;
    ++pos_;
    while (pos_ < text_.size() && text_[pos_] != '"') {
      if (text_[pos_] == '\\' && pos_ + 1 < text_.size()) {
        char e = text_[pos_ + 1];
        pos_ += 2;
        switch (e) {
          case 'n':
            out += '\n';
            break;
          case 't':
            out += '\t';
            break;
          case 'r':
            out += '\r';
            break;
          case 'b':
            out += '\b';
            break;
          case 'f':
            out += '\f';
            break;
          case 'u':
            out += "\\u";
            break;
          default:
            out += e;
        }
        continue;
      }
      out += text_[pos_++];
    }
    ++pos_;
    return out;
  }

  absl::string_view text_;
  std::map<std::string, int>& lines_;
  size_t pos_ = 0;
  int line_ = 1;
};

}  // namespace

JsonLineIndex JsonLineIndex::Build(absl::string_view text) {
  JsonLineIndex index;
  LineScanner(text, index.lines_).Value("");
  return index;
}

int JsonLineIndex::LineOf(const std::string& pointer) const {
  std::string p = pointer;
  while (true) {
    auto it = lines_.find(p);
    if (it != lines_.end()) return it->second;
    size_t slash = p.rfind('/');
    if (slash == std::string::npos) return 1;
    p.resize(slash);
  }
}

namespace {

// Schema-checking reader over a parsed document.
class Reader {
 public:
  Reader(std::string path, JsonLineIndex index)
      : path_(std::move(path)), index_(std::move(index)) {}

  absl::Status Error(const std::string& pointer, absl::string_view msg) const {
    absl::Status status = absl::InvalidArgumentError(
        absl::StrCat(path_, ":", index_.LineOf(pointer), ": ",
                     pointer.empty() ? "/" : pointer, ": ", msg));
    status.SetPayload(kPointerPayload, absl::Cord(pointer));
    return status;
  }

  // Re-anchors a library error at `pointer`.
  absl::Status Wrap(const std::string& pointer,
                    const absl::Status& status) const {
    if (status.ok()) return status;
    return Error(pointer, status.message());
  }

  absl::Status Object(const json& v, const std::string& pointer,
                      const std::set<std::string>& allowed,
                      const std::set<std::string>& required = {}) const {
    if (!v.is_object()) return Error(pointer, "expected an object");
    for (auto it = v.begin(); it != v.end(); ++it) {
      if (!allowed.contains(it.key())) {
        return Error(Child(pointer, it.key()),
                     absl::StrCat("unknown key '", it.key(), "'"));
      }
    }
    for (const std::string& key : required) {
      if (!v.contains(key)) {
        return Error(pointer, absl::StrCat("missing required key '", key, "'"));
      }
    }
    return absl::OkStatus();
  }

  static std::string Child(const std::string& pointer, absl::string_view key) {
    return absl::StrCat(pointer, "/", EscapeToken(key));
  }
  static std::string Child(const std::string& pointer, size_t index) {
    return absl::StrCat(pointer, "/", index);
  }

  // A finite number, written as a JSON number or a decimal string.
  absl::StatusOr<double> Number(const json& v,
                                const std::string& pointer) const {
    double value = 0.0;
    if (v.is_number()) {
      value = v.get<double>();
    } else if (v.is_string()) {
      absl::StatusOr<double> parsed = ParseDouble(v.get<std::string>());
      if (!parsed.ok()) return Error(pointer, parsed.status().message());
      value = *parsed;
    } else {
      return Error(pointer, "expected a number");
    }
    if (!std::isfinite(value))
      return Error(pointer, "expected a finite number");
    return value;
  }

  absl::StatusOr<uint64_t> Unsigned(const json& v,
                                    const std::string& pointer) const {
    if (v.is_number_unsigned()) return v.get<uint64_t>();
    if (v.is_number_integer()) {
      return Error(pointer, "expected a nonnegative integer");
    }
    uint64_t value = 0;
    if (v.is_string() && absl::SimpleAtoi(v.get<std::string>(), &value)) {
      return value;
    }
    if (v.is_number_float()) {
      double d = v.get<double>();
      if (d >= 0 && d == std::floor(d) && d < 9007199254740992.0) {
        return static_cast<uint64_t>(d);
      }
    }
    return Error(pointer, "expected a nonnegative integer");
  }

  absl::StatusOr<size_t> Size(const json& v, const std::string& pointer) const {
    ASSIGN_OR_RETURN(uint64_t value, Unsigned(v, pointer));
    return static_cast<size_t>(value);
  }

  absl::StatusOr<std::string> String(const json& v,
                                     const std::string& pointer) const {
    if (!v.is_string()) return Error(pointer, "expected a string");
    return v.get<std::string>();
  }

  absl::StatusOr<bool> Bool(const json& v, const std::string& pointer) const {
    if (!v.is_boolean()) return Error(pointer, "expected true or false");
    return v.get<bool>();
  }

  absl::StatusOr<std::vector<double>> Numbers(
      const json& v, const std::string& pointer) const {
    if (!v.is_array()) return Error(pointer, "expected an array of numbers");
    std::vector<double> out;
    for (size_t i = 0; i < v.size(); ++i) {
      ASSIGN_OR_RETURN(double x, Number(v[i], Child(pointer, i)));
      out.push_back(x);
    }
    return out;
  }

  absl::StatusOr<std::vector<size_t>> Sizes(const json& v,
                                            const std::string& pointer) const {
    if (!v.is_array()) return Error(pointer, "expected an array of integers");
    std::vector<size_t> out;
    for (size_t i = 0; i < v.size(); ++i) {
      ASSIGN_OR_RETURN(size_t x, Size(v[i], Child(pointer, i)));
      out.push_back(x);
    }
    return out;
  }

  absl::StatusOr<std::vector<std::vector<double>>> Rows(
      const json& v, const std::string& pointer) const {
    if (!v.is_array()) return Error(pointer, "expected an array of rows");
    std::vector<std::vector<double>> out;
    for (size_t i = 0; i < v.size(); ++i) {
      ASSIGN_OR_RETURN(std::vector<double> row,
                       Numbers(v[i], Child(pointer, i)));
      out.push_back(std::move(row));
    }
    return out;
  }

  absl::StatusOr<amplipriv::Matrix> Matrix(const json& v,
                                           const std::string& pointer) const {
    ASSIGN_OR_RETURN(std::vector<std::vector<double>> rows, Rows(v, pointer));
    amplipriv::Matrix m;
    m.rows = rows.size();
    m.cols = rows.empty() ? 0 : rows.front().size();
    for (size_t r = 0; r < rows.size(); ++r) {
      if (rows[r].size() != m.cols) {
        return Error(Child(pointer, r), "matrix rows differ in length");
      }
      m.values.insert(m.values.end(), rows[r].begin(), rows[r].end());
    }
    return m;
  }

  // "0110" (1 = missing) or [0, 1, 1, 0].
  absl::StatusOr<amplipriv::Mask> Mask(const json& v,
                                       const std::string& pointer) const {
    std::vector<int> bits;
    if (v.is_string()) {
      for (char c : v.get<std::string>()) {
        if (c != '0' && c != '1') {
          return Error(pointer, "mask strings use only '0' and '1'");
        }
        bits.push_back(c - '0');
      }
    } else if (v.is_array()) {
      for (size_t i = 0; i < v.size(); ++i) {
        ASSIGN_OR_RETURN(size_t b, Size(v[i], Child(pointer, i)));
        bits.push_back(static_cast<int>(std::min<size_t>(b, 2)));
      }
    } else {
      return Error(pointer, "expected a mask string or bit array");
    }
    absl::StatusOr<amplipriv::Mask> mask = amplipriv::Mask::FromBits(bits);
    if (!mask.ok()) return Wrap(pointer, mask.status());
    return *std::move(mask);
  }

 private:
  std::string path_;
  JsonLineIndex index_;
};

absl::StatusOr<FeatureMechanism> ParseMechanism(const Reader& r, const json& v,
                                                const std::string& p) {
  if (!v.is_object() || !v.contains("kind")) {
    return r.Error(p, "a mechanism needs a 'kind'");
  }
  ASSIGN_OR_RETURN(std::string kind, r.String(v["kind"], p + "/kind"));
  MechanismFamily family;
  if (kind == "mcar_bernoulli") {
    RETURN_IF_ERROR(r.Object(v, p, {"kind", "pi"}, {"pi"}));
    ASSIGN_OR_RETURN(std::vector<double> pi, r.Numbers(v["pi"], p + "/pi"));
    family = McarBernoulli{std::move(pi)};
  } else if (kind == "capped_bernoulli") {
    RETURN_IF_ERROR(
        r.Object(v, p, {"kind", "pi", "max_observed"}, {"pi", "max_observed"}));
    ASSIGN_OR_RETURN(std::vector<double> pi, r.Numbers(v["pi"], p + "/pi"));
    ASSIGN_OR_RETURN(size_t cap,
                     r.Size(v["max_observed"], p + "/max_observed"));
    family = CappedBernoulli{std::move(pi), cap};
  } else if (kind == "mcar_pattern") {
    RETURN_IF_ERROR(r.Object(v, p, {"kind", "patterns"}, {"patterns"}));
    const json& list = v["patterns"];
    if (!list.is_array()) return r.Error(p + "/patterns", "expected an array");
    McarPattern pattern;
    for (size_t i = 0; i < list.size(); ++i) {
      std::string q = Reader::Child(p + "/patterns", i);
      RETURN_IF_ERROR(r.Object(list[i], q, {"mask", "prob"}, {"mask", "prob"}));
      ASSIGN_OR_RETURN(Mask mask, r.Mask(list[i]["mask"], q + "/mask"));
      ASSIGN_OR_RETURN(double prob, r.Number(list[i]["prob"], q + "/prob"));
      pattern.patterns.push_back(PatternEntry{std::move(mask), prob});
    }
    family = std::move(pattern);
  } else if (kind == "mar_anchored") {
    RETURN_IF_ERROR(r.Object(
        v, p, {"kind", "anchor", "q_all", "candidates", "cuts", "score_table"},
        {"anchor", "candidates", "score_table"}));
    MarAnchoredPattern mar;
    ASSIGN_OR_RETURN(mar.anchor, r.Sizes(v["anchor"], p + "/anchor"));
    if (v.contains("q_all")) {
      ASSIGN_OR_RETURN(mar.q_all, r.Number(v["q_all"], p + "/q_all"));
    }
    const json& candidates = v["candidates"];
    if (!candidates.is_array()) {
      return r.Error(p + "/candidates", "expected an array of masks");
    }
    for (size_t i = 0; i < candidates.size(); ++i) {
      ASSIGN_OR_RETURN(
          Mask m, r.Mask(candidates[i], Reader::Child(p + "/candidates", i)));
      mar.candidates.push_back(std::move(m));
    }
    if (v.contains("cuts")) {
      ASSIGN_OR_RETURN(mar.rule.cuts, r.Rows(v["cuts"], p + "/cuts"));
    } else {
      mar.rule.cuts.assign(mar.anchor.size(), {});
    }
    if (mar.rule.cuts.size() != mar.anchor.size()) {
      return r.Error(p + "/cuts", "needs one cut list per anchor feature");
    }
    size_t cells = 1;
    for (const auto& c : mar.rule.cuts) cells *= c.size() + 1;
    const json& table = v["score_table"];
    std::string tp = p + "/score_table";
    if (!table.is_object()) {
      return r.Error(tp, "expected an object keyed by bin tuples");
    }
    mar.rule.table.assign(cells, {});
    std::vector<bool> seen(cells, false);
    for (auto it = table.begin(); it != table.end(); ++it) {
      std::string key_pointer = Reader::Child(tp, it.key());
      std::vector<std::string> parts = absl::StrSplit(it.key(), ',');
      if (parts.size() != mar.anchor.size()) {
        return r.Error(key_pointer, "key needs one bin per anchor feature");
      }
      size_t index = 0;
      for (size_t a = 0; a < parts.size(); ++a) {
        size_t bin = 0;
        if (!absl::SimpleAtoi(parts[a], &bin) ||
            bin > mar.rule.cuts[a].size()) {
          return r.Error(key_pointer,
                         absl::StrCat("bin '", parts[a], "' is out of range"));
        }
        index = index * (mar.rule.cuts[a].size() + 1) + bin;
      }
      ASSIGN_OR_RETURN(mar.rule.table[index],
                       r.Numbers(it.value(), key_pointer));
      seen[index] = true;
    }
    for (size_t i = 0; i < cells; ++i) {
      if (!seen[i]) {
        return r.Error(tp, absl::StrCat("no scores for bin tuple #", i));
      }
    }
    family = std::move(mar);
  } else if (kind == "mnar_self_masking") {
    RETURN_IF_ERROR(
        r.Object(v, p, {"kind", "threshold", "prob_below", "prob_above", "d"},
                 {"threshold", "prob_below", "prob_above", "d"}));
    MnarSelfMasking mnar;
    ASSIGN_OR_RETURN(mnar.threshold,
                     r.Number(v["threshold"], p + "/threshold"));
    ASSIGN_OR_RETURN(mnar.prob_below,
                     r.Number(v["prob_below"], p + "/prob_below"));
    ASSIGN_OR_RETURN(mnar.prob_above,
                     r.Number(v["prob_above"], p + "/prob_above"));
    ASSIGN_OR_RETURN(mnar.d, r.Size(v["d"], p + "/d"));
    family = mnar;
  } else {
    return r.Error(p + "/kind",
                   absl::StrCat("unknown mechanism kind '", kind, "'"));
  }
  absl::StatusOr<FeatureMechanism> mech =
      FeatureMechanism::Create(std::move(family));
  if (!mech.ok()) return r.Wrap(p, mech.status());
  return *std::move(mech);
}

absl::StatusOr<PostMap> ParseMap(const Reader& r, const json& v,
                                 const std::string& p) {
  if (!v.is_object() || !v.contains("map")) {
    return r.Error(p, "a post step needs a 'map'");
  }
  ASSIGN_OR_RETURN(std::string name, r.String(v["map"], p + "/map"));
  absl::StatusOr<PostMap> map;
  if (name == "identity") {
    RETURN_IF_ERROR(r.Object(v, p, {"map", "lipschitz"}));
    map = MakeIdentityMap();
  } else if (name == "scale") {
    RETURN_IF_ERROR(r.Object(v, p, {"map", "lipschitz", "factor"}, {"factor"}));
    ASSIGN_OR_RETURN(double factor, r.Number(v["factor"], p + "/factor"));
    map = MakeScaleMap(factor);
  } else if (name == "projection") {
    RETURN_IF_ERROR(
        r.Object(v, p, {"map", "lipschitz", "indices"}, {"indices"}));
    ASSIGN_OR_RETURN(std::vector<size_t> indices,
                     r.Sizes(v["indices"], p + "/indices"));
    map = MakeProjectionMap(std::move(indices));
  } else if (name == "clamp") {
    RETURN_IF_ERROR(
        r.Object(v, p, {"map", "lipschitz", "lo", "hi"}, {"lo", "hi"}));
    ASSIGN_OR_RETURN(double lo, r.Number(v["lo"], p + "/lo"));
    ASSIGN_OR_RETURN(double hi, r.Number(v["hi"], p + "/hi"));
    map = MakeClampMap(lo, hi);
  } else if (name == "sum") {
    RETURN_IF_ERROR(r.Object(v, p, {"map", "lipschitz"}));
    map = MakeSumMap();
  } else {
    return r.Error(p + "/map", absl::StrCat("unknown post map '", name, "'"));
  }
  if (!map.ok()) return r.Wrap(p, map.status());
  return *std::move(map);
}

absl::StatusOr<FwlQuery> ParseQuery(const Reader& r, const json& v,
                                    const std::string& p, size_t n, size_t d,
                                    double bound, uint64_t seed) {
  RETURN_IF_ERROR(r.Object(v, p, {"kind", "params", "post"}, {"kind"}));
  ASSIGN_OR_RETURN(std::string kind, r.String(v["kind"], p + "/kind"));
  json params = v.contains("params") ? v["params"] : json::object();
  std::string pp = p + "/params";
  absl::StatusOr<FwlQuery> query;
  if (kind == "histogram") {
    RETURN_IF_ERROR(r.Object(params, pp, {"lo", "hi", "bins", "features"},
                             {"lo", "hi", "bins"}));
    ASSIGN_OR_RETURN(double lo, r.Number(params["lo"], pp + "/lo"));
    ASSIGN_OR_RETURN(double hi, r.Number(params["hi"], pp + "/hi"));
    ASSIGN_OR_RETURN(size_t bins, r.Size(params["bins"], pp + "/bins"));
    std::vector<size_t> features;
    if (params.contains("features")) {
      ASSIGN_OR_RETURN(features, r.Sizes(params["features"], pp + "/features"));
    }
    query = MakeHistogramQuery(n, d, lo, hi, bins, std::move(features));
  } else if (kind == "linear") {
    RETURN_IF_ERROR(r.Object(params, pp, {"matrices"}, {"matrices"}));
    const json& list = params["matrices"];
    if (!list.is_array()) {
      return r.Error(pp + "/matrices", "expected one matrix per row");
    }
    std::vector<Matrix> per_row;
    for (size_t i = 0; i < list.size(); ++i) {
      ASSIGN_OR_RETURN(Matrix m,
                       r.Matrix(list[i], Reader::Child(pp + "/matrices", i)));
      per_row.push_back(std::move(m));
    }
    if (per_row.size() != n) {
      return r.Error(pp + "/matrices",
                     absl::StrCat("expected ", n, " matrices, one per row"));
    }
    query = MakeLinearQuery(std::move(per_row));
  } else if (kind == "coordinate") {
    RETURN_IF_ERROR(
        r.Object(params, pp, {"row", "feature"}, {"row", "feature"}));
    ASSIGN_OR_RETURN(size_t row, r.Size(params["row"], pp + "/row"));
    ASSIGN_OR_RETURN(size_t feature,
                     r.Size(params["feature"], pp + "/feature"));
    query = MakeCoordinateQuery(n, d, row, feature);
  } else if (kind == "bounded_mean") {
    RETURN_IF_ERROR(r.Object(params, pp, {}));
    query = MakeBoundedMeanQuery(n, d);
  } else if (kind == "clipped_mean") {
    RETURN_IF_ERROR(r.Object(params, pp, {"clip"}));
    double clip = bound;
    if (params.contains("clip")) {
      ASSIGN_OR_RETURN(clip, r.Number(params["clip"], pp + "/clip"));
    }
    query = MakeClippedMeanQuery(n, d, clip);
  } else if (kind == "covariance") {
    RETURN_IF_ERROR(r.Object(params, pp, {"bound"}));
    double b = bound;
    if (params.contains("bound")) {
      ASSIGN_OR_RETURN(b, r.Number(params["bound"], pp + "/bound"));
    }
    query = MakeCovarianceQuery(n, d, b);
  } else if (kind == "mean_projection") {
    RETURN_IF_ERROR(r.Object(params, pp, {"projection"}, {"projection"}));
    ASSIGN_OR_RETURN(Matrix proj,
                     r.Matrix(params["projection"], pp + "/projection"));
    if (proj.cols != d) {
      return r.Error(pp + "/projection",
                     absl::StrCat("projection needs ", d, " columns"));
    }
    query = MakeMeanProjectionQuery(n, std::move(proj));
  } else {
    return r.Error(p + "/kind",
                   absl::StrCat("unknown query kind '", kind, "'"));
  }
  if (!query.ok()) return r.Wrap(pp, query.status());
  FwlQuery q = *std::move(query);
  if (v.contains("post")) {
    const json& post = v["post"];
    if (!post.is_array()) return r.Error(p + "/post", "expected an array");
    for (size_t i = 0; i < post.size(); ++i) {
      std::string sp = Reader::Child(p + "/post", i);
      ASSIGN_OR_RETURN(PostMap map, ParseMap(r, post[i], sp));
      double lambda = map.lipschitz(q.output_dim(), q.norm());
      if (post[i].contains("lipschitz")) {
        ASSIGN_OR_RETURN(lambda,
                         r.Number(post[i]["lipschitz"], sp + "/lipschitz"));
      }
      absl::StatusOr<FwlQuery> next =
          LipschitzPostprocess(q, map, lambda, DeriveSeed(seed, "post", i));
      if (!next.ok()) return r.Wrap(sp, next.status());
      q = *std::move(next);
    }
  }
  return q;
}

bool ValidName(absl::string_view name) {
  if (name.empty()) return false;
  for (char c : name) {
    if (!absl::ascii_isalnum(c) && c != '_' && c != '-' && c != '.') {
      return false;
    }
  }
  return true;
}

}  // namespace

absl::StatusOr<Scenario> ParseScenario(absl::string_view text,
                                       const std::string& path) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    size_t end = std::min<size_t>(e.byte, text.size());
    int line = 1 + static_cast<int>(
                       std::count(text.begin(), text.begin() + end, '\n'));
    return absl::InvalidArgumentError(
        absl::StrCat(path, ":", line, ": invalid JSON: ", e.what()));
  }
  Reader r(path, JsonLineIndex::Build(text));
  RETURN_IF_ERROR(r.Object(
      doc, "",
      {"name", "seed", "dataset", "mechanism", "query", "budget",
       "amplification", "audit", "simulate", "counterexample", "output"},
      {"name"}));
  if (!doc.contains("seed")) {
    return r.Error("",
                   "missing required key 'seed': every scenario fixes "
                   "its randomness");
  }
  Scenario s;
  s.path = path;
  ASSIGN_OR_RETURN(s.name, r.String(doc["name"], "/name"));
  if (!ValidName(s.name)) {
    return r.Error("/name", "names use letters, digits, '_', '-' and '.'");
  }
  ASSIGN_OR_RETURN(s.seed, r.Unsigned(doc["seed"], "/seed"));

  if (doc.contains("dataset")) {
    const json& v = doc["dataset"];
    RETURN_IF_ERROR(
        r.Object(v, "/dataset", {"rows", "csv", "bound"}, {"bound"}));
    if (v.contains("rows") == v.contains("csv")) {
      return r.Error("/dataset", "give exactly one of 'rows' and 'csv'");
    }
    ASSIGN_OR_RETURN(s.bound, r.Number(v["bound"], "/dataset/bound"));
    if (!(s.bound > 0.0)) return r.Error("/dataset/bound", "must be positive");
    absl::StatusOr<CompleteDataset> data;
    if (v.contains("rows")) {
      ASSIGN_OR_RETURN(std::vector<Row> rows,
                       r.Rows(v["rows"], "/dataset/rows"));
      data = CompleteDataset::Create(std::move(rows), s.bound);
      if (!data.ok()) return r.Wrap("/dataset/rows", data.status());
    } else {
      ASSIGN_OR_RETURN(std::string file, r.String(v["csv"], "/dataset/csv"));
      std::filesystem::path csv(file);
      if (csv.is_relative()) {
        csv = std::filesystem::path(path).parent_path() / csv;
      }
      absl::StatusOr<std::string> contents = ReadFile(csv.string());
      if (!contents.ok()) return r.Wrap("/dataset/csv", contents.status());
      data = ParseCompleteCsv(*contents, s.bound);
      if (!data.ok()) return r.Wrap("/dataset/csv", data.status());
    }
    s.data = *std::move(data);
  }
  const size_t n = s.data ? s.data->n() : 0;
  const size_t d = s.data ? s.data->d() : 0;

  if (doc.contains("mechanism")) {
    if (!s.data) return r.Error("/mechanism", "needs a dataset section");
    ASSIGN_OR_RETURN(FeatureMechanism mech,
                     ParseMechanism(r, doc["mechanism"], "/mechanism"));
    if (mech.d() != d) {
      return r.Error("/mechanism",
                     absl::StrCat("mechanism has d = ", mech.d(),
                                  " but the dataset has d = ", d));
    }
    s.mechanism = std::move(mech);
  }
  if (doc.contains("query")) {
    if (!s.data) return r.Error("/query", "needs a dataset section");
    ASSIGN_OR_RETURN(FwlQuery q, ParseQuery(r, doc["query"], "/query", n, d,
                                            s.bound, s.seed));
    s.query = std::move(q);
  }
  if (doc.contains("budget")) {
    const json& v = doc["budget"];
    RETURN_IF_ERROR(r.Object(v, "/budget", {"family", "epsilon", "delta"},
                             {"family", "epsilon"}));
    ASSIGN_OR_RETURN(std::string family,
                     r.String(v["family"], "/budget/family"));
    absl::StatusOr<NoiseFamily> parsed = ParseNoiseFamily(family);
    if (!parsed.ok()) return r.Wrap("/budget/family", parsed.status());
    s.family = *parsed;
    ASSIGN_OR_RETURN(double epsilon, r.Number(v["epsilon"], "/budget/epsilon"));
    double delta = 0.0;
    if (v.contains("delta")) {
      ASSIGN_OR_RETURN(delta, r.Number(v["delta"], "/budget/delta"));
    }
    absl::StatusOr<PrivacyBudget> budget =
        PrivacyBudget::Create(epsilon, delta);
    if (!budget.ok()) return r.Wrap("/budget", budget.status());
    s.budget = *budget;
    if (*s.family == NoiseFamily::kLaplace && delta != 0.0) {
      return r.Error("/budget/delta", "a Laplace budget has delta = 0");
    }
  }
  if (doc.contains("amplification")) {
    const json& v = doc["amplification"];
    RETURN_IF_ERROR(
        r.Object(v, "/amplification", {"rho", "attest_equal_constants"}));
    if (v.contains("rho")) {
      ASSIGN_OR_RETURN(double rho, r.Number(v["rho"], "/amplification/rho"));
      if (!(rho >= 0.0 && rho <= 1.0)) {
        return r.Error("/amplification/rho", "must lie in [0, 1]");
      }
      s.rho = rho;
    }
    if (v.contains("attest_equal_constants")) {
      ASSIGN_OR_RETURN(s.attest_equal_constants,
                       r.Bool(v["attest_equal_constants"],
                              "/amplification/attest_equal_constants"));
    }
  }
  if (doc.contains("audit")) {
    const json& v = doc["audit"];
    RETURN_IF_ERROR(r.Object(
        v, "/audit", {"method", "epsilons", "tolerance", "samples", "pair"}));
    if (!s.data || !s.mechanism || !s.query || !s.family) {
      return r.Error("/audit",
                     "needs dataset, mechanism, query and budget sections");
    }
    AuditSection audit;
    if (v.contains("method")) {
      ASSIGN_OR_RETURN(std::string method,
                       r.String(v["method"], "/audit/method"));
      absl::StatusOr<AuditMethod> parsed = ParseAuditMethod(method);
      if (!parsed.ok()) return r.Wrap("/audit/method", parsed.status());
      audit.options.method = *parsed;
    }
    audit.epsilons = {s.budget.epsilon};
    if (v.contains("epsilons")) {
      ASSIGN_OR_RETURN(audit.epsilons,
                       r.Numbers(v["epsilons"], "/audit/epsilons"));
    }
    if (v.contains("tolerance")) {
      ASSIGN_OR_RETURN(audit.options.tolerance,
                       r.Number(v["tolerance"], "/audit/tolerance"));
    }
    if (v.contains("samples")) {
      ASSIGN_OR_RETURN(audit.options.samples,
                       r.Size(v["samples"], "/audit/samples"));
    }
    audit.options.rho = s.rho;
    audit.row = s.data->row(0);
    for (double& x : audit.row) x = x != 0.0 ? -x : s.bound;
    if (v.contains("pair")) {
      const json& pair = v["pair"];
      RETURN_IF_ERROR(r.Object(pair, "/audit/pair", {"index", "row"}, {"row"}));
      if (pair.contains("index")) {
        ASSIGN_OR_RETURN(audit.index,
                         r.Size(pair["index"], "/audit/pair/index"));
      }
      ASSIGN_OR_RETURN(audit.row, r.Numbers(pair["row"], "/audit/pair/row"));
    }
    if (audit.index >= n) {
      return r.Error("/audit/pair/index", "row index out of range");
    }
    absl::Status check = s.data->WithRow(audit.index, audit.row).status();
    if (!check.ok()) return r.Wrap("/audit/pair/row", check);
    s.audit = std::move(audit);
  }
  if (doc.contains("simulate")) {
    const json& v = doc["simulate"];
    RETURN_IF_ERROR(r.Object(v, "/simulate", {"audit_mode"}));
    if (!s.data || !s.mechanism || !s.query || !s.family) {
      return r.Error("/simulate",
                     "needs dataset, mechanism, query and budget sections");
    }
    s.simulate_audit_mode = false;
    if (v.contains("audit_mode")) {
      ASSIGN_OR_RETURN(s.simulate_audit_mode,
                       r.Bool(v["audit_mode"], "/simulate/audit_mode"));
    }
  }
  if (doc.contains("counterexample")) {
    const json& v = doc["counterexample"];
    RETURN_IF_ERROR(
        r.Object(v, "/counterexample", {"epsilons", "delta", "tolerance"}));
    CounterexampleSection ce;
    ce.epsilons = {0.1, 0.5, 1.0};
    ce.delta = 1e-5;
    if (v.contains("epsilons")) {
      ASSIGN_OR_RETURN(ce.epsilons,
                       r.Numbers(v["epsilons"], "/counterexample/epsilons"));
    }
    if (v.contains("delta")) {
      ASSIGN_OR_RETURN(ce.delta, r.Number(v["delta"], "/counterexample/delta"));
    }
    if (v.contains("tolerance")) {
      ASSIGN_OR_RETURN(ce.tolerance,
                       r.Number(v["tolerance"], "/counterexample/tolerance"));
    }
    s.counterexample = std::move(ce);
  }
  if (doc.contains("output")) {
    const json& v = doc["output"];
    RETURN_IF_ERROR(r.Object(v, "/output", {"dir"}));
    if (v.contains("dir")) {
      ASSIGN_OR_RETURN(s.output_dir, r.String(v["dir"], "/output/dir"));
    }
  }
  return s;
}

absl::StatusOr<Scenario> LoadScenario(const std::string& path) {
  ASSIGN_OR_RETURN(std::string text, ReadFile(path));
  return ParseScenario(text, path);
}

namespace {

absl::Status Need(bool ok, absl::string_view command,
                  absl::string_view sections) {
  if (ok) return absl::OkStatus();
  return absl::FailedPreconditionError(
      absl::StrCat("'", command, "' needs the ", sections, " sections"));
}

absl::StatusOr<NoiseMechanism> Calibrate(const Scenario& s) {
  if (*s.family == NoiseFamily::kLaplace) {
    return CalibrateLaplace(*s.query, s.budget.epsilon, s.bound);
  }
  return CalibrateGaussian(*s.query, s.budget.epsilon, s.budget.delta, s.bound);
}

absl::StatusOr<double> ResolveRho(const Scenario& s) {
  if (!s.mechanism) return s.rho.value_or(1.0);
  if (s.rho) {
    ASSIGN_OR_RETURN(bool ok, VerifyRho(*s.mechanism, *s.rho));
    if (!ok) {
      return absl::FailedPreconditionError(absl::StrCat(
          "the mechanism can observe more than rho = ", FormatDouble(*s.rho),
          " of the features"));
    }
    return *s.rho;
  }
  return TightRho(*s.mechanism);
}

absl::StatusOr<json> CalibrateReport(const Scenario& s) {
  RETURN_IF_ERROR(
      Need(s.query && s.family, "calibrate", "dataset, query and budget"));
  ASSIGN_OR_RETURN(NoiseMechanism m, Calibrate(s));
  ASSIGN_OR_RETURN(double rho, ResolveRho(s));
  ASSIGN_OR_RETURN(SensitivityBounds bounds,
                   SensitivityMasked(*s.query, s.bound, rho));
  return json{{"calibration", CalibrationJson(m)},
              {"sensitivity", ToJson(bounds)}};
}

absl::StatusOr<json> AmplifyReport(const Scenario& s) {
  RETURN_IF_ERROR(Need(s.query && s.family && s.mechanism, "amplify",
                       "dataset, mechanism, query and budget"));
  DatasetMechanism missing{*s.mechanism, s.data->n()};
  ASSIGN_OR_RETURN(MechanismClass cls, Classify(*s.mechanism));
  ASSIGN_OR_RETURN(double p_star, PStar(missing));
  ASSIGN_OR_RETURN(double rho, ResolveRho(s));
  ASSIGN_OR_RETURN(SensitivityBounds bounds,
                   SensitivityMasked(*s.query, s.bound, rho));
  ASSIGN_OR_RETURN(AmplificationReport generic,
                   AmplifyGeneric(s.budget, p_star));
  ASSIGN_OR_RETURN(
      AmplificationReport fwl,
      AmplifyFwl(s.budget.epsilon, s.budget.delta, p_star, bounds, *s.family));
  const std::vector<double>& l = s.query->constants();
  bool equal =
      std::all_of(l.begin(), l.end(), [&](double x) { return x == l.front(); });
  double rho_d = rho * static_cast<double>(l.size());
  json out = {{"mechanism", std::string(s.mechanism->kind())},
              {"class", std::string(MechanismClassName(cls))},
              {"p_star", Decimal(p_star)},
              {"rho", Decimal(rho)},
              {"sensitivity", ToJson(bounds)},
              {"generic", ToJson(generic)},
              {"fwl", ToJson(fwl)},
              {"amplified", ToJson(fwl.amplified)},
              {"constants_equal", equal},
              {"rho_d_integer", std::abs(rho_d - std::round(rho_d)) <= 1e-12}};
  if (s.attest_equal_constants) {
    ASSIGN_OR_RETURN(AmplificationReport corollary,
                     CorollaryReport(s.budget.epsilon, s.budget.delta, p_star,
                                     rho, *s.family));
    out["corollary"] = ToJson(corollary);
  }
  return out;
}

absl::StatusOr<json> AuditReport(const Scenario& s,
                                 std::vector<AuditRow>* rows_out) {
  RETURN_IF_ERROR(Need(s.audit.has_value(), "audit", "audit"));
  ASSIGN_OR_RETURN(NoiseMechanism m, Calibrate(s));
  ComposedMechanism cm{std::move(m),
                       DatasetMechanism{*s.mechanism, s.data->n()}};
  ASSIGN_OR_RETURN(CompleteDataset right,
                   s.data->WithRow(s.audit->index, s.audit->row));
  NeighborPair<CompleteDataset> pair{*s.data, std::move(right), s.audit->index};
  AuditOptions options = s.audit->options;
  options.seed = DeriveSeed(s.seed, "audit");
  ASSIGN_OR_RETURN(std::vector<AuditRow> rows,
                   VerifyAmplification(cm, pair, s.audit->epsilons, options));
  json list = json::array();
  bool pass = true;
  for (const AuditRow& row : rows) {
    list.push_back(ToJson(row));
    pass = pass && row.pass;
  }
  if (rows_out != nullptr) *rows_out = rows;
  return json{{"pair_index", s.audit->index},
              {"rows", list},
              {"verdict", pass ? "PASS" : "FAIL"}};
}

absl::StatusOr<json> SimulateReport(const Scenario& s) {
  RETURN_IF_ERROR(
      Need(s.simulate_audit_mode.has_value(), "simulate", "simulate"));
  ASSIGN_OR_RETURN(NoiseMechanism m, Calibrate(s));
  ComposedMechanism cm{m, DatasetMechanism{*s.mechanism, s.data->n()}};
  ReleaseMode mode =
      *s.simulate_audit_mode ? ReleaseMode::kAudit : ReleaseMode::kPrivate;
  ASSIGN_OR_RETURN(
      Release release,
      RunComposed(cm, *s.data, DeriveSeed(s.seed, "simulate"), mode));
  return ReleaseRecord(m, release, s.seed);
}

constexpr double kEqualityTolerance = 1e-9;

absl::StatusOr<json> CounterexampleReport(const Scenario& s) {
  RETURN_IF_ERROR(
      Need(s.counterexample.has_value(), "counterexample", "counterexample"));
  json rows = json::array();
  double worst = 0.0;
  bool p_one = true;
  for (double eps : s.counterexample->epsilons) {
    ASSIGN_OR_RETURN(TightnessResult r,
                     TightnessCounterexample(eps, s.counterexample->delta,
                                             s.counterexample->tolerance));
    worst = std::max(worst, r.equality_gap);
    p_one = p_one && r.p_star == 1.0;
    rows.push_back(ToJson(r));
  }
  bool pass = p_one && worst <= kEqualityTolerance;
  return json{{"rows", rows},
              {"max_equality_gap", Decimal(worst)},
              {"gap_tolerance", Decimal(kEqualityTolerance)},
              {"verdict", pass ? "PASS" : "FAIL"}};
}

}  // namespace

absl::StatusOr<json> CommandReport(absl::string_view command, const Scenario& s,
                                   std::vector<AuditRow>* audit_rows) {
  json out = {{"command", std::string(command)},
              {"scenario", s.name},
              {"seed_commitment", SeedCommitment(s.seed)}};
  if (command == "calibrate") {
    ASSIGN_OR_RETURN(out["calibrate"], CalibrateReport(s));
  } else if (command == "amplify") {
    ASSIGN_OR_RETURN(out["amplify"], AmplifyReport(s));
  } else if (command == "audit") {
    ASSIGN_OR_RETURN(out["audit"], AuditReport(s, audit_rows));
  } else if (command == "simulate") {
    ASSIGN_OR_RETURN(out["simulate"], SimulateReport(s));
  } else if (command == "counterexample") {
    ASSIGN_OR_RETURN(out["counterexample"], CounterexampleReport(s));
  } else if (command == "report") {
    if (s.query && s.family) {
      ASSIGN_OR_RETURN(out["calibrate"], CalibrateReport(s));
      if (s.mechanism) {
        ASSIGN_OR_RETURN(out["amplify"], AmplifyReport(s));
      }
    }
    if (s.audit) {
      ASSIGN_OR_RETURN(out["audit"], AuditReport(s, audit_rows));
    }
    if (s.simulate_audit_mode) {
      ASSIGN_OR_RETURN(out["simulate"], SimulateReport(s));
    }
    if (s.counterexample) {
      ASSIGN_OR_RETURN(out["counterexample"], CounterexampleReport(s));
    }
  } else {
    return absl::InvalidArgumentError(
        absl::StrCat("unknown command '", command, "'"));
  }
  bool fail = false;
  for (const char* key : {"audit", "counterexample"}) {
    if (out.contains(key) && out[key]["verdict"] == "FAIL") fail = true;
  }
  out["verdict"] = fail ? "FAIL" : "PASS";
  return out;
}

int VerdictExitCode(const json& report) {
  return report.contains("verdict") && report["verdict"] == "FAIL" ? 2 : 0;
}

std::string SummarizeReport(const json& report) {
  std::vector<std::string> lines;
  if (report.contains("calibrate")) {
    const json& c = report["calibrate"]["calibration"];
    lines.push_back(absl::StrCat("calibrate: ", c["family"].get<std::string>(),
                                 " scale ", c["scale"].get<std::string>()));
  }
  if (report.contains("amplify")) {
    const json& a = report["amplify"];
    lines.push_back(absl::StrCat(
        "amplify: p* ", a["p_star"].get<std::string>(), ", rho ",
        a["rho"].get<std::string>(),
        ", amplified epsilon <= ", a["amplified"]["epsilon"].get<std::string>(),
        ", delta <= ", a["amplified"]["delta"].get<std::string>()));
  }
  if (report.contains("audit")) {
    for (const json& row : report["audit"]["rows"]) {
      lines.push_back(
          absl::StrCat("audit: ", row["verdict"].get<std::string>(),
                       " epsilon ", row["epsilon"].get<std::string>(),
                       " bound ", row["bound"].get<std::string>(),
                       " empirical ", row["empirical"].get<std::string>()));
    }
  }
  if (report.contains("simulate")) {
    std::vector<std::string> values;
    for (const json& v : report["simulate"]["output"]) {
      values.push_back(v.get<std::string>());
    }
    lines.push_back(
        absl::StrCat("simulate: output [", absl::StrJoin(values, ", "), "]"));
  }
  if (report.contains("counterexample")) {
    const json& c = report["counterexample"];
    lines.push_back(absl::StrCat(
        "counterexample: ", c["verdict"].get<std::string>(),
        " max equality gap ", c["max_equality_gap"].get<std::string>()));
  }
  return absl::StrJoin(lines, "\n");
}

namespace {

absl::StatusOr<RunResult> Run(absl::string_view command,
                              const std::string& path,
                              const RunOverrides& overrides) {
  if (std::find(std::begin(kCommands), std::end(kCommands), command) ==
      std::end(kCommands)) {
    return absl::InvalidArgumentError(
        absl::StrCat("unknown command '", command, "'"));
  }
  if (overrides.format != "json" && overrides.format != "csv") {
    return absl::InvalidArgumentError(
        absl::StrCat("unknown format '", overrides.format, "'"));
  }
  ASSIGN_OR_RETURN(Scenario s, LoadScenario(path));
  if (overrides.seed) s.seed = *overrides.seed;
  std::vector<AuditRow> rows;
  ASSIGN_OR_RETURN(json report, CommandReport(command, s, &rows));

  std::filesystem::path dir =
      overrides.out.value_or(s.output_dir.empty() ? "." : s.output_dir);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) {
    return absl::UnavailableError(
        absl::StrCat("cannot create ", dir.string(), ": ", ec.message()));
  }
  RunResult result;
  auto emit = [&](const std::string& file,
                  const std::string& contents) -> absl::Status {
    std::string target = (dir / file).string();
    RETURN_IF_ERROR(WriteFile(target, contents));
    result.files.push_back(target);
    return absl::OkStatus();
  };
  std::string stem = absl::StrCat(s.name, ".", command);
  if (command == "audit") {
    RETURN_IF_ERROR(emit(stem + ".json", Render(report)));
  } else if (overrides.format == "json") {
    RETURN_IF_ERROR(emit(stem + ".json", Render(report)));
  } else {
    RETURN_IF_ERROR(emit(stem + ".csv", FlattenToCsv(report)));
  }
  if (report.contains("audit")) {
    RETURN_IF_ERROR(emit(s.name + ".audit.csv", AuditCsv(rows)));
  }
  result.summary = SummarizeReport(report);
  result.exit_code = VerdictExitCode(report);
  return result;
}

}  // namespace

RunResult RunCommand(absl::string_view command, const std::string& path,
                     const RunOverrides& overrides) {
  absl::StatusOr<RunResult> result = Run(command, path, overrides);
  if (!result.ok()) {
    RunResult failed;
    failed.exit_code = 1;
    failed.summary = absl::StrCat("error: ", result.status().message());
    return failed;
  }
  return *std::move(result);
}

}  // namespace amplipriv
