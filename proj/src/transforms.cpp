/*
 * Copyright 2026 The StratShield Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "stratshield/transforms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "stratshield/error.hpp"

namespace stratshield {

// ---------------------------------------------------------------------------
// Schema / vector text helpers

void write_schema(TextWriter& w, const FeatureSchema& schema) {
  w.key("schema").value(schema.size());
  for (const auto& f : schema.features()) {
    w.key("feature")
        .token(f.name)
        .token(f.kind == FeatureKind::kNumeric ? "numeric" : "categorical")
        .value(f.symbols.size());
    for (const auto& s : f.symbols) w.token(s);
  }
  w.end_line();
}

FeatureSchema read_schema(TextReader& r) {
  const auto head = r.expect("schema", 1);
  const auto k = static_cast<std::size_t>(parse_int(head[0]));
  std::vector<FeatureSpec> specs;
  specs.reserve(k);
  for (std::size_t i = 0; i < k; ++i) {
    const auto t = r.expect("feature");
    if (t.size() < 3) throw ParseError("malformed feature line");
    FeatureSpec spec;
    spec.name = unescape_token(t[0]);
    if (t[1] == "numeric") {
      spec.kind = FeatureKind::kNumeric;
    } else if (t[1] == "categorical") {
      spec.kind = FeatureKind::kCategorical;
    } else {
      throw ParseError("unknown feature kind '" + t[1] + "'");
    }
    const auto n = static_cast<std::size_t>(parse_int(t[2]));
    if (t.size() != 3 + n) throw ParseError("symbol count mismatch for " + spec.name);
    for (std::size_t s = 0; s < n; ++s) spec.symbols.push_back(unescape_token(t[3 + s]));
    specs.push_back(std::move(spec));
  }
  return FeatureSchema(std::move(specs));
}

void write_vector(TextWriter& w, const std::string& key, const FeatureVector& x) {
  w.key(key);
  for (const auto& v : x) {
    if (v.is_missing()) {
      w.token("*");
    } else if (v.is_numeric()) {
      w.value(v.number());
    } else {
      w.token("c" + std::to_string(v.category()));
    }
  }
}

FeatureVector parse_vector(const std::vector<std::string>& tokens, std::size_t first,
                           std::size_t k) {
  if (tokens.size() < first + k) throw ParseError("vector has too few values");
  FeatureVector x(k);
  for (std::size_t i = 0; i < k; ++i) {
    const auto& t = tokens[first + i];
    if (t == "*") continue;
    if (!t.empty() && t.front() == 'c') {
      x[i] = FeatureValue::categorical(static_cast<std::int32_t>(parse_int(t.substr(1))));
    } else {
      x[i] = FeatureValue::numeric(parse_double(t));
    }
  }
  return x;
}

namespace {

void write_doubles(TextWriter& w, const std::string& key, const std::vector<double>& v) {
  w.key(key).value(v.size());
  for (double d : v) w.value(d);
}

std::vector<double> read_doubles(TextReader& r, const std::string& key) {
  const auto t = r.expect(key);
  if (t.empty()) throw ParseError("missing count for " + key);
  const auto n = static_cast<std::size_t>(parse_int(t[0]));
  if (t.size() != n + 1) throw ParseError("count mismatch for " + key);
  std::vector<double> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(parse_double(t[i + 1]));
  return out;
}

void write_cuts(TextWriter& w, const std::vector<std::vector<double>>& cuts) {
  w.key("cuts").value(cuts.size());
  for (const auto& c : cuts) write_doubles(w, "cut", c);
}

std::vector<std::vector<double>> read_cuts(TextReader& r) {
  const auto n = static_cast<std::size_t>(parse_int(r.expect("cuts", 1)[0]));
  std::vector<std::vector<double>> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(read_doubles(r, "cut"));
  return out;
}

void write_subset(TextWriter& w, const std::string& key, const FeatureSubset& s) {
  w.key(key).value(s.size());
  for (auto i : s.members()) w.value(i);
}

FeatureSubset read_subset(TextReader& r, const std::string& key) {
  const auto t = r.expect(key);
  if (t.empty()) throw ParseError("missing count for " + key);
  const auto n = static_cast<std::size_t>(parse_int(t[0]));
  if (t.size() != n + 1) throw ParseError("count mismatch for " + key);
  std::vector<std::size_t> m;
  for (std::size_t i = 0; i < n; ++i) m.push_back(static_cast<std::size_t>(parse_int(t[i + 1])));
  return FeatureSubset(std::move(m));
}

// Numeric columns of `data`, present values only.
std::vector<std::vector<double>> numeric_columns(const Dataset& data) {
  std::vector<std::vector<double>> cols(data.schema.size());
  for (const auto& row : data.rows) {
    for (std::size_t i = 0; i < row.x.size(); ++i) {
      if (row.x[i].is_numeric()) cols[i].push_back(row.x[i].number());
    }
  }
  return cols;
}

}  // namespace

// ---------------------------------------------------------------------------
// Transform base

void Transform::check_input(const FeatureVector& x) const {
  if (x.size() != input_schema().size()) {
    throw SchemaError(kind() + " transform expects arity " +
                      std::to_string(input_schema().size()) + ", got " +
                      std::to_string(x.size()));
  }
}

Dataset Transform::apply(const Dataset& data) const {
  Dataset out;
  out.schema = output_schema();
  out.rows.reserve(data.rows.size());
  for (const auto& row : data.rows) out.rows.push_back({apply(row.x), row.y});
  return out;
}

// ---------------------------------------------------------------------------
// Shift

ShiftTransform::ShiftTransform(FeatureSchema schema, std::vector<double> offsets)
    : schema_(std::move(schema)), offsets_(std::move(offsets)) {
  if (offsets_.size() != schema_.size()) throw SchemaError("shift offsets/schema mismatch");
}

ShiftTransform ShiftTransform::fit(const Dataset& train) {
  const auto cols = numeric_columns(train);
  std::vector<double> offsets(train.schema.size(), 0.0);
  for (std::size_t i = 0; i < cols.size(); ++i) {
    if (!cols[i].empty()) offsets[i] = *std::min_element(cols[i].begin(), cols[i].end());
  }
  return ShiftTransform(train.schema, std::move(offsets));
}

FeatureVector ShiftTransform::apply(const FeatureVector& x) const {
  check_input(x);
  FeatureVector out = x;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i].is_numeric()) {
      out[i] = FeatureValue::numeric(std::max(x[i].number() - offsets_[i], 0.0));
    }
  }
  return out;
}

void ShiftTransform::write(TextWriter& w) const {
  w.key("transform").token(kind());
  write_schema(w, schema_);
  write_doubles(w, "offsets", offsets_);
  w.end_line();
}

ShiftResult shift_nonnegative(const Dataset& train) {
  auto t = std::make_shared<const ShiftTransform>(ShiftTransform::fit(train));
  return {t, t->apply(train)};
}

// ---------------------------------------------------------------------------
// Scale

ScaleTransform::ScaleTransform(FeatureSchema schema, std::vector<double> scales)
    : schema_(std::move(schema)), scales_(std::move(scales)) {
  if (scales_.size() != schema_.size()) throw SchemaError("scale/schema mismatch");
  for (double s : scales_) {
    if (!(s > 0.0) || !std::isfinite(s)) throw SchemaError("scales must be positive");
  }
}

ScaleTransform ScaleTransform::fit_max(const Dataset& train) {
  const auto cols = numeric_columns(train);
  std::vector<double> scales(train.schema.size(), 1.0);
  for (std::size_t i = 0; i < cols.size(); ++i) {
    if (cols[i].empty()) continue;
    double hi = 0.0;
    for (double v : cols[i]) hi = std::max(hi, std::abs(v));
    if (hi > 0.0) scales[i] = hi;
  }
  return ScaleTransform(train.schema, std::move(scales));
}

FeatureVector ScaleTransform::apply(const FeatureVector& x) const {
  check_input(x);
  FeatureVector out = x;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i].is_numeric()) out[i] = FeatureValue::numeric(x[i].number() / scales_[i]);
  }
  return out;
}

void ScaleTransform::write(TextWriter& w) const {
  w.key("transform").token(kind());
  write_schema(w, schema_);
  write_doubles(w, "scales", scales_);
  w.end_line();
}

// ---------------------------------------------------------------------------
// Inversion

namespace {

FeatureSchema inverted_schema(const FeatureSchema& in, const FeatureSubset& which) {
  auto specs = in.features();
  for (auto i : which.members()) {
    if (in[i].kind != FeatureKind::kNumeric) {
      throw TypeError("cannot invert categorical feature '" + in[i].name + "'");
    }
    specs.push_back({in[i].name + "~inv", FeatureKind::kNumeric, {}});
  }
  return FeatureSchema(std::move(specs));
}

}  // namespace

InversionTransform::InversionTransform(FeatureSchema schema, FeatureSubset which,
                                       std::vector<double> lambdas)
    : in_(std::move(schema)), which_(std::move(which)), lambdas_(std::move(lambdas)) {
  which_.check_range(in_.size());
  if (lambdas_.size() != which_.size()) throw SchemaError("inversion lambda count mismatch");
  out_ = inverted_schema(in_, which_);
}

InversionTransform InversionTransform::fit(const Dataset& train, const FeatureSubset& which) {
  which.check_range(train.schema.size());
  for (auto i : which.members()) {
    if (train.schema[i].kind != FeatureKind::kNumeric) {
      throw TypeError("cannot invert categorical feature '" + train.schema[i].name + "'");
    }
  }
  const auto cols = numeric_columns(train);
  std::vector<double> lambdas;
  for (auto i : which.members()) {
    double hi = 0.0;
    if (!cols[i].empty()) hi = *std::max_element(cols[i].begin(), cols[i].end());
    lambdas.push_back(hi);
  }
  return InversionTransform(train.schema, which, std::move(lambdas));
}

FeatureVector InversionTransform::apply(const FeatureVector& x) const {
  check_input(x);
  std::vector<FeatureValue> values(x.begin(), x.end());
  for (std::size_t j = 0; j < which_.size(); ++j) {
    const auto& v = x[which_.members()[j]];
    values.push_back(v.is_missing() ? FeatureValue::missing()
                                    : FeatureValue::numeric(std::max(lambdas_[j] - v.number(), 0.0)));
  }
  return FeatureVector(std::move(values));
}

void InversionTransform::write(TextWriter& w) const {
  w.key("transform").token(kind());
  write_schema(w, in_);
  write_subset(w, "which", which_);
  write_doubles(w, "lambdas", lambdas_);
  w.end_line();
}

InversionResult invert_features(const Dataset& train, const FeatureSubset& which) {
  auto t = std::make_shared<const InversionTransform>(InversionTransform::fit(train, which));
  return {t, t->apply(train)};
}

// ---------------------------------------------------------------------------
// Select

SelectTransform::SelectTransform(FeatureSchema schema, FeatureSubset keep)
    : in_(std::move(schema)), keep_(std::move(keep)) {
  keep_.check_range(in_.size());
  if (keep_.empty()) throw SchemaError("feature selection must keep at least one feature");
  std::vector<FeatureSpec> specs;
  for (auto i : keep_.members()) specs.push_back(in_[i]);
  out_ = FeatureSchema(std::move(specs));
}

FeatureVector SelectTransform::apply(const FeatureVector& x) const {
  check_input(x);
  std::vector<FeatureValue> values;
  values.reserve(keep_.size());
  for (auto i : keep_.members()) values.push_back(x[i]);
  return FeatureVector(std::move(values));
}

void SelectTransform::write(TextWriter& w) const {
  w.key("transform").token(kind());
  write_schema(w, in_);
  write_subset(w, "keep", keep_);
  w.end_line();
}

// ---------------------------------------------------------------------------
// One-hot

OneHotTransform::OneHotTransform(FeatureSchema schema,
                                 std::vector<std::vector<std::int32_t>> symbols)
    : in_(std::move(schema)), symbols_(std::move(symbols)) {
  if (symbols_.size() != in_.size()) throw SchemaError("one-hot symbol table mismatch");
  std::vector<FeatureSpec> specs;
  for (std::size_t i = 0; i < in_.size(); ++i) {
    auto& ids = symbols_[i];
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    if (in_[i].kind == FeatureKind::kNumeric) {
      if (!ids.empty()) throw SchemaError("numeric feature cannot carry one-hot symbols");
      specs.push_back(in_[i]);
      continue;
    }
    for (auto id : ids) {
      std::string label = std::to_string(id);
      if (id >= 0 && static_cast<std::size_t>(id) < in_[i].symbols.size()) {
        label = in_[i].symbols[static_cast<std::size_t>(id)];
      }
      specs.push_back({in_[i].name + "=" + label, FeatureKind::kNumeric, {}});
    }
  }
  if (specs.empty()) specs.push_back({"(none)", FeatureKind::kNumeric, {}});
  out_ = FeatureSchema(std::move(specs));
}

OneHotTransform OneHotTransform::fit(const Dataset& train) {
  std::vector<std::vector<std::int32_t>> symbols(train.schema.size());
  for (const auto& row : train.rows) {
    for (std::size_t i = 0; i < row.x.size(); ++i) {
      if (row.x[i].is_categorical()) symbols[i].push_back(row.x[i].category());
    }
  }
  return OneHotTransform(train.schema, std::move(symbols));
}

FeatureVector OneHotTransform::apply(const FeatureVector& x) const {
  check_input(x);
  std::vector<FeatureValue> values;
  values.reserve(out_.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (in_[i].kind == FeatureKind::kNumeric) {
      values.push_back(x[i]);
      continue;
    }
    const auto& ids = symbols_[i];
    for (auto id : ids) {
      if (x[i].is_missing()) {
        values.push_back(FeatureValue::missing());
      } else {
        values.push_back(FeatureValue::numeric(x[i].category() == id ? 1.0 : 0.0));
      }
    }
  }
  if (values.size() < out_.size()) values.resize(out_.size());
  return FeatureVector(std::move(values));
}

void OneHotTransform::write(TextWriter& w) const {
  w.key("transform").token(kind());
  write_schema(w, in_);
  for (const auto& ids : symbols_) {
    w.key("symbols").value(ids.size());
    for (auto id : ids) w.value(static_cast<std::int64_t>(id));
  }
  w.end_line();
}

// ---------------------------------------------------------------------------
// MDLP discretisation

namespace {

double entropy(std::size_t n0, std::size_t n1) {
  const double n = static_cast<double>(n0 + n1);
  double h = 0.0;
  for (std::size_t c : {n0, n1}) {
    if (c == 0) continue;
    const double p = static_cast<double>(c) / n;
    h -= p * std::log2(p);
  }
  return h;
}

std::size_t classes_present(std::size_t n0, std::size_t n1) {
  return static_cast<std::size_t>(n0 > 0) + static_cast<std::size_t>(n1 > 0);
}

// Sorted (value, label) pairs in [begin, end).
void mdlp_split(const std::vector<std::pair<double, int>>& data, std::size_t begin,
                std::size_t end, std::vector<double>& cuts) {
  const std::size_t n = end - begin;
  if (n < 2) return;
  std::size_t total1 = 0;
  for (std::size_t i = begin; i < end; ++i) total1 += static_cast<std::size_t>(data[i].second);
  const std::size_t total0 = n - total1;

  double best_entropy = std::numeric_limits<double>::infinity();
  std::size_t best_split = 0;  // left part is [begin, best_split)
  std::size_t left0 = 0;
  std::size_t left1 = 0;
  std::size_t best_l0 = 0, best_l1 = 0;
  for (std::size_t i = begin; i + 1 < end; ++i) {
    (data[i].second ? left1 : left0) += 1;
    if (!(data[i].first < data[i + 1].first)) continue;
    const std::size_t nl = left0 + left1;
    const std::size_t nr = n - nl;
    const double e = (static_cast<double>(nl) * entropy(left0, left1) +
                      static_cast<double>(nr) * entropy(total0 - left0, total1 - left1)) /
                     static_cast<double>(n);
    // Strict improvement keeps the smallest cut among ties.
    if (e < best_entropy) {
      best_entropy = e;
      best_split = i + 1;
      best_l0 = left0;
      best_l1 = left1;
    }
  }
  if (best_split == 0) return;

  const double ent = entropy(total0, total1);
  const double gain = ent - best_entropy;
  const std::size_t r0 = total0 - best_l0;
  const std::size_t r1 = total1 - best_l1;
  const double k = static_cast<double>(classes_present(total0, total1));
  const double k1 = static_cast<double>(classes_present(best_l0, best_l1));
  const double k2 = static_cast<double>(classes_present(r0, r1));
  const double delta = std::log2(std::pow(3.0, k) - 2.0) -
                       (k * ent - k1 * entropy(best_l0, best_l1) - k2 * entropy(r0, r1));
  const double nd = static_cast<double>(n);
  const double threshold = std::log2(nd - 1.0) / nd + delta / nd;
  if (!(gain > threshold)) return;

  cuts.push_back(0.5 * (data[best_split - 1].first + data[best_split].first));
  mdlp_split(data, begin, best_split, cuts);
  mdlp_split(data, best_split, end, cuts);
}

}  // namespace

std::vector<double> discretize_mdlp(std::span<const std::pair<double, int>> column) {
  std::vector<std::pair<double, int>> data(column.begin(), column.end());
  for (const auto& [v, y] : data) {
    if (!std::isfinite(v)) throw TypeError("MDLP values must be finite");
    if (y != 0 && y != 1) throw SchemaError("MDLP labels must be binary");
  }
  std::sort(data.begin(), data.end());
  std::vector<double> cuts;
  mdlp_split(data, 0, data.size(), cuts);
  std::sort(cuts.begin(), cuts.end());
  return cuts;
}

std::size_t bin_index(double v, std::span<const double> cuts) {
  return static_cast<std::size_t>(std::upper_bound(cuts.begin(), cuts.end(), v) - cuts.begin());
}

std::vector<FeatureValue> bin_apply(const FeatureValue& value, std::span<const double> cuts) {
  std::vector<FeatureValue> out(cuts.size() + 1);
  if (value.is_missing()) return out;
  const auto b = bin_index(value.number(), cuts);
  for (std::size_t j = 0; j < out.size(); ++j) {
    out[j] = FeatureValue::numeric(j == b ? 1.0 : 0.0);
  }
  return out;
}

namespace {

std::vector<std::vector<double>> fit_mdlp_cuts(const Dataset& train) {
  std::vector<std::vector<std::pair<double, int>>> cols(train.schema.size());
  for (const auto& row : train.rows) {
    for (std::size_t i = 0; i < row.x.size(); ++i) {
      if (row.x[i].is_numeric()) cols[i].emplace_back(row.x[i].number(), row.y);
    }
  }
  std::vector<std::vector<double>> cuts(train.schema.size());
  for (std::size_t i = 0; i < cols.size(); ++i) {
    if (train.schema[i].kind == FeatureKind::kNumeric) cuts[i] = discretize_mdlp(cols[i]);
  }
  return cuts;
}

void check_cut_table(const FeatureSchema& in, const std::vector<std::vector<double>>& cuts) {
  if (cuts.size() != in.size()) throw SchemaError("cut table/schema mismatch");
  for (std::size_t i = 0; i < in.size(); ++i) {
    if (!std::is_sorted(cuts[i].begin(), cuts[i].end())) throw SchemaError("cuts must be sorted");
    if (!cuts[i].empty() && in[i].kind != FeatureKind::kNumeric) {
      throw TypeError("cannot bin categorical feature '" + in[i].name + "'");
    }
  }
}

}  // namespace

DiscretizeTransform::DiscretizeTransform(FeatureSchema schema, std::vector<std::vector<double>> cuts)
    : in_(std::move(schema)), cuts_(std::move(cuts)) {
  check_cut_table(in_, cuts_);
  auto specs = in_.features();
  for (std::size_t i = 0; i < specs.size(); ++i) {
    if (specs[i].kind != FeatureKind::kNumeric) continue;
    specs[i].kind = FeatureKind::kCategorical;
    specs[i].symbols.clear();
    for (std::size_t b = 0; b <= cuts_[i].size(); ++b) specs[i].symbols.push_back("bin" + std::to_string(b));
  }
  out_ = FeatureSchema(std::move(specs));
}

DiscretizeTransform DiscretizeTransform::fit(const Dataset& train) {
  return DiscretizeTransform(train.schema, fit_mdlp_cuts(train));
}

FeatureVector DiscretizeTransform::apply(const FeatureVector& x) const {
  check_input(x);
  FeatureVector out = x;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i].is_numeric()) {
      out[i] = FeatureValue::categorical(static_cast<std::int32_t>(bin_index(x[i].number(), cuts_[i])));
    }
  }
  return out;
}

void DiscretizeTransform::write(TextWriter& w) const {
  w.key("transform").token(kind());
  write_schema(w, in_);
  write_cuts(w, cuts_);
  w.end_line();
}

BinTransform::BinTransform(FeatureSchema schema, std::vector<std::vector<double>> cuts)
    : in_(std::move(schema)), cuts_(std::move(cuts)) {
  check_cut_table(in_, cuts_);
  std::vector<FeatureSpec> specs;
  for (std::size_t i = 0; i < in_.size(); ++i) {
    first_column_.push_back(specs.size());
    if (in_[i].kind != FeatureKind::kNumeric || cuts_[i].empty()) {
      specs.push_back(in_[i]);
      continue;
    }
    for (std::size_t b = 0; b <= cuts_[i].size(); ++b) {
      specs.push_back({in_[i].name + "#bin" + std::to_string(b), FeatureKind::kNumeric, {}});
    }
  }
  out_ = FeatureSchema(std::move(specs));
}

BinTransform BinTransform::fit(const Dataset& train) {
  return BinTransform(train.schema, fit_mdlp_cuts(train));
}

std::vector<std::size_t> BinTransform::image_of(std::size_t i) const {
  if (i >= in_.size()) throw SchemaError("feature index out of range");
  const std::size_t width =
      (in_[i].kind == FeatureKind::kNumeric && !cuts_[i].empty()) ? cuts_[i].size() + 1 : 1;
  std::vector<std::size_t> out(width);
  for (std::size_t j = 0; j < width; ++j) out[j] = first_column_[i] + j;
  return out;
}

FeatureVector BinTransform::apply(const FeatureVector& x) const {
  check_input(x);
  std::vector<FeatureValue> values;
  values.reserve(out_.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (in_[i].kind != FeatureKind::kNumeric || cuts_[i].empty()) {
      values.push_back(x[i]);
      continue;
    }
    for (auto& v : bin_apply(x[i], cuts_[i])) values.push_back(v);
  }
  return FeatureVector(std::move(values));
}

void BinTransform::write(TextWriter& w) const {
  w.key("transform").token(kind());
  write_schema(w, in_);
  write_cuts(w, cuts_);
  w.end_line();
}

// ---------------------------------------------------------------------------
// Pipeline

TransformPtr read_transform(TextReader& r) {
  const auto head = r.expect("transform", 1);
  const auto& kind = head[0];
  auto schema = read_schema(r);
  if (kind == "shift") {
    return std::make_shared<ShiftTransform>(std::move(schema), read_doubles(r, "offsets"));
  }
  if (kind == "scale") {
    return std::make_shared<ScaleTransform>(std::move(schema), read_doubles(r, "scales"));
  }
  if (kind == "invert") {
    auto which = read_subset(r, "which");
    return std::make_shared<InversionTransform>(std::move(schema), std::move(which),
                                                read_doubles(r, "lambdas"));
  }
  if (kind == "select") {
    return std::make_shared<SelectTransform>(std::move(schema), read_subset(r, "keep"));
  }
  if (kind == "onehot") {
    std::vector<std::vector<std::int32_t>> symbols;
    for (std::size_t i = 0; i < schema.size(); ++i) {
      const auto t = r.expect("symbols");
      const auto n = static_cast<std::size_t>(parse_int(t.at(0)));
      if (t.size() != n + 1) throw ParseError("symbol count mismatch");
      std::vector<std::int32_t> ids;
      for (std::size_t j = 0; j < n; ++j) ids.push_back(static_cast<std::int32_t>(parse_int(t[j + 1])));
      symbols.push_back(std::move(ids));
    }
    return std::make_shared<OneHotTransform>(std::move(schema), std::move(symbols));
  }
  if (kind == "discretize") {
    return std::make_shared<DiscretizeTransform>(std::move(schema), read_cuts(r));
  }
  if (kind == "bins") {
    return std::make_shared<BinTransform>(std::move(schema), read_cuts(r));
  }
  throw ParseError("unknown transform kind '" + kind + "'");
}

void Pipeline::push(TransformPtr step) {
  if (!steps_.empty() && !(steps_.back()->output_schema() == step->input_schema())) {
    throw SchemaError("pipeline step '" + step->kind() + "' does not accept the previous output");
  }
  steps_.push_back(std::move(step));
}

FeatureVector Pipeline::apply(const FeatureVector& x) const {
  FeatureVector out = x;
  for (const auto& s : steps_) out = s->apply(out);
  return out;
}

Dataset Pipeline::apply(const Dataset& data) const {
  Dataset out = data;
  for (const auto& s : steps_) out = s->apply(out);
  return out;
}

const FeatureSchema& Pipeline::output_schema(const FeatureSchema& input) const {
  return steps_.empty() ? input : steps_.back()->output_schema();
}

void Pipeline::write(TextWriter& w) const {
  w.key("pipeline").value(steps_.size());
  w.end_line();
  for (const auto& s : steps_) s->write(w);
}

Pipeline Pipeline::read(TextReader& r) {
  const auto n = static_cast<std::size_t>(parse_int(r.expect("pipeline", 1)[0]));
  Pipeline p;
  for (std::size_t i = 0; i < n; ++i) p.push(read_transform(r));
  return p;
}

std::vector<double> dense_zero_missing(const FeatureVector& x) {
  std::vector<double> out(x.size(), 0.0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i].is_numeric()) {
      out[i] = x[i].number();
    } else if (x[i].is_categorical()) {
      throw TypeError("dense encoding requires numeric features; one-hot encode first");
    }
  }
  return out;
}

}  // namespace stratshield
