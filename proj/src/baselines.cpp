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

#include "stratshield/baselines.hpp"

#include <istream>
#include <ostream>
#include <set>

#include "stratshield/error.hpp"
#include "stratshield/serialize.hpp"
#include "stratshield/strategic.hpp"
#include "stratshield/transforms.hpp"

namespace stratshield {

namespace {

FeatureVector project_onto(const FeatureVector& x, const FeatureSubset& keep) {
  FeatureVector out(keep.size());
  for (std::size_t j = 0; j < keep.size(); ++j) out[j] = x[keep.members()[j]];
  return out;
}

}  // namespace

MajModel::MajModel(FeatureSchema schema, std::map<FeatureVector, int> table)
    : schema_(std::move(schema)), table_(std::move(table)) {}

int MajModel::predict(const FeatureVector& x) const {
  auto it = table_.find(x);
  return it == table_.end() ? 0 : it->second;
}

void MajModel::write(std::ostream& os) const {
  TextWriter w(os);
  w.key("maj-model").value(1);
  write_schema(w, schema_);
  w.key("entries").value(table_.size());
  for (const auto& [x, y] : table_) {
    write_vector(w, "entry", x);
    w.value(y);
  }
  w.end_line();
}

MajModel MajModel::read(std::istream& is) {
  TextReader r(is);
  r.expect("maj-model", 1);
  auto schema = read_schema(r);
  const auto n = static_cast<std::size_t>(parse_int(r.expect("entries", 1)[0]));
  std::map<FeatureVector, int> table;
  for (std::size_t i = 0; i < n; ++i) {
    const auto t = r.expect("entry", schema.size() + 1);
    table[parse_vector(t, 0, schema.size())] = static_cast<int>(parse_int(t.back()));
  }
  return MajModel(std::move(schema), std::move(table));
}

MajModel train_maj(const Dataset& train) {
  std::map<FeatureVector, std::pair<std::size_t, std::size_t>> counts;
  for (const auto& row : train.rows) {
    auto& c = counts[row.x];
    (row.y == 1 ? c.first : c.second) += 1;
  }
  std::map<FeatureVector, int> table;
  for (const auto& [x, c] : counts) table.emplace(x, c.first > c.second ? 1 : 0);
  return MajModel(train.schema, std::move(table));
}

FeatureVector fit_impute_values(const Dataset& train) {
  const std::size_t k = train.schema.size();
  FeatureVector out(k);
  for (std::size_t i = 0; i < k; ++i) {
    if (train.schema[i].kind == FeatureKind::kNumeric) {
      double sum = 0.0;
      std::size_t n = 0;
      for (const auto& row : train.rows) {
        if (row.x[i].is_missing()) continue;
        sum += row.x[i].number();
        ++n;
      }
      if (n > 0) out[i] = FeatureValue::numeric(sum / static_cast<double>(n));
    } else {
      std::map<std::int32_t, std::size_t> freq;
      for (const auto& row : train.rows) {
        if (!row.x[i].is_missing()) ++freq[row.x[i].category()];
      }
      std::size_t best = 0;
      for (const auto& [id, c] : freq) {
        // Ascending ids, so strict > keeps the smallest id on ties.
        if (c > best) {
          best = c;
          out[i] = FeatureValue::categorical(id);
        }
      }
    }
  }
  return out;
}

ImputedLrModel::ImputedLrModel(FeatureVector impute_values, LinearModel inner)
    : impute_(std::move(impute_values)), inner_(std::move(inner)) {
  if (impute_.size() != inner_.input_schema().size()) {
    throw SchemaError("imputation values do not match model arity");
  }
}

double ImputedLrModel::score(const FeatureVector& x) const { return inner_.score(impute(x, impute_)); }

FeatureVector ImputedLrModel::best_response(const FeatureVector& x) const {
  return best_response_imputed_linear(inner_, impute_, x);
}

void ImputedLrModel::write(std::ostream& os) const {
  TextWriter w(os);
  w.key("imp-lr-model").value(1);
  write_vector(w, "impute", impute_);
  w.end_line();
  inner_.write(os);
}

ImputedLrModel ImputedLrModel::read(std::istream& is) {
  TextReader r(is);
  r.expect("imp-lr-model", 1);
  const auto t = r.expect("impute");
  auto values = parse_vector(t, 0, t.size());
  auto inner = LinearModel::read(is);
  return ImputedLrModel(std::move(values), std::move(inner));
}

ImputedLrModel train_imp_lr(const Dataset& train, const TrainConfig& cfg) {
  if (train.empty()) throw Error(ErrorCode::kEmptyData, "cannot train on an empty dataset");
  auto values = fit_impute_values(train);
  Dataset filled{train.schema, {}};
  filled.rows.reserve(train.size());
  for (const auto& row : train.rows) filled.rows.push_back({impute(row.x, values), row.y});
  // Features never observed stay Missing and encode as 0 after the shift.
  auto inner = train_logistic(filled, cfg);
  return ImputedLrModel(std::move(values), std::move(inner));
}

ReducedFeatureModel::ReducedFeatureModel(FeatureSchema schema, std::vector<PatternModel> models)
    : schema_(std::move(schema)), models_(std::move(models)) {
  for (std::size_t j = 0; j < models_.size(); ++j) {
    models_[j].pattern.check_range(schema_.size());
    if (!index_.emplace(models_[j].pattern, j).second) throw SchemaError("duplicate pattern model");
  }
}

const PatternModel* ReducedFeatureModel::route(const FeatureVector& x) const {
  if (x.size() != schema_.size()) throw SchemaError("reduced-feature model: arity mismatch");
  auto it = index_.find(FeatureSubset(x.present_indices()));
  return it == index_.end() ? nullptr : &models_[it->second];
}

int ReducedFeatureModel::predict(const FeatureVector& x) const {
  const auto* m = route(x);
  if (m == nullptr) return 0;
  if (!m->lr) return m->constant;
  return m->lr->predict(project_onto(x, m->pattern));
}

std::optional<double> ReducedFeatureModel::proba(const FeatureVector& x) const {
  const auto* m = route(x);
  if (m == nullptr) return 0.0;
  if (!m->lr) return static_cast<double>(m->constant);
  return m->lr->proba(project_onto(x, m->pattern));
}

void ReducedFeatureModel::write(std::ostream& os) const {
  TextWriter w(os);
  w.key("rf-lr-model").value(1);
  write_schema(w, schema_);
  w.key("patterns").value(models_.size());
  w.end_line();
  for (const auto& m : models_) {
    w.key("pattern").value(m.lr ? 1 : 0).value(m.constant).value(m.pattern.size());
    for (auto i : m.pattern.members()) w.value(i);
    w.end_line();
    if (m.lr) m.lr->write(os);
  }
}

ReducedFeatureModel ReducedFeatureModel::read(std::istream& is) {
  TextReader r(is);
  r.expect("rf-lr-model", 1);
  auto schema = read_schema(r);
  const auto n = static_cast<std::size_t>(parse_int(r.expect("patterns", 1)[0]));
  std::vector<PatternModel> models;
  for (std::size_t j = 0; j < n; ++j) {
    const auto t = r.expect("pattern");
    if (t.size() < 3) throw ParseError("malformed pattern line");
    const auto size = static_cast<std::size_t>(parse_int(t[2]));
    if (t.size() != size + 3) throw ParseError("pattern size mismatch");
    PatternModel m;
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < size; ++i) idx.push_back(static_cast<std::size_t>(parse_int(t[i + 3])));
    m.pattern = FeatureSubset(std::move(idx));
    m.constant = static_cast<int>(parse_int(t[1]));
    if (parse_int(t[0]) != 0) m.lr = LinearModel::read(is);
    models.push_back(std::move(m));
  }
  return ReducedFeatureModel(std::move(schema), std::move(models));
}

ReducedFeatureModel train_rf_lr(const Dataset& train, const TrainConfig& cfg) {
  if (train.empty()) throw Error(ErrorCode::kEmptyData, "cannot train on an empty dataset");
  std::set<FeatureSubset> patterns;
  for (const auto& row : train.rows) patterns.insert(FeatureSubset(row.x.present_indices()));

  std::vector<PatternModel> models;
  for (const auto& p : patterns) {
    PatternModel m;
    m.pattern = p;
    std::size_t pos = 0;
    std::size_t n = 0;
    for (const auto& row : train.rows) {
      bool has = true;
      for (auto i : p.members()) has = has && !row.x[i].is_missing();
      if (!has) continue;
      ++n;
      pos += static_cast<std::size_t>(row.y == 1);
    }
    // Majority label stands in when there is nothing to regress on.
    m.constant = 2 * pos > n ? 1 : 0;
    if (!p.empty() && pos > 0 && pos < n) {
      SelectTransform select(train.schema, p);
      Dataset sub{select.output_schema(), {}};
      for (const auto& row : train.rows) {
        bool has = true;
        for (auto i : p.members()) has = has && !row.x[i].is_missing();
        if (has) sub.rows.push_back({select.apply(row.x), row.y});
      }
      m.lr = train_logistic(sub, cfg);
    }
    models.push_back(std::move(m));
  }
  return ReducedFeatureModel(train.schema, std::move(models));
}

}  // namespace stratshield
