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

#include "stratshield/hc_ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <set>

#include "stratshield/error.hpp"
#include "stratshield/serialize.hpp"

namespace stratshield {

SubsetClassifier::SubsetClassifier(const FeatureSchema& schema, FeatureSubset features,
                                   std::optional<LinearModel> inner)
    : features_(std::move(features)), selector_(schema, features_), inner_(std::move(inner)) {
  if (inner_ && !(inner_->input_schema() == selector_.output_schema())) {
    throw SchemaError("subset classifier model was trained on a different feature set");
  }
}

bool SubsetClassifier::applicable(const FeatureVector& x) const {
  for (auto i : features_.members()) {
    if (x[i].is_missing()) return false;
  }
  return true;
}

int SubsetClassifier::predict(const FeatureVector& x) const {
  if (!inner_ || !applicable(x)) return 0;
  return inner_->predict(selector_.apply(x));
}

std::optional<double> SubsetClassifier::proba(const FeatureVector& x) const {
  if (!inner_ || !applicable(x)) return std::nullopt;
  return inner_->proba(selector_.apply(x));
}

MaxEnsemble::MaxEnsemble(FeatureSchema schema, std::vector<SubsetClassifier> members)
    : schema_(std::move(schema)), members_(std::move(members)) {
  for (const auto& m : members_) {
    if (!(m.selector().input_schema() == schema_)) throw SchemaError("ensemble member schema mismatch");
  }
}

int MaxEnsemble::predict(const FeatureVector& x) const {
  if (x.size() != schema_.size()) throw SchemaError("ensemble predict: arity mismatch");
  for (const auto& m : members_) {
    if (m.predict(x)) return 1;
  }
  return 0;
}

double MaxEnsemble::proba(const FeatureVector& x) const {
  if (x.size() != schema_.size()) throw SchemaError("ensemble proba: arity mismatch");
  double best = 0.0;
  for (const auto& m : members_) {
    if (auto p = m.proba(x)) best = std::max(best, *p);
  }
  return best;
}

void MaxEnsemble::write(std::ostream& os) const {
  TextWriter w(os);
  w.key("max-ensemble").value(1);
  write_schema(w, schema_);
  w.key("members").value(members_.size());
  w.end_line();
  for (const auto& m : members_) {
    w.key("member").value(m.inner() ? 1 : 0).value(m.features().size());
    for (auto i : m.features().members()) w.value(i);
    w.end_line();
    if (m.inner()) m.inner()->write(os);
  }
}

MaxEnsemble MaxEnsemble::read(std::istream& is) {
  TextReader r(is);
  r.expect("max-ensemble", 1);
  auto schema = read_schema(r);
  const auto n = static_cast<std::size_t>(parse_int(r.expect("members", 1)[0]));
  std::vector<SubsetClassifier> members;
  for (std::size_t j = 0; j < n; ++j) {
    const auto t = r.expect("member");
    if (t.size() < 2) throw ParseError("malformed member line");
    const bool has_model = parse_int(t[0]) != 0;
    const auto size = static_cast<std::size_t>(parse_int(t[1]));
    if (t.size() != size + 2) throw ParseError("member subset size mismatch");
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < size; ++i) idx.push_back(static_cast<std::size_t>(parse_int(t[i + 2])));
    std::optional<LinearModel> inner;
    if (has_model) inner = LinearModel::read(is);
    members.emplace_back(schema, FeatureSubset(std::move(idx)), std::move(inner));
  }
  return MaxEnsemble(std::move(schema), std::move(members));
}

SubsetStrategy SubsetStrategy::all_subsets_of_top(std::size_t k) {
  SubsetStrategy s;
  s.kind = Kind::kAllSubsetsOfTopK;
  s.top_k = k;
  return s;
}

SubsetStrategy SubsetStrategy::sampled(std::size_t singletons, std::size_t pairs, std::uint64_t seed) {
  SubsetStrategy s;
  s.kind = Kind::kSampled;
  s.singletons = singletons;
  s.pairs = pairs;
  s.seed = seed;
  return s;
}

SubsetStrategy SubsetStrategy::fixed(std::vector<FeatureSubset> subsets) {
  SubsetStrategy s;
  s.kind = Kind::kExplicit;
  s.explicit_subsets = std::move(subsets);
  return s;
}

namespace {

// F statistic for two groups of present values.
double f_statistic(const std::vector<double>& a, const std::vector<double>& b) {
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  if (a.empty() || b.empty()) return 0.0;
  const double ma = std::accumulate(a.begin(), a.end(), 0.0) / na;
  const double mb = std::accumulate(b.begin(), b.end(), 0.0) / nb;
  const double m = (ma * na + mb * nb) / (na + nb);
  const double ssb = na * (ma - m) * (ma - m) + nb * (mb - m) * (mb - m);
  double ssw = 0.0;
  for (double v : a) ssw += (v - ma) * (v - ma);
  for (double v : b) ssw += (v - mb) * (v - mb);
  const double dfw = na + nb - 2.0;
  if (ssb <= 0.0) return 0.0;
  if (ssw <= 0.0 || dfw <= 0.0) return std::numeric_limits<double>::infinity();
  return ssb / (ssw / dfw);
}

}  // namespace

std::vector<double> anova_f_values(const Dataset& train) {
  const std::size_t k = train.schema.size();
  std::vector<double> out(k, 0.0);
  for (std::size_t i = 0; i < k; ++i) {
    if (train.schema[i].kind == FeatureKind::kNumeric) {
      std::vector<double> g0, g1;
      for (const auto& row : train.rows) {
        if (row.x[i].is_missing()) continue;
        (row.y ? g1 : g0).push_back(row.x[i].number());
      }
      out[i] = f_statistic(g0, g1);
      continue;
    }
    std::set<std::int32_t> symbols;
    for (const auto& row : train.rows) {
      if (row.x[i].is_categorical()) symbols.insert(row.x[i].category());
    }
    double best = 0.0;
    for (auto s : symbols) {
      std::vector<double> g0, g1;
      for (const auto& row : train.rows) {
        if (row.x[i].is_missing()) continue;
        (row.y ? g1 : g0).push_back(row.x[i].category() == s ? 1.0 : 0.0);
      }
      best = std::max(best, f_statistic(g0, g1));
    }
    out[i] = best;
  }
  return out;
}

std::vector<std::size_t> anova_f_rank(const Dataset& train) {
  const auto f = anova_f_values(train);
  std::vector<std::size_t> idx(f.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return f[a] > f[b]; });
  return idx;
}

std::vector<FeatureSubset> generate_subsets(const Dataset& train, const SubsetStrategy& strategy) {
  const std::size_t k = train.schema.size();
  std::vector<FeatureSubset> out;
  switch (strategy.kind) {
    case SubsetStrategy::Kind::kAllSubsetsOfTopK: {
      if (strategy.top_k == 0 || strategy.top_k > k) {
        throw Error(ErrorCode::kInvalidArgument, "top-k of " + std::to_string(strategy.top_k) +
                                                     " exceeds arity " + std::to_string(k));
      }
      if (strategy.top_k > 20) throw Error(ErrorCode::kInvalidArgument, "top-k above 20 is not supported");
      auto rank = anova_f_rank(train);
      rank.resize(strategy.top_k);
      std::sort(rank.begin(), rank.end());
      const std::uint32_t count = std::uint32_t{1} << strategy.top_k;
      // Ordered by subset size, then lexicographically, so smaller
      // subsets are swept first.
      for (std::size_t size = 1; size <= strategy.top_k; ++size) {
        for (std::uint32_t mask = 1; mask < count; ++mask) {
          if (static_cast<std::size_t>(__builtin_popcount(mask)) != size) continue;
          std::vector<std::size_t> m;
          for (std::size_t b = 0; b < strategy.top_k; ++b) {
            if ((mask >> b) & 1U) m.push_back(rank[b]);
          }
          out.emplace_back(std::move(m));
        }
      }
      break;
    }
    case SubsetStrategy::Kind::kSampled: {
      std::mt19937_64 rng(strategy.seed);
      std::vector<std::size_t> idx(k);
      std::iota(idx.begin(), idx.end(), 0);
      std::shuffle(idx.begin(), idx.end(), rng);
      for (std::size_t j = 0; j < std::min(strategy.singletons, k); ++j) out.push_back(FeatureSubset{idx[j]});
      std::vector<std::pair<std::size_t, std::size_t>> pairs;
      for (std::size_t a = 0; a < k; ++a) {
        for (std::size_t b = a + 1; b < k; ++b) pairs.emplace_back(a, b);
      }
      std::shuffle(pairs.begin(), pairs.end(), rng);
      for (std::size_t j = 0; j < std::min(strategy.pairs, pairs.size()); ++j) {
        out.push_back(FeatureSubset{pairs[j].first, pairs[j].second});
      }
      break;
    }
    case SubsetStrategy::Kind::kExplicit: {
      std::set<FeatureSubset> seen;
      for (const auto& s : strategy.explicit_subsets) {
        s.check_range(k);
        if (s.empty()) throw Error(ErrorCode::kInvalidArgument, "subsets must be nonempty");
        if (seen.insert(s).second) out.push_back(s);
      }
      break;
    }
  }
  if (out.empty()) throw Error(ErrorCode::kInvalidArgument, "subset strategy produced no subsets");
  return out;
}

namespace {

struct MemberState {
  FeatureSubset features;
  std::optional<LinearModel> model;
  std::vector<int> out;  // prediction per training row
};

}  // namespace

HcResult hc_train(const Dataset& train, const HcConfig& cfg, const InnerTrainer& inner_trainer) {
  if (train.empty()) throw Error(ErrorCode::kEmptyData, "cannot hill-climb on an empty dataset");
  if (cfg.delta < 0.0) throw Error(ErrorCode::kInvalidArgument, "delta must be >= 0");
  const InnerTrainer trainer =
      inner_trainer ? inner_trainer : [&cfg](const Dataset& d) { return train_logistic(d, cfg.inner); };

  const auto subsets = generate_subsets(train, cfg.subsets);
  const std::size_t m = train.size();
  const std::size_t n = subsets.size();
  const std::size_t max_iter = cfg.max_iterations ? cfg.max_iterations : m;

  std::vector<SelectTransform> selectors;
  std::vector<std::vector<char>> applicable(n, std::vector<char>(m, 0));
  for (std::size_t j = 0; j < n; ++j) {
    selectors.emplace_back(train.schema, subsets[j]);
    for (std::size_t r = 0; r < m; ++r) {
      bool ok = true;
      for (auto i : subsets[j].members()) ok &= !train.rows[r].x[i].is_missing();
      applicable[j][r] = ok;
    }
  }

  auto fit_member = [&](std::size_t j, const std::vector<std::size_t>& rows) -> std::optional<LinearModel> {
    if (rows.empty()) return std::nullopt;
    Dataset sub;
    sub.schema = selectors[j].output_schema();
    sub.rows.reserve(rows.size());
    for (auto r : rows) sub.rows.push_back({selectors[j].apply(train.rows[r].x), train.rows[r].y});
    return trainer(sub);
  };
  auto outputs = [&](std::size_t j, const std::optional<LinearModel>& model) {
    std::vector<int> out(m, 0);
    if (!model) return out;
    for (std::size_t r = 0; r < m; ++r) {
      if (applicable[j][r]) out[r] = model->predict(selectors[j].apply(train.rows[r].x));
    }
    return out;
  };

  std::vector<MemberState> members(n);
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<std::size_t> rows;
    for (std::size_t r = 0; r < m; ++r) {
      if (applicable[j][r]) rows.push_back(r);
    }
    members[j].features = subsets[j];
    members[j].model = fit_member(j, rows);
    members[j].out = outputs(j, members[j].model);
  }

  auto ensemble_errors = [&] {
    std::size_t wrong = 0;
    for (std::size_t r = 0; r < m; ++r) {
      int pred = 0;
      for (const auto& mem : members) pred |= mem.out[r];
      wrong += static_cast<std::size_t>(pred != train.rows[r].y);
    }
    return wrong;
  };

  HcResult result{MaxEnsemble(train.schema, {}), 0.0, {}};
  std::size_t prev = ensemble_errors();
  result.initial_loss = static_cast<double>(prev) / static_cast<double>(m);

  for (std::size_t sweep = 0; sweep < max_iter && prev > 0; ++sweep) {
    for (std::size_t i = 0; i < n; ++i) {
      // S_i: rows rejected by every other member.
      std::vector<std::size_t> s_rows;
      for (std::size_t r = 0; r < m; ++r) {
        bool rejected = true;
        for (std::size_t j = 0; j < n && rejected; ++j) {
          if (j != i && members[j].out[r]) rejected = false;
        }
        if (rejected) s_rows.push_back(r);
      }
      std::vector<std::size_t> trainable;
      for (auto r : s_rows) {
        if (applicable[i][r]) trainable.push_back(r);
      }
      auto candidate = fit_member(i, trainable);
      auto cand_out = outputs(i, candidate);
      std::size_t old_loss = 0, new_loss = 0;
      for (auto r : s_rows) {
        const int y = train.rows[r].y;
        old_loss += static_cast<std::size_t>(members[i].out[r] != y);
        new_loss += static_cast<std::size_t>(cand_out[r] != y);
      }
      if (new_loss < old_loss) {
        members[i].model = std::move(candidate);
        members[i].out = std::move(cand_out);
      }
    }
    const std::size_t cur = ensemble_errors();
    result.loss_trace.push_back(static_cast<double>(cur) / static_cast<double>(m));
    const double improvement =
        (static_cast<double>(prev) - static_cast<double>(cur)) / static_cast<double>(m);
    prev = cur;
    if (improvement <= 0.0 || improvement < cfg.delta) break;
  }

  std::vector<SubsetClassifier> out;
  out.reserve(n);
  for (auto& mem : members) out.emplace_back(train.schema, mem.features, std::move(mem.model));
  result.ensemble = MaxEnsemble(train.schema, std::move(out));
  return result;
}

}  // namespace stratshield
