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

#include "stratshield/classifier.hpp"

#include <algorithm>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>

#include "stratshield/error.hpp"
#include "stratshield/serialize.hpp"

namespace stratshield {

namespace {

struct KindName {
  ClassifierKind kind;
  const char* name;
};

constexpr KindName kKindNames[] = {
    {ClassifierKind::kMincut, "mincut"}, {ClassifierKind::kHc, "hc"},
    {ClassifierKind::kIclr, "iclr"},     {ClassifierKind::kIclrNeg, "iclr_neg"},
    {ClassifierKind::kLr, "lr"},         {ClassifierKind::kImpLr, "imp_lr"},
    {ClassifierKind::kRfLr, "rf_lr"},    {ClassifierKind::kMaj, "maj"},
};

}  // namespace

std::string to_string(ClassifierKind kind) {
  for (const auto& k : kKindNames) {
    if (k.kind == kind) return k.name;
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown classifier kind");
}

ClassifierKind parse_classifier_kind(const std::string& name) {
  for (const auto& k : kKindNames) {
    if (name == k.name) return k.kind;
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown classifier '" + name + "'");
}

const std::vector<ClassifierKind>& all_classifier_kinds() {
  static const std::vector<ClassifierKind> kinds = [] {
    std::vector<ClassifierKind> v;
    for (const auto& k : kKindNames) v.push_back(k.kind);
    return v;
  }();
  return kinds;
}

bool truthful_by_construction(ClassifierKind kind) noexcept {
  switch (kind) {
    case ClassifierKind::kMincut:
    case ClassifierKind::kHc:
    case ClassifierKind::kIclr:
    case ClassifierKind::kIclrNeg:
      return true;
    default:
      return false;
  }
}

Pipeline fit_preprocessing(const Dataset& train, const PreprocessOptions& opts) {
  Pipeline p;
  Dataset cur = train;
  if (opts.top_k > 0 && opts.top_k < train.schema.size()) {
    const auto rank = anova_f_rank(train);
    std::vector<std::size_t> keep(rank.begin(), rank.begin() + static_cast<std::ptrdiff_t>(opts.top_k));
    auto select = std::make_shared<SelectTransform>(train.schema, FeatureSubset(std::move(keep)));
    cur = select->Transform::apply(cur);
    p.push(std::move(select));
  }
  if (opts.discretize) {
    bool any_numeric = false;
    for (const auto& f : cur.schema.features()) any_numeric |= f.kind == FeatureKind::kNumeric;
    if (any_numeric) p.push(std::make_shared<DiscretizeTransform>(DiscretizeTransform::fit(cur)));
  }
  return p;
}

TrainedClassifier::TrainedClassifier(ClassifierKind kind, FeatureSchema raw_schema, Pipeline preprocessing,
                                     Model model)
    : kind_(kind), raw_schema_(std::move(raw_schema)), preprocessing_(std::move(preprocessing)),
      model_(std::move(model)) {
  if (!preprocessing_.empty() && !(preprocessing_.steps().front()->input_schema() == raw_schema_)) {
    throw SchemaError("preprocessing does not accept the raw schema");
  }
}

int TrainedClassifier::predict_model(const FeatureVector& x) const {
  return std::visit([&](const auto& m) { return m.predict(x); }, model_);
}

std::optional<double> TrainedClassifier::proba_model(const FeatureVector& x) const {
  return std::visit(
      [&](const auto& m) -> std::optional<double> {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, MincutClassifier> || std::is_same_v<M, MajModel>) {
          return std::nullopt;
        } else {
          return m.proba(x);
        }
      },
      model_);
}

bool TrainedClassifier::has_proba() const noexcept {
  return !std::holds_alternative<MincutClassifier>(model_) && !std::holds_alternative<MajModel>(model_);
}

ClassifierHandle TrainedClassifier::model_handle() const {
  ClassifierHandle h;
  h.truthful = truthful_by_construction(kind_);
  h.predict = [this](const FeatureVector& x) { return predict_model(x); };
  if (has_proba()) h.proba = [this](const FeatureVector& x) { return proba_model(x).value_or(0.0); };
  if (const auto* imp = std::get_if<ImputedLrModel>(&model_)) {
    h.fast_best_response = [imp](const FeatureVector& x) { return imp->best_response(x); };
  }
  return h;
}

ClassifierHandle TrainedClassifier::raw_handle() const {
  ClassifierHandle h;
  h.truthful = truthful_by_construction(kind_);
  h.predict = [this](const FeatureVector& x) { return predict(x); };
  if (has_proba()) h.proba = [this](const FeatureVector& x) { return proba(x).value_or(0.0); };
  if (const auto* imp = std::get_if<ImputedLrModel>(&model_)) {
    // The report only needs to withhold raw features whose images are withheld.
    h.fast_best_response = [this, imp](const FeatureVector& raw) {
      const auto best = imp->best_response(preprocess(raw));
      FeatureVector report = raw;
      const auto* select = preprocessing_.empty()
                               ? nullptr
                               : dynamic_cast<const SelectTransform*>(preprocessing_.steps().front().get());
      for (std::size_t j = 0; j < best.size(); ++j) {
        if (!best[j].is_missing()) continue;
        report[select != nullptr ? select->keep().members()[j] : j] = FeatureValue::missing();
      }
      return report;
    };
  }
  return h;
}

void TrainedClassifier::write(std::ostream& os) const {
  TextWriter w(os);
  w.key("classifier").value(1).token(to_string(kind_));
  write_schema(w, raw_schema_);
  preprocessing_.write(w);
  w.end_line();
  std::visit([&](const auto& m) { m.write(os); }, model_);
}

TrainedClassifier TrainedClassifier::read(std::istream& is) {
  TextReader r(is);
  const auto head = r.expect("classifier", 2);
  if (parse_int(head[0]) != 1) throw ParseError("unsupported classifier file version");
  const auto kind = parse_classifier_kind(head[1]);
  auto schema = read_schema(r);
  auto pipeline = Pipeline::read(r);
  Model model = [&]() -> Model {
    switch (kind) {
      case ClassifierKind::kMincut:
        return MincutClassifier::read(is);
      case ClassifierKind::kHc:
        return MaxEnsemble::read(is);
      case ClassifierKind::kIclr:
      case ClassifierKind::kIclrNeg:
      case ClassifierKind::kLr:
        return LinearModel::read(is);
      case ClassifierKind::kImpLr:
        return ImputedLrModel::read(is);
      case ClassifierKind::kRfLr:
        return ReducedFeatureModel::read(is);
      case ClassifierKind::kMaj:
        return MajModel::read(is);
    }
    throw ParseError("unknown classifier kind");
  }();
  return TrainedClassifier(kind, std::move(schema), std::move(pipeline), std::move(model));
}

namespace {

TrainedClassifier::Model fit_model(ClassifierKind kind, const Dataset& data, const ClassifierOptions& opts,
                                   const TrainConfig& lr) {
  switch (kind) {
    case ClassifierKind::kMincut:
      return train_mincut(data);
    case ClassifierKind::kHc: {
      HcConfig cfg;
      cfg.subsets = SubsetStrategy::all_subsets_of_top(std::min(opts.hc_top_k, data.schema.size()));
      cfg.delta = opts.hc_delta;
      cfg.inner = lr;
      return hc_train(data, cfg).ensemble;
    }
    case ClassifierKind::kIclr:
      return train_iclr(data, lr);
    case ClassifierKind::kIclrNeg: {
      EncodingOptions enc;
      enc.invert_all_numeric = true;
      return train_iclr(data, lr, enc);
    }
    case ClassifierKind::kLr:
      return train_logistic(data, lr);
    case ClassifierKind::kImpLr:
      return train_imp_lr(data, lr);
    case ClassifierKind::kRfLr:
      return train_rf_lr(data, lr);
    case ClassifierKind::kMaj:
      return train_maj(data);
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown classifier kind");
}

bool uses_learning_rate(ClassifierKind kind) {
  return kind != ClassifierKind::kMincut && kind != ClassifierKind::kMaj;
}

// Inner 5-fold CV on truthful accuracy; the first best rate wins.
double pick_learning_rate(ClassifierKind kind, const Dataset& data, const ClassifierOptions& opts) {
  constexpr double kGrid[] = {0.01, 0.1};
  constexpr std::size_t kFolds = 5;
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(opts.seed ^ 0x5eedf01dULL);
  std::shuffle(order.begin(), order.end(), rng);

  double best_rate = opts.lr.learning_rate.eta0;
  double best_acc = -1.0;
  for (double eta : kGrid) {
    TrainConfig lr = opts.lr;
    lr.learning_rate.eta0 = eta;
    std::size_t correct = 0;
    std::size_t total = 0;
    for (std::size_t f = 0; f < kFolds; ++f) {
      Dataset tr{data.schema, {}};
      Dataset te{data.schema, {}};
      for (std::size_t i = 0; i < order.size(); ++i) {
        (i % kFolds == f ? te : tr).rows.push_back(data.rows[order[i]]);
      }
      if (tr.empty() || te.empty() || tr.positives() == 0 || tr.positives() == tr.size()) continue;
      const TrainedClassifier c(kind, data.schema, {}, fit_model(kind, tr, opts, lr));
      for (const auto& row : te.rows) correct += static_cast<std::size_t>(c.predict_model(row.x) == row.y);
      total += te.size();
    }
    if (total == 0) continue;
    const double acc = static_cast<double>(correct) / static_cast<double>(total);
    if (acc > best_acc) {
      best_acc = acc;
      best_rate = eta;
    }
  }
  return best_rate;
}

}  // namespace

TrainedClassifier train_classifier(ClassifierKind kind, const Dataset& train, const ClassifierOptions& opts) {
  if (train.empty()) throw Error(ErrorCode::kEmptyData, "cannot train on an empty dataset");
  auto pipeline = fit_preprocessing(train, opts.preprocess);
  const auto data = pipeline.apply(train);
  TrainConfig lr = opts.lr;
  if (opts.grid && uses_learning_rate(kind)) lr.learning_rate.eta0 = pick_learning_rate(kind, data, opts);
  auto model = fit_model(kind, data, opts, lr);
  return TrainedClassifier(kind, train.schema, std::move(pipeline), std::move(model));
}

}  // namespace stratshield
