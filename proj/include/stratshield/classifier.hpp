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

// One front door for every model family: fitted preprocessing (feature
// restriction, discretization) followed by the model proper. Preprocessing
// maps Missing to Missing feature by feature, so withholding a raw feature
// is the same as withholding its image.

#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "stratshield/baselines.hpp"
#include "stratshield/hc_ensemble.hpp"
#include "stratshield/linear_model.hpp"
#include "stratshield/mincut.hpp"
#include "stratshield/strategic.hpp"
#include "stratshield/transforms.hpp"

namespace stratshield {

enum class ClassifierKind { kMincut, kHc, kIclr, kIclrNeg, kLr, kImpLr, kRfLr, kMaj };

std::string to_string(ClassifierKind kind);
ClassifierKind parse_classifier_kind(const std::string& name);
const std::vector<ClassifierKind>& all_classifier_kinds();
bool truthful_by_construction(ClassifierKind kind) noexcept;

struct PreprocessOptions {
  // Keep only the k best features by ANOVA F (0 keeps all).
  std::size_t top_k = 0;
  // MDLP-discretize numeric features into categorical bins.
  bool discretize = false;
};

struct ClassifierOptions {
  PreprocessOptions preprocess;
  TrainConfig lr;
  double hc_delta = 1e-4;
  // HC uses every nonempty subset of the best `hc_top_k` features.
  std::size_t hc_top_k = 4;
  // Pick eta in {0.01, 0.1} by inner 5-fold cross-validation.
  bool grid = false;
  std::uint64_t seed = 0;
};

// Fitted on training rows only.
Pipeline fit_preprocessing(const Dataset& train, const PreprocessOptions& opts);

class TrainedClassifier {
 public:
  using Model = std::variant<MincutClassifier, MaxEnsemble, LinearModel, ImputedLrModel,
                             ReducedFeatureModel, MajModel>;

  TrainedClassifier(ClassifierKind kind, FeatureSchema raw_schema, Pipeline preprocessing, Model model);

  ClassifierKind kind() const noexcept { return kind_; }
  const FeatureSchema& raw_schema() const noexcept { return raw_schema_; }
  const FeatureSchema& model_schema() const { return preprocessing_.output_schema(raw_schema_); }
  const Pipeline& preprocessing() const noexcept { return preprocessing_; }
  const Model& model() const noexcept { return model_; }

  FeatureVector preprocess(const FeatureVector& raw) const { return preprocessing_.apply(raw); }
  Dataset preprocess(const Dataset& raw) const { return preprocessing_.apply(raw); }

  // On model-space vectors.
  int predict_model(const FeatureVector& x) const;
  std::optional<double> proba_model(const FeatureVector& x) const;

  // On raw vectors.
  int predict(const FeatureVector& raw) const { return predict_model(preprocess(raw)); }
  std::optional<double> proba(const FeatureVector& raw) const { return proba_model(preprocess(raw)); }
  bool has_proba() const noexcept;

  // Handles borrow *this; keep the classifier alive while they are used.
  ClassifierHandle model_handle() const;
  ClassifierHandle raw_handle() const;

  void write(std::ostream& os) const;
  static TrainedClassifier read(std::istream& is);

 private:
  ClassifierKind kind_;
  FeatureSchema raw_schema_;
  Pipeline preprocessing_;
  Model model_;
};

TrainedClassifier train_classifier(ClassifierKind kind, const Dataset& train, const ClassifierOptions& opts);

}  // namespace stratshield
