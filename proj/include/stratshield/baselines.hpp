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

// Non-strategic baselines: exact-match majority vote, mean/mode imputation
// followed by logistic regression, and one regression per observed pattern
// of present features.

#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <vector>

#include "stratshield/features.hpp"
#include "stratshield/linear_model.hpp"

namespace stratshield {

class MajModel {
 public:
  MajModel(FeatureSchema schema, std::map<FeatureVector, int> table);

  // Majority label of identical training vectors; 0 if unseen.
  int predict(const FeatureVector& x) const;

  const FeatureSchema& schema() const noexcept { return schema_; }
  const std::map<FeatureVector, int>& table() const noexcept { return table_; }

  void write(std::ostream& os) const;
  static MajModel read(std::istream& is);

 private:
  FeatureSchema schema_;
  std::map<FeatureVector, int> table_;
};

MajModel train_maj(const Dataset& train);

// Per feature: mean of present numeric values, or the most frequent
// category (smallest id on ties). Missing when never observed.
FeatureVector fit_impute_values(const Dataset& train);

class ImputedLrModel {
 public:
  ImputedLrModel(FeatureVector impute_values, LinearModel inner);

  double score(const FeatureVector& x) const;
  int predict(const FeatureVector& x) const { return score(x) >= 0.0 ? 1 : 0; }
  double proba(const FeatureVector& x) const { return sigmoid(score(x)); }
  // Optimal withholding for an agent facing this model.
  FeatureVector best_response(const FeatureVector& x) const;

  const FeatureVector& impute_values() const noexcept { return impute_; }
  const LinearModel& inner() const noexcept { return inner_; }
  const FeatureSchema& schema() const noexcept { return inner_.input_schema(); }

  void write(std::ostream& os) const;
  static ImputedLrModel read(std::istream& is);

 private:
  FeatureVector impute_;
  LinearModel inner_;
};

ImputedLrModel train_imp_lr(const Dataset& train, const TrainConfig& cfg = {});

struct PatternModel {
  FeatureSubset pattern;
  // Trained over the schema restricted to `pattern`.
  std::optional<LinearModel> lr;
  // Used when `lr` is empty.
  int constant = 0;
};

class ReducedFeatureModel {
 public:
  ReducedFeatureModel(FeatureSchema schema, std::vector<PatternModel> models);

  // Routes x by its own present pattern; unseen patterns are rejected.
  int predict(const FeatureVector& x) const;
  std::optional<double> proba(const FeatureVector& x) const;

  const FeatureSchema& schema() const noexcept { return schema_; }
  const std::vector<PatternModel>& models() const noexcept { return models_; }

  void write(std::ostream& os) const;
  static ReducedFeatureModel read(std::istream& is);

 private:
  const PatternModel* route(const FeatureVector& x) const;

  FeatureSchema schema_;
  std::vector<PatternModel> models_;
  std::map<FeatureSubset, std::size_t> index_;
};

// One model per observed pattern P, fitted on every training row whose
// present features include P, projected onto P.
ReducedFeatureModel train_rf_lr(const Dataset& train, const TrainConfig& cfg = {});

}  // namespace stratshield
