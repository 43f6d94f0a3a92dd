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

// Max ensembles of subset classifiers and hill-climbing training.
//
// A subset classifier looks only at the features of its subset F and rejects
// any input missing one of them. The pointwise max of such classifiers is
// truthful: dropping a feature can only switch members off. Hill climbing
// retrains member i on the rows every other member currently rejects,
// keeping the new fit only if it lowers the 0-1 loss on those rows, so the
// ensemble's training loss never increases.

#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <vector>

#include "stratshield/features.hpp"
#include "stratshield/linear_model.hpp"

namespace stratshield {

class SubsetClassifier {
 public:
  // `inner` is trained over the schema restricted to `features`; nullopt
  // means the member rejects everything.
  SubsetClassifier(const FeatureSchema& schema, FeatureSubset features,
                   std::optional<LinearModel> inner);

  bool applicable(const FeatureVector& x) const;
  int predict(const FeatureVector& x) const;
  // sigmoid(score) when applicable and trained, otherwise nullopt.
  std::optional<double> proba(const FeatureVector& x) const;

  const FeatureSubset& features() const noexcept { return features_; }
  const std::optional<LinearModel>& inner() const noexcept { return inner_; }
  const SelectTransform& selector() const noexcept { return selector_; }

 private:
  FeatureSubset features_;
  SelectTransform selector_;
  std::optional<LinearModel> inner_;
};

class MaxEnsemble {
 public:
  MaxEnsemble(FeatureSchema schema, std::vector<SubsetClassifier> members);

  int predict(const FeatureVector& x) const;
  // Max member probability over applicable members, 0.0 if none applies.
  double proba(const FeatureVector& x) const;

  const FeatureSchema& schema() const noexcept { return schema_; }
  const std::vector<SubsetClassifier>& members() const noexcept { return members_; }

  void write(std::ostream& os) const;
  static MaxEnsemble read(std::istream& is);

 private:
  FeatureSchema schema_;
  std::vector<SubsetClassifier> members_;
};

struct SubsetStrategy {
  enum class Kind { kAllSubsetsOfTopK, kSampled, kExplicit };
  Kind kind = Kind::kAllSubsetsOfTopK;
  std::size_t top_k = 4;
  std::size_t singletons = 30;
  std::size_t pairs = 30;
  std::vector<FeatureSubset> explicit_subsets;
  std::uint64_t seed = 0;

  static SubsetStrategy all_subsets_of_top(std::size_t k);
  static SubsetStrategy sampled(std::size_t singletons, std::size_t pairs, std::uint64_t seed);
  static SubsetStrategy fixed(std::vector<FeatureSubset> subsets);
};

// One-way ANOVA F statistic per feature between the two label groups.
// Categorical features score the largest F over their one-hot indicators.
// Zero within-group variance with nonzero between-group variance gives +inf.
std::vector<double> anova_f_values(const Dataset& train);
// Feature indices by F descending, ties by index.
std::vector<std::size_t> anova_f_rank(const Dataset& train);

std::vector<FeatureSubset> generate_subsets(const Dataset& train, const SubsetStrategy& strategy);

using InnerTrainer = std::function<LinearModel(const Dataset&)>;

struct HcConfig {
  SubsetStrategy subsets;
  double delta = 1e-4;
  // 0 means the number of training rows.
  std::size_t max_iterations = 0;
  TrainConfig inner;
};

struct HcResult {
  MaxEnsemble ensemble;
  double initial_loss = 0.0;
  // Ensemble 0-1 training loss after each sweep.
  std::vector<double> loss_trace;
  std::size_t sweeps() const noexcept { return loss_trace.size(); }
};

HcResult hc_train(const Dataset& train, const HcConfig& cfg, const InnerTrainer& inner = {});

}  // namespace stratshield
