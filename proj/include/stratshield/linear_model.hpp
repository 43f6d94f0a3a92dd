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

// Full-batch logistic regression and its incentive-compatible variant.
//
// Raw vectors are encoded by a fitted pipeline (one-hot, nonnegative shift,
// optional bins / inverted copies, max-scaling) into nonnegative columns in
// which a withheld feature reads as 0. With every feature coefficient >= 0,
// withholding can only lower the score, so the projected-gradient variant
// is truthful.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "stratshield/features.hpp"
#include "stratshield/transforms.hpp"

namespace stratshield {

// Numerically stable logistic function.
double sigmoid(double t) noexcept;

struct LearningRate {
  enum class Schedule { kConstant, kInverseSqrt };
  Schedule schedule = Schedule::kConstant;
  double eta0 = 0.1;

  // Step size at epoch t (0-based).
  double at(std::size_t t) const;
};

struct TrainConfig {
  LearningRate learning_rate;
  std::size_t max_epochs = 2000;
  // Minimum 0-1 training-loss improvement that resets the patience window.
  double stop_threshold = 0.0;
  // Epochs without such an improvement before stopping.
  std::size_t patience = 100;
  std::uint64_t seed = 0;
  // Also clamp the intercept at 0 in the projected variant.
  bool clamp_intercept = false;
};

struct EncodingOptions {
  // Append lambda - x copies of these raw numeric features (IC-LR "w/ neg.").
  bool invert_all_numeric = false;
  FeatureSubset invert;
  // Replace numeric features by MDLP bin indicators.
  bool bins = false;
};

// Fitted raw -> nonnegative numeric encoding. Categorical inputs are
// one-hot encoded; numeric inputs shifted to start at 0 and scaled by their
// training max.
Pipeline fit_linear_encoding(const Dataset& train, const EncodingOptions& opts = {});

struct DenseData {
  std::vector<std::vector<double>> x;
  std::vector<int> y;
  std::size_t dims() const noexcept { return x.empty() ? 0 : x.front().size(); }
};

DenseData encode_dense(const Pipeline& pipeline, const Dataset& data);

struct Gradient {
  double intercept = 0.0;
  std::vector<double> coefficients;
};

// Mean log-loss gradient at (intercept, coefficients).
Gradient logistic_gradient(const DenseData& data, double intercept,
                           std::span<const double> coefficients);
double mean_log_loss(const DenseData& data, double intercept, std::span<const double> coefficients);

class LinearModel {
 public:
  LinearModel() = default;
  LinearModel(FeatureSchema input_schema, Pipeline pipeline, double intercept,
              std::vector<double> coefficients);

  double score(const FeatureVector& raw) const;
  double score_encoded(std::span<const double> encoded) const;
  int predict(const FeatureVector& raw) const { return score(raw) >= 0.0 ? 1 : 0; }
  double proba(const FeatureVector& raw) const { return sigmoid(score(raw)); }

  const FeatureSchema& input_schema() const noexcept { return input_schema_; }
  const Pipeline& pipeline() const noexcept { return pipeline_; }
  const FeatureSchema& encoded_schema() const { return pipeline_.output_schema(input_schema_); }
  double intercept() const noexcept { return intercept_; }
  const std::vector<double>& coefficients() const noexcept { return coefficients_; }

  // Coefficient of the named encoded column; throws if unknown.
  double coefficient(const std::string& encoded_name) const;
  bool all_coefficients_nonnegative() const noexcept;

  void write(std::ostream& os) const;
  static LinearModel read(std::istream& is);

 private:
  FeatureSchema input_schema_;
  Pipeline pipeline_;
  double intercept_ = 0.0;
  std::vector<double> coefficients_;
};

struct FitResult {
  double intercept = 0.0;
  std::vector<double> coefficients;
  std::vector<double> loss_trace;  // 0-1 training loss after each epoch
  std::size_t epochs = 0;
};

// Full-batch descent from zero. `nonnegative` projects feature
// coefficients (and the intercept if cfg.clamp_intercept) onto >= 0 after
// every step.
FitResult fit_logistic(const DenseData& data, const TrainConfig& cfg, bool nonnegative);

LinearModel train_logistic(const Dataset& train, const TrainConfig& cfg = {},
                           const EncodingOptions& enc = {});
LinearModel train_iclr(const Dataset& train, const TrainConfig& cfg = {},
                       const EncodingOptions& enc = {});

// max(b, 0) elementwise on the feature coefficients.
void project_nonnegative(std::vector<double>& coefficients) noexcept;

}  // namespace stratshield
