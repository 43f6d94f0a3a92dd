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

// Fitted, replayable feature transforms. Every transform maps a vector over
// its input schema to a vector over its output schema, and maps Missing
// inputs to Missing in every derived output column. Withholding a raw
// feature therefore withholds all columns derived from it.

#pragma once

#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "stratshield/features.hpp"
#include "stratshield/serialize.hpp"

namespace stratshield {

class Transform {
 public:
  virtual ~Transform() = default;

  virtual std::string kind() const = 0;
  virtual const FeatureSchema& input_schema() const noexcept = 0;
  virtual const FeatureSchema& output_schema() const noexcept = 0;
  virtual FeatureVector apply(const FeatureVector& x) const = 0;
  virtual void write(TextWriter& w) const = 0;

  Dataset apply(const Dataset& data) const;

 protected:
  void check_input(const FeatureVector& x) const;
};

using TransformPtr = std::shared_ptr<const Transform>;

TransformPtr read_transform(TextReader& r);

// Numeric features shifted by their training minimum; test values below the
// minimum clamp to 0. Categorical features pass through.
class ShiftTransform final : public Transform {
 public:
  ShiftTransform(FeatureSchema schema, std::vector<double> offsets);
  static ShiftTransform fit(const Dataset& train);

  std::string kind() const override { return "shift"; }
  const FeatureSchema& input_schema() const noexcept override { return schema_; }
  const FeatureSchema& output_schema() const noexcept override { return schema_; }
  FeatureVector apply(const FeatureVector& x) const override;
  using Transform::apply;
  void write(TextWriter& w) const override;

  const std::vector<double>& offsets() const noexcept { return offsets_; }

 private:
  FeatureSchema schema_;
  std::vector<double> offsets_;
};

struct ShiftResult {
  std::shared_ptr<const ShiftTransform> transform;
  Dataset data;
};

ShiftResult shift_nonnegative(const Dataset& train);

// Divides numeric features by a positive per-feature scale (the training
// maximum after a nonnegative shift), keeping values nonnegative.
class ScaleTransform final : public Transform {
 public:
  ScaleTransform(FeatureSchema schema, std::vector<double> scales);
  static ScaleTransform fit_max(const Dataset& train);

  std::string kind() const override { return "scale"; }
  const FeatureSchema& input_schema() const noexcept override { return schema_; }
  const FeatureSchema& output_schema() const noexcept override { return schema_; }
  FeatureVector apply(const FeatureVector& x) const override;
  using Transform::apply;
  void write(TextWriter& w) const override;

  const std::vector<double>& scales() const noexcept { return scales_; }

 private:
  FeatureSchema schema_;
  std::vector<double> scales_;
};

// Appends lambda - x_i for every i in `which`, with lambda the training max.
// Values above lambda at test time clamp the copy to 0.
class InversionTransform final : public Transform {
 public:
  InversionTransform(FeatureSchema schema, FeatureSubset which, std::vector<double> lambdas);
  static InversionTransform fit(const Dataset& train, const FeatureSubset& which);

  std::string kind() const override { return "invert"; }
  const FeatureSchema& input_schema() const noexcept override { return in_; }
  const FeatureSchema& output_schema() const noexcept override { return out_; }
  FeatureVector apply(const FeatureVector& x) const override;
  using Transform::apply;
  void write(TextWriter& w) const override;

  const FeatureSubset& which() const noexcept { return which_; }
  const std::vector<double>& lambdas() const noexcept { return lambdas_; }

 private:
  FeatureSchema in_;
  FeatureSchema out_;
  FeatureSubset which_;
  std::vector<double> lambdas_;
};

struct InversionResult {
  std::shared_ptr<const InversionTransform> transform;
  Dataset data;
};

InversionResult invert_features(const Dataset& train, const FeatureSubset& which);

// Keeps only the features in `keep`, in index order.
class SelectTransform final : public Transform {
 public:
  SelectTransform(FeatureSchema schema, FeatureSubset keep);

  std::string kind() const override { return "select"; }
  const FeatureSchema& input_schema() const noexcept override { return in_; }
  const FeatureSchema& output_schema() const noexcept override { return out_; }
  FeatureVector apply(const FeatureVector& x) const override;
  using Transform::apply;
  void write(TextWriter& w) const override;

  const FeatureSubset& keep() const noexcept { return keep_; }

 private:
  FeatureSchema in_;
  FeatureSchema out_;
  FeatureSubset keep_;
};

// Categorical feature -> one binary numeric column per symbol observed in
// training. An unseen symbol is present but sets no column.
class OneHotTransform final : public Transform {
 public:
  OneHotTransform(FeatureSchema schema, std::vector<std::vector<std::int32_t>> symbols);
  static OneHotTransform fit(const Dataset& train);

  std::string kind() const override { return "onehot"; }
  const FeatureSchema& input_schema() const noexcept override { return in_; }
  const FeatureSchema& output_schema() const noexcept override { return out_; }
  FeatureVector apply(const FeatureVector& x) const override;
  using Transform::apply;
  void write(TextWriter& w) const override;

 private:
  FeatureSchema in_;
  FeatureSchema out_;
  // Sorted symbol ids per input feature (empty for numeric features).
  std::vector<std::vector<std::int32_t>> symbols_;
};

// Recursive entropy-minimising binary splits accepted under the MDL
// criterion. Returns sorted cut points; empty when no split pays for itself.
std::vector<double> discretize_mdlp(std::span<const std::pair<double, int>> column);

// Bin index of v: the number of cuts <= v.
std::size_t bin_index(double v, std::span<const double> cuts);

// One-hot bin membership of a value (cuts.size() + 1 entries, exactly one 1)
// or all-Missing when the value is Missing.
std::vector<FeatureValue> bin_apply(const FeatureValue& value, std::span<const double> cuts);

// Numeric features with cuts become categorical bin indices.
class DiscretizeTransform final : public Transform {
 public:
  DiscretizeTransform(FeatureSchema schema, std::vector<std::vector<double>> cuts);
  // MDLP cuts for every numeric feature, fitted on present values only.
  static DiscretizeTransform fit(const Dataset& train);

  std::string kind() const override { return "discretize"; }
  const FeatureSchema& input_schema() const noexcept override { return in_; }
  const FeatureSchema& output_schema() const noexcept override { return out_; }
  FeatureVector apply(const FeatureVector& x) const override;
  using Transform::apply;
  void write(TextWriter& w) const override;

  const std::vector<std::vector<double>>& cuts() const noexcept { return cuts_; }

 private:
  FeatureSchema in_;
  FeatureSchema out_;
  std::vector<std::vector<double>> cuts_;
};

// Numeric features with cuts become cuts.size() + 1 binary columns.
class BinTransform final : public Transform {
 public:
  BinTransform(FeatureSchema schema, std::vector<std::vector<double>> cuts);
  static BinTransform fit(const Dataset& train);

  std::string kind() const override { return "bins"; }
  const FeatureSchema& input_schema() const noexcept override { return in_; }
  const FeatureSchema& output_schema() const noexcept override { return out_; }
  FeatureVector apply(const FeatureVector& x) const override;
  using Transform::apply;
  void write(TextWriter& w) const override;

  // Output columns generated from input feature i.
  std::vector<std::size_t> image_of(std::size_t i) const;

 private:
  FeatureSchema in_;
  FeatureSchema out_;
  std::vector<std::vector<double>> cuts_;
  std::vector<std::size_t> first_column_;
};

class Pipeline {
 public:
  Pipeline() = default;

  void push(TransformPtr step);
  bool empty() const noexcept { return steps_.empty(); }
  const std::vector<TransformPtr>& steps() const noexcept { return steps_; }

  FeatureVector apply(const FeatureVector& x) const;
  Dataset apply(const Dataset& data) const;

  // Empty-pipeline case returns `input`.
  const FeatureSchema& output_schema(const FeatureSchema& input) const;

  void write(TextWriter& w) const;
  static Pipeline read(TextReader& r);

 private:
  std::vector<TransformPtr> steps_;
};

// Dense encoding of a numeric-only vector; Missing becomes 0.
std::vector<double> dense_zero_missing(const FeatureVector& x);

void write_schema(TextWriter& w, const FeatureSchema& schema);
FeatureSchema read_schema(TextReader& r);
void write_vector(TextWriter& w, const std::string& key, const FeatureVector& x);
FeatureVector parse_vector(const std::vector<std::string>& tokens, std::size_t first,
                           std::size_t k);

}  // namespace stratshield
