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

#include "stratshield/linear_model.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>

#include "stratshield/error.hpp"
#include "stratshield/serialize.hpp"

namespace stratshield {

double sigmoid(double t) noexcept {
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

double LearningRate::at(std::size_t t) const {
  if (!(eta0 > 0.0)) throw Error(ErrorCode::kInvalidArgument, "learning rate must be positive");
  if (schedule == Schedule::kInverseSqrt) return eta0 / std::sqrt(static_cast<double>(t + 1));
  return eta0;
}

Pipeline fit_linear_encoding(const Dataset& train, const EncodingOptions& opts) {
  Pipeline p;
  Dataset cur = train;
  auto step = [&](TransformPtr t) {
    cur = t->apply(cur);
    p.push(std::move(t));
  };

  bool any_categorical = false;
  for (const auto& f : train.schema.features()) {
    any_categorical |= f.kind == FeatureKind::kCategorical;
  }
  // Numeric raw features keep their index through one-hot only if they come
  // first, so record numeric names to find them again after encoding.
  std::vector<std::string> invert_names;
  for (std::size_t i = 0; i < train.schema.size(); ++i) {
    if (train.schema[i].kind != FeatureKind::kNumeric) {
      if (opts.invert.contains(i)) {
        throw TypeError("cannot invert categorical feature '" + train.schema[i].name + "'");
      }
      continue;
    }
    if (opts.invert_all_numeric || opts.invert.contains(i)) {
      invert_names.push_back(train.schema[i].name);
    }
  }
  opts.invert.check_range(train.schema.size());

  if (any_categorical) step(std::make_shared<OneHotTransform>(OneHotTransform::fit(cur)));
  step(std::make_shared<ShiftTransform>(ShiftTransform::fit(cur)));
  if (opts.bins) {
    // Binned features become indicators; inversion applies to the rest.
    auto bins = std::make_shared<BinTransform>(BinTransform::fit(cur));
    step(bins);
  }
  std::vector<std::size_t> invert_idx;
  for (const auto& name : invert_names) {
    const auto i = cur.schema.index_of(name);
    if (i < cur.schema.size()) invert_idx.push_back(i);
  }
  if (!invert_idx.empty()) {
    step(std::make_shared<InversionTransform>(
        InversionTransform::fit(cur, FeatureSubset(std::move(invert_idx)))));
  }
  step(std::make_shared<ScaleTransform>(ScaleTransform::fit_max(cur)));
  return p;
}

DenseData encode_dense(const Pipeline& pipeline, const Dataset& data) {
  DenseData out;
  out.x.reserve(data.size());
  out.y.reserve(data.size());
  for (const auto& row : data.rows) {
    out.x.push_back(dense_zero_missing(pipeline.apply(row.x)));
    out.y.push_back(row.y);
  }
  return out;
}

namespace {

double linear_score(std::span<const double> x, double intercept, std::span<const double> coef) {
  double s = intercept;
  for (std::size_t i = 0; i < coef.size(); ++i) s += coef[i] * x[i];
  return s;
}

}  // namespace

Gradient logistic_gradient(const DenseData& data, double intercept,
                           std::span<const double> coefficients) {
  Gradient g;
  g.coefficients.assign(coefficients.size(), 0.0);
  if (data.x.empty()) return g;
  for (std::size_t r = 0; r < data.x.size(); ++r) {
    const auto& x = data.x[r];
    const double err = sigmoid(linear_score(x, intercept, coefficients)) - data.y[r];
    g.intercept += err;
    for (std::size_t i = 0; i < coefficients.size(); ++i) g.coefficients[i] += err * x[i];
  }
  const double n = static_cast<double>(data.x.size());
  g.intercept /= n;
  for (auto& v : g.coefficients) v /= n;
  return g;
}

double mean_log_loss(const DenseData& data, double intercept, std::span<const double> coefficients) {
  if (data.x.empty()) return 0.0;
  double sum = 0.0;
  for (std::size_t r = 0; r < data.x.size(); ++r) {
    const double s = linear_score(data.x[r], intercept, coefficients);
    // log(1 + e^{-s}) for y = 1, log(1 + e^{s}) for y = 0, computed stably.
    const double z = data.y[r] == 1 ? -s : s;
    sum += z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
  }
  return sum / static_cast<double>(data.x.size());
}

void project_nonnegative(std::vector<double>& coefficients) noexcept {
  for (auto& b : coefficients) b = std::max(b, 0.0);
}

FitResult fit_logistic(const DenseData& data, const TrainConfig& cfg, bool nonnegative) {
  if (data.x.empty()) throw Error(ErrorCode::kEmptyData, "cannot fit logistic regression on no rows");
  if (cfg.stop_threshold < 0.0) throw Error(ErrorCode::kInvalidArgument, "stop threshold must be >= 0");
  const std::size_t d = data.dims();
  FitResult out;
  out.coefficients.assign(d, 0.0);
  const double n = static_cast<double>(data.x.size());

  auto zero_one = [&] {
    std::size_t wrong = 0;
    for (std::size_t r = 0; r < data.x.size(); ++r) {
      const int pred = linear_score(data.x[r], out.intercept, out.coefficients) >= 0.0 ? 1 : 0;
      wrong += static_cast<std::size_t>(pred != data.y[r]);
    }
    return static_cast<double>(wrong) / n;
  };

  double best = zero_one();
  std::size_t stale = 0;
  for (std::size_t t = 0; t < cfg.max_epochs; ++t) {
    const auto g = logistic_gradient(data, out.intercept, out.coefficients);
    const double eta = cfg.learning_rate.at(t);
    if (!std::isfinite(g.intercept)) throw DivergenceError("non-finite gradient; lower the learning rate");
    out.intercept -= eta * g.intercept;
    for (std::size_t i = 0; i < d; ++i) {
      if (!std::isfinite(g.coefficients[i])) {
        throw DivergenceError("non-finite gradient; lower the learning rate");
      }
      out.coefficients[i] -= eta * g.coefficients[i];
      if (!std::isfinite(out.coefficients[i])) throw DivergenceError("parameters diverged");
    }
    if (nonnegative) {
      project_nonnegative(out.coefficients);
      if (cfg.clamp_intercept) out.intercept = std::max(out.intercept, 0.0);
    }
    if (!std::isfinite(out.intercept)) throw DivergenceError("parameters diverged");

    const double loss = zero_one();
    out.loss_trace.push_back(loss);
    out.epochs = t + 1;
    if (best - loss > cfg.stop_threshold) {
      best = loss;
      stale = 0;
    } else if (++stale >= cfg.patience) {
      break;
    }
  }
  return out;
}

namespace {

LinearModel train_linear(const Dataset& train, const TrainConfig& cfg, const EncodingOptions& enc,
                         bool nonnegative) {
  if (train.empty()) throw Error(ErrorCode::kEmptyData, "cannot train on an empty dataset");
  auto pipeline = fit_linear_encoding(train, enc);
  const auto dense = encode_dense(pipeline, train);
  auto fit = fit_logistic(dense, cfg, nonnegative);
  return LinearModel(train.schema, std::move(pipeline), fit.intercept, std::move(fit.coefficients));
}

}  // namespace

LinearModel train_logistic(const Dataset& train, const TrainConfig& cfg, const EncodingOptions& enc) {
  return train_linear(train, cfg, enc, false);
}

LinearModel train_iclr(const Dataset& train, const TrainConfig& cfg, const EncodingOptions& enc) {
  return train_linear(train, cfg, enc, true);
}

LinearModel::LinearModel(FeatureSchema input_schema, Pipeline pipeline, double intercept,
                         std::vector<double> coefficients)
    : input_schema_(std::move(input_schema)),
      pipeline_(std::move(pipeline)),
      intercept_(intercept),
      coefficients_(std::move(coefficients)) {
  if (!pipeline_.empty() && !(pipeline_.steps().front()->input_schema() == input_schema_)) {
    throw SchemaError("linear model pipeline does not accept its input schema");
  }
  if (coefficients_.size() != encoded_schema().size()) {
    throw SchemaError("coefficient count does not match encoded arity");
  }
}

double LinearModel::score_encoded(std::span<const double> encoded) const {
  if (encoded.size() != coefficients_.size()) throw SchemaError("encoded arity mismatch");
  return linear_score(encoded, intercept_, coefficients_);
}

double LinearModel::score(const FeatureVector& raw) const {
  if (raw.size() != input_schema_.size()) throw SchemaError("linear model: arity mismatch");
  const auto dense = dense_zero_missing(pipeline_.apply(raw));
  return linear_score(dense, intercept_, coefficients_);
}

double LinearModel::coefficient(const std::string& encoded_name) const {
  const auto& schema = encoded_schema();
  const auto i = schema.index_of(encoded_name);
  if (i >= schema.size()) throw SchemaError("no encoded column '" + encoded_name + "'");
  return coefficients_[i];
}

bool LinearModel::all_coefficients_nonnegative() const noexcept {
  return std::all_of(coefficients_.begin(), coefficients_.end(), [](double b) { return b >= 0.0; });
}

void LinearModel::write(std::ostream& os) const {
  TextWriter w(os);
  w.key("linear-model").value(1);
  write_schema(w, input_schema_);
  pipeline_.write(w);
  w.key("intercept").value(intercept_);
  const auto& enc = encoded_schema();
  w.key("coefficients").value(coefficients_.size());
  for (std::size_t i = 0; i < coefficients_.size(); ++i) {
    w.key("coef").token(enc[i].name).value(coefficients_[i]);
  }
  w.end_line();
}

LinearModel LinearModel::read(std::istream& is) {
  TextReader r(is);
  r.expect("linear-model", 1);
  auto schema = read_schema(r);
  auto pipeline = Pipeline::read(r);
  const double intercept = parse_double(r.expect("intercept", 1)[0]);
  const auto n = static_cast<std::size_t>(parse_int(r.expect("coefficients", 1)[0]));
  std::vector<double> coef;
  coef.reserve(n);
  for (std::size_t i = 0; i < n; ++i) coef.push_back(parse_double(r.expect("coef", 2)[1]));
  return LinearModel(std::move(schema), std::move(pipeline), intercept, std::move(coef));
}

}  // namespace stratshield
