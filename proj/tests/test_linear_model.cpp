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

#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"
#include "oracles.hpp"
#include "stratshield/error.hpp"
#include "stratshield/linear_model.hpp"

using namespace stratshield;

namespace {

FeatureValue num(double v) { return FeatureValue::numeric(v); }

Dataset threshold_data(std::size_t n, bool below, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Dataset d{oracle::numeric_schema(1), {}};
  for (std::size_t i = 0; i < n; ++i) {
    const double x = u(rng);
    d.rows.push_back({FeatureVector{num(x)}, (below ? x < 0.5 : x > 0.5) ? 1 : 0});
  }
  return d;
}

double accuracy(const LinearModel& model, const Dataset& d) {
  std::size_t ok = 0;
  for (const auto& row : d.rows) ok += static_cast<std::size_t>(model.predict(row.x) == row.y);
  return static_cast<double>(ok) / static_cast<double>(d.size());
}

}  // namespace

TEST_CASE("sigmoid") {
  CHECK(sigmoid(0.0) == 0.5);
  CHECK(sigmoid(std::log(3.0)) == doctest::Approx(0.75).epsilon(1e-15));
  for (double t : {-800.0, -30.0, -1.0, 0.3, 5.0, 40.0, 800.0}) {
    CHECK(sigmoid(t) + sigmoid(-t) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(std::isfinite(sigmoid(t)));
  }
  CHECK(sigmoid(-1.0) < sigmoid(1.0));
}

TEST_CASE("score arithmetic") {
  const auto schema = oracle::numeric_schema(1);
  const LinearModel model(schema, Pipeline{}, -1.0, {0.5});
  CHECK(model.score(FeatureVector{num(4.0)}) == 1.0);
  CHECK(model.predict(FeatureVector{num(4.0)}) == 1);
  CHECK(model.score(FeatureVector{FeatureValue::missing()}) == -1.0);
  const LinearModel zero(oracle::numeric_schema(3), Pipeline{}, 0.25, {0.0, 0.0, 0.0});
  CHECK(zero.score(FeatureVector{num(1), num(-7), num(3)}) == 0.25);
  CHECK_THROWS_AS(model.score(FeatureVector{num(1), num(2)}), SchemaError);
  CHECK_THROWS_AS(LinearModel(schema, Pipeline{}, 0.0, {1.0, 2.0}), SchemaError);
}

TEST_CASE("analytic gradient matches central differences") {
  std::mt19937_64 rng(99);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int ds = 0; ds < 3; ++ds) {
    const auto data = oracle::random_numeric(rng, 80 + 40 * ds, 3 + ds, 0.2);
    const auto dense = encode_dense(fit_linear_encoding(data), data);
    for (int p = 0; p < 10; ++p) {
      const double b0 = g(rng);
      std::vector<double> b(dense.dims());
      for (auto& v : b) v = 2.0 * g(rng);
      const auto grad = logistic_gradient(dense, b0, b);
      const double h = 1e-6;
      double diff2 = 0.0, norm2 = 0.0;
      const double fd0 =
          (oracle::log_loss(dense.x, dense.y, b0 + h, b) - oracle::log_loss(dense.x, dense.y, b0 - h, b)) / (2 * h);
      diff2 += (fd0 - grad.intercept) * (fd0 - grad.intercept);
      norm2 += fd0 * fd0;
      for (std::size_t i = 0; i < b.size(); ++i) {
        auto up = b, dn = b;
        up[i] += h;
        dn[i] -= h;
        const double fd = (oracle::log_loss(dense.x, dense.y, b0, up) - oracle::log_loss(dense.x, dense.y, b0, dn)) / (2 * h);
        diff2 += (fd - grad.coefficients[i]) * (fd - grad.coefficients[i]);
        norm2 += fd * fd;
      }
      CHECK(std::sqrt(diff2 / norm2) <= 1e-5);
      CHECK(mean_log_loss(dense, b0, b) == doctest::Approx(oracle::log_loss(dense.x, dense.y, b0, b)).epsilon(1e-12));
    }
  }
}

TEST_CASE("intercept gradient vanishes at zero on balanced data") {
  Dataset d{oracle::numeric_schema(1), {{FeatureVector{num(1)}, 1}, {FeatureVector{num(2)}, 0}}};
  const auto dense = encode_dense(fit_linear_encoding(d), d);
  CHECK(logistic_gradient(dense, 0.0, std::vector<double>{0.0}).intercept == 0.0);
}

TEST_CASE("separable 1-D data is fitted exactly within 500 epochs") {
  Dataset d{oracle::numeric_schema(1), {}};
  for (int i = 1; i <= 50; ++i) {
    d.rows.push_back({FeatureVector{num(1.0 + i / 50.0)}, 1});
    d.rows.push_back({FeatureVector{num(-1.0 - i / 50.0)}, 0});
  }
  TrainConfig cfg;
  cfg.max_epochs = 500;
  const auto fit = fit_logistic(encode_dense(fit_linear_encoding(d), d), cfg, false);
  CHECK(fit.epochs <= 500);
  CHECK(fit.loss_trace.back() == 0.0);
  CHECK(accuracy(train_logistic(d, cfg), d) == 1.0);
}

TEST_CASE("all-positive labels push the intercept up") {
  Dataset d{oracle::numeric_schema(2), {}};
  for (int i = 0; i < 20; ++i) d.rows.push_back({FeatureVector{num(i), num(-i)}, 1});
  const auto model = train_logistic(d);
  CHECK(model.intercept() > 0.0);
  for (const auto& row : d.rows) CHECK(model.predict(row.x) == 1);
}

TEST_CASE("IC-LR zeroes a negatively correlated feature") {
  const auto train = threshold_data(1000, true, 1);
  const auto model = train_iclr(train);
  CHECK(model.coefficients().size() == 1);
  CHECK(model.coefficients()[0] == 0.0);
  CHECK(model.all_coefficients_nonnegative());

  EncodingOptions enc;
  enc.invert_all_numeric = true;
  const auto inv = train_iclr(train, {}, enc);
  CHECK(inv.coefficient("x0") == 0.0);
  CHECK(inv.coefficient("x0~inv") > 0.0);
  CHECK(accuracy(inv, threshold_data(1000, true, 2)) > 0.9);
}

TEST_CASE("IC-LR equals LR when the projection never binds") {
  const auto train = threshold_data(500, false, 3);
  const auto a = train_iclr(train);
  const auto b = train_logistic(train);
  CHECK(a.intercept() == doctest::Approx(b.intercept()).epsilon(1e-3));
  CHECK(a.coefficients()[0] == doctest::Approx(b.coefficients()[0]).epsilon(1e-3));
}

TEST_CASE("clamp_intercept also clamps the intercept") {
  const auto train = threshold_data(300, false, 4);
  TrainConfig cfg;
  cfg.clamp_intercept = true;
  CHECK(train_iclr(train, cfg).intercept() >= 0.0);
  CHECK(train_iclr(train).intercept() < 0.0);
}

TEST_CASE("projection is idempotent") {
  std::vector<double> v{-1.0, 0.0, 2.0, -0.5};
  project_nonnegative(v);
  const auto once = v;
  project_nonnegative(v);
  CHECK(v == once);
  CHECK(v == std::vector<double>{0.0, 0.0, 2.0, 0.0});
}

TEST_CASE("property: IC-LR scores never rise when features are withheld") {
  std::mt19937_64 rng(17);
  for (int t = 0; t < 10; ++t) {
    const auto data = oracle::random_numeric(rng, 120, 5, 0.2);
    EncodingOptions enc;
    enc.invert_all_numeric = t % 2 == 1;
    enc.bins = t % 3 == 2;
    const auto model = train_iclr(data, {}, enc);
    CHECK(model.all_coefficients_nonnegative());
    for (std::size_t r = 0; r < 20; ++r) {
      const auto& x = data.rows[r].x;
      const double s = model.score(x);
      for (const auto& y : oracle::all_projections(x)) CHECK(model.score(y) <= s);
    }
  }
}

TEST_CASE("training is deterministic and round-trips exactly") {
  std::mt19937_64 rng(23);
  const auto data = oracle::random_numeric(rng, 150, 4, 0.1);
  const auto a = train_logistic(data);
  const auto b = train_logistic(data);
  CHECK(a.intercept() == b.intercept());
  CHECK(a.coefficients() == b.coefficients());
  std::stringstream ss;
  a.write(ss);
  const auto c = LinearModel::read(ss);
  CHECK(c.intercept() == a.intercept());
  CHECK(c.coefficients() == a.coefficients());
  for (const auto& row : data.rows) CHECK(c.score(row.x) == a.score(row.x));
}

TEST_CASE("mixed categorical input trains through one-hot") {
  const FeatureSchema s({{"c", FeatureKind::kCategorical, {"a", "b"}}, {"n", FeatureKind::kNumeric, {}}});
  Dataset d{s, {}};
  for (int i = 0; i < 40; ++i) {
    d.rows.push_back({FeatureVector{FeatureValue::categorical(i % 2), num(i % 5)}, i % 2});
  }
  const auto model = train_iclr(d);
  CHECK(model.encoded_schema().size() == 3);
  CHECK(model.coefficient("c=b") > 0.0);
  CHECK(accuracy(model, d) == 1.0);
}

TEST_CASE("argument errors") {
  Dataset d{oracle::numeric_schema(1), {{FeatureVector{num(1)}, 1}, {FeatureVector{num(0)}, 0}}};
  TrainConfig cfg;
  cfg.learning_rate.eta0 = 0.0;
  CHECK_THROWS_AS(train_logistic(d, cfg), Error);
  CHECK_THROWS_AS(train_logistic(Dataset{oracle::numeric_schema(1), {}}), Error);
  LearningRate lr{LearningRate::Schedule::kInverseSqrt, 1.0};
  CHECK(lr.at(3) == 0.5);
}
