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

#include <map>
#include <random>
#include <sstream>

#include "doctest.h"
#include "oracles.hpp"
#include "stratshield/baselines.hpp"
#include "stratshield/error.hpp"
#include "stratshield/harness.hpp"

using namespace stratshield;

namespace {

const auto h = FeatureValue::categorical(0);
const auto l = FeatureValue::categorical(1);
const auto m = FeatureValue::missing();
FeatureValue num(double v) { return FeatureValue::numeric(v); }

Dataset complete_numeric(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return oracle::random_numeric(rng, 100, 3, 0.0);
}

}  // namespace

TEST_CASE("majority vote per exact vector") {
  const auto s = oracle::binary_schema(2);
  Dataset d{s, {{FeatureVector{h, h}, 1}, {FeatureVector{h, h}, 1}, {FeatureVector{h, h}, 0},
                {FeatureVector{l, m}, 1}, {FeatureVector{l, m}, 0}}};
  const auto maj = train_maj(d);
  CHECK(maj.predict(FeatureVector{h, h}) == 1);
  CHECK(maj.predict(FeatureVector{l, m}) == 0);
  CHECK(maj.predict(FeatureVector{l, l}) == 0);
  CHECK(maj.table().size() == 2);
}

TEST_CASE("majority vote on the two-test example") {
  const auto ex = example1();
  Dataset d{ex.schema, {}};
  for (const auto& [x, c] : ex.distribution.entries()) {
    for (std::int64_t i = 0; i < c.pos; ++i) d.rows.push_back({x, 1});
    for (std::int64_t i = 0; i < c.neg; ++i) d.rows.push_back({x, 0});
  }
  const auto maj = train_maj(d);
  for (const auto& [x, c] : ex.distribution.entries()) CHECK(maj.predict(x) == (c.pos > c.neg ? 1 : 0));
  CHECK(maj.predict(FeatureVector{h, h}) == 1);
  CHECK(maj.predict(FeatureVector{m, h}) == 1);
  CHECK(maj.predict(FeatureVector{l, h}) == 0);
}

TEST_CASE("property: majority vote equals the per-vector Bayes labels") {
  std::mt19937_64 rng(4);
  for (int t = 0; t < 10; ++t) {
    const auto d = oracle::random_binary(rng, 150, 3, 0.3);
    std::map<FeatureVector, std::pair<int, int>> counts;
    for (const auto& row : d.rows) (row.y ? counts[row.x].first : counts[row.x].second)++;
    const auto maj = train_maj(d);
    for (const auto& [x, c] : counts) CHECK(maj.predict(x) == (c.first > c.second ? 1 : 0));
  }
}

TEST_CASE("imputation values") {
  const FeatureSchema s({{"n", FeatureKind::kNumeric, {}},
                         {"c", FeatureKind::kCategorical, {"a", "b", "c"}},
                         {"z", FeatureKind::kNumeric, {}}});
  Dataset d{s, {{FeatureVector{num(1), FeatureValue::categorical(2), m}, 0},
                {FeatureVector{num(4), FeatureValue::categorical(1), m}, 1},
                {FeatureVector{m, FeatureValue::categorical(2), m}, 1},
                {FeatureVector{num(7), FeatureValue::categorical(1), m}, 0}}};
  const auto v = fit_impute_values(d);
  CHECK(v[0].number() == 4.0);
  CHECK(v[1].category() == 1);
  CHECK(v[2].is_missing());
}

TEST_CASE("imputed LR on complete data is plain LR") {
  const auto d = complete_numeric(1);
  const auto imp = train_imp_lr(d);
  const auto lr = train_logistic(d);
  for (const auto& row : d.rows) CHECK(imp.score(row.x) == lr.score(row.x));
}

TEST_CASE("a withheld value scores as the training mean") {
  Dataset d{oracle::numeric_schema(2), {}};
  for (int i = 0; i < 30; ++i) d.rows.push_back({FeatureVector{num(i % 7), i % 3 ? num(i) : m}, i % 2});
  const auto imp = train_imp_lr(d);
  const auto mean = imp.impute_values()[0].number();
  CHECK(imp.score(FeatureVector{m, num(3)}) == imp.score(FeatureVector{num(mean), num(3)}));
  CHECK(imp.proba(FeatureVector{m, m}) == doctest::Approx(sigmoid(imp.score(FeatureVector{m, m}))));
}

TEST_CASE("reduced-feature LR routes by pattern") {
  const auto d = complete_numeric(2);
  const auto rf = train_rf_lr(d);
  CHECK(rf.models().size() == 1);
  const auto lr = train_logistic(d);
  for (const auto& row : d.rows) {
    CHECK(rf.predict(row.x) == lr.predict(row.x));
    CHECK(*rf.proba(row.x) == doctest::Approx(lr.proba(row.x)).epsilon(1e-12));
  }
  CHECK(rf.predict(FeatureVector{m, num(1), num(1)}) == 0);
  CHECK(rf.proba(FeatureVector{m, num(1), num(1)}) == 0.0);
}

TEST_CASE("pattern models train on every row that has the pattern") {
  Dataset d{oracle::numeric_schema(2), {}};
  for (int i = 0; i < 20; ++i) d.rows.push_back({FeatureVector{num(i), num(i)}, i >= 10});
  d.rows.push_back({FeatureVector{num(3), m}, 1});
  d.rows.push_back({FeatureVector{m, m}, 1});
  const auto rf = train_rf_lr(d);
  CHECK(rf.models().size() == 3);
  // Pattern {0} sees 21 rows, 11 positive: it learns a threshold.
  CHECK(rf.predict(FeatureVector{num(18), m}) == 1);
  CHECK(rf.predict(FeatureVector{num(0), m}) == 0);
  // The empty pattern's only row is positive.
  CHECK(rf.predict(FeatureVector{m, m}) == 1);
}

TEST_CASE("non-truthful baselines can lose to strategic reports") {
  Dataset d{oracle::numeric_schema(1), {}};
  for (int i = 0; i < 40; ++i) d.rows.push_back({FeatureVector{num(i)}, i >= 20});
  const auto imp = train_imp_lr(d);
  // Below-mean values gain by withholding.
  const auto x = FeatureVector{num(2)};
  CHECK(imp.predict(x) == 0);
  CHECK(imp.best_response(x) == FeatureVector{m});
  CHECK(imp.predict(imp.best_response(x)) == 1);
}

TEST_CASE("baseline serialization round-trips") {
  std::mt19937_64 rng(6);
  const auto d = oracle::random_numeric(rng, 80, 3, 0.3);
  const auto b = oracle::random_binary(rng, 80, 3, 0.3);
  {
    const auto a = train_maj(b);
    std::stringstream ss;
    a.write(ss);
    const auto c = MajModel::read(ss);
    for (const auto& row : b.rows) CHECK(c.predict(row.x) == a.predict(row.x));
    CHECK(c.table() == a.table());
  }
  {
    const auto a = train_imp_lr(d);
    std::stringstream ss;
    a.write(ss);
    const auto c = ImputedLrModel::read(ss);
    for (const auto& row : d.rows) CHECK(c.score(row.x) == a.score(row.x));
  }
  {
    const auto a = train_rf_lr(d);
    std::stringstream ss;
    a.write(ss);
    const auto c = ReducedFeatureModel::read(ss);
    CHECK(c.models().size() == a.models().size());
    for (const auto& row : d.rows) {
      CHECK(c.predict(row.x) == a.predict(row.x));
      CHECK(c.proba(row.x) == a.proba(row.x));
    }
  }
  std::stringstream bad("rf-lr-model 2\n");
  CHECK_THROWS_AS(ReducedFeatureModel::read(bad), ParseError);
}
