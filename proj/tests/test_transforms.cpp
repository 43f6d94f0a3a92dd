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

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "doctest.h"
#include "oracles.hpp"
#include "stratshield/error.hpp"
#include "stratshield/serialize.hpp"
#include "stratshield/transforms.hpp"

using namespace stratshield;

namespace {

const auto m = FeatureValue::missing();
FeatureValue num(double v) { return FeatureValue::numeric(v); }

Dataset column(std::vector<double> v, std::vector<int> y) {
  Dataset d{FeatureSchema::numeric(1), {}};
  for (std::size_t i = 0; i < v.size(); ++i) d.rows.push_back({FeatureVector{num(v[i])}, y[i]});
  return d;
}

// Textbook recursive MDLP, written out directly.
double entropy(const std::vector<std::pair<double, int>>& s, std::size_t a, std::size_t b) {
  std::map<int, double> c;
  for (std::size_t i = a; i < b; ++i) c[s[i].second] += 1.0;
  double h = 0.0;
  for (auto& [k, n] : c) {
    const double p = n / static_cast<double>(b - a);
    h -= p * std::log2(p);
  }
  return h;
}

std::size_t classes(const std::vector<std::pair<double, int>>& s, std::size_t a, std::size_t b) {
  std::set<int> c;
  for (std::size_t i = a; i < b; ++i) c.insert(s[i].second);
  return c.size();
}

void mdlp_ref(const std::vector<std::pair<double, int>>& s, std::size_t a, std::size_t b, std::vector<double>& cuts) {
  const double n = static_cast<double>(b - a);
  const double ent = entropy(s, a, b);
  double best = INFINITY;
  std::size_t at = 0;
  for (std::size_t i = a + 1; i < b; ++i) {
    if (s[i].first == s[i - 1].first) continue;
    const double e = ((i - a) * entropy(s, a, i) + (b - i) * entropy(s, i, b)) / n;
    if (e < best) {
      best = e;
      at = i;
    }
  }
  if (at == 0) return;
  const double gain = ent - best;
  const double k = classes(s, a, b), k1 = classes(s, a, at), k2 = classes(s, at, b);
  const double delta = std::log2(std::pow(3.0, k) - 2.0) - (k * ent - k1 * entropy(s, a, at) - k2 * entropy(s, at, b));
  if (!(gain > std::log2(n - 1.0) / n + delta / n)) return;
  cuts.push_back((s[at - 1].first + s[at].first) / 2.0);
  mdlp_ref(s, a, at, cuts);
  mdlp_ref(s, at, b, cuts);
}

}  // namespace

TEST_CASE("shift makes training values nonnegative and clamps below-min test values") {
  const auto d = column({-3.0, 1.0, 5.0}, {0, 1, 1});
  const auto t = ShiftTransform::fit(d);
  CHECK(t.apply(FeatureVector{num(-3.0)})[0].number() == 0.0);
  CHECK(t.apply(FeatureVector{num(5.0)})[0].number() == 8.0);
  CHECK(t.apply(FeatureVector{num(-10.0)})[0].number() == 0.0);
  CHECK(t.apply(FeatureVector{m})[0].is_missing());
  const auto r = shift_nonnegative(d);
  for (const auto& row : r.data.rows) CHECK(row.x[0].number() >= 0.0);
}

TEST_CASE("scale divides by the training max") {
  const auto d = column({0.0, 2.0, 4.0}, {0, 1, 1});
  const auto t = ScaleTransform::fit_max(d);
  CHECK(t.apply(FeatureVector{num(2.0)})[0].number() == doctest::Approx(0.5));
  CHECK(t.apply(FeatureVector{m})[0].is_missing());
  const auto z = ScaleTransform::fit_max(column({0.0, 0.0}, {0, 1}));
  CHECK(z.apply(FeatureVector{num(0.0)})[0].number() == 0.0);
}

TEST_CASE("inversion appends lambda - x and keeps Missing") {
  const auto d = column({0.0, 2.0, 4.0}, {1, 0, 0});
  const auto t = InversionTransform::fit(d, FeatureSubset{0});
  REQUIRE(t.output_schema().size() == 2);
  CHECK(t.output_schema()[1].name == "f0~inv");
  const auto y = t.apply(FeatureVector{num(1.0)});
  CHECK(y[0].number() == 1.0);
  CHECK(y[1].number() == 3.0);
  CHECK(t.apply(FeatureVector{num(9.0)})[1].number() == 0.0);
  const auto z = t.apply(FeatureVector{m});
  CHECK(z[0].is_missing());
  CHECK(z[1].is_missing());
  const Dataset cat{FeatureSchema({{"c", FeatureKind::kCategorical, {"a"}}}), {{FeatureVector{FeatureValue::categorical(0)}, 1}}};
  CHECK_THROWS_AS(InversionTransform::fit(cat, FeatureSubset{0}), TypeError);
}

TEST_CASE("one-hot over seen symbols") {
  const FeatureSchema s({{"c", FeatureKind::kCategorical, {"a", "b", "z"}}, {"n", FeatureKind::kNumeric, {}}});
  Dataset d{s, {{FeatureVector{FeatureValue::categorical(0), num(1)}, 1},
                {FeatureVector{FeatureValue::categorical(1), num(2)}, 0}}};
  const auto t = OneHotTransform::fit(d);
  REQUIRE(t.output_schema().size() == 3);
  CHECK(t.output_schema()[0].name == "c=a");
  CHECK(t.output_schema()[1].name == "c=b");
  const auto y = t.apply(FeatureVector{FeatureValue::categorical(1), num(7)});
  CHECK(y[0].number() == 0.0);
  CHECK(y[1].number() == 1.0);
  CHECK(y[2].number() == 7.0);
  const auto unseen = t.apply(FeatureVector{FeatureValue::categorical(2), m});
  CHECK(unseen[0].number() == 0.0);
  CHECK(unseen[1].number() == 0.0);
  CHECK(unseen[2].is_missing());
  const auto miss = t.apply(FeatureVector{m, m});
  CHECK(miss[0].is_missing());
  CHECK(miss[1].is_missing());
}

TEST_CASE("select keeps listed features in order") {
  const auto s = oracle::numeric_schema(4);
  const SelectTransform t(s, FeatureSubset{3, 1});
  CHECK(t.output_schema()[0].name == "x1");
  CHECK(t.apply(FeatureVector{num(0), num(1), num(2), m}) == FeatureVector{num(1), m});
}

TEST_CASE("MDLP: clean threshold and no-split cases") {
  const auto cuts = discretize_mdlp(std::vector<std::pair<double, int>>{
      {1, 0}, {2, 0}, {3, 0}, {4, 0}, {5, 0}, {6, 1}, {7, 1}, {8, 1}, {9, 1}, {10, 1}});
  REQUIRE(cuts.size() == 1);
  CHECK(cuts[0] == 5.5);
  CHECK(discretize_mdlp(std::vector<std::pair<double, int>>{{1, 1}, {2, 1}, {3, 1}}).empty());
  CHECK(discretize_mdlp(std::vector<std::pair<double, int>>{{1, 0}, {2, 1}, {3, 0}, {4, 1}}).empty());
  CHECK(discretize_mdlp(std::vector<std::pair<double, int>>{}).empty());
}

TEST_CASE("MDLP matches a direct recursive implementation on random columns") {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int t = 0; t < 40; ++t) {
    std::vector<std::pair<double, int>> s;
    const int n = 30 + t * 5;
    for (int i = 0; i < n; ++i) {
      const double v = std::round(g(rng) * 10.0) / 10.0;
      s.push_back({v, (v + 0.7 * g(rng) > (t % 3) * 0.3) ? 1 : 0});
    }
    auto sorted = s;
    std::stable_sort(sorted.begin(), sorted.end(), [](auto& a, auto& b) { return a.first < b.first; });
    std::vector<double> want;
    mdlp_ref(sorted, 0, sorted.size(), want);
    std::sort(want.begin(), want.end());
    CHECK(discretize_mdlp(s) == want);
  }
}

TEST_CASE("bin index counts cuts at or below v") {
  const std::vector<double> cuts{1.0, 2.0};
  CHECK(bin_index(0.5, cuts) == 0);
  CHECK(bin_index(1.0, cuts) == 1);
  CHECK(bin_index(1.5, cuts) == 1);
  CHECK(bin_index(9.0, cuts) == 2);
  const auto b = bin_apply(num(1.5), cuts);
  REQUIRE(b.size() == 3);
  CHECK(b[1].number() == 1.0);
  CHECK(b[0].number() + b[2].number() == 0.0);
  for (const auto& v : bin_apply(m, cuts)) CHECK(v.is_missing());
}

TEST_CASE("discretize and bins keep Missing and use fitted cuts") {
  const auto d = column({1, 2, 3, 4, 5, 6, 7, 8, 9, 10}, {0, 0, 0, 0, 0, 1, 1, 1, 1, 1});
  const auto t = DiscretizeTransform::fit(d);
  CHECK(t.output_schema()[0].kind == FeatureKind::kCategorical);
  CHECK(t.apply(FeatureVector{num(3)})[0].category() == 0);
  CHECK(t.apply(FeatureVector{num(7)})[0].category() == 1);
  CHECK(t.apply(FeatureVector{m})[0].is_missing());
  const auto b = BinTransform::fit(d);
  CHECK(b.output_schema().size() == 2);
  CHECK(b.image_of(0) == std::vector<std::size_t>{0, 1});
  CHECK(b.apply(FeatureVector{num(7)}) == FeatureVector{num(0), num(1)});
}

TEST_CASE("pipeline round-trips through text") {
  std::mt19937_64 rng(5);
  auto d = oracle::random_numeric(rng, 60, 3, 0.2);
  Pipeline p;
  auto shift = std::make_shared<ShiftTransform>(ShiftTransform::fit(d));
  p.push(shift);
  auto cur = p.apply(d);
  auto inv = std::make_shared<InversionTransform>(InversionTransform::fit(cur, FeatureSubset{1}));
  p.push(inv);
  cur = p.apply(d);
  p.push(std::make_shared<BinTransform>(BinTransform::fit(cur)));
  cur = p.apply(d);
  p.push(std::make_shared<ScaleTransform>(ScaleTransform::fit_max(cur)));

  std::stringstream ss;
  TextWriter w(ss);
  p.write(w);
  w.end_line();
  TextReader r(ss);
  const auto q = Pipeline::read(r);
  REQUIRE(q.steps().size() == p.steps().size());
  for (const auto& row : d.rows) CHECK(q.apply(row.x) == p.apply(row.x));
  CHECK_THROWS_AS(p.push(std::make_shared<ShiftTransform>(ShiftTransform::fit(d))), SchemaError);
}

TEST_CASE("property: every encoding step maps Missing to Missing cell-wise") {
  std::mt19937_64 rng(9);
  auto d = oracle::random_numeric(rng, 80, 4, 0.25);
  const auto shift = ShiftTransform::fit(d);
  const auto bins = BinTransform::fit(shift.Transform::apply(d));
  for (const auto& row : d.rows) {
    const auto y = bins.apply(shift.apply(row.x));
    for (std::size_t i = 0; i < 4; ++i) {
      for (auto j : bins.image_of(i)) CHECK(y[j].is_missing() == row.x[i].is_missing());
    }
  }
}

TEST_CASE("dense encoding rejects categorical values") {
  CHECK(dense_zero_missing(FeatureVector{num(2), m}) == std::vector<double>{2.0, 0.0});
  CHECK_THROWS_AS(dense_zero_missing(FeatureVector{FeatureValue::categorical(0)}), TypeError);
}
