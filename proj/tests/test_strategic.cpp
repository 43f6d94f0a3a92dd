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

#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "stratshield/baselines.hpp"
#include "stratshield/error.hpp"
#include "stratshield/harness.hpp"
#include "stratshield/hc_ensemble.hpp"
#include "stratshield/mincut.hpp"
#include "stratshield/strategic.hpp"

using namespace stratshield;

namespace {

const auto h = FeatureValue::categorical(0);
const auto l = FeatureValue::categorical(1);
const auto m = FeatureValue::missing();

ClassifierHandle accept_set(std::vector<FeatureVector> accepted) {
  ClassifierHandle f;
  f.predict = [accepted](const FeatureVector& x) {
    for (const auto& a : accepted) {
      if (a == x) return 1;
    }
    return 0;
  };
  return f;
}

Dataset example1_rows() {
  const auto ex = example1();
  Dataset d{ex.schema, {}};
  for (const auto& [x, c] : ex.distribution.entries()) {
    for (std::int64_t i = 0; i < c.pos; ++i) d.rows.push_back({x, 1});
    for (std::int64_t i = 0; i < c.neg; ++i) d.rows.push_back({x, 0});
  }
  return d;
}

std::vector<FeatureVector> grid2() {
  std::vector<FeatureVector> out;
  for (auto a : {h, l, m}) {
    for (auto b : {h, l, m}) out.push_back(FeatureVector{a, b});
  }
  return out;
}

}  // namespace

TEST_CASE("truthful handles report the true vector") {
  auto f = accept_set({FeatureVector{m, h}});
  f.truthful = true;
  const auto br = best_response(f, FeatureVector{l, h});
  CHECK(br.report == FeatureVector{l, h});
  CHECK(br.outcome == 0);
}

TEST_CASE("the first maximiser in withholding order wins") {
  const auto f = accept_set({FeatureVector{h, m}, FeatureVector{m, m}});
  const auto br = best_response(f, FeatureVector{h, h});
  CHECK(br.outcome == 1);
  CHECK(br.report == FeatureVector{h, m});
  CHECK(best_response_brute_force(f, FeatureVector{h, h}).report == FeatureVector{h, m});
  ClassifierHandle one;
  one.predict = [](const FeatureVector&) { return 1; };
  CHECK(best_response(one, FeatureVector{l, l}).report == FeatureVector{l, l});
}

TEST_CASE("two-test example under strategic reports") {
  const auto ex = example1();
  const auto model = train_mincut(ex.schema, ex.distribution).model;
  ClassifierHandle f;
  f.predict = [&](const FeatureVector& x) { return model.predict(x); };
  f.truthful = true;
  CHECK(best_response(f, FeatureVector{l, h}).outcome == 0);
  CHECK(best_response_brute_force(f, FeatureVector{l, h}).outcome == 0);

  const auto rows = example1_rows();
  REQUIRE(rows.size() == 80);
  CHECK(strategic_accuracy(f, rows) == Rational{58, 80});
  CHECK(truthful_accuracy(f, rows) == Rational{58, 80});

  // The unconstrained Bayes rule accepts (*,h), which (l,h) can reach.
  const auto ideal = accept_set({FeatureVector{h, h}, FeatureVector{h, l}, FeatureVector{h, m}, FeatureVector{m, h}});
  const auto br = best_response(ideal, FeatureVector{l, h});
  CHECK(br.report == FeatureVector{m, h});
  CHECK(br.outcome == 1);
  CHECK(truthful_accuracy(ideal, rows) == Rational{60, 80});
  CHECK(strategic_accuracy(ideal, rows) == Rational{56, 80});
}

TEST_CASE("always-accept scores the base rate") {
  ClassifierHandle f;
  f.predict = [](const FeatureVector&) { return 1; };
  const auto rows = example1_rows();
  CHECK(strategic_accuracy(f, rows) == Rational{36, 80});
  CHECK_THROWS_AS(strategic_accuracy(f, Dataset{rows.schema, {}}), Error);
}

TEST_CASE("direct revelation") {
  const auto f = accept_set({FeatureVector{m, h}});
  const auto g = direct_revelation(f);
  CHECK(g.truthful);
  for (const auto& x : grid2()) {
    const bool want = x == FeatureVector{h, h} || x == FeatureVector{l, h} || x == FeatureVector{m, h};
    CHECK(g.predict(x) == static_cast<int>(want));
    CHECK(g.predict(x) == oracle::best_outcome(f.predict, x));
  }
  const auto gg = direct_revelation(g);
  for (const auto& x : grid2()) CHECK(gg.predict(x) == g.predict(x));

  ClassifierHandle t;
  t.predict = [](const FeatureVector& x) { return x.present_count() == 2 ? 1 : 0; };
  const auto tt = direct_revelation(t);
  for (const auto& x : grid2()) CHECK(tt.predict(x) == t.predict(x));
  CHECK(audit_truthfulness_full(g, Dataset{example1().schema, {{FeatureVector{l, h}, 0}}}).clean());
}

TEST_CASE("imputation helper") {
  const FeatureVector fill{FeatureValue::numeric(2.0), m};
  const auto y = impute(FeatureVector{m, m}, fill);
  CHECK(y[0].number() == 2.0);
  CHECK(y[1].is_missing());
}

TEST_CASE("audits") {
  std::mt19937_64 rng(7);
  const auto d = oracle::random_numeric(rng, 80, 4, 0.25);

  const auto mc = train_mincut(d);
  ClassifierHandle a;
  a.predict = [&](const FeatureVector& x) { return mc.predict(x); };
  CHECK(audit_truthfulness_full(a, d).clean());

  HcConfig cfg;
  cfg.subsets = SubsetStrategy::all_subsets_of_top(4);
  const auto e = hc_train(d, cfg).ensemble;
  ClassifierHandle b;
  b.predict = [&](const FeatureVector& x) { return e.predict(x); };
  CHECK(audit_truthfulness_full(b, d).clean());

  const auto ic = train_iclr(d);
  ClassifierHandle c;
  c.predict = [&](const FeatureVector& x) { return ic.predict(x); };
  const auto rep = audit_truthfulness(c, d, 10, 3);
  CHECK(rep.clean());
  CHECK(rep.checks == 800);
  CHECK(rep.seed == 3);

  ClassifierHandle k;
  k.predict = [](const FeatureVector&) { return 1; };
  CHECK(audit_truthfulness_full(k, d).clean());

  // Imputation rewards hiding a low value.
  const ImputedLrModel imp(FeatureVector{FeatureValue::numeric(5.0)},
                           LinearModel(oracle::numeric_schema(1), Pipeline{}, -3.0, {1.0}));
  ClassifierHandle bad;
  bad.predict = [&](const FeatureVector& x) { return imp.predict(x); };
  const Dataset one{oracle::numeric_schema(1), {{FeatureVector{FeatureValue::numeric(1.0)}, 0}}};
  const auto full = audit_truthfulness_full(bad, one);
  REQUIRE(full.violations.size() == 1);
  CHECK(full.violations[0].report == FeatureVector{m});
  CHECK(full.violations[0].truthful_outcome == 0);
  CHECK(full.violations[0].report_outcome == 1);
  CHECK(imp.best_response(one.rows[0].x) == FeatureVector{m});
}

TEST_CASE("property: truthful classifiers lose nothing to strategy") {
  std::mt19937_64 rng(13);
  for (int t = 0; t < 6; ++t) {
    const auto train = oracle::random_binary(rng, 80, 4, 0.3);
    const auto test = oracle::random_binary(rng, 80, 4, 0.3);
    const auto mc = train_mincut(train);
    ClassifierHandle f;
    f.predict = [&](const FeatureVector& x) { return mc.predict(x); };
    const auto tru = truthful_accuracy(f, test);
    CHECK(strategic_accuracy(f, test) == tru);
    f.truthful = true;
    CHECK(strategic_accuracy(f, test) == tru);
  }
}

TEST_CASE("property: imputed-LR fast path matches exhaustive search") {
  std::mt19937_64 rng(19);
  for (int t = 0; t < 20; ++t) {
    Dataset d = t % 2 ? oracle::random_numeric(rng, 60, 5, 0.2) : oracle::random_binary(rng, 60, 5, 0.2);
    const auto model = train_imp_lr(d);
    ClassifierHandle f;
    f.predict = [&](const FeatureVector& x) { return model.predict(x); };
    for (const auto& row : d.rows) {
      const auto fast = best_response_imputed_linear(model.inner(), model.impute_values(), row.x);
      CHECK(oracle::reports_to(row.x, fast));
      CHECK(model.predict(fast) == oracle::best_outcome(f.predict, row.x));
      CHECK(model.score(fast) >= model.score(row.x));
    }
  }
}
