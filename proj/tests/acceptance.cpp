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

// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any
// failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "stratshield/baselines.hpp"
#include "stratshield/classifier.hpp"
#include "stratshield/harness.hpp"
#include "stratshield/hc_ensemble.hpp"
#include "stratshield/linear_model.hpp"
#include "stratshield/mincut.hpp"
#include "stratshield/strategic.hpp"

using namespace stratshield;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

int failures = 0;

void run(int id, const char* title, double budget_s, const std::function<Outcome()>& body) {
  const auto t0 = Clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
  if (budget_s > 0 && secs >= budget_s) {
    o.pass = false;
    o.detail += " (over time budget)";
  }
  std::printf("[%s] %d: %s: %s [%.2fs]\n", o.pass ? "PASS" : "FAIL", id, title, o.detail.c_str(), secs);
  std::fflush(stdout);
  failures += o.pass ? 0 : 1;
}

std::string str(const Rational& r) {
  const auto q = r.reduced();
  return std::to_string(q.num) + "/" + std::to_string(q.den);
}

// Numeric and binary columns side by side.
Dataset mixed(std::mt19937_64& rng, std::size_t n, std::size_t numeric, std::size_t binary, double missing) {
  const auto a = oracle::random_numeric(rng, n, numeric, missing);
  const auto b = oracle::random_binary(rng, n, binary, missing);
  std::vector<FeatureSpec> specs = a.schema.features();
  for (const auto& s : b.schema.features()) specs.push_back(s);
  Dataset d{FeatureSchema(specs), {}};
  for (std::size_t r = 0; r < n; ++r) {
    auto x = a.rows[r].x.values();
    for (const auto& v : b.rows[r].x) x.push_back(v);
    d.rows.push_back({FeatureVector(x), a.rows[r].y});
  }
  return d;
}

Outcome example_one() {
  const auto r = run_example1();
  const std::vector<std::string> want{"(h,*)", "(h,h)", "(h,l)"};
  const bool ok = r.accepted == want && r.loss == Rational{22, 80} && r.brute_force_loss == Rational{22, 80};
  std::string acc;
  for (const auto& s : r.accepted) acc += (acc.empty() ? "" : " ") + s;
  return {ok, "accept {" + acc + "} loss " + std::to_string(r.loss.num) + "/" + std::to_string(r.loss.den) +
                  " brute force " + str(r.brute_force_loss)};
}

Outcome oracle_equivalence() {
  std::mt19937_64 rng(2026);
  std::size_t agree = 0;
  const std::size_t cases = 500;
  for (std::size_t c = 0; c < cases; ++c) {
    const std::size_t k = 1 + rng() % 4;
    std::size_t universe = 1;
    for (std::size_t i = 0; i < k; ++i) universe *= 3;
    const std::size_t count = 1 + rng() % std::min<std::size_t>(12, universe);
    std::set<FeatureVector> picked;
    while (picked.size() < count) {
      FeatureVector x(k);
      for (std::size_t i = 0; i < k; ++i) {
        const auto v = rng() % 3;
        if (v < 2) x[i] = FeatureValue::categorical(static_cast<std::int32_t>(v));
      }
      picked.insert(x);
    }
    EmpiricalDistribution::Map map;
    std::vector<oracle::Mass> masses;
    std::int64_t total = 0;
    for (const auto& x : picked) {
      std::int64_t pos = static_cast<std::int64_t>(rng() % 11);
      std::int64_t neg = static_cast<std::int64_t>(rng() % 11);
      if (pos + neg == 0) pos = 1;
      map[x] = {pos, neg};
      masses.push_back({x, pos, neg});
      total += pos + neg;
    }
    const EmpiricalDistribution dist(k, map);
    const auto trained = train_mincut(oracle::binary_schema(k), dist);
    const auto loss = empirical_loss(trained.model, dist);
    const auto bf = brute_force_optimal(dist).loss;
    const Rational ref{oracle::optimal_truthful_loss(masses), total};
    agree += static_cast<std::size_t>(loss == bf && loss == ref && trained.cut.flow_value == ref.num);
  }
  return {agree == cases, std::to_string(agree) + "/" + std::to_string(cases) + " instances optimal"};
}

Outcome truthfulness_suite() {
  std::mt19937_64 rng(7);
  std::size_t audited = 0, violations = 0, folds = 0, equal = 0;
  const ClassifierKind kinds[] = {ClassifierKind::kMincut, ClassifierKind::kHc, ClassifierKind::kIclr};
  for (int t = 0; t < 20; ++t) {
    const std::size_t numeric = 1 + rng() % 5;
    const std::size_t binary = 1 + rng() % (10 - numeric);
    const auto d = mixed(rng, 120, numeric, binary, 0.25);
    CvConfig cv;
    cv.balance = false;
    cv.epsilon = 0.0;
    cv.seed = static_cast<std::uint64_t>(t);
    const auto plan = plan_repeat(d, cv, 0);
    for (auto kind : kinds) {
      for (int f = 0; f < 2; ++f) {
        const auto& train = f ? plan.half_b : plan.half_a;
        const auto& test = f ? plan.half_a : plan.half_b;
        const auto model = train_classifier(kind, train, {});
        const auto audit = audit_truthfulness_full(model.raw_handle(), test);
        audited += audit.checks;
        violations += audit.violations.size();
        const auto fold = evaluate_fold(kind, train, test, {});
        ++folds;
        // Exhaustive search, with no truthfulness shortcut.
        auto handle = model.raw_handle();
        handle.truthful = false;
        handle.fast_best_response = nullptr;
        const bool same = !fold.skipped && fold.strategic == fold.truthful &&
                          strategic_accuracy(handle, test) == truthful_accuracy(handle, test);
        equal += static_cast<std::size_t>(same);
      }
    }
  }
  return {violations == 0 && equal == folds,
          std::to_string(violations) + " violations in " + std::to_string(audited) + " checks; strategic == truthful on " +
              std::to_string(equal) + "/" + std::to_string(folds) + " folds"};
}

Outcome hc_convergence() {
  std::mt19937_64 rng(44);
  std::size_t ok = 0;
  std::size_t max_sweeps = 0;
  for (int t = 0; t < 50; ++t) {
    const auto d = mixed(rng, 40 + rng() % 80, 1 + rng() % 4, 1 + rng() % 4, 0.3);
    const std::size_t k = d.schema.size();
    HcConfig cfg;
    cfg.delta = t % 3 == 0 ? 0.0 : 1e-4;
    switch (t % 3) {
      case 0:
        cfg.subsets = SubsetStrategy::all_subsets_of_top(std::min<std::size_t>(k, 1 + rng() % 4));
        break;
      case 1:
        cfg.subsets = SubsetStrategy::sampled(1 + rng() % k, rng() % 6, rng());
        break;
      default: {
        std::vector<FeatureSubset> s;
        for (int j = 0; j < 5; ++j) {
          std::vector<std::size_t> m;
          for (std::size_t i = 0; i < k; ++i) {
            if (rng() % 2) m.push_back(i);
          }
          if (m.empty()) m.push_back(rng() % k);
          s.emplace_back(m);
        }
        cfg.subsets = SubsetStrategy::fixed(s);
      }
    }
    const auto r = hc_train(d, cfg);
    bool good = r.sweeps() <= d.size();
    double prev = r.initial_loss;
    for (double l : r.loss_trace) {
      good &= l <= prev;
      prev = l;
    }
    max_sweeps = std::max(max_sweeps, r.sweeps());
    ok += static_cast<std::size_t>(good);
  }
  return {ok == 50, std::to_string(ok) + "/50 traces non-increasing within m sweeps (longest " +
                        std::to_string(max_sweeps) + ")"};
}

Outcome iclr_clamp() {
  auto make = [](std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Dataset d{oracle::numeric_schema(1), {}};
    for (int i = 0; i < 1000; ++i) {
      const double x = u(rng);
      d.rows.push_back({FeatureVector{FeatureValue::numeric(x)}, x < 0.5 ? 1 : 0});
    }
    return d;
  };
  const auto train = make(1);
  const auto test = make(2);
  const auto raw = train_iclr(train);
  EncodingOptions enc;
  enc.invert_all_numeric = true;
  const auto inv = train_iclr(train, {}, enc);
  std::size_t ok = 0;
  for (const auto& row : test.rows) ok += static_cast<std::size_t>(inv.predict(row.x) == row.y);
  const double acc = static_cast<double>(ok) / static_cast<double>(test.size());
  const double c = raw.coefficients()[0];
  char buf[160];
  std::snprintf(buf, sizeof buf, "raw coefficient %g, inverted-copy test accuracy %.4f", c, acc);
  return {c == 0.0 && acc >= 0.90, buf};
}

Outcome gradient_check() {
  std::mt19937_64 rng(606);
  std::normal_distribution<double> g(0.0, 1.0);
  double worst = 0.0;
  int points = 0;
  for (int ds = 0; ds < 3; ++ds) {
    const auto data = mixed(rng, 100 + 50 * ds, 2 + ds, 2, 0.2);
    const auto dense = encode_dense(fit_linear_encoding(data), data);
    for (int p = 0; p < 10; ++p, ++points) {
      const double b0 = g(rng);
      std::vector<double> b(dense.dims());
      for (auto& v : b) v = 2.0 * g(rng);
      const auto grad = logistic_gradient(dense, b0, b);
      const double h = 1e-6;
      std::vector<double> fd, an;
      fd.push_back((oracle::log_loss(dense.x, dense.y, b0 + h, b) - oracle::log_loss(dense.x, dense.y, b0 - h, b)) /
                   (2 * h));
      an.push_back(grad.intercept);
      for (std::size_t i = 0; i < b.size(); ++i) {
        auto up = b, dn = b;
        up[i] += h;
        dn[i] -= h;
        fd.push_back((oracle::log_loss(dense.x, dense.y, b0, up) - oracle::log_loss(dense.x, dense.y, b0, dn)) / (2 * h));
        an.push_back(grad.coefficients[i]);
      }
      double diff = 0.0, norm = 0.0;
      for (std::size_t i = 0; i < fd.size(); ++i) {
        diff += (fd[i] - an[i]) * (fd[i] - an[i]);
        norm += fd[i] * fd[i];
      }
      worst = std::max(worst, std::sqrt(diff / norm));
    }
  }
  char buf[120];
  std::snprintf(buf, sizeof buf, "%d points, worst relative error %.3g", points, worst);
  return {worst <= 1e-5, buf};
}

Outcome fast_path() {
  std::mt19937_64 rng(808);
  std::normal_distribution<double> g(0.0, 1.0);
  std::size_t agree = 0;
  const std::size_t cases = 1000;
  for (std::size_t c = 0; c < cases; ++c) {
    const auto d = mixed(rng, 30, 5, 3, 0.2);
    const auto pipeline = fit_linear_encoding(d);
    const std::size_t dims = pipeline.output_schema(d.schema).size();
    std::vector<double> coef(dims);
    for (auto& v : coef) v = g(rng);
    const LinearModel lr(d.schema, pipeline, g(rng), coef);
    const ImputedLrModel model(fit_impute_values(d), lr);
    const auto x = mixed(rng, 2, 5, 3, 0.2).rows[0].x;
    ClassifierHandle f;
    f.predict = [&](const FeatureVector& v) { return model.predict(v); };
    const auto brute = best_response_brute_force(f, x);
    const auto fast = best_response_imputed_linear(lr, model.impute_values(), x);
    double best_score = -INFINITY;
    for (const auto& y : oracle::all_projections(x)) best_score = std::max(best_score, model.score(y));
    const bool ok = oracle::reports_to(x, fast) && model.predict(fast) == brute.outcome &&
                    std::abs(model.score(fast) - best_score) <= 1e-9 * (1.0 + std::abs(best_score));
    agree += static_cast<std::size_t>(ok);
  }
  return {agree == cases, std::to_string(agree) + "/" + std::to_string(cases) + " instances agree"};
}

CvConfig table_config() {
  CvConfig cv;
  cv.epsilon = 0.2;
  cv.balance = true;
  cv.repeats = 10;
  cv.seed = 0;
  cv.classifiers = all_classifier_kinds();
  cv.model.preprocess.top_k = 4;
  return cv;
}

Dataset credit() {
  CsvOptions o;
  o.categorical_columns = {"A1", "A4", "A5", "A6", "A8", "A9", "A11", "A12"};
  return load_csv(std::string(STRATSHIELD_DATA_DIR) + "/australian.csv", o);
}

std::string first_csv;

Outcome table_check() {
  const auto result = nx2_cv(credit(), table_config());
  std::ostringstream csv, table;
  write_metrics_csv(csv, result);
  write_metrics_table(table, result);
  first_csv = csv.str();
  std::printf("%s", table.str().c_str());
  const MetricRow* hc = nullptr;
  const MetricRow* imp = nullptr;
  for (const auto& r : result.rows) {
    if (r.classifier == "hc") hc = &r;
    if (r.classifier == "imp_lr") imp = &r;
  }
  if (!hc || !imp) return {false, "missing rows"};
  char buf[200];
  std::snprintf(buf, sizeof buf, "hc strategic %.4f (target 0.792 +/- 0.05); imp_lr truthful %.4f strategic %.4f",
                hc->strategic_mean, imp->truthful_mean, imp->strategic_mean);
  const bool ok = std::abs(hc->strategic_mean - 0.792) <= 0.05 && imp->strategic_mean < imp->truthful_mean;
  return {ok, buf};
}

Outcome determinism() {
  if (first_csv.empty()) return {false, "criterion 8 produced no CSV"};
  auto cfg = table_config();
  cfg.threads = 1;
  const auto result = nx2_cv(credit(), cfg);
  std::ostringstream csv;
  write_metrics_csv(csv, result);
  const bool same = csv.str() == first_csv;
  return {same, same ? "CSV byte-identical across runs (" + std::to_string(first_csv.size()) + " bytes)"
                     : "CSV differs between runs"};
}

}  // namespace

int main() {
  run(1, "two-test example exactness", 1.0, example_one);
  run(2, "mincut equals exhaustive optimum", 30.0, oracle_equivalence);
  run(3, "truthfulness of mincut, hc, iclr", 0.0, truthfulness_suite);
  run(4, "hill-climbing convergence", 0.0, hc_convergence);
  run(5, "IC-LR clamp", 0.0, iclr_clamp);
  run(6, "gradient vs central differences", 0.0, gradient_check);
  run(7, "imputed-LR best-response fast path", 0.0, fast_path);
  run(8, "credit data table check", 300.0, table_check);
  run(9, "experiment determinism", 300.0, determinism);
  std::printf("%s: %d failing criteria\n", failures ? "FAILED" : "ALL PASSED", failures);
  return failures ? 1 : 0;
}
