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

#include "stratshield/strategic.hpp"

#include <random>

#include "stratshield/error.hpp"

namespace stratshield {

BestResponse best_response_brute_force(const ClassifierHandle& f, const FeatureVector& x) {
  BestResponse best{x, -1};
  for_each_report(
      x,
      [&](const FeatureVector& r) {
        const int out = f.predict(r);
        if (out > best.outcome) {
          best = {r, out};
        }
        return best.outcome < 1;
      },
      f.enumeration_limit);
  return best;
}

BestResponse best_response(const ClassifierHandle& f, const FeatureVector& x) {
  if (f.truthful) return {x, f.predict(x)};
  if (f.fast_best_response) {
    auto report = f.fast_best_response(x);
    const int out = f.predict(report);
    return {std::move(report), out};
  }
  return best_response_brute_force(f, x);
}

FeatureVector impute(const FeatureVector& x, const FeatureVector& impute_values) {
  if (x.size() != impute_values.size()) throw SchemaError("imputation arity mismatch");
  FeatureVector out = x;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (out[i].is_missing()) out[i] = impute_values[i];
  }
  return out;
}

FeatureVector best_response_imputed_linear(const LinearModel& model, const FeatureVector& impute_values,
                                           const FeatureVector& x) {
  const auto full = impute(x, impute_values);
  const double base = model.score(full);
  FeatureVector report = x;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i].is_missing()) continue;
    FeatureVector swapped = full;
    swapped[i] = impute_values[i];
    if (model.score(swapped) > base) report[i] = FeatureValue::missing();
  }
  return report;
}

Rational strategic_accuracy(const ClassifierHandle& f, const Dataset& test) {
  if (test.empty()) throw Error(ErrorCode::kEmptyData, "accuracy of an empty test set");
  std::int64_t correct = 0;
  for (const auto& row : test.rows) correct += best_response(f, row.x).outcome == row.y ? 1 : 0;
  return {correct, static_cast<std::int64_t>(test.size())};
}

Rational truthful_accuracy(const ClassifierHandle& f, const Dataset& test) {
  if (test.empty()) throw Error(ErrorCode::kEmptyData, "accuracy of an empty test set");
  std::int64_t correct = 0;
  for (const auto& row : test.rows) correct += f.predict(row.x) == row.y ? 1 : 0;
  return {correct, static_cast<std::int64_t>(test.size())};
}

ClassifierHandle direct_revelation(const ClassifierHandle& f) {
  ClassifierHandle out;
  out.truthful = true;
  out.enumeration_limit = f.enumeration_limit;
  out.predict = [f](const FeatureVector& x) {
    // The wrapped handle's own shortcut is fine here: only the outcome matters.
    return best_response(f, x).outcome;
  };
  return out;
}

namespace {

void check_pair(const ClassifierHandle& f, std::size_t row, int fx, const FeatureVector& report,
                AuditReport& out) {
  ++out.checks;
  const int fr = f.predict(report);
  if (fr > fx) out.violations.push_back({row, report, fx, fr});
}

}  // namespace

AuditReport audit_truthfulness(const ClassifierHandle& f, const Dataset& samples,
                               std::size_t trials_per_row, std::uint64_t seed) {
  AuditReport out;
  out.seed = seed;
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution coin(0.5);
  for (std::size_t r = 0; r < samples.size(); ++r) {
    const auto& x = samples.rows[r].x;
    const int fx = f.predict(x);
    for (std::size_t t = 0; t < trials_per_row; ++t) {
      FeatureVector report = x;
      for (std::size_t i = 0; i < x.size(); ++i) {
        if (!x[i].is_missing() && coin(rng)) report[i] = FeatureValue::missing();
      }
      check_pair(f, r, fx, report, out);
    }
  }
  return out;
}

AuditReport audit_truthfulness_full(const ClassifierHandle& f, const Dataset& samples) {
  AuditReport out;
  for (std::size_t r = 0; r < samples.size(); ++r) {
    const auto& x = samples.rows[r].x;
    const int fx = f.predict(x);
    for_each_report(
        x,
        [&](const FeatureVector& report) {
          check_pair(f, r, fx, report, out);
          return true;
        },
        f.enumeration_limit);
  }
  return out;
}

}  // namespace stratshield
