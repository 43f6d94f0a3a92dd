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

// Strategic agents: each agent reports the projection of its true vector
// that the classifier scores highest. Accuracy under those reports is the
// strategic accuracy; for a truthful classifier it equals the ordinary
// (truthful) accuracy.

#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "stratshield/empirical.hpp"
#include "stratshield/features.hpp"
#include "stratshield/linear_model.hpp"

namespace stratshield {

struct ClassifierHandle {
  std::function<int(const FeatureVector&)> predict;
  // Empty when the classifier has no probabilistic output.
  std::function<double(const FeatureVector&)> proba;
  // Set by construction for classifiers that are truthful by design.
  bool truthful = false;
  // Optional exact best-response shortcut returning the report.
  std::function<FeatureVector(const FeatureVector&)> fast_best_response;
  std::size_t enumeration_limit = kDefaultEnumerationLimit;
};

struct BestResponse {
  FeatureVector report;
  int outcome = 0;
};

// Truthful classifiers answer (x, f(x)) directly; otherwise the fast path
// if present, else the first maximiser over reachable_set(x).
BestResponse best_response(const ClassifierHandle& f, const FeatureVector& x);

// Exhaustive search regardless of flags or fast paths.
BestResponse best_response_brute_force(const ClassifierHandle& f, const FeatureVector& x);

// Imputation-scored linear model: a withheld feature is scored at its
// imputed value. Scores separate across raw features, so withholding
// feature i pays off exactly when its imputed value scores strictly
// higher than its true one.
FeatureVector best_response_imputed_linear(const LinearModel& model, const FeatureVector& impute_values,
                                           const FeatureVector& x);

// Fills Missing slots of x from impute_values (which may itself be Missing).
FeatureVector impute(const FeatureVector& x, const FeatureVector& impute_values);

Rational strategic_accuracy(const ClassifierHandle& f, const Dataset& test);
Rational truthful_accuracy(const ClassifierHandle& f, const Dataset& test);

// f'(x) = max over reports of f. Truthful by construction.
ClassifierHandle direct_revelation(const ClassifierHandle& f);

struct Violation {
  std::size_t row = 0;
  FeatureVector report;
  int truthful_outcome = 0;
  int report_outcome = 0;
};

struct AuditReport {
  std::size_t checks = 0;
  std::vector<Violation> violations;
  std::uint64_t seed = 0;
  bool clean() const noexcept { return violations.empty(); }
};

// Random withheld subsets per row, each present feature dropped with
// probability 1/2.
AuditReport audit_truthfulness(const ClassifierHandle& f, const Dataset& samples,
                               std::size_t trials_per_row, std::uint64_t seed);

// Every projection of every row.
AuditReport audit_truthfulness_full(const ClassifierHandle& f, const Dataset& samples);

}  // namespace stratshield
