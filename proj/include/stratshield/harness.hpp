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

// Data ingestion and the N x 2 cross-validation protocol.
//
// Per repeat: balance by undersampling, mask cells at rate epsilon, split
// 50/50; each half trains once and tests once. Everything data-dependent
// (feature ranking, bin cuts, imputation values, shifts) is fitted on the
// training half inside train_classifier, never on the test half.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "stratshield/classifier.hpp"
#include "stratshield/empirical.hpp"
#include "stratshield/features.hpp"

namespace stratshield {

struct CsvOptions {
  // Empty means the last column.
  std::string label_column;
  std::vector<std::string> missing_tokens = {"?", "", "NA"};
  std::vector<std::string> categorical_columns;
  std::string positive_label = "1";
  std::string negative_label = "0";
};

Dataset parse_csv(std::istream& in, const CsvOptions& opts);
Dataset load_csv(const std::string& path, const CsvOptions& opts);

// Re-expresses categorical ids of `data` in `target`'s symbol numbering
// (ids depend on first appearance, so two files can disagree). Symbols
// unknown to `target` get fresh ids past its table.
Dataset align_to_schema(const Dataset& data, const FeatureSchema& target);

// Each present cell independently becomes Missing with probability epsilon.
Dataset mask_features(const Dataset& data, double epsilon, std::uint64_t seed);

// Majority class subsampled to the minority size, rows shuffled.
Dataset undersample_balance(const Dataset& data, std::uint64_t seed);

// Mann-Whitney AUC with ties counted half; nullopt unless both labels occur.
std::optional<double> auc(std::vector<std::pair<double, int>> scores);

struct CvConfig {
  double epsilon = 0.2;
  bool balance = true;
  // Mask before balancing instead of after.
  bool mask_first = false;
  std::size_t repeats = 10;
  std::uint64_t seed = 0;
  std::vector<ClassifierKind> classifiers;
  ClassifierOptions model;
  // 0 reads STRATSHIELD_THREADS, else the hardware concurrency.
  std::size_t threads = 0;
};

// One repeat's prepared data and its two halves.
struct RepeatPlan {
  std::size_t repeat = 0;
  Dataset half_a;
  Dataset half_b;
};

RepeatPlan plan_repeat(const Dataset& data, const CvConfig& cfg, std::size_t repeat);

struct FoldResult {
  ClassifierKind classifier{};
  std::size_t repeat = 0;
  std::size_t fold = 0;
  bool skipped = false;
  std::string skip_reason;
  Rational truthful{0, 1};
  Rational strategic{0, 1};
  std::optional<double> auc;
};

// Trains on `train` alone, then scores `test` under truthful and strategic
// reports.
FoldResult evaluate_fold(ClassifierKind kind, const Dataset& train, const Dataset& test,
                         const ClassifierOptions& opts);

struct MetricRow {
  std::string classifier;
  std::size_t folds = 0;
  std::size_t skipped = 0;
  double truthful_mean = 0.0;
  double truthful_std = 0.0;
  double strategic_mean = 0.0;
  double strategic_std = 0.0;
  std::optional<double> auc_mean;
  std::optional<double> auc_std;
};

struct CvResult {
  std::vector<MetricRow> rows;
  std::vector<FoldResult> folds;
};

CvResult nx2_cv(const Dataset& data, const CvConfig& cfg);

// Sample mean and standard deviation (n - 1; 0 for a single value).
std::pair<double, double> mean_stddev(const std::vector<double>& values);

struct ExperimentConfig {
  std::string dataset_path;
  CsvOptions csv;
  CvConfig cv;
};

CvResult run_experiment(const ExperimentConfig& cfg);

void write_metrics_csv(std::ostream& os, const CvResult& result);
void write_metrics_table(std::ostream& os, const CvResult& result);

// The two-test admissions example: eight equally likely inputs over
// {h, l, *}^2 with integer label counts out of 80.
struct Example1 {
  FeatureSchema schema;
  EmpiricalDistribution distribution;
};
Example1 example1();

struct Example1Report {
  std::vector<std::string> accepted;
  Rational loss;
  Rational brute_force_loss;
  std::int64_t flow = 0;
};
Example1Report run_example1();

}  // namespace stratshield
