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

// stratshield command line: train / evaluate / audit / experiment / example1.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>

#include "CLI11.hpp"
#include "stratshield/stratshield.h"

namespace {

struct DatasetFlags {
  std::string path;
  std::string label_column;
  std::string missing_tokens = "?,,NA";
  std::string categorical;
  std::string positive_label = "1";
  std::string negative_label = "0";
};

struct TrainFlags {
  bool top4 = false;
  std::size_t top_k = 0;
  bool discretize = false;
  double learning_rate = 0.1;
  std::size_t max_epochs = 2000;
  std::size_t patience = 100;
  bool clamp_intercept = false;
  bool grid = false;
  double delta = 1e-4;
  std::uint64_t seed = 0;
};

void add_dataset_flags(CLI::App* app, DatasetFlags& f) {
  app->add_option("--dataset", f.path, "CSV file with a header row")->required()->check(CLI::ExistingFile);
  app->add_option("--label-column", f.label_column, "label column (default: last)");
  app->add_option("--missing-tokens", f.missing_tokens, "comma-separated missing markers")
      ->capture_default_str();
  app->add_option("--categorical", f.categorical, "comma-separated categorical columns");
  app->add_option("--positive-label", f.positive_label)->capture_default_str();
  app->add_option("--negative-label", f.negative_label)->capture_default_str();
}

void add_train_flags(CLI::App* app, TrainFlags& f) {
  app->add_flag("--top4", f.top4, "keep the 4 best features by ANOVA F");
  app->add_option("--top-k", f.top_k, "keep the k best features by ANOVA F");
  app->add_flag("--discretize", f.discretize, "MDLP-discretize numeric features");
  app->add_option("--learning-rate", f.learning_rate)->capture_default_str()->check(CLI::PositiveNumber);
  app->add_option("--max-epochs", f.max_epochs)->capture_default_str();
  app->add_option("--patience", f.patience)->capture_default_str();
  app->add_flag("--clamp-intercept", f.clamp_intercept, "clamp the IC-LR intercept at 0 too");
  app->add_flag("--grid", f.grid, "pick the learning rate from {0.01, 0.1} by inner 5-fold CV");
  app->add_option("--delta", f.delta, "HC improvement threshold")->capture_default_str();
  app->add_option("--seed", f.seed)->capture_default_str();
}

ss_train_options to_options(const TrainFlags& f) {
  ss_train_options o;
  ss_train_options_init(&o);
  o.top_k = f.top4 ? 4 : f.top_k;
  o.discretize = f.discretize ? 1 : 0;
  o.learning_rate = f.learning_rate;
  o.max_epochs = f.max_epochs;
  o.patience = f.patience;
  o.clamp_intercept = f.clamp_intercept ? 1 : 0;
  o.grid = f.grid ? 1 : 0;
  o.hc_delta = f.delta;
  o.seed = f.seed;
  return o;
}

struct DatasetDeleter {
  void operator()(ss_dataset* d) const { ss_dataset_free(d); }
};
struct ModelDeleter {
  void operator()(ss_model* m) const { ss_model_free(m); }
};
struct StringDeleter {
  void operator()(char* s) const { ss_string_free(s); }
};
using DatasetPtr = std::unique_ptr<ss_dataset, DatasetDeleter>;
using ModelPtr = std::unique_ptr<ss_model, ModelDeleter>;
using StringPtr = std::unique_ptr<char, StringDeleter>;

int report(ss_status s, const char* stage) {
  std::cerr << "stratshield: " << stage << ": " << ss_status_name(s) << ": " << ss_last_error() << "\n";
  return static_cast<int>(s) < 100 ? 2 : 3;
}

DatasetPtr load(const DatasetFlags& f, ss_status& s) {
  ss_csv_options o;
  ss_csv_options_init(&o);
  if (!f.label_column.empty()) o.label_column = f.label_column.c_str();
  o.missing_tokens = f.missing_tokens.c_str();
  o.categorical_columns = f.categorical.c_str();
  o.positive_label = f.positive_label.c_str();
  o.negative_label = f.negative_label.c_str();
  ss_dataset* ds = nullptr;
  s = ss_dataset_load_csv(f.path.c_str(), &o, &ds);
  return DatasetPtr(ds);
}

bool write_file(const std::string& path, const char* text) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  os << text;
  return static_cast<bool>(os);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Classifiers robust to strategically withheld features"};
  app.require_subcommand(1);
  app.set_version_flag("--version", ss_version());

  DatasetFlags data;
  TrainFlags train;

  auto* train_cmd = app.add_subcommand("train", "fit a model and save it");
  std::string classifier = "hc";
  std::string model_out;
  add_dataset_flags(train_cmd, data);
  add_train_flags(train_cmd, train);
  train_cmd->add_option("--classifier", classifier, "mincut|hc|iclr|iclr_neg|lr|imp_lr|rf_lr|maj")
      ->capture_default_str();
  train_cmd->add_option("--out", model_out, "model file")->required();

  auto* eval_cmd = app.add_subcommand("evaluate", "truthful and strategic accuracy of a saved model");
  std::string model_in;
  std::string predictions_out;
  add_dataset_flags(eval_cmd, data);
  eval_cmd->add_option("--model", model_in, "model file")->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--predictions", predictions_out, "write truthful predictions, one per line");

  auto* audit_cmd = app.add_subcommand("audit", "search for profitable withholding against a saved model");
  std::size_t trials = 20;
  bool full = false;
  std::uint64_t audit_seed = 0;
  add_dataset_flags(audit_cmd, data);
  audit_cmd->add_option("--model", model_in, "model file")->required()->check(CLI::ExistingFile);
  audit_cmd->add_option("--trials", trials, "random subsets per row")->capture_default_str();
  audit_cmd->add_flag("--full", full, "check every projection of every row");
  audit_cmd->add_option("--seed", audit_seed)->capture_default_str();

  auto* exp_cmd = app.add_subcommand("experiment", "N x 2 cross-validation with masking");
  double epsilon = 0.2;
  bool balance = false;
  bool mask_first = false;
  std::size_t repeats = 10;
  std::size_t threads = 0;
  std::string classifiers = "mincut,hc,iclr,iclr_neg,lr,imp_lr,rf_lr,maj";
  std::string csv_out;
  add_dataset_flags(exp_cmd, data);
  add_train_flags(exp_cmd, train);
  exp_cmd->add_option("--epsilon", epsilon, "fraction of cells masked")->capture_default_str()->check(
      CLI::Range(0.0, 0.999999));
  exp_cmd->add_flag("--balance", balance, "undersample the majority class");
  exp_cmd->add_flag("--mask-first", mask_first, "mask before balancing");
  exp_cmd->add_option("--repeats", repeats, "N")->capture_default_str()->check(CLI::PositiveNumber);
  exp_cmd->add_option("--classifiers", classifiers)->capture_default_str();
  exp_cmd->add_option("--threads", threads, "worker cap (default: STRATSHIELD_THREADS or all cores)");
  exp_cmd->add_option("--out", csv_out, "CSV output file");

  auto* ex1_cmd = app.add_subcommand("example1", "the two-test admissions example");

  CLI11_PARSE(app, argc, argv);

  ss_status s = SS_OK;
  if (*ex1_cmd) {
    char* text = nullptr;
    if ((s = ss_example1(&text)) != SS_OK) return report(s, "example1");
    StringPtr guard(text);
    std::cout << text;
    return 0;
  }

  auto ds = load(data, s);
  if (s != SS_OK) return report(s, "load");

  if (*train_cmd) {
    const auto opts = to_options(train);
    ss_model* m = nullptr;
    if ((s = ss_model_train(classifier.c_str(), ds.get(), &opts, &m)) != SS_OK) return report(s, "train");
    ModelPtr model(m);
    if ((s = ss_model_save(model.get(), model_out.c_str())) != SS_OK) return report(s, "save");
    std::cout << "trained " << ss_model_kind(model.get()) << " on " << ss_dataset_rows(ds.get()) << " rows -> "
              << model_out << "\n";
    return 0;
  }

  if (*eval_cmd || *audit_cmd) {
    ss_model* m = nullptr;
    if ((s = ss_model_load(model_in.c_str(), &m)) != SS_OK) return report(s, "load model");
    ModelPtr model(m);
    if (*audit_cmd) {
      ss_audit_report a;
      if ((s = ss_model_audit(model.get(), ds.get(), trials, audit_seed, full ? 1 : 0, &a)) != SS_OK) {
        return report(s, "audit");
      }
      std::cout << "checks " << a.checks << "\nviolations " << a.violations << "\n";
      return a.violations == 0 ? 0 : 1;
    }
    ss_evaluation e;
    if ((s = ss_model_evaluate(model.get(), ds.get(), &e)) != SS_OK) return report(s, "evaluate");
    std::printf("rows %zu\ntruthful_accuracy %.6f\nstrategic_accuracy %.6f\n", e.rows, e.truthful_accuracy,
                e.strategic_accuracy);
    if (e.has_auc) std::printf("auc %.6f\n", e.auc);
    if (!predictions_out.empty()) {
      std::vector<int> labels(ss_dataset_rows(ds.get()));
      if ((s = ss_model_predict(model.get(), ds.get(), labels.data(), labels.size())) != SS_OK) {
        return report(s, "predict");
      }
      std::string text;
      for (int y : labels) text += std::to_string(y) + "\n";
      if (!write_file(predictions_out, text.c_str())) {
        std::cerr << "stratshield: cannot write " << predictions_out << "\n";
        return 2;
      }
    }
    return 0;
  }

  ss_experiment_options eo;
  ss_experiment_options_init(&eo);
  eo.epsilon = epsilon;
  eo.balance = balance ? 1 : 0;
  eo.mask_first = mask_first ? 1 : 0;
  eo.repeats = repeats;
  eo.seed = train.seed;
  eo.classifiers = classifiers.c_str();
  eo.threads = threads;
  eo.train = to_options(train);
  char* csv = nullptr;
  char* table = nullptr;
  if ((s = ss_experiment_run(ds.get(), &eo, &csv, &table)) != SS_OK) return report(s, "experiment");
  StringPtr csv_guard(csv);
  StringPtr table_guard(table);
  std::cout << table;
  if (!csv_out.empty() && !write_file(csv_out, csv)) {
    std::cerr << "stratshield: cannot write " << csv_out << "\n";
    return 2;
  }
  return 0;
}
