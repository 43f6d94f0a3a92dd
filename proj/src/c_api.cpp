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

#include "stratshield/stratshield.h"

#include <cstdlib>
#include <cstring>
#include <fstream>
#include <new>
#include <sstream>
#include <string>

#include "stratshield/classifier.hpp"
#include "stratshield/error.hpp"
#include "stratshield/harness.hpp"
#include "stratshield/strategic.hpp"

struct ss_dataset {
  stratshield::Dataset data;
};

struct ss_model {
  stratshield::TrainedClassifier classifier;
  std::string kind;
};

namespace {

thread_local std::string g_last_error;

ss_status fail(ss_status s, const std::string& what) {
  g_last_error = what;
  return s;
}

ss_status from_code(stratshield::ErrorCode c) {
  using stratshield::ErrorCode;
  switch (c) {
    case ErrorCode::kInvalidArgument: return SS_E_INVALID_ARGUMENT;
    case ErrorCode::kSchema: return SS_E_SCHEMA;
    case ErrorCode::kType: return SS_E_TYPE;
    case ErrorCode::kLatticeTooLarge: return SS_E_LATTICE_TOO_LARGE;
    case ErrorCode::kDivergence: return SS_E_DIVERGENCE;
    case ErrorCode::kOverflow: return SS_E_OVERFLOW;
    case ErrorCode::kParse: return SS_E_PARSE;
    case ErrorCode::kIo: return SS_E_IO;
    case ErrorCode::kEmptyData: return SS_E_EMPTY_DATA;
  }
  return SS_E_INTERNAL;
}

template <typename F>
ss_status guarded(F&& f) {
  try {
    f();
    return SS_OK;
  } catch (const stratshield::Error& e) {
    return fail(from_code(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(SS_E_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(SS_E_INTERNAL, e.what());
  } catch (...) {
    return fail(SS_E_INTERNAL, "unknown error");
  }
}

std::vector<std::string> split_list(const char* s) {
  std::vector<std::string> out;
  if (s == nullptr) return out;
  std::string cur;
  for (const char* p = s;; ++p) {
    if (*p == ',' || *p == '\0') {
      out.push_back(cur);
      cur.clear();
      if (*p == '\0') break;
    } else {
      cur.push_back(*p);
    }
  }
  return out;
}

char* dup_string(const std::string& s) {
  auto* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

stratshield::ClassifierOptions to_options(const ss_train_options* o) {
  ss_train_options d;
  ss_train_options_init(&d);
  if (o == nullptr) o = &d;
  stratshield::ClassifierOptions out;
  out.preprocess.top_k = o->top_k;
  out.preprocess.discretize = o->discretize != 0;
  out.lr.learning_rate.eta0 = o->learning_rate;
  out.lr.max_epochs = o->max_epochs;
  out.lr.patience = o->patience;
  out.lr.clamp_intercept = o->clamp_intercept != 0;
  out.grid = o->grid != 0;
  out.hc_delta = o->hc_delta;
  out.hc_top_k = o->hc_top_k;
  out.seed = o->seed;
  out.lr.seed = o->seed;
  if (!(out.lr.learning_rate.eta0 > 0.0)) {
    throw stratshield::Error(stratshield::ErrorCode::kInvalidArgument, "learning rate must be positive");
  }
  if (out.hc_delta < 0.0) throw stratshield::Error(stratshield::ErrorCode::kInvalidArgument, "delta must be >= 0");
  return out;
}

ss_status null_arg(const char* name) { return fail(SS_E_INVALID_ARGUMENT, std::string(name) + " is NULL"); }

}  // namespace

extern "C" {

const char* ss_version(void) { return "1.0.0"; }

const char* ss_last_error(void) { return g_last_error.c_str(); }

const char* ss_status_name(ss_status status) {
  switch (status) {
    case SS_OK: return "ok";
    case SS_E_INVALID_ARGUMENT: return "invalid argument";
    case SS_E_SCHEMA: return "schema error";
    case SS_E_TYPE: return "type error";
    case SS_E_LATTICE_TOO_LARGE: return "lattice too large";
    case SS_E_DIVERGENCE: return "divergence";
    case SS_E_OVERFLOW: return "overflow";
    case SS_E_PARSE: return "parse error";
    case SS_E_IO: return "i/o error";
    case SS_E_EMPTY_DATA: return "empty data";
    case SS_E_INTERNAL: return "internal error";
  }
  return "unknown status";
}

void ss_string_free(char* s) { std::free(s); }

void ss_csv_options_init(ss_csv_options* opts) {
  if (opts == nullptr) return;
  opts->label_column = nullptr;
  opts->missing_tokens = nullptr;
  opts->categorical_columns = nullptr;
  opts->positive_label = nullptr;
  opts->negative_label = nullptr;
}

ss_status ss_dataset_load_csv(const char* path, const ss_csv_options* opts, ss_dataset** out) {
  if (path == nullptr) return null_arg("path");
  if (out == nullptr) return null_arg("out");
  *out = nullptr;
  return guarded([&] {
    stratshield::CsvOptions o;
    if (opts != nullptr) {
      if (opts->label_column) o.label_column = opts->label_column;
      if (opts->missing_tokens) o.missing_tokens = split_list(opts->missing_tokens);
      if (opts->categorical_columns && *opts->categorical_columns) {
        o.categorical_columns = split_list(opts->categorical_columns);
      }
      if (opts->positive_label) o.positive_label = opts->positive_label;
      if (opts->negative_label) o.negative_label = opts->negative_label;
    }
    *out = new ss_dataset{stratshield::load_csv(path, o)};
  });
}

void ss_dataset_free(ss_dataset* ds) { delete ds; }

size_t ss_dataset_rows(const ss_dataset* ds) { return ds ? ds->data.size() : 0; }

size_t ss_dataset_features(const ss_dataset* ds) { return ds ? ds->data.schema.size() : 0; }

size_t ss_dataset_positives(const ss_dataset* ds) { return ds ? ds->data.positives() : 0; }

size_t ss_dataset_missing_cells(const ss_dataset* ds) {
  if (ds == nullptr) return 0;
  size_t n = 0;
  for (const auto& row : ds->data.rows) n += row.x.size() - row.x.present_count();
  return n;
}

ss_status ss_dataset_feature_name(const ss_dataset* ds, size_t i, const char** out) {
  if (ds == nullptr) return null_arg("dataset");
  if (out == nullptr) return null_arg("out");
  if (i >= ds->data.schema.size()) return fail(SS_E_INVALID_ARGUMENT, "feature index out of range");
  *out = ds->data.schema[i].name.c_str();
  return SS_OK;
}

void ss_train_options_init(ss_train_options* opts) {
  if (opts == nullptr) return;
  const stratshield::ClassifierOptions d;
  opts->top_k = d.preprocess.top_k;
  opts->discretize = d.preprocess.discretize ? 1 : 0;
  opts->learning_rate = d.lr.learning_rate.eta0;
  opts->max_epochs = d.lr.max_epochs;
  opts->patience = d.lr.patience;
  opts->clamp_intercept = d.lr.clamp_intercept ? 1 : 0;
  opts->grid = d.grid ? 1 : 0;
  opts->hc_delta = d.hc_delta;
  opts->hc_top_k = d.hc_top_k;
  opts->seed = d.seed;
}

ss_status ss_model_train(const char* kind, const ss_dataset* train, const ss_train_options* opts,
                         ss_model** out) {
  if (kind == nullptr) return null_arg("kind");
  if (train == nullptr) return null_arg("train");
  if (out == nullptr) return null_arg("out");
  *out = nullptr;
  return guarded([&] {
    const auto k = stratshield::parse_classifier_kind(kind);
    auto c = stratshield::train_classifier(k, train->data, to_options(opts));
    *out = new ss_model{std::move(c), stratshield::to_string(k)};
  });
}

ss_status ss_model_save(const ss_model* model, const char* path) {
  if (model == nullptr) return null_arg("model");
  if (path == nullptr) return null_arg("path");
  return guarded([&] {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw stratshield::Error(stratshield::ErrorCode::kIo, std::string("cannot write '") + path + "'");
    model->classifier.write(os);
    os.flush();
    if (!os) throw stratshield::Error(stratshield::ErrorCode::kIo, std::string("write failed for '") + path + "'");
  });
}

ss_status ss_model_load(const char* path, ss_model** out) {
  if (path == nullptr) return null_arg("path");
  if (out == nullptr) return null_arg("out");
  *out = nullptr;
  return guarded([&] {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw stratshield::Error(stratshield::ErrorCode::kIo, std::string("cannot open '") + path + "'");
    auto c = stratshield::TrainedClassifier::read(is);
    const auto kind = stratshield::to_string(c.kind());
    *out = new ss_model{std::move(c), kind};
  });
}

void ss_model_free(ss_model* model) { delete model; }

const char* ss_model_kind(const ss_model* model) { return model ? model->kind.c_str() : ""; }

int ss_model_is_truthful(const ss_model* model) {
  return model && stratshield::truthful_by_construction(model->classifier.kind()) ? 1 : 0;
}

ss_status ss_model_predict(const ss_model* model, const ss_dataset* ds, int* labels, size_t n) {
  if (model == nullptr) return null_arg("model");
  if (ds == nullptr) return null_arg("dataset");
  if (labels == nullptr && n > 0) return null_arg("labels");
  if (n != ds->data.size()) return fail(SS_E_INVALID_ARGUMENT, "label buffer size differs from row count");
  return guarded([&] {
    const auto data = stratshield::align_to_schema(ds->data, model->classifier.raw_schema());
    for (size_t r = 0; r < n; ++r) labels[r] = model->classifier.predict(data.rows[r].x);
  });
}

ss_status ss_model_evaluate(const ss_model* model, const ss_dataset* test, ss_evaluation* out) {
  if (model == nullptr) return null_arg("model");
  if (test == nullptr) return null_arg("test");
  if (out == nullptr) return null_arg("out");
  return guarded([&] {
    const auto data = stratshield::align_to_schema(test->data, model->classifier.raw_schema());
    const auto local = model->classifier.preprocess(data);
    const auto handle = model->classifier.model_handle();
    const auto tru = stratshield::truthful_accuracy(handle, local);
    size_t correct = 0;
    std::vector<std::pair<double, int>> scores;
    for (const auto& row : local.rows) {
      const auto br = stratshield::best_response(handle, row.x);
      correct += br.outcome == row.y ? 1 : 0;
      if (handle.proba) scores.emplace_back(handle.proba(br.report), row.y);
    }
    out->rows = local.size();
    out->truthful_correct = static_cast<size_t>(tru.num);
    out->strategic_correct = correct;
    out->truthful_accuracy = tru.value();
    out->strategic_accuracy = static_cast<double>(correct) / static_cast<double>(local.size());
    const auto a = handle.proba ? stratshield::auc(std::move(scores)) : std::nullopt;
    out->has_auc = a ? 1 : 0;
    out->auc = a.value_or(0.0);
  });
}

ss_status ss_model_audit(const ss_model* model, const ss_dataset* ds, size_t trials_per_row, uint64_t seed,
                         int full, ss_audit_report* out) {
  if (model == nullptr) return null_arg("model");
  if (ds == nullptr) return null_arg("dataset");
  if (out == nullptr) return null_arg("out");
  return guarded([&] {
    const auto data = stratshield::align_to_schema(ds->data, model->classifier.raw_schema());
    const auto local = model->classifier.preprocess(data);
    const auto handle = model->classifier.model_handle();
    const auto report = full ? stratshield::audit_truthfulness_full(handle, local)
                             : stratshield::audit_truthfulness(handle, local, trials_per_row, seed);
    out->checks = report.checks;
    out->violations = report.violations.size();
  });
}

void ss_experiment_options_init(ss_experiment_options* opts) {
  if (opts == nullptr) return;
  const stratshield::CvConfig d;
  opts->epsilon = d.epsilon;
  opts->balance = d.balance ? 1 : 0;
  opts->mask_first = d.mask_first ? 1 : 0;
  opts->repeats = d.repeats;
  opts->seed = d.seed;
  opts->classifiers = nullptr;
  opts->threads = d.threads;
  ss_train_options_init(&opts->train);
}

ss_status ss_experiment_run(const ss_dataset* ds, const ss_experiment_options* opts, char** csv, char** table) {
  if (ds == nullptr) return null_arg("dataset");
  if (csv) *csv = nullptr;
  if (table) *table = nullptr;
  return guarded([&] {
    ss_experiment_options d;
    ss_experiment_options_init(&d);
    if (opts == nullptr) opts = &d;
    stratshield::CvConfig cfg;
    cfg.epsilon = opts->epsilon;
    cfg.balance = opts->balance != 0;
    cfg.mask_first = opts->mask_first != 0;
    cfg.repeats = opts->repeats;
    cfg.seed = opts->seed;
    cfg.threads = opts->threads;
    cfg.model = to_options(&opts->train);
    for (const auto& name : split_list(opts->classifiers ? opts->classifiers : "mincut,hc,iclr")) {
      cfg.classifiers.push_back(stratshield::parse_classifier_kind(name));
    }
    const auto result = stratshield::nx2_cv(ds->data, cfg);
    std::ostringstream c;
    std::ostringstream t;
    stratshield::write_metrics_csv(c, result);
    stratshield::write_metrics_table(t, result);
    char* cs = csv ? dup_string(c.str()) : nullptr;
    char* ts = nullptr;
    try {
      ts = table ? dup_string(t.str()) : nullptr;
    } catch (...) {
      std::free(cs);
      throw;
    }
    if (csv) *csv = cs;
    if (table) *table = ts;
  });
}

ss_status ss_example1(char** report) {
  if (report == nullptr) return null_arg("report");
  *report = nullptr;
  return guarded([&] {
    const auto r = stratshield::run_example1();
    const auto reduced = r.loss.reduced();
    std::ostringstream os;
    os << "accept {";
    for (size_t i = 0; i < r.accepted.size(); ++i) os << (i ? ", " : "") << r.accepted[i];
    os << "}\n";
    os << "loss " << r.loss.num << "/" << r.loss.den << " = " << reduced.num << "/" << reduced.den << " = "
       << r.loss.value() << "\n";
    os << "brute-force optimum " << r.brute_force_loss.num << "/" << r.brute_force_loss.den << "\n";
    os << "max flow " << r.flow << "\n";
    *report = dup_string(os.str());
  });
}

}  // extern "C"
