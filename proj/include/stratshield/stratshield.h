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

/*
 * C interface to libstratshield.
 *
 * Every call returns an ss_status. On failure ss_last_error() describes the
 * problem; the string belongs to the calling thread and stays valid until
 * its next failing call. Strings returned through char** are owned by the
 * caller and released with ss_string_free.
 */

#ifndef STRATSHIELD_H_
#define STRATSHIELD_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define SS_API __declspec(dllexport)
#else
#define SS_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ss_status {
  SS_OK = 0,
  SS_E_INVALID_ARGUMENT = 1,
  SS_E_SCHEMA = 2,
  SS_E_TYPE = 3,
  SS_E_LATTICE_TOO_LARGE = 4,
  SS_E_DIVERGENCE = 5,
  SS_E_OVERFLOW = 6,
  SS_E_PARSE = 7,
  SS_E_IO = 8,
  SS_E_EMPTY_DATA = 9,
  SS_E_INTERNAL = 100
} ss_status;

typedef struct ss_dataset ss_dataset;
typedef struct ss_model ss_model;

SS_API const char* ss_version(void);
SS_API const char* ss_last_error(void);
SS_API const char* ss_status_name(ss_status status);
SS_API void ss_string_free(char* s);

/* Comma-separated lists; NULL selects the default. */
typedef struct ss_csv_options {
  const char* label_column;        /* default: last column */
  const char* missing_tokens;      /* default: "?,,NA" */
  const char* categorical_columns; /* default: none */
  const char* positive_label;      /* default: "1" */
  const char* negative_label;      /* default: "0" */
} ss_csv_options;

SS_API void ss_csv_options_init(ss_csv_options* opts);

SS_API ss_status ss_dataset_load_csv(const char* path, const ss_csv_options* opts, ss_dataset** out);
SS_API void ss_dataset_free(ss_dataset* ds);
SS_API size_t ss_dataset_rows(const ss_dataset* ds);
SS_API size_t ss_dataset_features(const ss_dataset* ds);
SS_API size_t ss_dataset_positives(const ss_dataset* ds);
SS_API size_t ss_dataset_missing_cells(const ss_dataset* ds);
/* The name stays valid for the dataset's lifetime. */
SS_API ss_status ss_dataset_feature_name(const ss_dataset* ds, size_t i, const char** out);

typedef struct ss_train_options {
  size_t top_k;         /* 0 keeps every feature */
  int discretize;       /* MDLP bins for numeric features */
  double learning_rate; /* constant step size */
  size_t max_epochs;
  size_t patience;
  int clamp_intercept;  /* also clamp the intercept at 0 in IC-LR */
  int grid;             /* choose the rate from {0.01, 0.1} by inner CV */
  double hc_delta;
  size_t hc_top_k;
  uint64_t seed;
} ss_train_options;

SS_API void ss_train_options_init(ss_train_options* opts);

/* kind: mincut, hc, iclr, iclr_neg, lr, imp_lr, rf_lr, maj */
SS_API ss_status ss_model_train(const char* kind, const ss_dataset* train, const ss_train_options* opts,
                                ss_model** out);
SS_API ss_status ss_model_save(const ss_model* model, const char* path);
SS_API ss_status ss_model_load(const char* path, ss_model** out);
SS_API void ss_model_free(ss_model* model);
SS_API const char* ss_model_kind(const ss_model* model);
SS_API int ss_model_is_truthful(const ss_model* model);

/* labels must hold ss_dataset_rows(ds) entries. */
SS_API ss_status ss_model_predict(const ss_model* model, const ss_dataset* ds, int* labels, size_t n);

typedef struct ss_evaluation {
  size_t rows;
  size_t truthful_correct;
  size_t strategic_correct;
  double truthful_accuracy;
  double strategic_accuracy;
  int has_auc;
  double auc; /* scored on strategic reports */
} ss_evaluation;

SS_API ss_status ss_model_evaluate(const ss_model* model, const ss_dataset* test, ss_evaluation* out);

typedef struct ss_audit_report {
  size_t checks;
  size_t violations;
} ss_audit_report;

/* full != 0 checks every projection; otherwise trials_per_row random ones. */
SS_API ss_status ss_model_audit(const ss_model* model, const ss_dataset* ds, size_t trials_per_row,
                                uint64_t seed, int full, ss_audit_report* out);

typedef struct ss_experiment_options {
  double epsilon;
  int balance;
  int mask_first;
  size_t repeats;
  uint64_t seed;
  const char* classifiers; /* comma-separated; default "mincut,hc,iclr" */
  size_t threads;          /* 0: STRATSHIELD_THREADS or hardware */
  ss_train_options train;
} ss_experiment_options;

SS_API void ss_experiment_options_init(ss_experiment_options* opts);

/* Either output may be NULL. */
SS_API ss_status ss_experiment_run(const ss_dataset* ds, const ss_experiment_options* opts, char** csv,
                                   char** table);

SS_API ss_status ss_example1(char** report);

#ifdef __cplusplus
}
#endif

#endif /* STRATSHIELD_H_ */
