// Copyright 2026 The dlsvm Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef DLSVM_H_
#define DLSVM_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(DLSVM_BUILDING_LIBRARY)
#define DLSVM_API __declspec(dllexport)
#else
#define DLSVM_API __declspec(dllimport)
#endif
#else
#define DLSVM_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Every fallible call returns a status. On failure a one-line message is
 * available from dlsvm_last_error() on the calling thread until the next
 * failing call. Output handles are left untouched on failure. */
typedef enum dlsvm_status {
  DLSVM_OK = 0,
  DLSVM_INVALID_ARGUMENT = 1,
  DLSVM_DIMENSION = 2,
  DLSVM_PARSE = 3,
  DLSVM_IO = 4,
  DLSVM_VERSION = 5,
  DLSVM_NOT_PSD = 6,
  DLSVM_NUMERIC = 7,
  DLSVM_INTERNAL = 8
} dlsvm_status;

typedef enum dlsvm_log_level {
  DLSVM_LOG_QUIET = 0,
  DLSVM_LOG_WARN = 1,
  DLSVM_LOG_INFO = 2
} dlsvm_log_level;

typedef struct dlsvm_dataset dlsvm_dataset;
typedef struct dlsvm_params dlsvm_params;
typedef struct dlsvm_model dlsvm_model;
typedef struct dlsvm_detection dlsvm_detection;
typedef struct dlsvm_results dlsvm_results;

DLSVM_API const char* dlsvm_version(void);
DLSVM_API const char* dlsvm_last_error(void);
DLSVM_API const char* dlsvm_status_name(dlsvm_status status);
DLSVM_API void dlsvm_set_log_level(dlsvm_log_level level);

/* ---- datasets ---------------------------------------------------------- */

/* label_column may be NULL (unlabeled). A named label column requires a
 * header row. */
DLSVM_API dlsvm_status dlsvm_dataset_load_csv(const char* path,
                                              const char* label_column,
                                              int has_header,
                                              dlsvm_dataset** out);
/* values: column-major features x samples. labels: NULL or `samples` 0/1
 * entries. */
DLSVM_API dlsvm_status dlsvm_dataset_from_array(const double* values,
                                                size_t features, size_t samples,
                                                const int* labels,
                                                dlsvm_dataset** out);
DLSVM_API void dlsvm_dataset_free(dlsvm_dataset* ds);
DLSVM_API size_t dlsvm_dataset_features(const dlsvm_dataset* ds);
DLSVM_API size_t dlsvm_dataset_samples(const dlsvm_dataset* ds);
DLSVM_API int dlsvm_dataset_has_labels(const dlsvm_dataset* ds);
/* -1 when unlabeled or out of range. */
DLSVM_API int dlsvm_dataset_label(const dlsvm_dataset* ds, size_t sample);

/* ---- hyperparameters and grids ---------------------------------------- */

DLSVM_API dlsvm_status dlsvm_params_create(dlsvm_params** out);
DLSVM_API void dlsvm_params_free(dlsvm_params* p);

/* Keys (type):
 *   model (string: dl-ocsvm, dpl-ocsvm, kdl-ocsvm, kdpl-ocsvm)
 *   atoms (int, 0 = twice the feature count)   sparsity (int)
 *   beta, gamma, nu (double)                    outer_iters (int)
 *   kernel (string: linear, rbf, polynomial)    sigma, coef (double)
 *   degree (int)                                trim_tol, ocsvm_tol (double)
 *   seed (int, non-negative)                    trs (string: power, bidual)
 *   fixed_atom_trim, descent_guard, restrict_pair_updates (bool)
 * A setter called with a key of another type fails with
 * DLSVM_INVALID_ARGUMENT. Range checks happen at training time. */
DLSVM_API dlsvm_status dlsvm_params_set_int(dlsvm_params* p, const char* key,
                                            int64_t value);
DLSVM_API dlsvm_status dlsvm_params_set_double(dlsvm_params* p,
                                               const char* key, double value);
DLSVM_API dlsvm_status dlsvm_params_set_string(dlsvm_params* p,
                                               const char* key,
                                               const char* value);
DLSVM_API dlsvm_status dlsvm_params_set_bool(dlsvm_params* p, const char* key,
                                             int value);

/* Grid axes for dlsvm_grid_search and dlsvm_kfold. Keys: beta, gamma, nu,
 * sigma (each sigma becomes an rbf kernel). An empty axis keeps the base
 * value. */
DLSVM_API dlsvm_status dlsvm_params_set_grid(dlsvm_params* p, const char* key,
                                             const double* values, size_t n);
DLSVM_API dlsvm_status dlsvm_params_set_grid_seeds(dlsvm_params* p,
                                                   const uint64_t* seeds,
                                                   size_t n);
/* `count` seeds derived from `master`. */
DLSVM_API dlsvm_status dlsvm_params_derive_grid_seeds(dlsvm_params* p,
                                                      uint64_t master,
                                                      int count);
/* Number of configurations the grid expands to. */
DLSVM_API size_t dlsvm_params_grid_size(const dlsvm_params* p);

/* ---- models ------------------------------------------------------------ */

/* standardize != 0 fits per-feature scaling on the training data, stores it
 * in the model, and detection applies it. */
DLSVM_API dlsvm_status dlsvm_train(const dlsvm_dataset* ds,
                                   const dlsvm_params* p, int standardize,
                                   dlsvm_model** out);
DLSVM_API dlsvm_status dlsvm_model_save(const dlsvm_model* m, const char* path);
DLSVM_API dlsvm_status dlsvm_model_load(const char* path, dlsvm_model** out);
DLSVM_API void dlsvm_model_free(dlsvm_model* m);
DLSVM_API const char* dlsvm_model_variant(const dlsvm_model* m);
DLSVM_API size_t dlsvm_model_features(const dlsvm_model* m);
DLSVM_API size_t dlsvm_model_atoms(const dlsvm_model* m);
DLSVM_API size_t dlsvm_model_trace_length(const dlsvm_model* m);
/* record: outer, inner, F, G, total. */
DLSVM_API dlsvm_status dlsvm_model_trace_record(const dlsvm_model* m,
                                                size_t index,
                                                double record[5]);
/* Columnar text: header line, then "outer inner F G total" per record. */
DLSVM_API dlsvm_status dlsvm_model_write_trace(const dlsvm_model* m,
                                               const char* path);

/* ---- detection --------------------------------------------------------- */

DLSVM_API dlsvm_status dlsvm_detect(const dlsvm_model* m,
                                    const dlsvm_dataset* ds,
                                    dlsvm_detection** out);
DLSVM_API void dlsvm_detection_free(dlsvm_detection* d);
DLSVM_API size_t dlsvm_detection_samples(const dlsvm_detection* d);
DLSVM_API double dlsvm_detection_score(const dlsvm_detection* d, size_t i);
DLSVM_API int dlsvm_detection_is_anomaly(const dlsvm_detection* d, size_t i);
DLSVM_API size_t dlsvm_detection_anomaly_count(const dlsvm_detection* d);
/* Lines "index score label" with label anomaly or normal. */
DLSVM_API dlsvm_status dlsvm_detection_write(const dlsvm_detection* d,
                                             const char* path);
/* Scores the detection against the dataset labels. */
DLSVM_API dlsvm_status dlsvm_detection_evaluate(const dlsvm_detection* d,
                                                const dlsvm_dataset* ds,
                                                double* ba, double* tpr,
                                                double* tnr);

/* ---- experiment protocols ---------------------------------------------- */

/* jobs <= 0 reads DLSVM_JOBS (default 1). */
DLSVM_API dlsvm_status dlsvm_grid_search(const dlsvm_dataset* ds,
                                         const dlsvm_params* p, int jobs,
                                         int standardize, dlsvm_results** out);
/* Stratified holdout of test_frac, k-fold selection on the remainder. The
 * results hold the single test report; best is 0. */
DLSVM_API dlsvm_status dlsvm_kfold(const dlsvm_dataset* ds,
                                   const dlsvm_params* p, int k,
                                   double test_frac, uint64_t seed, int jobs,
                                   int standardize, dlsvm_results** out);
/* One report per outlier count. */
DLSVM_API dlsvm_status dlsvm_sweep(const dlsvm_dataset* ds,
                                   const dlsvm_params* p, const int* counts,
                                   size_t n_counts, uint64_t seed, int jobs,
                                   int standardize, dlsvm_results** out);
DLSVM_API void dlsvm_results_free(dlsvm_results* r);
DLSVM_API size_t dlsvm_results_count(const dlsvm_results* r);
/* -1 when no report is valid. */
DLSVM_API int dlsvm_results_best(const dlsvm_results* r);
DLSVM_API int dlsvm_results_valid(const dlsvm_results* r, size_t i);
DLSVM_API double dlsvm_results_ba(const dlsvm_results* r, size_t i);
DLSVM_API double dlsvm_results_tpr(const dlsvm_results* r, size_t i);
DLSVM_API double dlsvm_results_tnr(const dlsvm_results* r, size_t i);
/* Owned by the handle. Tab-separated key=value lines, one per report. */
DLSVM_API const char* dlsvm_results_lines(const dlsvm_results* r);
/* Owned by the handle. Fixed-width table. */
DLSVM_API const char* dlsvm_results_table(const dlsvm_results* r);
/* Single line for report i. */
DLSVM_API const char* dlsvm_results_line(const dlsvm_results* r, size_t i);

#ifdef __cplusplus
}
#endif

#endif /* DLSVM_H_ */
