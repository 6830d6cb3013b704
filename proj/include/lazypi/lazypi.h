/*
 * Copyright 2026 The lazypi Authors.
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
 * C interface to lazypi: distribution-free prediction intervals for neural
 * network regression from one differentially private fit plus closed-form
 * linearized leave-one-out solves, with jackknife baselines and a benchmark
 * harness.
 *
 * Every fallible function returns a lazypi_status. On failure the message is
 * available from lazypi_last_error() on the calling thread until the next
 * failing call. Handles are opaque; release them with the matching _free
 * function. Passing NULL to a _free function is a no-op.
 */
#ifndef LAZYPI_LAZYPI_H_
#define LAZYPI_LAZYPI_H_

#include <stddef.h>
#include <stdint.h>

#if defined(LAZYPI_BUILDING_LIBRARY)
#define LAZYPI_API __attribute__((visibility("default")))
#else
#define LAZYPI_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum lazypi_status {
  LAZYPI_OK = 0,
  LAZYPI_ERR_INVALID_ARGUMENT = 1,
  LAZYPI_ERR_DIMENSION = 2,
  LAZYPI_ERR_NUMERICAL = 3,
  LAZYPI_ERR_IO = 4,
  LAZYPI_ERR_PARSE = 5,
  LAZYPI_ERR_RUNTIME = 6
} lazypi_status;

LAZYPI_API const char* lazypi_version(void);
LAZYPI_API const char* lazypi_last_error(void);
LAZYPI_API const char* lazypi_status_name(lazypi_status status);
LAZYPI_API void lazypi_string_free(char* s);

/* ---- datasets ---------------------------------------------------------- */

typedef struct lazypi_dataset lazypi_dataset;

typedef enum lazypi_transform {
  LAZYPI_TRANSFORM_IDENTITY = 0,
  LAZYPI_TRANSFORM_LOG1P = 1
} lazypi_transform;

typedef struct lazypi_sim_config {
  size_t n_total;
  size_t p;
  double x_scale;
  double noise_sd;
  double beta_a;
  double beta_b;
  uint64_t seed;
} lazypi_sim_config;

/* N = 5000, p = 16, x_scale = 5, noise variance 0.5, Beta(1, 2.5), seed 0. */
LAZYPI_API void lazypi_sim_config_default(lazypi_sim_config* cfg);

/* `features` is row-major, rows x cols. `responses` may be NULL for
 * unlabeled points. */
LAZYPI_API lazypi_status lazypi_dataset_create(const double* features,
                                               const double* responses,
                                               size_t rows, size_t cols,
                                               lazypi_dataset** out);
LAZYPI_API lazypi_status lazypi_dataset_simulate(const lazypi_sim_config* cfg,
                                                 lazypi_dataset** out);
/* With response_column == NULL every column is a feature and the dataset
 * has no responses (they read as 0). `dropped_rows` may be NULL. */
LAZYPI_API lazypi_status lazypi_dataset_load_csv(const char* path,
                                                 const char* response_column,
                                                 lazypi_transform transform,
                                                 lazypi_dataset** out,
                                                 size_t* dropped_rows);
LAZYPI_API lazypi_status lazypi_dataset_write_csv(const lazypi_dataset* data,
                                                  const char* path);
LAZYPI_API size_t lazypi_dataset_rows(const lazypi_dataset* data);
LAZYPI_API size_t lazypi_dataset_cols(const lazypi_dataset* data);
LAZYPI_API int lazypi_dataset_has_responses(const lazypi_dataset* data);
/* Copies row i: cols features into `features` and the response into
 * `*response`. Either output may be NULL. */
LAZYPI_API lazypi_status lazypi_dataset_row(const lazypi_dataset* data,
                                            size_t i, double* features,
                                            double* response);
LAZYPI_API void lazypi_dataset_free(lazypi_dataset* data);

/* ---- privacy ----------------------------------------------------------- */

/* Epsilon spent by `steps` rounds of the Poisson-subsampled Gaussian
 * mechanism (noise multiplier sigma, rate q) at `delta`. sigma == 0 yields
 * +inf; steps == 0 yields 0. */
LAZYPI_API lazypi_status lazypi_accountant_epsilon(double sigma, double q,
                                                   int64_t steps, double delta,
                                                   double* epsilon);
LAZYPI_API lazypi_status lazypi_calibrate_sigma(double epsilon, double q,
                                                int64_t steps, double delta,
                                                double* sigma);
/* 3 * sqrt(2 eta + 2 epsilon + delta). */
LAZYPI_API lazypi_status lazypi_coverage_slack(double eta, double epsilon,
                                               double delta, double* slack);

/* ---- intervals --------------------------------------------------------- */

typedef struct lazypi_interval {
  double lower;
  double upper;
} lazypi_interval;

LAZYPI_API lazypi_status lazypi_quantile_upper(const double* values, size_t n,
                                               double alpha, double* out);
LAZYPI_API lazypi_status lazypi_quantile_lower(const double* values, size_t n,
                                               double alpha, double* out);
LAZYPI_API lazypi_status lazypi_naive_interval(double fhat_x,
                                               const double* residuals,
                                               size_t n, double alpha,
                                               lazypi_interval* out);
LAZYPI_API lazypi_status lazypi_jackknife_interval(double fhat_x,
                                                   const double* loo_residuals,
                                                   size_t n, double alpha,
                                                   lazypi_interval* out);
LAZYPI_API lazypi_status lazypi_jackknife_plus_interval(
    const double* loo_preds, const double* loo_residuals, size_t n,
    double alpha, lazypi_interval* out);
LAZYPI_API lazypi_status lazypi_dp_lazy_interval(const double* loo_preds,
                                                 const double* loo_residuals,
                                                 size_t n, double alpha,
                                                 double nu,
                                                 lazypi_interval* out);

/* ---- manifests --------------------------------------------------------- */

typedef struct lazypi_manifest lazypi_manifest;

LAZYPI_API lazypi_status lazypi_manifest_default(lazypi_manifest** out);
LAZYPI_API lazypi_status lazypi_manifest_load(const char* path,
                                              lazypi_manifest** out);
LAZYPI_API lazypi_status lazypi_manifest_parse(const char* json,
                                               lazypi_manifest** out);
/* Dotted key ("interval.alpha"); the value is parsed as JSON when possible
 * and taken as a string otherwise. The manifest is unchanged on error. */
LAZYPI_API lazypi_status lazypi_manifest_set(lazypi_manifest* manifest,
                                             const char* key,
                                             const char* value);
/* Caller frees *out with lazypi_string_free. */
LAZYPI_API lazypi_status lazypi_manifest_to_json(const lazypi_manifest* manifest,
                                                 char** out);
LAZYPI_API lazypi_status lazypi_manifest_content_hash(
    const lazypi_manifest* manifest, char** out);
LAZYPI_API void lazypi_manifest_free(lazypi_manifest* manifest);

typedef struct lazypi_privacy_info {
  double sigma;
  int sigma_calibrated;
  int iterations;
  double sampling_rate;
  double epsilon_accounted;
  double epsilon_nominal;
  double delta;
} lazypi_privacy_info;

/* DP-SGD settings the manifest implies for a training set of n rows;
 * n == 0 uses the manifest's n_train. */
LAZYPI_API lazypi_status lazypi_manifest_resolve_privacy(
    const lazypi_manifest* manifest, size_t n, lazypi_privacy_info* out);

/* ---- experiments ------------------------------------------------------- */

typedef struct lazypi_trial_result {
  const char* method; /* static string */
  int trial;
  uint64_t seed;
  double coverage;
  double avg_width;
  double train_seconds;
  double eval_seconds;
} lazypi_trial_result;

typedef struct lazypi_aggregate {
  const char* method; /* static string */
  int trials;
  double coverage_mean;
  double coverage_se;
  double avg_width_mean;
  double avg_width_se;
  double train_seconds_mean;
  double train_seconds_se;
  double eval_seconds_mean;
  double eval_seconds_se;
} lazypi_aggregate;

typedef struct lazypi_comparison lazypi_comparison;

/* Runs every (trial, method) cell of the manifest. With a non-NULL,
 * non-empty output_dir, writes results.csv, aggregates.csv and
 * manifest.resolved there. */
LAZYPI_API lazypi_status lazypi_run_comparison(const lazypi_manifest* manifest,
                                               const char* output_dir,
                                               lazypi_comparison** out);
LAZYPI_API size_t lazypi_comparison_trial_count(const lazypi_comparison* c);
LAZYPI_API lazypi_status lazypi_comparison_trial(const lazypi_comparison* c,
                                                 size_t i,
                                                 lazypi_trial_result* out);
LAZYPI_API size_t lazypi_comparison_method_count(const lazypi_comparison* c);
LAZYPI_API lazypi_status lazypi_comparison_aggregate(const lazypi_comparison* c,
                                                     size_t i,
                                                     lazypi_aggregate* out);
LAZYPI_API lazypi_status lazypi_comparison_privacy(const lazypi_comparison* c,
                                                   lazypi_privacy_info* out);
LAZYPI_API void lazypi_comparison_free(lazypi_comparison* c);

/* DP-lazy intervals at every row of `points`, trained on all of `train`.
 * `out` must hold lazypi_dataset_rows(points) entries. `privacy` may be
 * NULL. */
LAZYPI_API lazypi_status lazypi_dp_lazy_intervals(
    const lazypi_manifest* manifest, const lazypi_dataset* train,
    const lazypi_dataset* points, uint64_t seed, lazypi_interval* out,
    lazypi_privacy_info* privacy);

typedef struct lazypi_stability_report {
  double eta;
  double nu;
  int trials;
  size_t test_points;
  double slack;
  lazypi_privacy_info privacy;
} lazypi_stability_report;

LAZYPI_API lazypi_status lazypi_run_stability(const lazypi_manifest* manifest,
                                              lazypi_stability_report* out);

#ifdef __cplusplus
}  /* extern "C" */
#endif

#endif  /* LAZYPI_LAZYPI_H_ */
