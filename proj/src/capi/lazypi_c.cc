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

#include "lazypi/lazypi.h"

#include <cstdlib>
#include <cstring>
#include <exception>
#include <memory>
#include <new>
#include <string>

#include "bench/data.h"
#include "bench/manifest.h"
#include "bench/trial.h"
#include "common/error.h"
#include "intervals/intervals.h"
#include "privacy/accountant.h"

struct lazypi_dataset {
  lazypi::RegressionDataset data;
  bool has_responses = true;
};

struct lazypi_manifest {
  lazypi::Manifest manifest;
};

struct lazypi_comparison {
  lazypi::ComparisonResult result;
  double epsilon_nominal = 0.0;
  double delta = 0.0;
};

namespace {

thread_local std::string g_last_error;

lazypi_status Fail(lazypi_status status, const std::string& message) {
  g_last_error = message;
  return status;
}

lazypi_status FromCode(lazypi::ErrorCode code) {
  switch (code) {
    case lazypi::ErrorCode::kInvalidArgument:
      return LAZYPI_ERR_INVALID_ARGUMENT;
    case lazypi::ErrorCode::kDimensionMismatch:
      return LAZYPI_ERR_DIMENSION;
    case lazypi::ErrorCode::kNumerical:
      return LAZYPI_ERR_NUMERICAL;
    case lazypi::ErrorCode::kIo:
      return LAZYPI_ERR_IO;
    case lazypi::ErrorCode::kParse:
      return LAZYPI_ERR_PARSE;
    case lazypi::ErrorCode::kRuntime:
      return LAZYPI_ERR_RUNTIME;
  }
  return LAZYPI_ERR_RUNTIME;
}

// Runs `body`, translating exceptions into status codes.
template <typename Body>
lazypi_status Guard(Body&& body) {
  try {
    body();
    return LAZYPI_OK;
  } catch (const lazypi::Error& e) {
    return Fail(FromCode(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return Fail(LAZYPI_ERR_RUNTIME, "out of memory");
  } catch (const std::exception& e) {
    return Fail(LAZYPI_ERR_RUNTIME, e.what());
  } catch (...) {
    return Fail(LAZYPI_ERR_RUNTIME, "unknown error");
  }
}

#define LAZYPI_REQUIRE(cond, what)                              \
  do {                                                          \
    if (!(cond)) return Fail(LAZYPI_ERR_INVALID_ARGUMENT, what); \
  } while (0)

char* CopyString(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

// Static storage for method names handed out through result structs.
const char* StaticMethodName(lazypi::Method method) {
  switch (method) {
    case lazypi::Method::kNaive:
      return "naive";
    case lazypi::Method::kJackknife:
      return "jackknife";
    case lazypi::Method::kJackknifePlus:
      return "jackknife_plus";
    case lazypi::Method::kLazyFinetune:
      return "lazy_finetune";
    case lazypi::Method::kDpLazy:
      return "dp_lazy";
  }
  return "unknown";
}

lazypi_privacy_info ToInfo(const lazypi::ResolvedPrivacy& rp,
                           const lazypi::Manifest& m) {
  lazypi_privacy_info info;
  info.sigma = rp.sigma;
  info.sigma_calibrated = rp.calibrated ? 1 : 0;
  info.iterations = rp.iterations;
  info.sampling_rate = rp.sampling_rate;
  info.epsilon_accounted = rp.epsilon_accounted;
  info.epsilon_nominal = m.privacy.epsilon;
  info.delta = m.privacy.delta;
  return info;
}

lazypi_interval ToC(const lazypi::PredictionInterval& iv) {
  return {iv.lower, iv.upper};
}

}  // namespace

extern "C" {

const char* lazypi_version(void) { return "0.1.0"; }

const char* lazypi_last_error(void) { return g_last_error.c_str(); }

const char* lazypi_status_name(lazypi_status status) {
  switch (status) {
    case LAZYPI_OK:
      return "ok";
    case LAZYPI_ERR_INVALID_ARGUMENT:
      return "invalid argument";
    case LAZYPI_ERR_DIMENSION:
      return "dimension mismatch";
    case LAZYPI_ERR_NUMERICAL:
      return "numerical failure";
    case LAZYPI_ERR_IO:
      return "i/o error";
    case LAZYPI_ERR_PARSE:
      return "parse error";
    case LAZYPI_ERR_RUNTIME:
      return "runtime error";
  }
  return "unknown status";
}

void lazypi_string_free(char* s) { std::free(s); }

void lazypi_sim_config_default(lazypi_sim_config* cfg) {
  if (cfg == nullptr) return;
  const lazypi::SimConfig d;
  cfg->n_total = static_cast<size_t>(d.n_total);
  cfg->p = static_cast<size_t>(d.p);
  cfg->x_scale = d.x_scale;
  cfg->noise_sd = d.noise_sd;
  cfg->beta_a = d.beta_a;
  cfg->beta_b = d.beta_b;
  cfg->seed = d.seed;
}

lazypi_status lazypi_dataset_create(const double* features,
                                    const double* responses, size_t rows,
                                    size_t cols, lazypi_dataset** out) {
  LAZYPI_REQUIRE(out != nullptr, "out is NULL");
  LAZYPI_REQUIRE(rows == 0 || features != nullptr, "features is NULL");
  return Guard([&] {
    const auto r = static_cast<lazypi::Index>(rows);
    const auto c = static_cast<lazypi::Index>(cols);
    lazypi::RowMatrix x = rows == 0
                              ? lazypi::RowMatrix(0, c)
                              : lazypi::RowMatrix(
                                    Eigen::Map<const lazypi::RowMatrix>(features, r, c));
    lazypi::Vector y = responses == nullptr
                           ? lazypi::Vector::Zero(r)
                           : lazypi::Vector(Eigen::Map<const lazypi::Vector>(responses, r));
    *out = new lazypi_dataset{lazypi::RegressionDataset(std::move(x), std::move(y)),
                              responses != nullptr};
  });
}

lazypi_status lazypi_dataset_simulate(const lazypi_sim_config* cfg,
                                      lazypi_dataset** out) {
  LAZYPI_REQUIRE(cfg != nullptr && out != nullptr, "NULL argument");
  return Guard([&] {
    lazypi::SimConfig sim;
    sim.n_total = static_cast<lazypi::Index>(cfg->n_total);
    sim.p = static_cast<lazypi::Index>(cfg->p);
    sim.x_scale = cfg->x_scale;
    sim.noise_sd = cfg->noise_sd;
    sim.beta_a = cfg->beta_a;
    sim.beta_b = cfg->beta_b;
    sim.seed = cfg->seed;
    *out = new lazypi_dataset{lazypi::simulate_data(sim), true};
  });
}

lazypi_status lazypi_dataset_load_csv(const char* path,
                                      const char* response_column,
                                      lazypi_transform transform,
                                      lazypi_dataset** out,
                                      size_t* dropped_rows) {
  LAZYPI_REQUIRE(path != nullptr && out != nullptr, "NULL argument");
  return Guard([&] {
    const auto t = transform == LAZYPI_TRANSFORM_LOG1P
                       ? lazypi::ResponseTransform::kLog1p
                       : lazypi::ResponseTransform::kIdentity;
    lazypi::TabularData loaded = lazypi::load_tabular(
        path, response_column == nullptr ? "" : response_column, t);
    if (dropped_rows != nullptr) {
      *dropped_rows = static_cast<size_t>(loaded.dropped_rows);
    }
    *out = new lazypi_dataset{std::move(loaded.data), response_column != nullptr};
  });
}

lazypi_status lazypi_dataset_write_csv(const lazypi_dataset* data,
                                       const char* path) {
  LAZYPI_REQUIRE(data != nullptr && path != nullptr, "NULL argument");
  return Guard([&] { lazypi::write_dataset_csv(path, data->data); });
}

size_t lazypi_dataset_rows(const lazypi_dataset* data) {
  return data == nullptr ? 0 : static_cast<size_t>(data->data.size());
}

size_t lazypi_dataset_cols(const lazypi_dataset* data) {
  return data == nullptr ? 0 : static_cast<size_t>(data->data.dim());
}

int lazypi_dataset_has_responses(const lazypi_dataset* data) {
  return data != nullptr && data->has_responses ? 1 : 0;
}

lazypi_status lazypi_dataset_row(const lazypi_dataset* data, size_t i,
                                 double* features, double* response) {
  LAZYPI_REQUIRE(data != nullptr, "dataset is NULL");
  LAZYPI_REQUIRE(i < lazypi_dataset_rows(data), "row index out of range");
  const auto row = static_cast<lazypi::Index>(i);
  if (features != nullptr) {
    for (lazypi::Index k = 0; k < data->data.dim(); ++k) {
      features[k] = data->data.features()(row, k);
    }
  }
  if (response != nullptr) *response = data->data.responses()(row);
  return LAZYPI_OK;
}

void lazypi_dataset_free(lazypi_dataset* data) { delete data; }

lazypi_status lazypi_accountant_epsilon(double sigma, double q, int64_t steps,
                                        double delta, double* epsilon) {
  LAZYPI_REQUIRE(epsilon != nullptr, "epsilon is NULL");
  return Guard([&] { *epsilon = lazypi::account_privacy(sigma, q, steps, delta); });
}

lazypi_status lazypi_calibrate_sigma(double epsilon, double q, int64_t steps,
                                     double delta, double* sigma) {
  LAZYPI_REQUIRE(sigma != nullptr, "sigma is NULL");
  return Guard([&] {
    *sigma = lazypi::CalibrateNoiseMultiplier(epsilon, q, steps, delta);
  });
}

lazypi_status lazypi_coverage_slack(double eta, double epsilon, double delta,
                                    double* slack) {
  LAZYPI_REQUIRE(slack != nullptr, "slack is NULL");
  LAZYPI_REQUIRE(eta >= 0.0 && eta <= 1.0, "eta must lie in [0, 1]");
  LAZYPI_REQUIRE(epsilon >= 0.0, "epsilon must be >= 0");
  LAZYPI_REQUIRE(delta >= 0.0 && delta < 1.0, "delta must lie in [0, 1)");
  *slack = lazypi::CoverageSlack(eta, epsilon, delta);
  return LAZYPI_OK;
}

lazypi_status lazypi_quantile_upper(const double* values, size_t n,
                                    double alpha, double* out) {
  LAZYPI_REQUIRE(out != nullptr && (values != nullptr || n == 0), "NULL argument");
  return Guard([&] { *out = lazypi::quantile_upper({values, n}, alpha); });
}

lazypi_status lazypi_quantile_lower(const double* values, size_t n,
                                    double alpha, double* out) {
  LAZYPI_REQUIRE(out != nullptr && (values != nullptr || n == 0), "NULL argument");
  return Guard([&] { *out = lazypi::quantile_lower({values, n}, alpha); });
}

lazypi_status lazypi_naive_interval(double fhat_x, const double* residuals,
                                    size_t n, double alpha,
                                    lazypi_interval* out) {
  LAZYPI_REQUIRE(out != nullptr && (residuals != nullptr || n == 0), "NULL argument");
  return Guard([&] {
    *out = ToC(lazypi::naive_interval(fhat_x, {residuals, n}, alpha));
  });
}

lazypi_status lazypi_jackknife_interval(double fhat_x,
                                        const double* loo_residuals, size_t n,
                                        double alpha, lazypi_interval* out) {
  LAZYPI_REQUIRE(out != nullptr && (loo_residuals != nullptr || n == 0),
                 "NULL argument");
  return Guard([&] {
    *out = ToC(lazypi::jackknife_interval(fhat_x, {loo_residuals, n}, alpha));
  });
}

lazypi_status lazypi_jackknife_plus_interval(const double* loo_preds,
                                             const double* loo_residuals,
                                             size_t n, double alpha,
                                             lazypi_interval* out) {
  LAZYPI_REQUIRE(out != nullptr && ((loo_preds != nullptr && loo_residuals != nullptr) || n == 0),
                 "NULL argument");
  return Guard([&] {
    *out = ToC(lazypi::jackknife_plus_interval({loo_preds, n},
                                               {loo_residuals, n}, alpha));
  });
}

lazypi_status lazypi_dp_lazy_interval(const double* loo_preds,
                                      const double* loo_residuals, size_t n,
                                      double alpha, double nu,
                                      lazypi_interval* out) {
  LAZYPI_REQUIRE(out != nullptr && ((loo_preds != nullptr && loo_residuals != nullptr) || n == 0),
                 "NULL argument");
  return Guard([&] {
    *out = ToC(lazypi::dp_lazy_interval({loo_preds, n}, {loo_residuals, n},
                                        lazypi::IntervalConfig{alpha, nu}));
  });
}

lazypi_status lazypi_manifest_default(lazypi_manifest** out) {
  LAZYPI_REQUIRE(out != nullptr, "out is NULL");
  return Guard([&] { *out = new lazypi_manifest{}; });
}

lazypi_status lazypi_manifest_load(const char* path, lazypi_manifest** out) {
  LAZYPI_REQUIRE(path != nullptr && out != nullptr, "NULL argument");
  return Guard([&] { *out = new lazypi_manifest{lazypi::LoadManifest(path)}; });
}

lazypi_status lazypi_manifest_parse(const char* json, lazypi_manifest** out) {
  LAZYPI_REQUIRE(json != nullptr && out != nullptr, "NULL argument");
  return Guard([&] { *out = new lazypi_manifest{lazypi::ParseManifest(json)}; });
}

lazypi_status lazypi_manifest_set(lazypi_manifest* manifest, const char* key,
                                  const char* value) {
  LAZYPI_REQUIRE(manifest != nullptr && key != nullptr && value != nullptr,
                 "NULL argument");
  return Guard([&] {
    lazypi::Manifest updated = manifest->manifest;
    lazypi::SetManifestValue(updated, key, value);
    manifest->manifest = std::move(updated);
  });
}

lazypi_status lazypi_manifest_to_json(const lazypi_manifest* manifest,
                                      char** out) {
  LAZYPI_REQUIRE(manifest != nullptr && out != nullptr, "NULL argument");
  return Guard([&] {
    *out = CopyString(lazypi::ManifestToJson(manifest->manifest) + "\n");
  });
}

lazypi_status lazypi_manifest_content_hash(const lazypi_manifest* manifest,
                                           char** out) {
  LAZYPI_REQUIRE(manifest != nullptr && out != nullptr, "NULL argument");
  return Guard([&] {
    *out = CopyString(lazypi::ManifestContentHash(manifest->manifest));
  });
}

void lazypi_manifest_free(lazypi_manifest* manifest) { delete manifest; }

lazypi_status lazypi_manifest_resolve_privacy(const lazypi_manifest* manifest,
                                              size_t n,
                                              lazypi_privacy_info* out) {
  LAZYPI_REQUIRE(manifest != nullptr && out != nullptr, "NULL argument");
  return Guard([&] {
    manifest->manifest.Validate();
    const lazypi::Index rows = n == 0 ? manifest->manifest.n_train
                                      : static_cast<lazypi::Index>(n);
    *out = ToInfo(lazypi::ResolvePrivacy(manifest->manifest, rows),
                  manifest->manifest);
  });
}

lazypi_status lazypi_run_comparison(const lazypi_manifest* manifest,
                                    const char* output_dir,
                                    lazypi_comparison** out) {
  LAZYPI_REQUIRE(manifest != nullptr && out != nullptr, "NULL argument");
  return Guard([&] {
    auto c = std::make_unique<lazypi_comparison>();
    c->result = lazypi::run_comparison(manifest->manifest,
                                       output_dir == nullptr ? "" : output_dir);
    c->epsilon_nominal = manifest->manifest.privacy.epsilon;
    c->delta = manifest->manifest.privacy.delta;
    *out = c.release();
  });
}

size_t lazypi_comparison_trial_count(const lazypi_comparison* c) {
  return c == nullptr ? 0 : c->result.trials.size();
}

lazypi_status lazypi_comparison_trial(const lazypi_comparison* c, size_t i,
                                      lazypi_trial_result* out) {
  LAZYPI_REQUIRE(c != nullptr && out != nullptr, "NULL argument");
  LAZYPI_REQUIRE(i < c->result.trials.size(), "trial index out of range");
  const auto& r = c->result.trials[i];
  *out = {StaticMethodName(r.method), r.trial,         r.seed,
          r.coverage,                 r.avg_width,     r.train_seconds,
          r.eval_seconds};
  return LAZYPI_OK;
}

size_t lazypi_comparison_method_count(const lazypi_comparison* c) {
  return c == nullptr ? 0 : c->result.aggregates.size();
}

lazypi_status lazypi_comparison_aggregate(const lazypi_comparison* c, size_t i,
                                          lazypi_aggregate* out) {
  LAZYPI_REQUIRE(c != nullptr && out != nullptr, "NULL argument");
  LAZYPI_REQUIRE(i < c->result.aggregates.size(), "method index out of range");
  const auto& a = c->result.aggregates[i];
  *out = {StaticMethodName(a.method), a.trials,
          a.coverage_mean,            a.coverage_se,
          a.avg_width_mean,           a.avg_width_se,
          a.train_seconds_mean,       a.train_seconds_se,
          a.eval_seconds_mean,        a.eval_seconds_se};
  return LAZYPI_OK;
}

lazypi_status lazypi_comparison_privacy(const lazypi_comparison* c,
                                        lazypi_privacy_info* out) {
  LAZYPI_REQUIRE(c != nullptr && out != nullptr, "NULL argument");
  const auto& rp = c->result.privacy;
  out->sigma = rp.sigma;
  out->sigma_calibrated = rp.calibrated ? 1 : 0;
  out->iterations = rp.iterations;
  out->sampling_rate = rp.sampling_rate;
  out->epsilon_accounted = rp.epsilon_accounted;
  out->epsilon_nominal = c->epsilon_nominal;
  out->delta = c->delta;
  return LAZYPI_OK;
}

void lazypi_comparison_free(lazypi_comparison* c) { delete c; }

lazypi_status lazypi_dp_lazy_intervals(const lazypi_manifest* manifest,
                                       const lazypi_dataset* train,
                                       const lazypi_dataset* points,
                                       uint64_t seed, lazypi_interval* out,
                                       lazypi_privacy_info* privacy) {
  LAZYPI_REQUIRE(manifest != nullptr && train != nullptr && points != nullptr &&
                     out != nullptr,
                 "NULL argument");
  LAZYPI_REQUIRE(train->has_responses, "training data needs responses");
  return Guard([&] {
    const lazypi::Manifest& m = manifest->manifest;
    m.Validate();
    if (points->data.dim() != train->data.dim()) {
      throw lazypi::DimensionMismatch("points and training data differ in columns");
    }
    const lazypi::ResolvedPrivacy rp = lazypi::ResolvePrivacy(m, train->data.size());
    const auto intervals = lazypi::dp_lazy_intervals(
        train->data, points->data.features(), m, rp, seed);
    for (std::size_t t = 0; t < intervals.size(); ++t) out[t] = ToC(intervals[t]);
    if (privacy != nullptr) *privacy = ToInfo(rp, m);
  });
}

lazypi_status lazypi_run_stability(const lazypi_manifest* manifest,
                                   lazypi_stability_report* out) {
  LAZYPI_REQUIRE(manifest != nullptr && out != nullptr, "NULL argument");
  return Guard([&] {
    const lazypi::StabilityReport r = lazypi::run_stability(manifest->manifest);
    out->eta = r.eta;
    out->nu = r.nu;
    out->trials = r.trials;
    out->test_points = static_cast<size_t>(r.test_points);
    out->slack = r.slack;
    out->privacy = ToInfo(r.privacy, manifest->manifest);
  });
}

}  // extern "C"
