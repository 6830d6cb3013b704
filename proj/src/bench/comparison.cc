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

#include <atomic>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <limits>
#include <mutex>
#include <optional>
#include <thread>

#include <fmt/format.h>

#include "bench/trial.h"
#include "common/error.h"
#include "json.hpp"

namespace lazypi {
namespace {

void WriteText(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw IoError("write to '" + path.string() + "' failed");
}

}  // namespace

void MeanAndStandardError(const std::vector<double>& values, double& mean,
                          double& se) {
  const auto n = static_cast<double>(values.size());
  if (values.empty()) {
    mean = se = std::numeric_limits<double>::quiet_NaN();
    return;
  }
  double sum = 0.0;
  for (double v : values) sum += v;
  mean = sum / n;
  if (values.size() < 2) {
    se = std::numeric_limits<double>::quiet_NaN();
    return;
  }
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  se = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
}

std::vector<MethodAggregate> Aggregate(const std::vector<TrialResult>& rows,
                                       const std::vector<Method>& methods) {
  std::vector<MethodAggregate> out;
  for (Method method : methods) {
    std::vector<double> coverage, width, train, eval;
    for (const auto& row : rows) {
      if (row.method != method) continue;
      coverage.push_back(row.coverage);
      width.push_back(row.avg_width);
      train.push_back(row.train_seconds);
      eval.push_back(row.eval_seconds);
    }
    MethodAggregate agg;
    agg.method = method;
    agg.trials = static_cast<int>(coverage.size());
    MeanAndStandardError(coverage, agg.coverage_mean, agg.coverage_se);
    MeanAndStandardError(width, agg.avg_width_mean, agg.avg_width_se);
    MeanAndStandardError(train, agg.train_seconds_mean, agg.train_seconds_se);
    MeanAndStandardError(eval, agg.eval_seconds_mean, agg.eval_seconds_se);
    out.push_back(agg);
  }
  return out;
}

RegressionDataset LoadManifestData(const Manifest& manifest) {
  if (manifest.source == DataSource::kSimulate) return simulate_data(manifest.sim);
  return load_tabular(manifest.csv_path, manifest.response_column,
                      manifest.transform)
      .data;
}

std::string ResultsCsv(const std::vector<TrialResult>& rows) {
  std::string out =
      "method,trial,seed,coverage,avg_width,train_seconds,eval_seconds\n";
  for (const auto& r : rows) {
    out += fmt::format("{},{},{},{},{},{},{}\n", MethodName(r.method), r.trial,
                       r.seed, r.coverage, r.avg_width, r.train_seconds,
                       r.eval_seconds);
  }
  return out;
}

std::string AggregatesCsv(const std::vector<MethodAggregate>& rows) {
  std::string out =
      "method,trials,coverage_mean,coverage_se,avg_width_mean,avg_width_se,"
      "train_seconds_mean,train_seconds_se,eval_seconds_mean,eval_seconds_se\n";
  for (const auto& a : rows) {
    out += fmt::format("{},{},{},{},{},{},{},{},{},{}\n", MethodName(a.method),
                       a.trials, a.coverage_mean, a.coverage_se,
                       a.avg_width_mean, a.avg_width_se, a.train_seconds_mean,
                       a.train_seconds_se, a.eval_seconds_mean,
                       a.eval_seconds_se);
  }
  return out;
}

std::string ResolvedManifestJson(const Manifest& manifest,
                                 const ResolvedPrivacy& rp,
                                 const std::string& content_hash) {
  auto j = nlohmann::json::parse(ManifestToJson(manifest));
  nlohmann::json resolved;
  resolved["content_hash"] = content_hash;
  resolved["sigma"] = rp.sigma;
  resolved["sigma_calibrated"] = rp.calibrated;
  resolved["dp_iterations"] = rp.iterations;
  resolved["sampling_rate"] = rp.sampling_rate;
  resolved["epsilon_accounted"] = std::isfinite(rp.epsilon_accounted)
                                      ? nlohmann::json(rp.epsilon_accounted)
                                      : nlohmann::json("inf");
  resolved["epsilon_matches_nominal"] =
      rp.epsilon_accounted <= manifest.privacy.epsilon * (1.0 + 1e-9);
  j["resolved"] = resolved;
  return j.dump(2) + "\n";
}

ComparisonResult run_comparison(const Manifest& manifest,
                                const std::string& output_dir) {
  manifest.Validate();
  const RegressionDataset data = LoadManifestData(manifest);
  if (data.size() < manifest.n_train + 1) {
    throw InvalidArgument("dataset has " + std::to_string(data.size()) +
                          " rows; n_train + 1 are required");
  }
  ComparisonResult result;
  result.privacy = ResolvePrivacy(manifest, manifest.n_train);
  result.content_hash = ManifestContentHash(manifest);

  std::filesystem::path dir;
  if (!output_dir.empty()) {
    dir = output_dir;
    std::filesystem::create_directories(dir);
    WriteText(dir / "manifest.resolved",
              ResolvedManifestJson(manifest, result.privacy, result.content_hash));
  }

  const std::size_t per_trial = manifest.methods.size();
  const std::size_t cells = per_trial * static_cast<std::size_t>(manifest.trials);
  std::vector<std::optional<TrialResult>> slots(cells);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    for (std::size_t c = next++; c < cells; c = next++) {
      {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (failure) return;
      }
      const int trial = static_cast<int>(c / per_trial);
      const Method method = manifest.methods[c % per_trial];
      try {
        slots[c] = run_trial(method, data, manifest, result.privacy, trial,
                             TrialSeed(manifest.seed, trial));
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  if (manifest.workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < manifest.workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }

  for (auto& slot : slots) {
    if (slot) result.trials.push_back(*slot);
  }
  result.aggregates = Aggregate(result.trials, manifest.methods);
  if (!output_dir.empty()) {
    WriteText(dir / "results.csv", ResultsCsv(result.trials));
    WriteText(dir / "aggregates.csv", AggregatesCsv(result.aggregates));
  }
  if (failure) std::rethrow_exception(failure);
  return result;
}

}  // namespace lazypi
