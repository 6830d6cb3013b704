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

#ifndef LAZYPI_BENCH_TRIAL_H_
#define LAZYPI_BENCH_TRIAL_H_

#include <cstdint>
#include <string>
#include <vector>

#include "bench/manifest.h"
#include "intervals/intervals.h"
#include "nn/dataset.h"

namespace lazypi {

struct TrialResult {
  Method method = Method::kDpLazy;
  int trial = 0;
  std::uint64_t seed = 0;
  double coverage = 0.0;
  double avg_width = 0.0;  // +inf when any interval is unbounded
  double train_seconds = 0.0;
  double eval_seconds = 0.0;
};

struct TrainTestSplit {
  std::vector<Index> train;
  std::vector<Index> test;
};

// Random split determined by `seed` alone, so every method of a trial sees
// the same rows.
TrainTestSplit SplitIndices(Index n_total, Index n_train, std::uint64_t seed);

// Seed of trial `trial` under a manifest seed.
std::uint64_t TrialSeed(std::uint64_t manifest_seed, int trial);

// Coverage of `y` by `intervals` and their mean width.
void ScoreIntervals(const std::vector<PredictionInterval>& intervals,
                    const Vector& y, double& coverage, double& avg_width);

// Fits `method` on the training split and scores its intervals on the test
// split. `rp` must come from ResolvePrivacy for the training-set size.
TrialResult run_trial(Method method, const RegressionDataset& data,
                      const Manifest& manifest, const ResolvedPrivacy& rp,
                      int trial, std::uint64_t seed);

// DP-lazy intervals for arbitrary points, trained on all of `train`.
std::vector<PredictionInterval> dp_lazy_intervals(
    const RegressionDataset& train, const Eigen::Ref<const RowMatrix>& points,
    const Manifest& manifest, const ResolvedPrivacy& rp, std::uint64_t seed);

struct MethodAggregate {
  Method method = Method::kDpLazy;
  int trials = 0;
  double coverage_mean = 0.0;
  double coverage_se = 0.0;
  double avg_width_mean = 0.0;
  double avg_width_se = 0.0;
  double train_seconds_mean = 0.0;
  double train_seconds_se = 0.0;
  double eval_seconds_mean = 0.0;
  double eval_seconds_se = 0.0;
};

struct ComparisonResult {
  std::vector<TrialResult> trials;  // ordered by trial, then manifest method order
  std::vector<MethodAggregate> aggregates;
  ResolvedPrivacy privacy;
  std::string content_hash;
};

// Mean and standard error (sample SD / sqrt(count)); SE is NaN for a single
// value.
void MeanAndStandardError(const std::vector<double>& values, double& mean,
                          double& se);

std::vector<MethodAggregate> Aggregate(const std::vector<TrialResult>& rows,
                                       const std::vector<Method>& methods);

RegressionDataset LoadManifestData(const Manifest& manifest);

// Runs every (trial, method) cell. With a non-empty output_dir, writes
// results.csv, aggregates.csv and manifest.resolved there; when a cell fails
// the rows finished so far are still written before the error propagates.
ComparisonResult run_comparison(const Manifest& manifest,
                                const std::string& output_dir);

std::string ResultsCsv(const std::vector<TrialResult>& rows);
std::string AggregatesCsv(const std::vector<MethodAggregate>& rows);
std::string ResolvedManifestJson(const Manifest& manifest,
                                 const ResolvedPrivacy& rp,
                                 const std::string& content_hash);

struct StabilityReport {
  double eta = 0.0;
  double nu = 0.0;
  int trials = 0;
  Index test_points = 0;
  ResolvedPrivacy privacy;
  double slack = 0.0;  // CoverageSlack(eta, accounted epsilon, delta)
};

// Out-of-sample stability of the DP-lazy estimator on the manifest's data:
// the first split of the manifest seed provides the training rows and up to
// stability.test_points test rows.
StabilityReport run_stability(const Manifest& manifest);

}  // namespace lazypi

#endif  // LAZYPI_BENCH_TRIAL_H_
