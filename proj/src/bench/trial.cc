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

#include "bench/trial.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>

#include "common/error.h"
#include "common/random.h"
#include "lazy/lazy_loo.h"
#include "nn/sgd.h"
#include "privacy/privacy.h"

namespace lazypi {
namespace {

constexpr std::uint64_t kLazySeedSalt = 1;
constexpr std::uint64_t kFullModelSalt = 2;
constexpr std::uint64_t kLooSaltBase = 1000;

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double Seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

// Intervals from a matrix of leave-one-out predictions (rows: models,
// columns: points).
std::vector<PredictionInterval> JackknifePlusColumns(
    const Eigen::MatrixXd& preds, const Vector& residuals,
    const IntervalConfig& cfg) {
  const auto n = static_cast<std::size_t>(preds.rows());
  std::vector<double> column(n);
  std::vector<double> r(residuals.data(), residuals.data() + residuals.size());
  std::vector<PredictionInterval> out;
  out.reserve(static_cast<std::size_t>(preds.cols()));
  for (Index t = 0; t < preds.cols(); ++t) {
    for (std::size_t j = 0; j < n; ++j) column[j] = preds(static_cast<Index>(j), t);
    out.push_back(dp_lazy_interval(column, r, cfg));
  }
  return out;
}

std::vector<PredictionInterval> CenteredColumns(const Vector& centers,
                                                const Vector& residuals,
                                                double alpha, bool naive) {
  std::vector<double> r(residuals.data(), residuals.data() + residuals.size());
  // The margin does not depend on the point; compute it once.
  const PredictionInterval unit =
      naive ? naive_interval(0.0, r, alpha) : jackknife_interval(0.0, r, alpha);
  std::vector<PredictionInterval> out;
  out.reserve(static_cast<std::size_t>(centers.size()));
  for (Index t = 0; t < centers.size(); ++t) {
    out.push_back({centers(t) + unit.lower, centers(t) + unit.upper});
  }
  return out;
}

void RequireFinite(const ParamVector& params, const char* what) {
  if (!params.values.allFinite()) {
    throw NumericalError(std::string(what) +
                         " diverged to non-finite parameters; lower the learning rate");
  }
}

struct LooModels {
  std::vector<ParamVector> params;
  Vector residuals;
};

LooModels TrainLooNetworks(const RegressionDataset& train,
                           const MlpArchitecture& arch, const SgdConfig& sgd,
                           std::uint64_t seed) {
  const Index n = train.size();
  LooModels out;
  out.params.reserve(static_cast<std::size_t>(n));
  out.residuals.resize(n);
  for (Index j = 0; j < n; ++j) {
    ParamVector theta =
        train_sgd(train.Without(j), arch, sgd,
                  MixSeed(seed, kLooSaltBase + static_cast<std::uint64_t>(j)));
    RequireFinite(theta, "leave-one-out training");
    out.residuals(j) = std::abs(
        train.responses()(j) -
        forward(theta, arch, train.features().row(j).transpose()));
    out.params.push_back(std::move(theta));
  }
  return out;
}

LooFit FitLazy(const RegressionDataset& train, const MlpArchitecture& arch,
               const Manifest& manifest, const ResolvedPrivacy& rp,
               double sigma, std::uint64_t seed) {
  DpSgdConfig cfg = MakeDpSgdConfig(manifest, rp, MixSeed(seed, kLazySeedSalt));
  cfg.noise_scale = sigma;
  const ParamVector init = dp_sgd_train(train, arch, cfg).first;
  RequireFinite(init, "DP-SGD");
  return fit_all_loo(init, arch, train, manifest.lazy);
}

}  // namespace

TrainTestSplit SplitIndices(Index n_total, Index n_train, std::uint64_t seed) {
  if (n_train < 1 || n_train >= n_total) {
    throw InvalidArgument("split needs 1 <= n_train < n_total");
  }
  std::vector<Index> order(static_cast<std::size_t>(n_total));
  std::iota(order.begin(), order.end(), Index{0});
  Engine engine = MakeEngine(seed, Stream::kSplit);
  std::shuffle(order.begin(), order.end(), engine);
  TrainTestSplit split;
  split.train.assign(order.begin(), order.begin() + n_train);
  split.test.assign(order.begin() + n_train, order.end());
  return split;
}

std::uint64_t TrialSeed(std::uint64_t manifest_seed, int trial) {
  return manifest_seed + static_cast<std::uint64_t>(trial);
}

void ScoreIntervals(const std::vector<PredictionInterval>& intervals,
                    const Vector& y, double& coverage, double& avg_width) {
  if (static_cast<Index>(intervals.size()) != y.size() || y.size() == 0) {
    throw DimensionMismatch("intervals and responses differ in length");
  }
  Index covered = 0;
  double width = 0.0;
  bool unbounded = false;
  for (Index t = 0; t < y.size(); ++t) {
    const auto& iv = intervals[static_cast<std::size_t>(t)];
    covered += iv.contains(y(t)) ? 1 : 0;
    if (!std::isfinite(iv.lower) || !std::isfinite(iv.upper)) {
      unbounded = true;
    } else {
      width += iv.width();
    }
  }
  coverage = static_cast<double>(covered) / static_cast<double>(y.size());
  avg_width = unbounded ? std::numeric_limits<double>::infinity()
                        : width / static_cast<double>(y.size());
}

TrialResult run_trial(Method method, const RegressionDataset& data,
                      const Manifest& manifest, const ResolvedPrivacy& rp,
                      int trial, std::uint64_t seed) {
  if (data.size() < manifest.n_train + 1) {
    throw InvalidArgument("dataset too small for n_train plus a test row");
  }
  const TrainTestSplit split = SplitIndices(data.size(), manifest.n_train, seed);
  const RegressionDataset train = data.Subset(split.train);
  const RegressionDataset test = data.Subset(split.test);
  const MlpArchitecture arch = manifest.Architecture(data.dim());
  const double alpha = manifest.interval.alpha;

  TrialResult result;
  result.method = method;
  result.trial = trial;
  result.seed = seed;

  std::vector<PredictionInterval> intervals;
  Stopwatch train_clock;
  double train_seconds = 0.0;
  switch (method) {
    case Method::kNaive: {
      const ParamVector theta = train_sgd(train, arch, manifest.training,
                                          MixSeed(seed, kFullModelSalt));
      RequireFinite(theta, "training");
      const Vector residuals =
          train.responses() - batch_forward(theta, arch, train.features());
      train_seconds = train_clock.Seconds();
      intervals = CenteredColumns(batch_forward(theta, arch, test.features()),
                                  residuals, alpha, /*naive=*/true);
      break;
    }
    case Method::kJackknife: {
      const ParamVector theta = train_sgd(train, arch, manifest.training,
                                          MixSeed(seed, kFullModelSalt));
      RequireFinite(theta, "training");
      const LooModels loo = TrainLooNetworks(train, arch, manifest.training, seed);
      train_seconds = train_clock.Seconds();
      intervals = CenteredColumns(batch_forward(theta, arch, test.features()),
                                  loo.residuals, alpha, /*naive=*/false);
      break;
    }
    case Method::kJackknifePlus: {
      const LooModels loo = TrainLooNetworks(train, arch, manifest.training, seed);
      train_seconds = train_clock.Seconds();
      Eigen::MatrixXd preds(train.size(), test.size());
      for (Index j = 0; j < train.size(); ++j) {
        preds.row(j) = batch_forward(loo.params[static_cast<std::size_t>(j)],
                                     arch, test.features())
                           .transpose();
      }
      intervals = JackknifePlusColumns(preds, loo.residuals,
                                       IntervalConfig{alpha, 0.0});
      break;
    }
    case Method::kLazyFinetune:
    case Method::kDpLazy: {
      const double sigma = method == Method::kDpLazy ? rp.sigma : 0.0;
      const LooFit fit = FitLazy(train, arch, manifest, rp, sigma, seed);
      train_seconds = train_clock.Seconds();
      intervals = JackknifePlusColumns(
          loo_predictions(fit, arch, test.features()), fit.loo_residuals,
          manifest.interval);
      break;
    }
  }
  const double total_seconds = train_clock.Seconds();
  ScoreIntervals(intervals, test.responses(), result.coverage,
                 result.avg_width);
  if (manifest.record_timings) {
    result.train_seconds = train_seconds;
    result.eval_seconds = total_seconds - train_seconds;
  }
  return result;
}

std::vector<PredictionInterval> dp_lazy_intervals(
    const RegressionDataset& train, const Eigen::Ref<const RowMatrix>& points,
    const Manifest& manifest, const ResolvedPrivacy& rp, std::uint64_t seed) {
  const MlpArchitecture arch = manifest.Architecture(train.dim());
  const LooFit fit = FitLazy(train, arch, manifest, rp, rp.sigma, seed);
  return JackknifePlusColumns(loo_predictions(fit, arch, points),
                              fit.loo_residuals, manifest.interval);
}

}  // namespace lazypi
