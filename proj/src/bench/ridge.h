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

#ifndef LAZYPI_BENCH_RIDGE_H_
#define LAZYPI_BENCH_RIDGE_H_

#include <functional>
#include <vector>

#include "intervals/intervals.h"
#include "nn/dataset.h"

namespace lazypi {

// Linear ridge regression on raw features with an unpenalized intercept.
// A cheap symmetric base learner for coverage experiments.
struct RidgeModel {
  Vector coef;
  double intercept = 0.0;

  Vector predict(const Eigen::Ref<const RowMatrix>& x) const;
};

RidgeModel fit_ridge(const RegressionDataset& data, double lambda);

using Predictor = std::function<Vector(const Eigen::Ref<const RowMatrix>&)>;
using Learner = std::function<Predictor(const RegressionDataset&)>;

// Jackknife+ intervals at each row of `points` for an arbitrary learner:
// n leave-one-out fits, their residuals, and their predictions.
std::vector<PredictionInterval> jackknife_plus_with_learner(
    const RegressionDataset& train, const Eigen::Ref<const RowMatrix>& points,
    const Learner& learner, double alpha);

}  // namespace lazypi

#endif  // LAZYPI_BENCH_RIDGE_H_
