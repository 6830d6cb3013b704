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

#include "bench/ridge.h"

#include <cmath>

#include "common/error.h"

namespace lazypi {

Vector RidgeModel::predict(const Eigen::Ref<const RowMatrix>& x) const {
  return (x * coef).array() + intercept;
}

RidgeModel fit_ridge(const RegressionDataset& data, double lambda) {
  if (!(lambda >= 0.0)) throw InvalidArgument("lambda must be >= 0");
  if (data.size() == 0) throw InvalidArgument("empty dataset");
  const Eigen::RowVectorXd x_mean = data.features().colwise().mean();
  const double y_mean = data.responses().mean();
  const RowMatrix xc = data.features().rowwise() - x_mean;
  const Vector yc = data.responses().array() - y_mean;
  Eigen::MatrixXd normal = xc.transpose() * xc;
  normal.diagonal().array() += lambda;
  Eigen::LDLT<Eigen::MatrixXd> ldlt(normal);
  if (ldlt.info() != Eigen::Success) {
    throw NumericalError("ridge normal equations are singular");
  }
  RidgeModel model;
  model.coef = ldlt.solve(xc.transpose() * yc);
  model.intercept = y_mean - x_mean.dot(model.coef);
  return model;
}

std::vector<PredictionInterval> jackknife_plus_with_learner(
    const RegressionDataset& train, const Eigen::Ref<const RowMatrix>& points,
    const Learner& learner, double alpha) {
  const Index n = train.size();
  if (n < 2) throw InvalidArgument("jackknife+ needs at least 2 rows");
  Eigen::MatrixXd preds(n, points.rows());
  std::vector<double> residuals(static_cast<std::size_t>(n));
  for (Index j = 0; j < n; ++j) {
    const Predictor predict = learner(train.Without(j));
    RowMatrix xj = train.features().row(j);
    residuals[static_cast<std::size_t>(j)] =
        std::abs(train.responses()(j) - predict(xj)(0));
    preds.row(j) = predict(points).transpose();
  }
  std::vector<PredictionInterval> out;
  out.reserve(static_cast<std::size_t>(points.rows()));
  std::vector<double> column(static_cast<std::size_t>(n));
  for (Index t = 0; t < points.rows(); ++t) {
    for (Index j = 0; j < n; ++j) column[static_cast<std::size_t>(j)] = preds(j, t);
    out.push_back(jackknife_plus_interval(column, residuals, alpha));
  }
  return out;
}

}  // namespace lazypi
