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

#ifndef LAZYPI_NN_DATASET_H_
#define LAZYPI_NN_DATASET_H_

#include <span>

#include <Eigen/Dense>

namespace lazypi {

using Index = Eigen::Index;
using Vector = Eigen::VectorXd;
using RowMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Features (n x p) and responses (n). Immutable once constructed; the
// constructor rejects mismatched shapes and non-finite entries.
class RegressionDataset {
 public:
  RegressionDataset(RowMatrix features, Vector responses);

  Index size() const { return features_.rows(); }
  Index dim() const { return features_.cols(); }
  const RowMatrix& features() const { return features_; }
  const Vector& responses() const { return responses_; }

  RegressionDataset Subset(std::span<const Index> rows) const;
  // The dataset with row `j` removed, preserving order of the rest.
  RegressionDataset Without(Index j) const;

 private:
  RowMatrix features_;
  Vector responses_;
};

}  // namespace lazypi

#endif  // LAZYPI_NN_DATASET_H_
