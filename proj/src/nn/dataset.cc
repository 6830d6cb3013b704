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

#include "nn/dataset.h"

#include <string>

#include "common/error.h"

namespace lazypi {

RegressionDataset::RegressionDataset(RowMatrix features, Vector responses)
    : features_(std::move(features)), responses_(std::move(responses)) {
  if (features_.rows() != responses_.size()) {
    throw DimensionMismatch("dataset has " + std::to_string(features_.rows()) +
                            " feature rows but " +
                            std::to_string(responses_.size()) + " responses");
  }
  if (!features_.allFinite() || !responses_.allFinite()) {
    throw InvalidArgument("dataset contains non-finite values");
  }
}

RegressionDataset RegressionDataset::Subset(std::span<const Index> rows) const {
  RowMatrix x(static_cast<Index>(rows.size()), dim());
  Vector y(static_cast<Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const Index r = rows[i];
    if (r < 0 || r >= size()) {
      throw InvalidArgument("row index " + std::to_string(r) +
                            " out of range");
    }
    x.row(static_cast<Index>(i)) = features_.row(r);
    y(static_cast<Index>(i)) = responses_(r);
  }
  return RegressionDataset(std::move(x), std::move(y));
}

RegressionDataset RegressionDataset::Without(Index j) const {
  if (j < 0 || j >= size()) {
    throw InvalidArgument("row index " + std::to_string(j) + " out of range");
  }
  const Index n = size();
  RowMatrix x(n - 1, dim());
  Vector y(n - 1);
  x.topRows(j) = features_.topRows(j);
  x.bottomRows(n - 1 - j) = features_.bottomRows(n - 1 - j);
  y.head(j) = responses_.head(j);
  y.tail(n - 1 - j) = responses_.tail(n - 1 - j);
  return RegressionDataset(std::move(x), std::move(y));
}

}  // namespace lazypi
