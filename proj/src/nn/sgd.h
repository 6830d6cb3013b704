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

#ifndef LAZYPI_NN_SGD_H_
#define LAZYPI_NN_SGD_H_

#include <cstdint>

#include "nn/dataset.h"
#include "nn/mlp.h"

namespace lazypi {

// Plain mini-batch SGD on the mean squared-error loss. Each epoch visits a
// fresh permutation of the rows in consecutive batches; the last batch of an
// epoch may be short.
struct SgdConfig {
  double learning_rate = 0.01;
  int epochs = 10;
  Index batch_size = 10;

  void Validate() const;
};

ParamVector train_sgd(const RegressionDataset& data,
                      const MlpArchitecture& arch, const SgdConfig& cfg,
                      std::uint64_t seed);

}  // namespace lazypi

#endif  // LAZYPI_NN_SGD_H_
