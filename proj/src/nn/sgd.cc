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

#include "nn/sgd.h"

#include <algorithm>
#include <numeric>
#include <vector>

#include "common/error.h"
#include "common/random.h"

namespace lazypi {

void SgdConfig::Validate() const {
  if (!(learning_rate > 0)) throw InvalidArgument("learning rate must be > 0");
  if (epochs < 1) throw InvalidArgument("epochs must be >= 1");
  if (batch_size < 1) throw InvalidArgument("batch size must be >= 1");
}

ParamVector train_sgd(const RegressionDataset& data,
                      const MlpArchitecture& arch, const SgdConfig& cfg,
                      std::uint64_t seed) {
  cfg.Validate();
  if (data.size() == 0) throw InvalidArgument("empty training set");
  ParamVector params = init_params(arch, seed);
  Engine engine = MakeEngine(seed, Stream::kShuffle);
  const Index n = data.size();
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  RowMatrix xb;
  Vector yb;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), engine);
    for (Index start = 0; start < n; start += cfg.batch_size) {
      const Index len = std::min(cfg.batch_size, n - start);
      xb.resize(len, data.dim());
      yb.resize(len);
      for (Index i = 0; i < len; ++i) {
        const Index r = order[static_cast<std::size_t>(start + i)];
        xb.row(i) = data.features().row(r);
        yb(i) = data.responses()(r);
      }
      params.values -= (cfg.learning_rate / static_cast<double>(len)) *
                       summed_loss_gradient(params, arch, xb, yb);
    }
  }
  return params;
}

}  // namespace lazypi
