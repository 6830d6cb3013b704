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

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "common/error.h"
#include "common/random.h"
#include "privacy/accountant.h"
#include "privacy/privacy.h"

namespace lazypi {

void DpSgdConfig::Validate(Index n) const {
  if (!(noise_scale >= 0.0)) throw InvalidArgument("sigma must be >= 0");
  if (!(learning_rate > 0.0)) throw InvalidArgument("learning rate must be > 0");
  if (lot_size < 1 || lot_size > n) {
    throw InvalidArgument("lot size must lie in [1, n] (n = " +
                          std::to_string(n) + ")");
  }
  if (!(clip_norm > 0.0)) throw InvalidArgument("clip norm must be > 0");
  if (iterations < 1) throw InvalidArgument("iterations must be >= 1");
  if (!(target_delta > 0.0 && target_delta < 1.0)) {
    throw InvalidArgument("delta must lie in (0, 1)");
  }
}

std::pair<ParamVector, PrivacyBudget> dp_sgd_train(const RegressionDataset& data,
                                                   const MlpArchitecture& arch,
                                                   const DpSgdConfig& cfg) {
  if (data.size() == 0) throw InvalidArgument("empty training set");
  cfg.Validate(data.size());
  const Index n = data.size();
  const double q = static_cast<double>(cfg.lot_size) / static_cast<double>(n);

  ParamVector params = init_params(arch, cfg.seed);
  Engine lot_engine = MakeEngine(cfg.seed, Stream::kLotSampling);
  Engine noise_engine = MakeEngine(cfg.seed, Stream::kGradientNoise);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double noise_std = cfg.noise_scale * cfg.clip_norm;

  std::vector<Index> lot;
  lot.reserve(static_cast<std::size_t>(n));
  for (int t = 0; t < cfg.iterations; ++t) {
    lot.clear();
    for (Index i = 0; i < n; ++i) {
      if (uniform(lot_engine) < q) lot.push_back(i);
    }
    Vector sum = Vector::Zero(params.values.size());
    if (!lot.empty()) {
      const auto rows = static_cast<Index>(lot.size());
      RowMatrix x(rows, data.dim());
      Vector y(rows);
      for (Index k = 0; k < rows; ++k) {
        x.row(k) = data.features().row(lot[static_cast<std::size_t>(k)]);
        y(k) = data.responses()(lot[static_cast<std::size_t>(k)]);
      }
      sum = summed_clipped_loss_gradient(params, arch, x, y, cfg.clip_norm);
    }
    if (noise_std > 0.0) {
      for (Index k = 0; k < sum.size(); ++k) {
        sum(k) += noise_std * normal(noise_engine);
      }
    }
    const double divisor = lot.empty() ? 1.0 : static_cast<double>(lot.size());
    params.values -= cfg.learning_rate * (sum / divisor);
  }

  PrivacyBudget budget{account_privacy(cfg.noise_scale, q, cfg.iterations,
                                       cfg.target_delta),
                       cfg.target_delta};
  return {std::move(params), budget};
}

}  // namespace lazypi
