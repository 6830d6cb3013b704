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

#ifndef LAZYPI_PRIVACY_PRIVACY_H_
#define LAZYPI_PRIVACY_PRIVACY_H_

#include <cstdint>
#include <span>
#include <utility>

#include "nn/dataset.h"
#include "nn/mlp.h"

namespace lazypi {

struct DpSgdConfig {
  double noise_scale = 1.0;  // sigma; noise std is sigma * clip_norm
  double learning_rate = 0.01;
  Index lot_size = 10;       // expected lot size; sampling rate is l / n
  double clip_norm = 1.0;
  int iterations = 100;
  double target_delta = 1e-3;
  std::uint64_t seed = 0;

  void Validate(Index n) const;
};

struct PrivacyBudget {
  double epsilon = 0.0;
  double delta = 0.0;
};

enum class NormKind { kL1, kL2 };

struct SensitivityBound {
  double s = 0.0;
  NormKind norm = NormKind::kL1;
};

// g / max(1, |g|_2 / C).
Vector clip_gradient(const Eigen::Ref<const Vector>& g, double clip_norm);

// DP-SGD with Poisson lot sampling, per-example clipping and one Gaussian
// noise vector per lot. The budget is accounted at cfg.target_delta.
std::pair<ParamVector, PrivacyBudget> dp_sgd_train(const RegressionDataset& data,
                                                   const MlpArchitecture& arch,
                                                   const DpSgdConfig& cfg);

// Adds i.i.d. Laplace(0, s / epsilon) noise to every coordinate.
ParamVector laplace_perturb(const ParamVector& theta, const SensitivityBound& s,
                            double epsilon, std::uint64_t seed);

}  // namespace lazypi

#endif  // LAZYPI_PRIVACY_PRIVACY_H_
