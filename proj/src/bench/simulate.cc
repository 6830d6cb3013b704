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

#include "bench/data.h"
#include "common/error.h"
#include "common/random.h"

namespace lazypi {

void SimConfig::Validate() const {
  if (n_total < 2) throw InvalidArgument("N must be >= 2");
  if (p < 1) throw InvalidArgument("p must be >= 1");
  if (!(x_scale > 0.0)) throw InvalidArgument("x_scale must be > 0");
  if (!(noise_sd >= 0.0)) throw InvalidArgument("noise_sd must be >= 0");
  if (!(beta_a > 0.0) || !(beta_b > 0.0)) {
    throw InvalidArgument("Beta parameters must be > 0");
  }
}

RegressionDataset simulate_data(const SimConfig& cfg) {
  cfg.Validate();
  Engine engine = MakeEngine(cfg.seed, Stream::kSimulation);
  std::gamma_distribution<double> gamma_a(cfg.beta_a, 1.0);
  std::gamma_distribution<double> gamma_b(cfg.beta_b, 1.0);
  Vector beta(cfg.p);
  for (Index k = 0; k < cfg.p; ++k) {
    const double ga = gamma_a(engine);
    const double gb = gamma_b(engine);
    beta(k) = ga / (ga + gb);
  }

  std::normal_distribution<double> feature(0.0, std::sqrt(cfg.x_scale));
  RowMatrix x(cfg.n_total, cfg.p);
  for (Index i = 0; i < cfg.n_total; ++i) {
    for (Index k = 0; k < cfg.p; ++k) x(i, k) = feature(engine);
  }

  std::normal_distribution<double> noise(0.0, 1.0);
  Vector y(cfg.n_total);
  for (Index i = 0; i < cfg.n_total; ++i) {
    const double signal = std::sqrt(std::max(0.0, x.row(i).dot(beta)));
    y(i) = signal + cfg.noise_sd * noise(engine);
  }
  return RegressionDataset(std::move(x), std::move(y));
}

}  // namespace lazypi
