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

#include "intervals/intervals.h"

#include <cmath>
#include <vector>

#include "common/error.h"

namespace lazypi {
namespace {

std::vector<double> Absolute(std::span<const double> values) {
  std::vector<double> out(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) out[i] = std::abs(values[i]);
  return out;
}

PredictionInterval Symmetric(double center, double margin) {
  return {center - margin, center + margin};
}

}  // namespace

void IntervalConfig::Validate() const {
  if (!(alpha > 0.0 && alpha < 0.5)) {
    throw InvalidArgument("alpha must lie in (0, 0.5)");
  }
  if (!(nu >= 0.0)) throw InvalidArgument("nu must be >= 0");
}

PredictionInterval naive_interval(double fhat_x,
                                  std::span<const double> train_residuals,
                                  double alpha) {
  if (train_residuals.empty()) throw InvalidArgument("no residuals");
  return Symmetric(fhat_x, quantile_upper(Absolute(train_residuals), alpha));
}

PredictionInterval jackknife_interval(double fhat_x,
                                      std::span<const double> loo_residuals,
                                      double alpha) {
  if (loo_residuals.empty()) throw InvalidArgument("no residuals");
  return Symmetric(fhat_x, quantile_upper(Absolute(loo_residuals), alpha));
}

PredictionInterval jackknife_plus_interval(std::span<const double> loo_preds_at_x,
                                           std::span<const double> loo_residuals,
                                           double alpha) {
  if (loo_preds_at_x.size() != loo_residuals.size()) {
    throw DimensionMismatch("predictions and residuals differ in length");
  }
  if (loo_residuals.empty()) throw InvalidArgument("no residuals");
  IntervalConfig{alpha, 0.0}.Validate();
  const std::size_t n = loo_residuals.size();
  std::vector<double> lo(n);
  std::vector<double> hi(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double r = std::abs(loo_residuals[i]);
    lo[i] = loo_preds_at_x[i] - r;
    hi[i] = loo_preds_at_x[i] + r;
  }
  return {quantile_lower(lo, alpha), quantile_upper(hi, alpha)};
}

PredictionInterval dp_lazy_interval(std::span<const double> loo_preds_at_x,
                                    std::span<const double> loo_residuals,
                                    const IntervalConfig& cfg) {
  cfg.Validate();
  PredictionInterval out =
      jackknife_plus_interval(loo_preds_at_x, loo_residuals, cfg.alpha);
  out.lower -= cfg.nu;
  out.upper += cfg.nu;
  return out;
}

}  // namespace lazypi
