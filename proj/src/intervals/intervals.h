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

#ifndef LAZYPI_INTERVALS_INTERVALS_H_
#define LAZYPI_INTERVALS_INTERVALS_H_

#include <span>

namespace lazypi {

struct IntervalConfig {
  double alpha = 0.1;
  double nu = 0.0;

  void Validate() const;
};

// Endpoints may be -inf / +inf.
struct PredictionInterval {
  double lower = 0.0;
  double upper = 0.0;

  double width() const { return upper - lower; }
  bool contains(double y) const { return lower <= y && y <= upper; }
  bool operator==(const PredictionInterval&) const = default;
};

// Rank k = ceil((1 - alpha)(n + 1)) of the upper quantile, 1-based. May
// exceed n.
long UpperQuantileRank(long n, double alpha);
// Rank of the lower quantile, n + 1 - UpperQuantileRank(n, alpha), which
// equals floor(alpha (n + 1)). May be < 1.
long LowerQuantileRank(long n, double alpha);

// k-th smallest value, +inf when k > n.
double quantile_upper(std::span<const double> values, double alpha);
// k-th smallest value, -inf when k < 1. Equals -quantile_upper(-values).
double quantile_lower(std::span<const double> values, double alpha);

PredictionInterval naive_interval(double fhat_x,
                                  std::span<const double> train_residuals,
                                  double alpha);

PredictionInterval jackknife_interval(double fhat_x,
                                      std::span<const double> loo_residuals,
                                      double alpha);

PredictionInterval jackknife_plus_interval(std::span<const double> loo_preds_at_x,
                                           std::span<const double> loo_residuals,
                                           double alpha);

// jackknife+ interval widened by cfg.nu on both sides.
PredictionInterval dp_lazy_interval(std::span<const double> loo_preds_at_x,
                                    std::span<const double> loo_residuals,
                                    const IntervalConfig& cfg);

}  // namespace lazypi

#endif  // LAZYPI_INTERVALS_INTERVALS_H_
