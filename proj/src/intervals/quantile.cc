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

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "common/error.h"
#include "intervals/intervals.h"

namespace lazypi {
namespace {

// (1 - alpha)(n + 1) is often an integer in exact arithmetic that rounds to
// just above it in floating point; the tolerance keeps ceil() on the
// intended side.
constexpr double kRankTolerance = 1e-9;

double KthSmallest(std::span<const double> values, long k) {
  std::vector<double> scratch(values.begin(), values.end());
  auto nth = scratch.begin() + (k - 1);
  std::nth_element(scratch.begin(), nth, scratch.end());
  return *nth;
}

void CheckAlpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw InvalidArgument("alpha must lie in (0, 1)");
  }
}

}  // namespace

long UpperQuantileRank(long n, double alpha) {
  CheckAlpha(alpha);
  const double x = (1.0 - alpha) * static_cast<double>(n + 1);
  return static_cast<long>(std::ceil(x - kRankTolerance * std::max(1.0, x)));
}

long LowerQuantileRank(long n, double alpha) {
  return n + 1 - UpperQuantileRank(n, alpha);
}

double quantile_upper(std::span<const double> values, double alpha) {
  if (values.empty()) throw InvalidArgument("quantile of an empty set");
  const long n = static_cast<long>(values.size());
  const long k = UpperQuantileRank(n, alpha);
  if (k > n) return std::numeric_limits<double>::infinity();
  return KthSmallest(values, std::max(k, 1L));
}

double quantile_lower(std::span<const double> values, double alpha) {
  if (values.empty()) throw InvalidArgument("quantile of an empty set");
  const long n = static_cast<long>(values.size());
  const long k = LowerQuantileRank(n, alpha);
  if (k < 1) return -std::numeric_limits<double>::infinity();
  return KthSmallest(values, std::min(k, n));
}

}  // namespace lazypi
