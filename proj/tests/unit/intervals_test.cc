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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "common/error.h"

namespace lazypi {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Full-sort oracle; ranks computed in exact rational arithmetic on alpha
// given as num / den.
double SortedUpper(std::vector<double> v, long num, long den) {
  std::sort(v.begin(), v.end());
  const long n = static_cast<long>(v.size());
  const long k = ((den - num) * (n + 1) + den - 1) / den;  // ceil
  return k > n ? kInf : v[static_cast<std::size_t>(k - 1)];
}

double SortedLower(std::vector<double> v, long num, long den) {
  std::sort(v.begin(), v.end());
  const long n = static_cast<long>(v.size());
  const long k = (num * (n + 1)) / den;  // floor
  return k < 1 ? -kInf : v[static_cast<std::size_t>(k - 1)];
}

TEST(QuantileRanks, ExactRationalValues) {
  EXPECT_EQ(UpperQuantileRank(3, 0.5), 2);
  EXPECT_EQ(UpperQuantileRank(3, 0.1), 4);
  EXPECT_EQ(UpperQuantileRank(199, 0.1), 180);
  EXPECT_EQ(UpperQuantileRank(99, 0.1), 90);
  EXPECT_EQ(LowerQuantileRank(3, 0.25), 1);
  EXPECT_EQ(LowerQuantileRank(3, 0.1), 0);
  EXPECT_EQ(LowerQuantileRank(199, 0.1), 20);
  for (long n = 1; n <= 1000; ++n) {
    for (long pct : {5L, 10L, 20L, 25L, 30L, 40L}) {
      const long upper = ((100 - pct) * (n + 1) + 99) / 100;
      const long lower = (pct * (n + 1)) / 100;
      ASSERT_EQ(UpperQuantileRank(n, pct / 100.0), upper) << n << " " << pct;
      ASSERT_EQ(LowerQuantileRank(n, pct / 100.0), lower) << n << " " << pct;
    }
  }
}

TEST(QuantileUpper, SpecExamples) {
  const std::vector<double> v{3.0, 1.0, 2.0};
  EXPECT_EQ(quantile_upper(v, 0.5), 2.0);
  EXPECT_EQ(quantile_upper(v, 0.1), kInf);
}

TEST(QuantileUpper, OrderStatistic180Of199) {
  std::mt19937_64 rng(61);
  std::normal_distribution<double> normal;
  std::vector<double> v(199);
  for (double& x : v) x = normal(rng);
  std::vector<double> sorted = v;
  std::sort(sorted.begin(), sorted.end());
  EXPECT_EQ(quantile_upper(v, 0.1), sorted[179]);
}

TEST(QuantileLower, SpecExamples) {
  const std::vector<double> v{3.0, 1.0, 2.0};
  EXPECT_EQ(quantile_lower(v, 0.25), 1.0);
  EXPECT_EQ(quantile_lower(v, 0.1), -kInf);
}

TEST(Quantiles, EmptyInputThrows) {
  EXPECT_THROW(quantile_upper({}, 0.1), Error);
  EXPECT_THROW(quantile_lower({}, 0.1), Error);
}

TEST(Quantiles, MatchFullSortOracle) {
  std::mt19937_64 rng(62);
  std::uniform_int_distribution<int> size(1, 500);
  std::uniform_int_distribution<int> ties(0, 3);
  std::normal_distribution<double> normal;
  const std::pair<long, long> alphas[] = {{5, 100}, {10, 100}, {25, 100}};
  for (int draw = 0; draw < 10000; ++draw) {
    std::vector<double> v(static_cast<std::size_t>(size(rng)));
    const bool tied = ties(rng) == 0;
    for (double& x : v) x = tied ? std::round(normal(rng)) : normal(rng);
    for (auto [num, den] : alphas) {
      const double alpha = static_cast<double>(num) / static_cast<double>(den);
      ASSERT_EQ(quantile_upper(v, alpha), SortedUpper(v, num, den));
      ASSERT_EQ(quantile_lower(v, alpha), SortedLower(v, num, den));
    }
  }
}

TEST(Quantiles, ReflectionIdentity) {
  std::mt19937_64 rng(63);
  std::normal_distribution<double> normal;
  for (int draw = 0; draw < 2000; ++draw) {
    std::vector<double> v(static_cast<std::size_t>(1 + draw % 60));
    for (double& x : v) x = normal(rng);
    std::vector<double> neg(v.size());
    std::transform(v.begin(), v.end(), neg.begin(), [](double x) { return -x; });
    for (double alpha : {0.05, 0.1, 0.2, 0.3, 0.45}) {
      ASSERT_EQ(quantile_lower(v, alpha), -quantile_upper(neg, alpha));
    }
  }
}

TEST(Quantiles, MonotoneInAlpha) {
  std::mt19937_64 rng(64);
  std::normal_distribution<double> normal;
  const std::vector<double> alphas{0.01, 0.05, 0.1, 0.2, 0.3, 0.49};
  for (int draw = 0; draw < 500; ++draw) {
    std::vector<double> v(static_cast<std::size_t>(1 + draw % 80));
    for (double& x : v) x = normal(rng);
    for (std::size_t k = 1; k < alphas.size(); ++k) {
      ASSERT_GE(quantile_upper(v, alphas[k - 1]), quantile_upper(v, alphas[k]));
      ASSERT_LE(quantile_lower(v, alphas[k - 1]), quantile_lower(v, alphas[k]));
    }
  }
}

TEST(NaiveInterval, Examples) {
  const std::vector<double> zeros(20, 0.0);
  EXPECT_EQ(naive_interval(1.5, zeros, 0.1), (PredictionInterval{1.5, 1.5}));
  const std::vector<double> r{1.0, 2.0, 3.0};
  EXPECT_EQ(naive_interval(10.0, r, 0.5), (PredictionInterval{8.0, 12.0}));
  EXPECT_EQ(naive_interval(10.0, r, 0.1), (PredictionInterval{-kInf, kInf}));
  const std::vector<double> signed_r{-1.0, 2.0, -3.0};
  EXPECT_EQ(naive_interval(0.0, signed_r, 0.5), (PredictionInterval{-2.0, 2.0}));
  EXPECT_THROW(naive_interval(0.0, {}, 0.1), Error);
}

TEST(JackknifeInterval, Examples) {
  const std::vector<double> r{0.3, 1.7, 0.2, 0.9};
  EXPECT_EQ(jackknife_interval(2.0, r, 0.25), naive_interval(2.0, r, 0.25));
  const std::vector<double> zeros(9, 0.0);
  EXPECT_EQ(jackknife_interval(4.0, zeros, 0.1), (PredictionInterval{4.0, 4.0}));
  const std::vector<double> single{0.5};
  EXPECT_EQ(jackknife_interval(4.0, single, 0.4), (PredictionInterval{-kInf, kInf}));
  EXPECT_THROW(jackknife_interval(0.0, {}, 0.1), Error);
}

TEST(JackknifePlus, ConstantLists) {
  const std::vector<double> preds(10, 3.0);
  const std::vector<double> r(10, 0.5);
  EXPECT_EQ(jackknife_plus_interval(preds, r, 0.2), (PredictionInterval{2.5, 3.5}));
}

TEST(JackknifePlus, HandOrderStatistics) {
  const std::vector<double> preds{1, 2, 3, 4};
  const std::vector<double> r{0.5, 0.5, 0.5, 0.5};
  EXPECT_EQ(jackknife_plus_interval(preds, r, 0.25), (PredictionInterval{0.5, 4.5}));
  IntervalConfig cfg{0.25, 1.0};
  EXPECT_EQ(dp_lazy_interval(preds, r, cfg), (PredictionInterval{-0.5, 5.5}));
}

TEST(JackknifePlus, RejectsBadInput) {
  const std::vector<double> a{1, 2}, b{1};
  EXPECT_THROW(jackknife_plus_interval(a, b, 0.1), Error);
  EXPECT_THROW(dp_lazy_interval(a, b, IntervalConfig{0.1, 0.0}), Error);
  EXPECT_THROW(jackknife_plus_interval({}, {}, 0.1), Error);
  EXPECT_THROW(dp_lazy_interval(a, a, IntervalConfig{0.1, -1.0}), Error);
  EXPECT_THROW(dp_lazy_interval(a, a, IntervalConfig{0.5, 0.0}), Error);
  EXPECT_THROW(dp_lazy_interval(a, a, IntervalConfig{0.0, 0.0}), Error);
}

TEST(JackknifePlus, ShiftEquivariance) {
  std::mt19937_64 rng(65);
  std::uniform_int_distribution<int> ints(-1000, 1000);
  for (int draw = 0; draw < 500; ++draw) {
    const std::size_t n = 1 + static_cast<std::size_t>(draw % 40);
    std::vector<double> preds(n), r(n), shifted(n);
    const double c = ints(rng) / 8.0;
    for (std::size_t i = 0; i < n; ++i) {
      preds[i] = ints(rng) / 16.0;
      r[i] = std::abs(ints(rng)) / 16.0;
      shifted[i] = preds[i] + c;
    }
    const auto base = jackknife_plus_interval(preds, r, 0.1);
    const auto moved = jackknife_plus_interval(shifted, r, 0.1);
    ASSERT_EQ(moved.lower, base.lower + c);
    ASSERT_EQ(moved.upper, base.upper + c);
  }
}

TEST(Intervals, OrderedNestedInAlphaAndNu) {
  std::mt19937_64 rng(66);
  std::normal_distribution<double> normal;
  const std::vector<double> alphas{0.05, 0.1, 0.2, 0.3};
  const std::vector<double> nus{0.0, 0.01, 0.5, 2.0};
  for (int draw = 0; draw < 500; ++draw) {
    const std::size_t n = 1 + static_cast<std::size_t>(draw % 50);
    std::vector<double> preds(n), r(n);
    for (std::size_t i = 0; i < n; ++i) {
      preds[i] = normal(rng);
      r[i] = std::abs(normal(rng));
    }
    const double f = normal(rng);
    for (std::size_t a = 0; a < alphas.size(); ++a) {
      const auto jp = jackknife_plus_interval(preds, r, alphas[a]);
      const auto nv = naive_interval(f, r, alphas[a]);
      const auto jk = jackknife_interval(f, r, alphas[a]);
      ASSERT_LE(jp.lower, jp.upper);
      ASSERT_LE(nv.lower, nv.upper);
      ASSERT_LE(jk.lower, jk.upper);
      EXPECT_EQ(dp_lazy_interval(preds, r, IntervalConfig{alphas[a], 0.0}), jp);
      if (a > 0) {
        const auto wider = jackknife_plus_interval(preds, r, alphas[a - 1]);
        ASSERT_LE(wider.lower, jp.lower);
        ASSERT_GE(wider.upper, jp.upper);
      }
      for (std::size_t k = 1; k < nus.size(); ++k) {
        const auto inner = dp_lazy_interval(preds, r, IntervalConfig{alphas[a], nus[k - 1]});
        const auto outer = dp_lazy_interval(preds, r, IntervalConfig{alphas[a], nus[k]});
        ASSERT_LE(outer.lower, inner.lower);
        ASSERT_GE(outer.upper, inner.upper);
      }
    }
  }
}

TEST(PredictionInterval, WidthAndContains) {
  const PredictionInterval iv{-1.0, 2.0};
  EXPECT_EQ(iv.width(), 3.0);
  EXPECT_TRUE(iv.contains(-1.0));
  EXPECT_TRUE(iv.contains(2.0));
  EXPECT_FALSE(iv.contains(2.5));
  const PredictionInterval all{-kInf, kInf};
  EXPECT_TRUE(all.contains(1e300));
  EXPECT_EQ(all.width(), kInf);
}

}  // namespace
}  // namespace lazypi
