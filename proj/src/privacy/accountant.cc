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

#include "privacy/accountant.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "common/error.h"

namespace lazypi {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double LogAdd(double a, double b) {
  if (a == -kInf) return b;
  if (b == -kInf) return a;
  const double hi = std::max(a, b);
  return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

double LogSub(double a, double b) {
  if (b == -kInf) return a;
  if (a <= b) return -kInf;
  return a + std::log1p(-std::exp(b - a));
}

// log(erfc(x)), stable for large positive x.
double LogErfc(double x) {
  if (x < 20.0) return std::log(std::erfc(x));
  const double x2 = x * x;
  return -x2 - std::log(x) - 0.5 * std::log(M_PI) +
         std::log1p(-0.5 / x2 + 0.75 / (x2 * x2));
}

double LogNormalCdf(double x) {
  return std::log(0.5) + LogErfc(-x / std::sqrt(2.0));
}

double LogAInteger(double sigma, double q, int order) {
  double log_a = -kInf;
  const double log_q = std::log(q);
  const double log_1mq = std::log1p(-q);
  const double lg_order = std::lgamma(order + 1.0);
  for (int i = 0; i <= order; ++i) {
    const double log_coef =
        lg_order - std::lgamma(i + 1.0) - std::lgamma(order - i + 1.0);
    const double di = static_cast<double>(i);
    const double term = log_coef + di * log_q + (order - di) * log_1mq +
                        (di * di - di) / (2.0 * sigma * sigma);
    log_a = LogAdd(log_a, term);
  }
  return log_a;
}

// Series for non-integer orders (Mironov, Talwar and Zhang, 2019).
double LogAFractional(double sigma, double q, double order) {
  double log_a0 = -kInf;
  double log_a1 = -kInf;
  const double z0 = sigma * sigma * std::log(1.0 / q - 1.0) + 0.5;
  const double log_q = std::log(q);
  const double log_1mq = std::log1p(-q);
  // |binom(order, i)| and its sign, updated incrementally.
  double log_coef = 0.0;
  double sign = 1.0;
  for (int i = 0; i < 100000; ++i) {
    const double di = static_cast<double>(i);
    const double j = order - di;
    const double log_t0 = log_coef + di * log_q + j * log_1mq;
    const double log_t1 = log_coef + j * log_q + di * log_1mq;
    const double log_e0 =
        std::log(0.5) + LogErfc((di - z0) / (std::sqrt(2.0) * sigma));
    const double log_e1 =
        std::log(0.5) + LogErfc((z0 - j) / (std::sqrt(2.0) * sigma));
    const double log_s0 = log_t0 + (di * di - di) / (2.0 * sigma * sigma) +
                          log_e0;
    const double log_s1 = log_t1 + (j * j - j) / (2.0 * sigma * sigma) +
                          log_e1;
    if (sign > 0) {
      log_a0 = LogAdd(log_a0, log_s0);
      log_a1 = LogAdd(log_a1, log_s1);
    } else {
      log_a0 = LogSub(log_a0, log_s0);
      log_a1 = LogSub(log_a1, log_s1);
    }
    if (std::max(log_s0, log_s1) < -30.0 && di > order) break;
    const double factor = (order - di) / (di + 1.0);
    if (factor == 0.0) break;
    if (factor < 0) sign = -sign;
    log_coef += std::log(std::abs(factor));
  }
  return LogAdd(log_a0, log_a1);
}

}  // namespace

const std::vector<double>& DefaultRdpOrders() {
  static const std::vector<double> orders = [] {
    std::vector<double> o = {1.25, 1.5, 1.75, 2.25, 2.5, 2.75, 3.5, 4.5};
    for (int a = 2; a <= 64; ++a) o.push_back(a);
    for (double a : {72.0, 80.0, 96.0, 112.0, 128.0, 160.0, 192.0, 256.0,
                     320.0, 384.0, 512.0, 768.0, 1024.0, 1536.0, 2048.0,
                     3072.0, 4096.0, 6144.0, 8192.0}) {
      o.push_back(a);
    }
    std::sort(o.begin(), o.end());
    return o;
  }();
  return orders;
}

double SubsampledGaussianRdp(double sigma, double q, double order) {
  if (!(order > 1.0)) throw InvalidArgument("RDP order must exceed 1");
  if (sigma == 0.0) return kInf;
  if (q == 1.0) return order / (2.0 * sigma * sigma);
  const double log_a = order == std::floor(order)
                           ? LogAInteger(sigma, q, static_cast<int>(order))
                           : LogAFractional(sigma, q, order);
  return std::max(0.0, log_a / (order - 1.0));
}

double RdpToEpsilon(std::span<const double> orders, std::span<const double> rdp,
                    double delta) {
  if (orders.size() != rdp.size()) {
    throw DimensionMismatch("orders and rdp differ in length");
  }
  double best = kInf;
  const double log_delta = std::log(delta);
  for (std::size_t k = 0; k < orders.size(); ++k) {
    const double a = orders[k];
    if (!std::isfinite(rdp[k])) continue;
    // Conversion of Canonne, Kamath and Steinke (2020), Prop. 12 of Balle et
    // al.; tighter than rdp + log(1/delta) / (a - 1).
    const double eps = rdp[k] + std::log1p(-1.0 / a) -
                       (log_delta + std::log(a)) / (a - 1.0);
    best = std::min(best, std::max(0.0, eps));
  }
  return best;
}

double GaussianMechanismEpsilon(double mu, double delta) {
  if (mu == 0.0) return 0.0;
  if (!std::isfinite(mu)) return kInf;
  auto delta_at = [mu](double eps) {
    const double a = -eps / mu + mu / 2.0;
    const double b = -eps / mu - mu / 2.0;
    const double first = std::exp(LogNormalCdf(a));
    const double second = std::exp(eps + LogNormalCdf(b));
    return first - second;
  };
  if (delta_at(0.0) <= delta) return 0.0;
  double lo = 0.0;
  double hi = 1.0;
  while (delta_at(hi) > delta) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e6) return kInf;
  }
  for (int it = 0; it < 200 && hi - lo > 1e-14 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (delta_at(mid) > delta ? lo : hi) = mid;
  }
  return hi;
}

double account_privacy(double sigma, double q, std::int64_t steps,
                       double delta) {
  if (!(sigma >= 0.0)) throw InvalidArgument("sigma must be >= 0");
  if (!(q > 0.0 && q <= 1.0)) throw InvalidArgument("q must lie in (0, 1]");
  if (steps < 0) throw InvalidArgument("steps must be >= 0");
  if (!(delta > 0.0 && delta < 1.0)) {
    throw InvalidArgument("delta must lie in (0, 1)");
  }
  if (steps == 0) return 0.0;
  if (sigma == 0.0) return kInf;
  const auto& orders = DefaultRdpOrders();
  std::vector<double> rdp(orders.size());
  for (std::size_t k = 0; k < orders.size(); ++k) {
    rdp[k] = static_cast<double>(steps) * SubsampledGaussianRdp(sigma, q,
                                                                orders[k]);
  }
  const double from_rdp = RdpToEpsilon(orders, rdp, delta);
  const double full_batch = GaussianMechanismEpsilon(
      std::sqrt(static_cast<double>(steps)) / sigma, delta);
  return std::min(from_rdp, full_batch);
}

double CalibrateNoiseMultiplier(double target_epsilon, double q,
                                std::int64_t steps, double delta) {
  if (!(target_epsilon > 0.0)) {
    throw InvalidArgument("target epsilon must be > 0");
  }
  if (steps == 0) return 0.0;
  double lo = 0.0;
  double hi = 1.0;
  while (account_privacy(hi, q, steps, delta) > target_epsilon) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e12) throw NumericalError("noise calibration diverged");
  }
  while (hi - lo > 1e-6 * hi) {
    const double mid = 0.5 * (lo + hi);
    (account_privacy(mid, q, steps, delta) > target_epsilon ? lo : hi) = mid;
  }
  return hi;
}

double CoverageSlack(double eta, double epsilon, double delta) {
  return 3.0 * std::sqrt(2.0 * eta + 2.0 * epsilon + delta);
}

}  // namespace lazypi
