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

#ifndef LAZYPI_PRIVACY_ACCOUNTANT_H_
#define LAZYPI_PRIVACY_ACCOUNTANT_H_

#include <cstdint>
#include <span>
#include <vector>

namespace lazypi {

// Renyi orders used by account_privacy.
const std::vector<double>& DefaultRdpOrders();

// RDP of one application of the Poisson-subsampled Gaussian mechanism with
// noise multiplier sigma and sampling rate q, at order `order` > 1.
double SubsampledGaussianRdp(double sigma, double q, double order);

// Smallest epsilon such that an RDP curve (order, rdp) implies
// (epsilon, delta)-DP, minimized over the orders.
double RdpToEpsilon(std::span<const double> orders, std::span<const double> rdp,
                    double delta);

// Exact epsilon at `delta` for a Gaussian mechanism whose privacy loss has
// parameter mu = sensitivity / std (a mu-GDP mechanism).
double GaussianMechanismEpsilon(double mu, double delta);

// Epsilon spent by `steps` compositions of the subsampled Gaussian mechanism.
// The RDP bound is combined with the exact curve of the unsubsampled
// composition (a valid bound for any q, and the exact answer at q = 1).
// Returns +inf when sigma == 0 and steps >= 1; 0 when steps == 0.
double account_privacy(double sigma, double q, std::int64_t steps,
                       double delta);

// Smallest sigma (to relative tolerance 1e-6) whose accounted epsilon does
// not exceed target_epsilon.
double CalibrateNoiseMultiplier(double target_epsilon, double q,
                                std::int64_t steps, double delta);

// 3 * sqrt(2 eta + 2 epsilon + delta): the coverage penalty paid by the
// DP-lazy interval relative to the 1 - 2 alpha jackknife+ level.
double CoverageSlack(double eta, double epsilon, double delta);

}  // namespace lazypi

#endif  // LAZYPI_PRIVACY_ACCOUNTANT_H_
