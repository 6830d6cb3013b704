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

#ifndef LAZYPI_LAZY_LAZY_LOO_H_
#define LAZYPI_LAZY_LAZY_LOO_H_

#include <cstdint>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "nn/dataset.h"
#include "nn/mlp.h"

namespace lazypi {

struct LazyConfig {
  double ridge_lambda = 10.0;
  // Compute the n x M Jacobian once and drop row j per solve, instead of
  // recomputing the Jacobian of every leave-one-out dataset.
  bool jacobian_reuse = true;
  // Threads used for the independent per-j solves in fit_all_loo.
  int workers = 1;

  void Validate() const;
};

// The dual ridge system (gram + ridge * I) alpha = residual_rhs, where gram
// is the NTK matrix J J^T of the linearized network.
struct GramSystem {
  Eigen::MatrixXd gram;
  double ridge = 0.0;
  Vector residual_rhs;
};

GramSystem BuildGramSystem(const Eigen::Ref<const RowMatrix>& jacobian,
                           const Eigen::Ref<const Vector>& residuals,
                           double ridge);

// Cholesky solve of the system; throws NumericalError if the factorization
// fails.
Vector SolveGramSystem(const GramSystem& system);

struct LooFit {
  std::vector<ParamVector> loo_params;
  Vector loo_residuals;
  ParamVector base_params;
};

// theta0 + argmin_d sum_i (r_i - J_i d)^2 + lambda |d|^2 with the network
// linearized at theta0, solved through the (n-1) x (n-1) Gram system.
ParamVector lazy_solve(const ParamVector& theta0, const MlpArchitecture& arch,
                       const RegressionDataset& data_minus_j,
                       const LazyConfig& cfg);

// Same minimizer through the M x M normal equations (J^T J + lambda I).
// Only sensible for small M.
ParamVector lazy_solve_primal(const ParamVector& theta0,
                              const MlpArchitecture& arch,
                              const RegressionDataset& data_minus_j,
                              const LazyConfig& cfg);

LooFit fit_all_loo(const ParamVector& theta0, const MlpArchitecture& arch,
                   const RegressionDataset& data, const LazyConfig& cfg);

// Row j holds f(x; theta_{-j}) at every row x of `points`.
Eigen::MatrixXd loo_predictions(const LooFit& fit, const MlpArchitecture& arch,
                                const Eigen::Ref<const RowMatrix>& points);

using Trainer =
    std::function<ParamVector(const RegressionDataset&, std::uint64_t seed)>;

// Reference estimate linearized at an initializer trained without row j.
ParamVector lazy_solve_deleted_init(const RegressionDataset& data, Index j,
                                    const MlpArchitecture& arch,
                                    const LazyConfig& cfg,
                                    const Trainer& trainer,
                                    std::uint64_t seed);

// Monte-Carlo estimate of P(|f(x; theta_{n,-j}) - f(x; theta_{-j,-j})| > nu/2)
// over `trials` random draws of j (each with fresh trainer seeds), evaluated
// at every test point.
double estimate_stability(const RegressionDataset& data,
                          const Eigen::Ref<const RowMatrix>& test_points,
                          const MlpArchitecture& arch, const LazyConfig& cfg,
                          const Trainer& trainer, double nu, int trials,
                          std::uint64_t seed);

}  // namespace lazypi

#endif  // LAZYPI_LAZY_LAZY_LOO_H_
