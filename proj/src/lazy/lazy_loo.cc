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

#include "lazy/lazy_loo.h"

#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <random>
#include <thread>

#include "common/error.h"
#include "common/random.h"

namespace lazypi {
namespace {

Eigen::MatrixXd DropRowAndColumn(const Eigen::MatrixXd& g, Index j) {
  const Index n = g.rows();
  const Index tail = n - 1 - j;
  Eigen::MatrixXd out(n - 1, n - 1);
  out.topLeftCorner(j, j) = g.topLeftCorner(j, j);
  out.topRightCorner(j, tail) = g.topRightCorner(j, tail);
  out.bottomLeftCorner(tail, j) = g.bottomLeftCorner(tail, j);
  out.bottomRightCorner(tail, tail) = g.bottomRightCorner(tail, tail);
  return out;
}

Vector DropEntry(const Vector& v, Index j) {
  Vector out(v.size() - 1);
  out.head(j) = v.head(j);
  out.tail(v.size() - 1 - j) = v.tail(v.size() - 1 - j);
  return out;
}

// Runs body(j) for j in [0, count) on up to `workers` threads. The first
// exception thrown by any worker is rethrown.
template <typename Body>
void ParallelFor(Index count, int workers, Body body) {
  if (workers <= 1 || count <= 1) {
    for (Index j = 0; j < count; ++j) body(j);
    return;
  }
  std::atomic<Index> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto run = [&] {
    for (Index j = next++; j < count; j = next++) {
      try {
        body(j);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  const int spawn = static_cast<int>(std::min<Index>(workers, count));
  for (int w = 0; w < spawn; ++w) pool.emplace_back(run);
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace

void LazyConfig::Validate() const {
  if (!(ridge_lambda > 0.0)) throw InvalidArgument("lambda must be > 0");
}

GramSystem BuildGramSystem(const Eigen::Ref<const RowMatrix>& jacobian,
                           const Eigen::Ref<const Vector>& residuals,
                           double ridge) {
  if (jacobian.rows() != residuals.size()) {
    throw DimensionMismatch("Jacobian rows and residuals differ");
  }
  GramSystem system;
  system.gram = jacobian * jacobian.transpose();
  system.gram = 0.5 * (system.gram + system.gram.transpose()).eval();
  system.ridge = ridge;
  system.residual_rhs = residuals;
  return system;
}

Vector SolveGramSystem(const GramSystem& system) {
  const Index n = system.gram.rows();
  Eigen::MatrixXd a = system.gram;
  a.diagonal().array() += system.ridge;
  Eigen::LLT<Eigen::MatrixXd> llt(a);
  if (llt.info() != Eigen::Success) {
    throw NumericalError("Cholesky factorization of the " + std::to_string(n) +
                         "x" + std::to_string(n) + " Gram system failed");
  }
  return llt.solve(system.residual_rhs);
}

ParamVector lazy_solve(const ParamVector& theta0, const MlpArchitecture& arch,
                       const RegressionDataset& data_minus_j,
                       const LazyConfig& cfg) {
  cfg.Validate();
  if (data_minus_j.size() == 0) throw InvalidArgument("empty dataset");
  const RowMatrix jac = param_jacobian(theta0, arch, data_minus_j.features());
  const Vector residuals =
      data_minus_j.responses() -
      batch_forward(theta0, arch, data_minus_j.features());
  const Vector alpha =
      SolveGramSystem(BuildGramSystem(jac, residuals, cfg.ridge_lambda));
  ParamVector out = theta0;
  out.values.noalias() += jac.transpose() * alpha;
  return out;
}

ParamVector lazy_solve_primal(const ParamVector& theta0,
                              const MlpArchitecture& arch,
                              const RegressionDataset& data_minus_j,
                              const LazyConfig& cfg) {
  cfg.Validate();
  if (data_minus_j.size() == 0) throw InvalidArgument("empty dataset");
  const RowMatrix jac = param_jacobian(theta0, arch, data_minus_j.features());
  const Vector residuals =
      data_minus_j.responses() -
      batch_forward(theta0, arch, data_minus_j.features());
  Eigen::MatrixXd normal = jac.transpose() * jac;
  normal.diagonal().array() += cfg.ridge_lambda;
  Eigen::LLT<Eigen::MatrixXd> llt(normal);
  if (llt.info() != Eigen::Success) {
    throw NumericalError("Cholesky factorization of the normal equations failed");
  }
  ParamVector out = theta0;
  out.values += llt.solve(jac.transpose() * residuals);
  return out;
}

LooFit fit_all_loo(const ParamVector& theta0, const MlpArchitecture& arch,
                   const RegressionDataset& data, const LazyConfig& cfg) {
  cfg.Validate();
  const Index n = data.size();
  if (n < 2) throw InvalidArgument("leave-one-out needs at least 2 rows");
  CheckParams(theta0, arch);

  LooFit fit;
  fit.base_params = theta0;
  fit.loo_params.resize(static_cast<std::size_t>(n));
  fit.loo_residuals.resize(n);

  auto residual_at = [&](const ParamVector& theta, Index j) {
    return std::abs(data.responses()(j) -
                    forward(theta, arch, data.features().row(j).transpose()));
  };

  if (!cfg.jacobian_reuse) {
    ParallelFor(n, cfg.workers, [&](Index j) {
      auto& slot = fit.loo_params[static_cast<std::size_t>(j)];
      slot = lazy_solve(theta0, arch, data.Without(j), cfg);
      fit.loo_residuals(j) = residual_at(slot, j);
    });
    return fit;
  }

  const RowMatrix jac = param_jacobian(theta0, arch, data.features());
  const Vector residuals =
      data.responses() - batch_forward(theta0, arch, data.features());
  const GramSystem full = BuildGramSystem(jac, residuals, cfg.ridge_lambda);
  // Column j holds the dual coefficients of the j-th solve, zero at row j.
  Eigen::MatrixXd coefficients = Eigen::MatrixXd::Zero(n, n);
  ParallelFor(n, cfg.workers, [&](Index j) {
    GramSystem system{DropRowAndColumn(full.gram, j), full.ridge,
                      DropEntry(full.residual_rhs, j)};
    const Vector alpha = SolveGramSystem(system);
    coefficients.col(j).head(j) = alpha.head(j);
    coefficients.col(j).tail(n - 1 - j) = alpha.tail(n - 1 - j);
  });
  Eigen::MatrixXd shifts = jac.transpose() * coefficients;
  shifts.colwise() += theta0.values;
  for (Index j = 0; j < n; ++j) {
    ParamVector theta{shifts.col(j), theta0.arch_fingerprint};
    fit.loo_residuals(j) = residual_at(theta, j);
    fit.loo_params[static_cast<std::size_t>(j)] = std::move(theta);
  }
  return fit;
}

Eigen::MatrixXd loo_predictions(const LooFit& fit, const MlpArchitecture& arch,
                                const Eigen::Ref<const RowMatrix>& points) {
  const Index n = static_cast<Index>(fit.loo_params.size());
  Eigen::MatrixXd preds(n, points.rows());
  for (Index j = 0; j < n; ++j) {
    preds.row(j) =
        batch_forward(fit.loo_params[static_cast<std::size_t>(j)], arch, points)
            .transpose();
  }
  return preds;
}

ParamVector lazy_solve_deleted_init(const RegressionDataset& data, Index j,
                                    const MlpArchitecture& arch,
                                    const LazyConfig& cfg,
                                    const Trainer& trainer,
                                    std::uint64_t seed) {
  const RegressionDataset reduced = data.Without(j);
  const ParamVector init = trainer(reduced, seed);
  return lazy_solve(init, arch, reduced, cfg);
}

double estimate_stability(const RegressionDataset& data,
                          const Eigen::Ref<const RowMatrix>& test_points,
                          const MlpArchitecture& arch, const LazyConfig& cfg,
                          const Trainer& trainer, double nu, int trials,
                          std::uint64_t seed) {
  if (trials < 1) throw InvalidArgument("trials must be >= 1");
  if (test_points.rows() < 1) throw InvalidArgument("need at least 1 test point");
  if (!(nu >= 0.0)) throw InvalidArgument("nu must be >= 0");
  if (data.size() < 2) throw InvalidArgument("need at least 2 training rows");

  Engine engine = MakeEngine(seed, Stream::kStability);
  std::uniform_int_distribution<Index> pick(0, data.size() - 1);
  std::int64_t exceed = 0;
  for (int t = 0; t < trials; ++t) {
    const Index j = pick(engine);
    const auto trial = static_cast<std::uint64_t>(t);
    const RegressionDataset reduced = data.Without(j);
    const ParamVector full_init = trainer(data, MixSeed(seed, 2 * trial));
    const ParamVector from_full = lazy_solve(full_init, arch, reduced, cfg);
    const ParamVector from_deleted = lazy_solve_deleted_init(
        data, j, arch, cfg, trainer, MixSeed(seed, 2 * trial + 1));
    const Vector diff = batch_forward(from_full, arch, test_points) -
                        batch_forward(from_deleted, arch, test_points);
    exceed += (diff.array().abs() > nu / 2.0).count();
  }
  return static_cast<double>(exceed) /
         (static_cast<double>(trials) * static_cast<double>(test_points.rows()));
}

}  // namespace lazypi
