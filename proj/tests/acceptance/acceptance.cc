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

// Runs every headline acceptance criterion and prints one PASS/FAIL line per
// criterion. Exits nonzero when any criterion fails.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "bench/data.h"
#include "bench/ridge.h"
#include "bench/trial.h"
#include "intervals/intervals.h"
#include "lazy/lazy_loo.h"
#include "nn/mlp.h"
#include "privacy/privacy.h"
#include "test_util.h"

namespace lazypi {
namespace {

using testing::RandomDataset;
using testing::RandomMatrix;
using testing::RandomParams;
using testing::RandomVector;

constexpr double kInf = std::numeric_limits<double>::infinity();

int failures = 0;

void Report(const std::string& name, bool pass, const std::string& detail) {
  std::printf("%s %s: %s\n", pass ? "PASS" : "FAIL", name.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

struct MethodStats {
  double coverage = 0.0;
  double width = 0.0;
  std::vector<double> total_seconds;
};

MethodStats Summarize(const ComparisonResult& result, Method method) {
  MethodStats stats;
  int count = 0;
  for (const auto& row : result.trials) {
    if (row.method != method) continue;
    stats.coverage += row.coverage;
    stats.width += row.avg_width;
    stats.total_seconds.push_back(row.train_seconds + row.eval_seconds);
    ++count;
  }
  stats.coverage /= count;
  stats.width /= count;
  return stats;
}

void SimulationCriteria() {
  Manifest m16;
  m16.methods = {Method::kJackknifePlus, Method::kDpLazy};
  const ComparisonResult r16 = run_comparison(m16, "");
  const MethodStats dp16 = Summarize(r16, Method::kDpLazy);
  const MethodStats jk16 = Summarize(r16, Method::kJackknifePlus);
  Report("coverage_p16", dp16.coverage >= 0.78,
         fmt::format("DP-Lazy mean coverage {:.4f} over {} trials (floor 0.78), "
                     "mean width {:.4g}, sigma {:.6g}, accounted epsilon {:.6g}",
                     dp16.coverage, m16.trials, dp16.width, r16.privacy.sigma,
                     r16.privacy.epsilon_accounted));

  int fast_trials = 0;
  double worst = 0.0;
  for (std::size_t t = 0; t < dp16.total_seconds.size(); ++t) {
    const double ratio = dp16.total_seconds[t] / jk16.total_seconds[t];
    worst = std::max(worst, ratio);
    if (ratio <= 1.0 / 3.0) ++fast_trials;
  }
  Report("speedup_p16", fast_trials == static_cast<int>(dp16.total_seconds.size()),
         fmt::format("DP-Lazy/jackknife+ total time ratio <= 1/3 on {}/{} trials, "
                     "worst ratio {:.3f}",
                     fast_trials, dp16.total_seconds.size(), worst));

  Manifest m100;
  m100.sim.p = 100;
  m100.methods = {Method::kDpLazy};
  const ComparisonResult r100 = run_comparison(m100, "");
  const MethodStats dp100 = Summarize(r100, Method::kDpLazy);
  Report("coverage_p100", dp100.coverage >= 0.78,
         fmt::format("DP-Lazy mean coverage {:.4f} over {} trials (floor 0.78), "
                     "mean width {:.4g}",
                     dp100.coverage, m100.trials, dp100.width));
}

void RidgeJackknifePlusCriterion() {
  const int trials = 500;
  const Learner learner = [](const RegressionDataset& train) -> Predictor {
    const RidgeModel model = fit_ridge(train, 1.0);
    return [model](const Eigen::Ref<const RowMatrix>& x) { return model.predict(x); };
  };
  double coverage = 0.0;
  for (int t = 0; t < trials; ++t) {
    SimConfig cfg;
    cfg.n_total = 150;
    cfg.seed = 1000 + static_cast<std::uint64_t>(t);
    const RegressionDataset data = simulate_data(cfg);
    const TrainTestSplit split = SplitIndices(cfg.n_total, 100, cfg.seed);
    const RegressionDataset train = data.Subset(split.train);
    const RegressionDataset test = data.Subset(split.test);
    const auto iv = jackknife_plus_with_learner(train, test.features(), learner, 0.1);
    double c = 0.0, w = 0.0;
    ScoreIntervals(iv, test.responses(), c, w);
    coverage += c;
  }
  coverage /= trials;
  const double floor = 0.8 - 3.0 * std::sqrt(0.8 * 0.2 / trials);
  Report("jackknife_plus_ridge", coverage >= floor,
         fmt::format("ridge jackknife+ coverage {:.4f} over {} trials (floor {:.4f})",
                     coverage, trials, floor));
}

// (Z^T Z + lambda I)^{-1} Z^T y with Z = [X, 1], by column-pivoted QR.
Vector RidgeOracle(const RowMatrix& x, const Vector& y, double lambda) {
  Eigen::MatrixXd z(x.rows(), x.cols() + 1);
  z.leftCols(x.cols()) = x;
  z.col(x.cols()).setOnes();
  Eigen::MatrixXd normal = z.transpose() * z;
  normal.diagonal().array() += lambda;
  return normal.colPivHouseholderQr().solve(z.transpose() * y);
}

void LazyClosedFormCriterion() {
  std::mt19937_64 rng(7001);
  std::uniform_int_distribution<int> rows(1, 20);
  std::uniform_real_distribution<double> log_lambda(-2.0, 2.0);
  double dual_primal = 0.0;
  for (int draw = 0; draw < 100; ++draw) {
    const Index p = 1 + draw % 6;
    const MlpArchitecture arch{p, {4, 2}, static_cast<Activation>(draw % 3)};
    const ParamVector theta0 = RandomParams(rng, arch, 0.8);
    const RegressionDataset data = RandomDataset(rng, rows(rng), p);
    LazyConfig cfg;
    cfg.ridge_lambda = std::pow(10.0, log_lambda(rng));
    const Vector dual = lazy_solve(theta0, arch, data, cfg).values;
    const Vector primal = lazy_solve_primal(theta0, arch, data, cfg).values;
    dual_primal = std::max(dual_primal, (dual - primal).lpNorm<Eigen::Infinity>());
  }
  double linear = 0.0;
  for (int draw = 0; draw < 100; ++draw) {
    const Index p = 1 + draw % 8;
    const RegressionDataset data = RandomDataset(rng, rows(rng), p);
    const MlpArchitecture arch{p, {}, Activation::kRelu};
    const ParamVector zero{Vector::Zero(arch.param_count()), arch.fingerprint()};
    LazyConfig cfg;
    cfg.ridge_lambda = std::pow(10.0, log_lambda(rng));
    const Vector lazy = lazy_solve(zero, arch, data, cfg).values;
    const Vector exact = RidgeOracle(data.features(), data.responses(), cfg.ridge_lambda);
    linear = std::max(linear, (lazy - exact).lpNorm<Eigen::Infinity>());
  }
  Report("lazy_closed_form", dual_primal < 1e-8 && linear < 1e-9,
         fmt::format("max |dual - primal| {:.3g} (< 1e-8), max |linear - ridge| "
                     "{:.3g} (< 1e-9), 100 instances each",
                     dual_primal, linear));
}

double Act(Activation a, double z) {
  switch (a) {
    case Activation::kRelu:
      return z > 0.0 ? z : 0.0;
    case Activation::kTanh:
      return std::tanh(z);
    case Activation::kSigmoid:
      return 1.0 / (1.0 + std::exp(-z));
  }
  return 0.0;
}

// Scalar evaluation against the documented layout: per layer, the weight
// matrix row by row, then the biases.
double ScalarForward(const Vector& theta, const MlpArchitecture& arch,
                     std::vector<double> in) {
  std::size_t offset = 0;
  const std::size_t layers = arch.hidden.size() + 1;
  for (std::size_t l = 0; l < layers; ++l) {
    const std::size_t fan_in = in.size();
    const std::size_t fan_out =
        l + 1 == layers ? 1 : static_cast<std::size_t>(arch.hidden[l]);
    std::vector<double> out(fan_out);
    for (std::size_t o = 0; o < fan_out; ++o) {
      double z = theta(static_cast<Index>(offset + fan_out * fan_in + o));
      for (std::size_t i = 0; i < fan_in; ++i) {
        z += theta(static_cast<Index>(offset + o * fan_in + i)) * in[i];
      }
      out[o] = l + 1 == layers ? z : Act(arch.activation, z);
    }
    offset += fan_out * (fan_in + 1);
    in = std::move(out);
  }
  return in[0];
}

void GradientFidelityCriterion() {
  std::mt19937_64 rng(7002);
  std::uniform_int_distribution<int> width(1, 10);
  std::uniform_int_distribution<int> depth(0, 3);
  std::uniform_int_distribution<int> act(0, 2);
  const double h = 1e-5;
  double worst = 0.0;
  for (int draw = 0; draw < 100; ++draw) {
    MlpArchitecture arch;
    arch.input_dim = width(rng);
    for (int l = depth(rng); l > 0; --l) arch.hidden.push_back(width(rng));
    arch.activation = static_cast<Activation>(act(rng));
    const ParamVector theta = RandomParams(rng, arch);
    const RowMatrix x = RandomMatrix(rng, 1, arch.input_dim);
    const Vector jac = param_jacobian(theta, arch, x).row(0).transpose();
    const std::vector<double> xs(x.data(), x.data() + x.size());
    Vector fd(jac.size());
    Vector probe = theta.values;
    for (Index k = 0; k < fd.size(); ++k) {
      const double saved = probe(k);
      probe(k) = saved + h;
      const double up = ScalarForward(probe, arch, xs);
      probe(k) = saved - h;
      const double down = ScalarForward(probe, arch, xs);
      probe(k) = saved;
      fd(k) = (up - down) / (2.0 * h);
    }
    const double scale = std::max(fd.lpNorm<Eigen::Infinity>(), 1e-12);
    worst = std::max(worst, (jac - fd).lpNorm<Eigen::Infinity>() / scale);
  }
  Report("gradient_fidelity", worst < 1e-4,
         fmt::format("max relative Jacobian error {:.3g} over 100 draws (< 1e-4)", worst));
}

void DpSanityCriterion() {
  std::mt19937_64 rng(7003);
  std::uniform_int_distribution<int> dim(1, 500);
  std::uniform_real_distribution<double> log_scale(-3.0, 3.0);
  int clip_violations = 0;
  for (int draw = 0; draw < 10000; ++draw) {
    const double clip = std::pow(10.0, log_scale(rng));
    const Vector g = RandomVector(rng, dim(rng), std::pow(10.0, log_scale(rng)));
    const Vector out = clip_gradient(g, clip);
    if (out.norm() > clip * (1.0 + 1e-12)) ++clip_violations;
    if (g.norm() <= clip && out != g) ++clip_violations;
  }

  const RegressionDataset data = RandomDataset(rng, 30, 4);
  const MlpArchitecture arch{4, {16, 8}, Activation::kRelu};
  DpSgdConfig cfg;
  cfg.noise_scale = 0.0;
  cfg.clip_norm = 1e12;
  cfg.lot_size = data.size();
  cfg.learning_rate = 0.05;
  cfg.iterations = 50;
  cfg.seed = 17;
  ParamVector gd = init_params(arch, cfg.seed);
  for (int t = 0; t < cfg.iterations; ++t) {
    const Vector g = summed_loss_gradient(gd, arch, data.features(), data.responses());
    gd.values -= cfg.learning_rate * (g / static_cast<double>(data.size()));
  }
  const ParamVector dp = dp_sgd_train(data, arch, cfg).first;
  const bool bit_identical = dp.values.size() == gd.values.size() &&
                             (dp.values.array() == gd.values.array()).all();

  const double s = 0.5;
  const double eps = 0.25;
  const Index draws = 100000;
  const ParamVector zero{Vector::Zero(draws), 0};
  const Vector noise = laplace_perturb(zero, {s, NormKind::kL1}, eps, 7004).values;
  const double mad = noise.array().abs().mean();
  const double mad_error = std::abs(mad - s / eps) / (s / eps);

  Report("dp_sanity", clip_violations == 0 && bit_identical && mad_error < 0.02,
         fmt::format("clip violations {}/10000, sigma=0 DP-SGD bit-identical to GD: "
                     "{}, Laplace MAD relative error {:.4f} (< 0.02)",
                     clip_violations, bit_identical ? "yes" : "no", mad_error));
}

void QuantileCriterion() {
  std::mt19937_64 rng(7005);
  std::uniform_int_distribution<int> size(1, 300);
  std::normal_distribution<double> normal;
  // alpha = num / den exactly, so the oracle ranks are integer arithmetic.
  const std::pair<long, long> alphas[] = {{1, 100}, {5, 100}, {10, 100}, {25, 100}};
  int mismatches = 0;
  int infinite_cases = 0;
  for (int draw = 0; draw < 10000; ++draw) {
    const int n = draw % 4 == 0 ? 1 + draw % 25 : size(rng);
    std::vector<double> v(static_cast<std::size_t>(n));
    for (double& x : v) x = draw % 3 == 0 ? std::round(2.0 * normal(rng)) : normal(rng);
    std::vector<double> sorted = v;
    std::sort(sorted.begin(), sorted.end());
    for (auto [num, den] : alphas) {
      const double alpha = static_cast<double>(num) / static_cast<double>(den);
      const long k_up = ((den - num) * (n + 1) + den - 1) / den;
      const long k_lo = (num * (n + 1)) / den;
      const double up = k_up > n ? kInf : sorted[static_cast<std::size_t>(k_up - 1)];
      const double lo = k_lo < 1 ? -kInf : sorted[static_cast<std::size_t>(k_lo - 1)];
      if (std::isinf(up)) ++infinite_cases;
      if (quantile_upper(v, alpha) != up) ++mismatches;
      if (quantile_lower(v, alpha) != lo) ++mismatches;
    }
  }
  Report("quantile_oracle", mismatches == 0 && infinite_cases > 0,
         fmt::format("{} mismatches against the sort oracle on 10000 vectors "
                     "({} out-of-range cases)",
                     mismatches, infinite_cases));
}

void NuCriterion() {
  std::mt19937_64 rng(7006);
  std::uniform_int_distribution<int> size(2, 200);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  int reduction_failures = 0;
  int nesting_failures = 0;
  for (int draw = 0; draw < 2000; ++draw) {
    const int n = size(rng);
    std::vector<double> preds(static_cast<std::size_t>(n));
    std::vector<double> res(static_cast<std::size_t>(n));
    std::normal_distribution<double> normal;
    for (int j = 0; j < n; ++j) {
      preds[static_cast<std::size_t>(j)] = normal(rng);
      res[static_cast<std::size_t>(j)] = std::abs(normal(rng));
    }
    const double alpha = 0.02 + 0.3 * unit(rng);
    const PredictionInterval jk = jackknife_plus_interval(preds, res, alpha);
    if (!(dp_lazy_interval(preds, res, IntervalConfig{alpha, 0.0}) == jk)) {
      ++reduction_failures;
    }
    PredictionInterval previous = jk;
    for (double nu : {0.01, 0.05, 0.1, 0.5, 1.0, 3.0}) {
      const PredictionInterval cur = dp_lazy_interval(preds, res, IntervalConfig{alpha, nu});
      if (cur.lower > previous.lower || cur.upper < previous.upper) ++nesting_failures;
      previous = cur;
    }
  }
  Report("nu_reduction_and_nesting", reduction_failures == 0 && nesting_failures == 0,
         fmt::format("nu=0 differs from jackknife+ in {}/2000 cases; nesting "
                     "violated in {} cases",
                     reduction_failures, nesting_failures));
}

}  // namespace
}  // namespace lazypi

int main() {
  using namespace lazypi;
  LazyClosedFormCriterion();
  GradientFidelityCriterion();
  DpSanityCriterion();
  QuantileCriterion();
  NuCriterion();
  RidgeJackknifePlusCriterion();
  SimulationCriteria();
  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
