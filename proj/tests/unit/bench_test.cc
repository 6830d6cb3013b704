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

#include "bench/trial.h"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <random>
#include <set>
#include <string>

#include <fmt/format.h>

#include "bench/ridge.h"
#include "common/error.h"
#include "test_util.h"

namespace lazypi {
namespace {

namespace fs = std::filesystem;

Manifest SmallManifest() {
  Manifest m;
  m.sim.n_total = 60;
  m.sim.p = 3;
  m.sim.seed = 4;
  m.n_train = 12;
  m.hidden = {6};
  m.training.epochs = 3;
  m.training.batch_size = 4;
  m.training.learning_rate = 0.05;
  m.trials = 2;
  m.privacy.sigma = 0.5;
  m.lazy.ridge_lambda = 1.0;
  m.methods = {Method::kNaive, Method::kJackknife, Method::kJackknifePlus,
               Method::kLazyFinetune, Method::kDpLazy};
  return m;
}

RegressionDataset RandomData(Index n, Index p, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return testing::RandomDataset(rng, n, p);
}

std::string ReadAll(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

fs::path FreshDir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("lazypi_bench_test_" + name);
  fs::remove_all(dir);
  return dir;
}

TEST(SplitIndices, DeterministicPartition) {
  const TrainTestSplit a = SplitIndices(50, 20, 7);
  const TrainTestSplit b = SplitIndices(50, 20, 7);
  EXPECT_EQ(a.train, b.train);
  EXPECT_EQ(a.test, b.test);
  ASSERT_EQ(a.train.size(), 20u);
  ASSERT_EQ(a.test.size(), 30u);
  std::set<Index> all(a.train.begin(), a.train.end());
  all.insert(a.test.begin(), a.test.end());
  EXPECT_EQ(all.size(), 50u);
  EXPECT_EQ(*all.begin(), 0);
  EXPECT_EQ(*all.rbegin(), 49);
  EXPECT_NE(SplitIndices(50, 20, 8).train, a.train);
  EXPECT_THROW(SplitIndices(10, 10, 0), Error);
  EXPECT_THROW(SplitIndices(10, 0, 0), Error);
}

TEST(TrialSeed, OffsetsTheManifestSeed) {
  EXPECT_EQ(TrialSeed(100, 0), 100u);
  EXPECT_EQ(TrialSeed(100, 14), 114u);
}

TEST(ScoreIntervals, CoverageAndWidth) {
  const std::vector<PredictionInterval> iv{{0, 1}, {0, 3}, {-1, 1}, {2, 2}};
  Vector y(4);
  y << 1, 5, 0, 2;
  double coverage = 0, width = 0;
  ScoreIntervals(iv, y, coverage, width);
  EXPECT_EQ(coverage, 0.75);
  EXPECT_EQ(width, 1.5);
  const std::vector<PredictionInterval> open{{0, 1}, {-INFINITY, INFINITY}};
  ScoreIntervals(open, Vector::Zero(2), coverage, width);
  EXPECT_EQ(coverage, 1.0);
  EXPECT_EQ(width, INFINITY);
  EXPECT_THROW(ScoreIntervals(open, Vector::Zero(3), coverage, width), Error);
}

TEST(RunTrial, EveryMethodProducesSaneScores) {
  const Manifest m = SmallManifest();
  const RegressionDataset data = LoadManifestData(m);
  const ResolvedPrivacy rp = ResolvePrivacy(m, m.n_train);
  for (Method method : m.methods) {
    const TrialResult r = run_trial(method, data, m, rp, 3, 11);
    EXPECT_EQ(r.method, method);
    EXPECT_EQ(r.trial, 3);
    EXPECT_EQ(r.seed, 11u);
    EXPECT_GE(r.coverage, 0.0);
    EXPECT_LE(r.coverage, 1.0);
    EXPECT_GE(r.avg_width, 0.0);
    EXPECT_TRUE(std::isfinite(r.avg_width)) << MethodName(method);
    EXPECT_GE(r.train_seconds, 0.0);
    EXPECT_GE(r.eval_seconds, 0.0);
    const TrialResult again = run_trial(method, data, m, rp, 3, 11);
    EXPECT_EQ(again.coverage, r.coverage);
    EXPECT_EQ(again.avg_width, r.avg_width);
  }
}

TEST(RunTrial, TooFewRowsForTheLevelGivesInfiniteIntervals) {
  Manifest m = SmallManifest();
  m.n_train = 10;
  m.interval.alpha = 0.05;  // ceil(0.95 * 11) = 11 > 10
  const RegressionDataset data = LoadManifestData(m);
  const ResolvedPrivacy rp = ResolvePrivacy(m, m.n_train);
  for (Method method : {Method::kJackknifePlus, Method::kDpLazy}) {
    const TrialResult r = run_trial(method, data, m, rp, 0, 1);
    EXPECT_EQ(r.coverage, 1.0);
    EXPECT_EQ(r.avg_width, INFINITY);
  }
}

TEST(RunTrial, NoiselessDpLazyMatchesLazyFinetune) {
  Manifest m = SmallManifest();
  m.privacy.sigma = 0.0;
  const RegressionDataset data = LoadManifestData(m);
  const ResolvedPrivacy rp = ResolvePrivacy(m, m.n_train);
  const TrialResult dp = run_trial(Method::kDpLazy, data, m, rp, 0, 5);
  const TrialResult ft = run_trial(Method::kLazyFinetune, data, m, rp, 0, 5);
  EXPECT_EQ(dp.coverage, ft.coverage);
  EXPECT_EQ(dp.avg_width, ft.avg_width);
}

TEST(RunTrial, NoiseWidensDpLazyIntervals) {
  Manifest m = SmallManifest();
  m.privacy.sigma = 50.0;
  const RegressionDataset data = LoadManifestData(m);
  const ResolvedPrivacy rp = ResolvePrivacy(m, m.n_train);
  double dp_width = 0.0, ft_width = 0.0;
  for (int t = 0; t < 3; ++t) {
    dp_width += run_trial(Method::kDpLazy, data, m, rp, t, t).avg_width;
    ft_width += run_trial(Method::kLazyFinetune, data, m, rp, t, t).avg_width;
  }
  EXPECT_GT(dp_width, ft_width);
}

TEST(RunTrial, RejectsTinyDatasets) {
  Manifest m = SmallManifest();
  const RegressionDataset tiny = RandomData(12, 3, 1);
  EXPECT_THROW(run_trial(Method::kNaive, tiny, m, ResolvePrivacy(m, 12), 0, 0),
               Error);
}

TEST(DpLazyIntervals, MatchesTheTrialPipeline) {
  const Manifest m = SmallManifest();
  const RegressionDataset data = LoadManifestData(m);
  const ResolvedPrivacy rp = ResolvePrivacy(m, m.n_train);
  const TrainTestSplit split = SplitIndices(data.size(), m.n_train, 9);
  const RegressionDataset train = data.Subset(split.train);
  const RegressionDataset test = data.Subset(split.test);
  const auto iv = dp_lazy_intervals(train, test.features(), m, rp, 9);
  ASSERT_EQ(static_cast<Index>(iv.size()), test.size());
  double coverage = 0, width = 0;
  ScoreIntervals(iv, test.responses(), coverage, width);
  const TrialResult r = run_trial(Method::kDpLazy, data, m, rp, 0, 9);
  EXPECT_EQ(coverage, r.coverage);
  EXPECT_EQ(width, r.avg_width);
}

TEST(MeanAndStandardError, HandComputed) {
  double mean = 0, se = 0;
  MeanAndStandardError({1.0, 2.0, 3.0, 6.0}, mean, se);
  EXPECT_DOUBLE_EQ(mean, 3.0);
  // sample variance (4 + 1 + 0 + 9) / 3, divided by n = 4
  EXPECT_DOUBLE_EQ(se, std::sqrt(14.0 / 3.0 / 4.0));
  MeanAndStandardError({5.0}, mean, se);
  EXPECT_EQ(mean, 5.0);
  EXPECT_TRUE(std::isnan(se));
  MeanAndStandardError({}, mean, se);
  EXPECT_TRUE(std::isnan(mean));
}

TEST(Aggregate, GroupsByMethodInOrder) {
  std::vector<TrialResult> rows;
  for (int t = 0; t < 3; ++t) {
    rows.push_back({Method::kDpLazy, t, 0, 0.8 + 0.05 * t, 2.0 * t, 1.0, 2.0});
    rows.push_back({Method::kNaive, t, 0, 0.5, 1.0, 3.0, 4.0});
  }
  const auto agg = Aggregate(rows, {Method::kNaive, Method::kDpLazy});
  ASSERT_EQ(agg.size(), 2u);
  EXPECT_EQ(agg[0].method, Method::kNaive);
  EXPECT_EQ(agg[0].trials, 3);
  EXPECT_EQ(agg[0].coverage_mean, 0.5);
  EXPECT_EQ(agg[0].coverage_se, 0.0);
  EXPECT_EQ(agg[0].eval_seconds_mean, 4.0);
  EXPECT_DOUBLE_EQ(agg[1].coverage_mean, 0.85);
  EXPECT_DOUBLE_EQ(agg[1].avg_width_mean, 2.0);
  EXPECT_DOUBLE_EQ(agg[1].avg_width_se, std::sqrt(4.0 / 3.0));
}

TEST(RunComparison, WritesArtifactsAndIsReproducible) {
  Manifest m = SmallManifest();
  m.record_timings = false;
  const fs::path a = FreshDir("a");
  const fs::path b = FreshDir("b");
  const ComparisonResult ra = run_comparison(m, a.string());
  m.workers = 2;
  const ComparisonResult rb = run_comparison(m, b.string());
  ASSERT_EQ(ra.trials.size(), 10u);
  EXPECT_EQ(ra.trials[0].method, Method::kNaive);
  EXPECT_EQ(ra.trials[5].trial, 1);
  EXPECT_EQ(ra.trials[5].seed, 1u);
  for (const char* name : {"results.csv", "aggregates.csv"}) {
    const std::string text = ReadAll(a / name);
    EXPECT_FALSE(text.empty());
    EXPECT_EQ(text, ReadAll(b / name)) << name;
  }
  EXPECT_EQ(ReadAll(a / "results.csv"), ResultsCsv(ra.trials));
  const std::string resolved = ReadAll(a / "manifest.resolved");
  EXPECT_NE(resolved.find(ra.content_hash), std::string::npos);
  EXPECT_NE(resolved.find("\"epsilon_accounted\""), std::string::npos);
  EXPECT_EQ(ra.aggregates.size(), 5u);
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST(RunComparison, DpLazyTrainsFasterThanJackknifePlus) {
  Manifest m;
  m.methods = {Method::kJackknifePlus, Method::kDpLazy};
  m.trials = 3;
  m.sim.n_total = 400;
  const ComparisonResult r = run_comparison(m, "");
  ASSERT_EQ(r.trials.size(), 6u);
  for (int t = 0; t < 3; ++t) {
    const TrialResult& jk = r.trials[static_cast<std::size_t>(2 * t)];
    const TrialResult& dp = r.trials[static_cast<std::size_t>(2 * t + 1)];
    EXPECT_GT(jk.train_seconds, 0.0);
    EXPECT_LT(dp.train_seconds, jk.train_seconds) << "trial " << t;
  }
}

TEST(RunComparison, FlushesFinishedRowsOnFailure) {
  Manifest m = SmallManifest();
  // Clipping keeps DP-SGD finite at this step size; plain SGD blows up.
  m.training.learning_rate = 1e6;
  m.privacy.sigma = 0.0;
  m.methods = {Method::kDpLazy, Method::kJackknifePlus};
  const fs::path dir = FreshDir("fail");
  try {
    run_comparison(m, dir.string());
    FAIL() << "expected divergence";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNumerical);
  }
  const std::string results = ReadAll(dir / "results.csv");
  EXPECT_EQ(std::count(results.begin(), results.end(), '\n'), 2) << results;
  EXPECT_EQ(results.find("jackknife_plus"), std::string::npos);
  EXPECT_NE(results.find("dp_lazy,0,0,"), std::string::npos);
  EXPECT_TRUE(fs::exists(dir / "aggregates.csv"));
  fs::remove_all(dir);
}

TEST(RunComparison, CsvSourceWithLog1pResponse) {
  const fs::path dir = FreshDir("csv");
  fs::create_directories(dir);
  SimConfig sim;
  sim.n_total = 40;
  sim.p = 3;
  const RegressionDataset raw = simulate_data(sim);
  std::string csv = "f1,comments,f2,f3\n";
  for (Index i = 0; i < raw.size(); ++i) {
    csv += fmt::format("{},{},{},{}\n", raw.features()(i, 0), std::abs(raw.responses()(i)),
                       raw.features()(i, 1), raw.features()(i, 2));
  }
  csv += "1,nan,2,3\n";
  std::ofstream(dir / "blog.csv") << csv;

  Manifest m = SmallManifest();
  m.source = DataSource::kCsv;
  m.csv_path = (dir / "blog.csv").string();
  m.response_column = "comments";
  m.transform = ResponseTransform::kLog1p;
  const RegressionDataset data = LoadManifestData(m);
  ASSERT_EQ(data.size(), 40);
  ASSERT_EQ(data.dim(), 3);
  EXPECT_DOUBLE_EQ(data.responses()(5), std::log1p(std::abs(raw.responses()(5))));
  EXPECT_EQ(data.features()(5, 1), raw.features()(5, 1));
  const ComparisonResult r = run_comparison(m, (dir / "out").string());
  EXPECT_EQ(r.trials.size(), 10u);
  EXPECT_TRUE(fs::exists(dir / "out" / "results.csv"));
  fs::remove_all(dir);
}

TEST(FitRidge, MatchesAugmentedLeastSquares) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const RegressionDataset d = RandomData(15, 4, seed);
    const double lambda = 0.1 * static_cast<double>(seed + 1);
    const RidgeModel model = fit_ridge(d, lambda);
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(15 + 4, 5);
    Vector b = Vector::Zero(15 + 4);
    a.topLeftCorner(15, 4) = d.features();
    a.topRightCorner(15, 1).setOnes();
    a.bottomLeftCorner(4, 4) = std::sqrt(lambda) * Eigen::MatrixXd::Identity(4, 4);
    b.head(15) = d.responses();
    const Vector sol = a.householderQr().solve(b);
    EXPECT_LT((model.coef - sol.head(4)).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_NEAR(model.intercept, sol(4), 1e-10);
    const Vector pred = model.predict(d.features());
    EXPECT_LT((pred - (d.features() * sol.head(4)).array().matrix() -
               Vector::Constant(15, sol(4)))
                  .cwiseAbs()
                  .maxCoeff(),
              1e-10);
  }
  EXPECT_THROW(fit_ridge(RandomData(5, 2, 0), -1.0), Error);
}

TEST(JackknifePlusWithLearner, DuplicateRowsGiveZeroWidth) {
  RowMatrix x = RowMatrix::Constant(8, 2, 1.5);
  const RegressionDataset d(x, Vector::Constant(8, 3.0));
  const Learner learner = [](const RegressionDataset& train) -> Predictor {
    const RidgeModel model = fit_ridge(train, 1.0);
    return [model](const Eigen::Ref<const RowMatrix>& p) { return model.predict(p); };
  };
  RowMatrix points = RowMatrix::Constant(3, 2, 1.5);
  const auto iv = jackknife_plus_with_learner(d, points, learner, 0.25);
  ASSERT_EQ(iv.size(), 3u);
  for (const auto& i : iv) {
    EXPECT_NEAR(i.lower, 3.0, 1e-12);
    EXPECT_NEAR(i.upper, 3.0, 1e-12);
  }
}

TEST(JackknifePlusWithLearner, MatchesAManualLoop) {
  const RegressionDataset d = RandomData(11, 2, 3);
  std::mt19937_64 rng(4);
  const RowMatrix points = testing::RandomMatrix(rng, 4, 2);
  const Learner learner = [](const RegressionDataset& train) -> Predictor {
    const RidgeModel model = fit_ridge(train, 0.5);
    return [model](const Eigen::Ref<const RowMatrix>& p) { return model.predict(p); };
  };
  const auto iv = jackknife_plus_with_learner(d, points, learner, 0.2);
  // ceil(0.8 * 12) = 10th smallest of the upper values, 2nd smallest lower.
  for (Index t = 0; t < 4; ++t) {
    std::vector<double> lo, hi;
    for (Index j = 0; j < 11; ++j) {
      const RidgeModel mj = fit_ridge(d.Without(j), 0.5);
      RowMatrix xj = d.features().row(j);
      const double r = std::abs(d.responses()(j) - mj.predict(xj)(0));
      RowMatrix pt = points.row(t);
      const double mu = mj.predict(pt)(0);
      lo.push_back(mu - r);
      hi.push_back(mu + r);
    }
    std::sort(lo.begin(), lo.end());
    std::sort(hi.begin(), hi.end());
    EXPECT_DOUBLE_EQ(iv[static_cast<std::size_t>(t)].upper, hi[9]);
    EXPECT_DOUBLE_EQ(iv[static_cast<std::size_t>(t)].lower, lo[1]);
  }
}

}  // namespace
}  // namespace lazypi
