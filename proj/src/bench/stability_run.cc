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

#include "bench/trial.h"
#include "common/error.h"
#include "common/random.h"
#include "privacy/accountant.h"
#include "privacy/privacy.h"

namespace lazypi {

StabilityReport run_stability(const Manifest& manifest) {
  manifest.Validate();
  const RegressionDataset data = LoadManifestData(manifest);
  const TrainTestSplit split =
      SplitIndices(data.size(), manifest.n_train, TrialSeed(manifest.seed, 0));
  const RegressionDataset train = data.Subset(split.train);
  std::vector<Index> test_rows = split.test;
  test_rows.resize(static_cast<std::size_t>(
      std::min<Index>(manifest.stability.test_points,
                      static_cast<Index>(test_rows.size()))));
  const RegressionDataset test = data.Subset(test_rows);
  const MlpArchitecture arch = manifest.Architecture(data.dim());

  StabilityReport report;
  report.nu = manifest.stability.nu;
  report.trials = manifest.stability.trials;
  report.test_points = test.size();
  // Leave-one-out sets have n - 1 rows; calibrate on the full training size.
  report.privacy = ResolvePrivacy(manifest, train.size());
  const ResolvedPrivacy rp = report.privacy;
  const Trainer trainer = [&](const RegressionDataset& d, std::uint64_t seed) {
    return dp_sgd_train(d, arch, MakeDpSgdConfig(manifest, rp, seed)).first;
  };
  report.eta = estimate_stability(train, test.features(), arch, manifest.lazy,
                                  trainer, report.nu, report.trials,
                                  manifest.seed);
  report.slack = CoverageSlack(report.eta, rp.epsilon_accounted,
                               manifest.privacy.delta);
  return report;
}

}  // namespace lazypi
