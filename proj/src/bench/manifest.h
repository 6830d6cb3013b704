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

#ifndef LAZYPI_BENCH_MANIFEST_H_
#define LAZYPI_BENCH_MANIFEST_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bench/data.h"
#include "intervals/intervals.h"
#include "lazy/lazy_loo.h"
#include "nn/mlp.h"
#include "nn/sgd.h"
#include "privacy/privacy.h"

namespace lazypi {

enum class Method { kNaive, kJackknife, kJackknifePlus, kLazyFinetune, kDpLazy };

std::string MethodName(Method method);
Method ParseMethod(const std::string& name);

enum class DataSource { kSimulate, kCsv };

struct PrivacySettings {
  double epsilon = 0.01;
  double delta = 1e-3;
  // Noise multiplier; when unset it is calibrated so that the accounted
  // epsilon meets `epsilon` at `delta`.
  std::optional<double> sigma;
  double clip_norm = 1.0;
};

struct StabilitySettings {
  int trials = 10;
  Index test_points = 200;
  double nu = 0.1;
};

// Everything needed to reproduce a comparison run. Serialized as JSON; see
// docs/manifest.md for the schema.
struct Manifest {
  DataSource source = DataSource::kSimulate;
  SimConfig sim;
  std::string csv_path;
  std::string response_column = "y";
  ResponseTransform transform = ResponseTransform::kIdentity;

  Index n_train = 100;
  std::vector<Method> methods = {Method::kJackknifePlus, Method::kLazyFinetune,
                                 Method::kDpLazy};
  int trials = 15;
  std::uint64_t seed = 0;
  int workers = 1;
  bool record_timings = true;

  std::vector<Index> hidden = {64, 64};
  Activation activation = Activation::kRelu;
  SgdConfig training;
  PrivacySettings privacy;
  LazyConfig lazy;
  IntervalConfig interval;
  StabilitySettings stability;

  void Validate() const;
  MlpArchitecture Architecture(Index input_dim) const;
};

// Unknown keys and mistyped values are ParseErrors; missing keys keep their
// defaults.
Manifest ParseManifest(const std::string& json_text);
Manifest LoadManifest(const std::string& path);
std::string ManifestToJson(const Manifest& manifest, int indent = 2);

// Sets a dotted key such as "interval.alpha" or "model.hidden". `value` is
// read as JSON when it parses as JSON and as a string otherwise.
void SetManifestValue(Manifest& manifest, const std::string& key,
                      const std::string& value);

// DP-SGD parameters derived from the manifest for a training set of n rows:
// one lot per batch, ceil(n / batch) lots per epoch.
struct ResolvedPrivacy {
  double sigma = 0.0;
  bool calibrated = false;
  int iterations = 0;
  double sampling_rate = 0.0;
  double epsilon_accounted = 0.0;
};

ResolvedPrivacy ResolvePrivacy(const Manifest& manifest, Index n);

DpSgdConfig MakeDpSgdConfig(const Manifest& manifest, const ResolvedPrivacy& rp,
                            std::uint64_t seed);

// Git blob SHA-1 of the canonical manifest JSON, followed by the CSV bytes
// when the data source is a file.
std::string ManifestContentHash(const Manifest& manifest);

// SHA-1 of "blob <size>\0<content>", as `git hash-object` computes it.
std::string GitBlobHash(const std::string& content);

}  // namespace lazypi

#endif  // LAZYPI_BENCH_MANIFEST_H_
