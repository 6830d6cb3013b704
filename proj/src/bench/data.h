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

#ifndef LAZYPI_BENCH_DATA_H_
#define LAZYPI_BENCH_DATA_H_

#include <cstdint>
#include <istream>
#include <string>
#include <vector>

#include "nn/dataset.h"

namespace lazypi {

// X ~ N(0, x_scale * I_p), Y = sqrt(max(X beta, 0)) + N(0, noise_sd^2), with
// beta_k ~ Beta(beta_a, beta_b) drawn once per dataset.
struct SimConfig {
  Index n_total = 5000;
  Index p = 16;
  double x_scale = 5.0;
  double noise_sd = 0.7071067811865476;  // variance 0.5
  double beta_a = 1.0;
  double beta_b = 2.5;
  std::uint64_t seed = 0;

  void Validate() const;
};

RegressionDataset simulate_data(const SimConfig& cfg);

enum class ResponseTransform { kIdentity, kLog1p };

std::string TransformName(ResponseTransform transform);
ResponseTransform ParseTransform(const std::string& name);

struct TabularData {
  RegressionDataset data;
  std::vector<std::string> feature_names;
  Index dropped_rows = 0;
};

// RFC 4180 records. Quoted fields may contain commas, doubled quotes and
// line breaks. Throws ParseError on an unterminated quote.
std::vector<std::vector<std::string>> ParseCsv(std::istream& in);

// Features are every column except `response_column`, in file order. Empty,
// NaN and infinite cells (after the transform) drop the row; any other
// non-numeric cell is an error naming its row and column. An empty
// `response_column` loads every column as a feature with zero responses.
TabularData load_tabular(const std::string& path,
                         const std::string& response_column,
                         ResponseTransform transform);

// Header x1..xp,y followed by one row per example, shortest round-trip
// formatting.
void write_dataset_csv(const std::string& path, const RegressionDataset& data);

}  // namespace lazypi

#endif  // LAZYPI_BENCH_DATA_H_
