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

#ifndef LAZYPI_COMMON_RANDOM_H_
#define LAZYPI_COMMON_RANDOM_H_

#include <cstdint>
#include <random>

namespace lazypi {

using Engine = std::mt19937_64;

// Named substreams so that independent consumers of one seed never share
// draws (e.g. the initializer and the lot sampler of the same training run).
enum class Stream : std::uint64_t {
  kInit = 1,
  kLotSampling = 2,
  kGradientNoise = 3,
  kShuffle = 4,
  kSplit = 5,
  kSimulation = 6,
  kLaplace = 7,
  kStability = 8,
};

// Deterministic engine for (seed, stream, index). `index` distinguishes
// repeated consumers on the same stream, e.g. the j-th leave-one-out model.
Engine MakeEngine(std::uint64_t seed, Stream stream, std::uint64_t index = 0);

// SplitMix64 finalizer; used to derive child seeds.
std::uint64_t MixSeed(std::uint64_t seed, std::uint64_t salt);

// Standard Laplace(0, scale) draw by inverse CDF.
double SampleLaplace(Engine& engine, double scale);

}  // namespace lazypi

#endif  // LAZYPI_COMMON_RANDOM_H_
