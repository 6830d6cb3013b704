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

#include "common/error.h"
#include "common/random.h"
#include "privacy/privacy.h"

namespace lazypi {

ParamVector laplace_perturb(const ParamVector& theta, const SensitivityBound& s,
                            double epsilon, std::uint64_t seed) {
  if (!(epsilon > 0.0)) throw InvalidArgument("epsilon must be > 0");
  if (!(s.s >= 0.0)) throw InvalidArgument("sensitivity must be >= 0");
  ParamVector out = theta;
  if (s.s == 0.0) return out;
  const double scale = s.s / epsilon;
  Engine engine = MakeEngine(seed, Stream::kLaplace);
  for (Index k = 0; k < out.values.size(); ++k) {
    out.values(k) += SampleLaplace(engine, scale);
  }
  return out;
}

}  // namespace lazypi
