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

#include "common/error.h"
#include "privacy/privacy.h"

namespace lazypi {

Vector clip_gradient(const Eigen::Ref<const Vector>& g, double clip_norm) {
  if (!(clip_norm > 0.0)) throw InvalidArgument("clip norm must be > 0");
  if (!g.allFinite()) throw InvalidArgument("gradient is not finite");
  const double norm = g.norm();
  return g / std::max(1.0, norm / clip_norm);
}

}  // namespace lazypi
