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

#ifndef LAZYPI_NN_MLP_H_
#define LAZYPI_NN_MLP_H_

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "nn/dataset.h"

namespace lazypi {

enum class Activation { kRelu, kTanh, kSigmoid };

std::string ActivationName(Activation activation);
Activation ParseActivation(const std::string& name);

// Fully connected network with scalar output. Layer l maps layer_in(l)
// inputs to layer_out(l) outputs; the last layer is linear.
struct MlpArchitecture {
  Index input_dim = 1;
  std::vector<Index> hidden;
  Activation activation = Activation::kRelu;

  Index num_layers() const { return static_cast<Index>(hidden.size()) + 1; }
  Index layer_in(Index layer) const;
  Index layer_out(Index layer) const;
  // Offset of layer `layer`'s weights in the flat parameter vector. Weights
  // are stored row-major (out x in), followed by the out biases.
  Index layer_offset(Index layer) const;
  Index param_count() const;
  std::uint64_t fingerprint() const;
  void Validate() const;

  bool operator==(const MlpArchitecture&) const = default;
};

struct ParamVector {
  Vector values;
  std::uint64_t arch_fingerprint = 0;
};

// Gaussian weights with standard deviation 1/sqrt(fan_in), zero biases.
ParamVector init_params(const MlpArchitecture& arch, std::uint64_t seed);

double forward(const ParamVector& params, const MlpArchitecture& arch,
               const Eigen::Ref<const Vector>& x);

Vector batch_forward(const ParamVector& params, const MlpArchitecture& arch,
                     const Eigen::Ref<const RowMatrix>& x);

// Row i is the gradient of f(x_i; .) with respect to the parameters.
RowMatrix param_jacobian(const ParamVector& params, const MlpArchitecture& arch,
                         const Eigen::Ref<const RowMatrix>& x);

// Gradient of 0.5 * (y - f(x))^2.
Vector loss_gradient(const ParamVector& params, const MlpArchitecture& arch,
                     const Eigen::Ref<const Vector>& x, double y);

// Sum over rows of loss_gradient, computed with batched products rather
// than per-example Jacobians. Not bit-identical to summing loss_gradient.
Vector summed_loss_gradient(const ParamVector& params,
                            const MlpArchitecture& arch,
                            const Eigen::Ref<const RowMatrix>& x,
                            const Eigen::Ref<const Vector>& y);

// Sum over rows of loss_gradient(x_i, y_i) / max(1, |loss_gradient|_2 / C),
// with the per-example norms taken from one batched backward pass. When no
// row needs clipping the result is bit-identical to summed_loss_gradient.
Vector summed_clipped_loss_gradient(const ParamVector& params,
                                    const MlpArchitecture& arch,
                                    const Eigen::Ref<const RowMatrix>& x,
                                    const Eigen::Ref<const Vector>& y,
                                    double clip_norm);

double squared_loss(const ParamVector& params, const MlpArchitecture& arch,
                    const RegressionDataset& data);

void CheckParams(const ParamVector& params, const MlpArchitecture& arch);

}  // namespace lazypi

#endif  // LAZYPI_NN_MLP_H_
