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

#include "nn/mlp.h"

#include <cmath>
#include <optional>
#include <random>

#include "common/error.h"
#include "common/random.h"

namespace lazypi {
namespace {

using ConstWeights =
    Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                   Eigen::RowMajor>>;
using Weights = Eigen::Map<
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;

// Per-layer inputs (acts[l] feeds layer l) for a batch. acts[0] is the input.
struct Trace {
  std::vector<RowMatrix> acts;
  Vector output;
};

void Activate(Activation activation, RowMatrix& z) {
  switch (activation) {
    case Activation::kRelu:
      z = z.cwiseMax(0.0);
      break;
    case Activation::kTanh:
      z = z.array().tanh().matrix();
      break;
    case Activation::kSigmoid:
      z = (1.0 / (1.0 + (-z.array()).exp())).matrix();
      break;
  }
}

// Derivative expressed through the activation's output. ReLU uses 0 at 0.
RowMatrix ActivationDerivative(Activation activation, const RowMatrix& a) {
  switch (activation) {
    case Activation::kRelu:
      return (a.array() > 0.0).cast<double>().matrix();
    case Activation::kTanh:
      return (1.0 - a.array().square()).matrix();
    case Activation::kSigmoid:
      return (a.array() * (1.0 - a.array())).matrix();
  }
  return {};
}

ConstWeights LayerWeights(const MlpArchitecture& arch, const Vector& theta,
                          Index layer) {
  return ConstWeights(theta.data() + arch.layer_offset(layer),
                      arch.layer_out(layer), arch.layer_in(layer));
}

Eigen::Map<const Vector> LayerBias(const MlpArchitecture& arch,
                                   const Vector& theta, Index layer) {
  const Index out = arch.layer_out(layer);
  return Eigen::Map<const Vector>(
      theta.data() + arch.layer_offset(layer) + out * arch.layer_in(layer),
      out);
}

Trace RunForward(const ParamVector& params, const MlpArchitecture& arch,
                 const Eigen::Ref<const RowMatrix>& x) {
  CheckParams(params, arch);
  if (x.cols() != arch.input_dim) {
    throw DimensionMismatch("input has " + std::to_string(x.cols()) +
                            " columns, architecture expects " +
                            std::to_string(arch.input_dim));
  }
  Trace trace;
  trace.acts.reserve(static_cast<std::size_t>(arch.num_layers()));
  trace.acts.emplace_back(x);
  for (Index l = 0; l < arch.num_layers(); ++l) {
    const RowMatrix& in = trace.acts.back();
    RowMatrix z = in * LayerWeights(arch, params.values, l).transpose();
    z.rowwise() += LayerBias(arch, params.values, l).transpose();
    if (l + 1 == arch.num_layers()) {
      trace.output = z.col(0);
    } else {
      Activate(arch.activation, z);
      trace.acts.push_back(std::move(z));
    }
  }
  return trace;
}

// Backpropagates delta = f - y through the batch. With a clip norm, every
// row's deltas are rescaled by 1 / max(1, |g_i| / C); the per-example
// gradient of a layer is the outer product delta_i a_i^T plus the bias
// delta_i, so |g_i|^2 = sum_l |delta_i|^2 (|a_i|^2 + 1).
Vector BatchedGradient(const ParamVector& params, const MlpArchitecture& arch,
                       const Eigen::Ref<const RowMatrix>& x,
                       const Eigen::Ref<const Vector>& y,
                       std::optional<double> clip_norm) {
  if (x.rows() != y.size()) {
    throw DimensionMismatch("batch has mismatched rows and responses");
  }
  Trace trace = RunForward(params, arch, x);
  const Index layers = arch.num_layers();
  std::vector<RowMatrix> deltas(static_cast<std::size_t>(layers));
  RowMatrix delta = (trace.output - y);
  for (Index l = layers - 1; l >= 0; --l) {
    const RowMatrix& in = trace.acts[static_cast<std::size_t>(l)];
    if (l > 0) {
      RowMatrix back = delta * LayerWeights(arch, params.values, l);
      deltas[static_cast<std::size_t>(l)] = std::move(delta);
      delta = back.cwiseProduct(ActivationDerivative(arch.activation, in));
    } else {
      deltas[0] = std::move(delta);
    }
  }
  if (clip_norm) {
    Vector sq = Vector::Zero(x.rows());
    for (Index l = 0; l < layers; ++l) {
      const auto& d = deltas[static_cast<std::size_t>(l)];
      const auto& a = trace.acts[static_cast<std::size_t>(l)];
      sq.array() += d.rowwise().squaredNorm().array() *
                    (a.rowwise().squaredNorm().array() + 1.0);
    }
    const Vector scale =
        (sq.array().sqrt() / *clip_norm).max(1.0).inverse().matrix();
    if ((scale.array() != 1.0).any()) {
      for (auto& d : deltas) d = scale.asDiagonal() * d;
    }
  }
  Vector grad(arch.param_count());
  for (Index l = 0; l < layers; ++l) {
    const auto& d = deltas[static_cast<std::size_t>(l)];
    const RowMatrix& in = trace.acts[static_cast<std::size_t>(l)];
    const Index out_dim = arch.layer_out(l);
    const Index offset = arch.layer_offset(l);
    Weights block(grad.data() + offset, out_dim, arch.layer_in(l));
    block.noalias() = d.transpose() * in;
    grad.segment(offset + out_dim * arch.layer_in(l), out_dim) =
        d.colwise().sum().transpose();
  }
  return grad;
}

}  // namespace

std::string ActivationName(Activation activation) {
  switch (activation) {
    case Activation::kRelu:
      return "relu";
    case Activation::kTanh:
      return "tanh";
    case Activation::kSigmoid:
      return "sigmoid";
  }
  return "unknown";
}

Activation ParseActivation(const std::string& name) {
  if (name == "relu") return Activation::kRelu;
  if (name == "tanh") return Activation::kTanh;
  if (name == "sigmoid") return Activation::kSigmoid;
  throw InvalidArgument("unknown activation '" + name + "'");
}

Index MlpArchitecture::layer_in(Index layer) const {
  return layer == 0 ? input_dim : hidden[static_cast<std::size_t>(layer - 1)];
}

Index MlpArchitecture::layer_out(Index layer) const {
  return layer + 1 == num_layers() ? 1
                                   : hidden[static_cast<std::size_t>(layer)];
}

Index MlpArchitecture::layer_offset(Index layer) const {
  Index offset = 0;
  for (Index l = 0; l < layer; ++l) {
    offset += layer_out(l) * (layer_in(l) + 1);
  }
  return offset;
}

Index MlpArchitecture::param_count() const {
  return layer_offset(num_layers());
}

std::uint64_t MlpArchitecture::fingerprint() const {
  // FNV-1a over the defining fields.
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](std::uint64_t v) {
    for (int b = 0; b < 8; ++b) {
      h ^= (v >> (8 * b)) & 0xff;
      h *= 0x100000001b3ULL;
    }
  };
  mix(static_cast<std::uint64_t>(input_dim));
  mix(hidden.size());
  for (Index w : hidden) mix(static_cast<std::uint64_t>(w));
  mix(static_cast<std::uint64_t>(activation));
  return h;
}

void MlpArchitecture::Validate() const {
  if (input_dim < 1) throw InvalidArgument("input_dim must be positive");
  for (Index w : hidden) {
    if (w < 1) throw InvalidArgument("hidden layer widths must be positive");
  }
}

void CheckParams(const ParamVector& params, const MlpArchitecture& arch) {
  if (params.values.size() != arch.param_count()) {
    throw DimensionMismatch("parameter vector has " +
                            std::to_string(params.values.size()) +
                            " entries, architecture needs " +
                            std::to_string(arch.param_count()));
  }
  if (params.arch_fingerprint != arch.fingerprint()) {
    throw DimensionMismatch("parameter vector belongs to another architecture");
  }
}

ParamVector init_params(const MlpArchitecture& arch, std::uint64_t seed) {
  arch.Validate();
  ParamVector params{Vector::Zero(arch.param_count()), arch.fingerprint()};
  Engine engine = MakeEngine(seed, Stream::kInit);
  for (Index l = 0; l < arch.num_layers(); ++l) {
    const Index fan_in = arch.layer_in(l);
    std::normal_distribution<double> normal(
        0.0, 1.0 / std::sqrt(static_cast<double>(fan_in)));
    const Index offset = arch.layer_offset(l);
    for (Index k = 0; k < arch.layer_out(l) * fan_in; ++k) {
      params.values(offset + k) = normal(engine);
    }
  }
  return params;
}

double forward(const ParamVector& params, const MlpArchitecture& arch,
               const Eigen::Ref<const Vector>& x) {
  if (x.size() != arch.input_dim) {
    throw DimensionMismatch("input has " + std::to_string(x.size()) +
                            " entries, architecture expects " +
                            std::to_string(arch.input_dim));
  }
  RowMatrix row = x.transpose();
  return RunForward(params, arch, row).output(0);
}

Vector batch_forward(const ParamVector& params, const MlpArchitecture& arch,
                     const Eigen::Ref<const RowMatrix>& x) {
  return RunForward(params, arch, x).output;
}

RowMatrix param_jacobian(const ParamVector& params, const MlpArchitecture& arch,
                         const Eigen::Ref<const RowMatrix>& x) {
  Trace trace = RunForward(params, arch, x);
  const Index n = x.rows();
  RowMatrix jac(n, arch.param_count());
  // delta(i, o) = d f(x_i) / d z_l(i, o) for the current layer l.
  RowMatrix delta = RowMatrix::Ones(n, 1);
  for (Index l = arch.num_layers() - 1; l >= 0; --l) {
    const RowMatrix& in = trace.acts[static_cast<std::size_t>(l)];
    const Index out_dim = arch.layer_out(l);
    const Index in_dim = arch.layer_in(l);
    const Index offset = arch.layer_offset(l);
    for (Index i = 0; i < n; ++i) {
      Weights block(jac.row(i).data() + offset, out_dim, in_dim);
      block.noalias() = delta.row(i).transpose() * in.row(i);
      jac.row(i).segment(offset + out_dim * in_dim, out_dim) = delta.row(i);
    }
    if (l > 0) {
      RowMatrix back = delta * LayerWeights(arch, params.values, l);
      delta = back.cwiseProduct(ActivationDerivative(arch.activation, in));
    }
  }
  return jac;
}

Vector loss_gradient(const ParamVector& params, const MlpArchitecture& arch,
                     const Eigen::Ref<const Vector>& x, double y) {
  if (x.size() != arch.input_dim) {
    throw DimensionMismatch("input has " + std::to_string(x.size()) +
                            " entries, architecture expects " +
                            std::to_string(arch.input_dim));
  }
  RowMatrix row = x.transpose();
  const double residual = forward(params, arch, x) - y;
  return residual * param_jacobian(params, arch, row).row(0).transpose();
}

Vector summed_loss_gradient(const ParamVector& params,
                            const MlpArchitecture& arch,
                            const Eigen::Ref<const RowMatrix>& x,
                            const Eigen::Ref<const Vector>& y) {
  return BatchedGradient(params, arch, x, y, std::nullopt);
}

Vector summed_clipped_loss_gradient(const ParamVector& params,
                                    const MlpArchitecture& arch,
                                    const Eigen::Ref<const RowMatrix>& x,
                                    const Eigen::Ref<const Vector>& y,
                                    double clip_norm) {
  if (!(clip_norm > 0.0)) throw InvalidArgument("clip norm must be > 0");
  return BatchedGradient(params, arch, x, y, clip_norm);
}

double squared_loss(const ParamVector& params, const MlpArchitecture& arch,
                    const RegressionDataset& data) {
  const Vector r = batch_forward(params, arch, data.features()) -
                   data.responses();
  return 0.5 * r.squaredNorm();
}

}  // namespace lazypi
