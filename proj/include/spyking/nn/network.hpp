/*
 * Copyright 2026 The Spyking Authors.
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

// Layer-level description of the supported convolutional and spiking
// topologies, plus binding of float parameters to a topology.

#pragma once

#include <map>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "spyking/nn/tensor.hpp"

namespace spyking::nn {

enum class ActivationKind { ReLU, LifThreshold };

struct Conv2D {
  std::size_t out_channels = 0;
  std::size_t kernel = 0;
  std::size_t stride = 1;
  std::size_t pad = 0;
};

// 2x2 window, stride 2. Sum rather than average: the 1/4 is carried in the
// downstream scale.
struct SumPool2 {};

struct Flatten {};

struct Dense {
  std::size_t out_features = 0;
};

struct Activation {
  ActivationKind kind = ActivationKind::ReLU;
};

using LayerKind = std::variant<Conv2D, SumPool2, Flatten, Dense, Activation>;

struct LayerSpec {
  std::string name;
  LayerKind kind;

  bool has_parameters() const {
    return std::holds_alternative<Conv2D>(kind) || std::holds_alternative<Dense>(kind);
  }
  bool is_activation() const { return std::holds_alternative<Activation>(kind); }
  bool is_linear() const { return !is_activation(); }
  std::string weight_name() const { return name + ".weight"; }
  std::string bias_name() const { return name + ".bias"; }
};

struct ParameterInfo {
  std::string name;
  std::vector<std::uint32_t> dims;
};

class BindingError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct NetworkSpec {
  std::string name;
  Shape3 input;
  std::vector<LayerSpec> layers;

  // Shape after each layer; throws ShapeError on an incompatible chain.
  std::vector<Shape3> layer_shapes() const;
  Shape3 output_shape() const;
  std::vector<ParameterInfo> parameters() const;
  std::size_t parameter_count() const;
  std::size_t activation_count() const;
  // True when every activation is a LIF threshold; throws on a mixed network.
  bool is_spiking() const;
  // Shape chain plus the ten-logit output requirement.
  void validate() const;
};

// lenet5 / micronet topologies with ReLU or LIF activation sites.
NetworkSpec build_architecture(std::string_view name, ActivationKind activation = ActivationKind::ReLU);

// Model names used on the command line: lenet5, slenet5, micronet, smicronet.
NetworkSpec model_architecture(std::string_view model);
bool is_spiking_model(std::string_view model);

struct LayerParams {
  std::vector<float> weight;  // conv: [out][in][k][k]; dense: [out][in]
  std::vector<float> bias;
};

// Float parameters bound to a topology, keyed by layer index.
struct Model {
  NetworkSpec spec;
  std::map<std::size_t, LayerParams> params;

  const LayerParams& layer_params(std::size_t index) const;
};

// Matches tensors to the topology by name; every missing or misshapen tensor
// is listed in the thrown BindingError.
Model bind_weights(NetworkSpec spec, const std::vector<NamedTensor>& tensors);

// Inverse of bind_weights, in parameter order.
std::vector<NamedTensor> export_weights(const Model& model);

}  // namespace spyking::nn
