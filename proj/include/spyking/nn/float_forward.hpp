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

// Float reference inference ("standard execution").

#pragma once

#include <vector>

#include "spyking/nn/network.hpp"

namespace spyking::nn {

// One linear layer (conv, pool, flatten, dense) on float activations. Sum
// pooling is followed by the 1/4 average factor here, matching the scale
// bookkeeping of the integer path.
Tensor3<double> float_linear_layer(const LayerSpec& layer, const LayerParams* params,
                                   const Tensor3<double>& in, const Shape3& out_shape);

// ReLU network only; pixels in [0, 1].
std::vector<double> float_forward(const Model& model, const Tensor3<float>& image);

// Output of every layer in order (activations included).
std::vector<Tensor3<double>> float_forward_layers(const Model& model, const Tensor3<float>& image);

// Lowest index wins ties.
template <typename T>
std::size_t argmax(const std::vector<T>& v) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (v[i] > v[best]) best = i;
  }
  return best;
}

}  // namespace spyking::nn
