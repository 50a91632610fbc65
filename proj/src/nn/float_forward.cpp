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

#include "spyking/nn/float_forward.hpp"

#include <algorithm>

namespace spyking::nn {

Tensor3<double> float_linear_layer(const LayerSpec& layer, const LayerParams* params,
                                   const Tensor3<double>& in, const Shape3& out_shape) {
  Tensor3<double> out(out_shape, 0.0);
  const Shape3& is = in.shape;
  if (const auto* c = std::get_if<Conv2D>(&layer.kind)) {
    const std::size_t k = c->kernel;
    for (std::size_t oc = 0; oc < out_shape.c; ++oc) {
      for (std::size_t oy = 0; oy < out_shape.h; ++oy) {
        for (std::size_t ox = 0; ox < out_shape.w; ++ox) {
          double acc = params->bias[oc];
          for (std::size_t ic = 0; ic < is.c; ++ic) {
            for (std::size_t ky = 0; ky < k; ++ky) {
              const auto iy = static_cast<std::ptrdiff_t>(oy * c->stride + ky) -
                              static_cast<std::ptrdiff_t>(c->pad);
              if (iy < 0 || iy >= static_cast<std::ptrdiff_t>(is.h)) continue;
              for (std::size_t kx = 0; kx < k; ++kx) {
                const auto ix = static_cast<std::ptrdiff_t>(ox * c->stride + kx) -
                                static_cast<std::ptrdiff_t>(c->pad);
                if (ix < 0 || ix >= static_cast<std::ptrdiff_t>(is.w)) continue;
                acc += static_cast<double>(params->weight[((oc * is.c + ic) * k + ky) * k + kx]) *
                       in.at(ic, iy, ix);
              }
            }
          }
          out.at(oc, oy, ox) = acc;
        }
      }
    }
  } else if (std::holds_alternative<SumPool2>(layer.kind)) {
    for (std::size_t ch = 0; ch < out_shape.c; ++ch) {
      for (std::size_t oy = 0; oy < out_shape.h; ++oy) {
        for (std::size_t ox = 0; ox < out_shape.w; ++ox) {
          const double sum = in.at(ch, 2 * oy, 2 * ox) + in.at(ch, 2 * oy, 2 * ox + 1) +
                             in.at(ch, 2 * oy + 1, 2 * ox) + in.at(ch, 2 * oy + 1, 2 * ox + 1);
          out.at(ch, oy, ox) = sum * 0.25;
        }
      }
    }
  } else if (std::holds_alternative<Flatten>(layer.kind)) {
    out.data = in.data;
  } else if (const auto* d = std::get_if<Dense>(&layer.kind)) {
    const std::size_t fan_in = is.size();
    for (std::size_t o = 0; o < d->out_features; ++o) {
      double acc = params->bias[o];
      for (std::size_t i = 0; i < fan_in; ++i) {
        acc += static_cast<double>(params->weight[o * fan_in + i]) * in.data[i];
      }
      out.data[o] = acc;
    }
  } else {
    throw std::invalid_argument(layer.name + ": not a linear layer");
  }
  return out;
}

std::vector<Tensor3<double>> float_forward_layers(const Model& model, const Tensor3<float>& image) {
  const NetworkSpec& net = model.spec;
  if (image.shape != net.input) {
    throw ShapeError("image shape " + image.shape.describe() + " does not match network input " +
                     net.input.describe());
  }
  if (net.is_spiking()) {
    throw std::invalid_argument(net.name + " is spiking; use snn::spiking_forward");
  }
  const auto shapes = net.layer_shapes();
  std::vector<Tensor3<double>> outs;
  outs.reserve(net.layers.size());
  Tensor3<double> cur(image.shape);
  std::copy(image.data.begin(), image.data.end(), cur.data.begin());
  for (std::size_t i = 0; i < net.layers.size(); ++i) {
    const LayerSpec& layer = net.layers[i];
    if (layer.is_activation()) {
      for (auto& v : cur.data) v = std::max(0.0, v);
    } else {
      const LayerParams* p = layer.has_parameters() ? &model.layer_params(i) : nullptr;
      cur = float_linear_layer(layer, p, cur, shapes[i]);
    }
    outs.push_back(cur);
  }
  return outs;
}

std::vector<double> float_forward(const Model& model, const Tensor3<float>& image) {
  return float_forward_layers(model, image).back().data;
}

}  // namespace spyking::nn
