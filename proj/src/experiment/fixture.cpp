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

#include "spyking/experiment/fixture.hpp"

#include <stdexcept>

#include "spyking/nn/float_forward.hpp"

namespace spyking::experiment {

nn::Model fit_readout(nn::Model model, const io::IdxImageSet& images, const snn::LifParams& lif,
                      std::size_t seq_length) {
  if (images.count() == 0) throw std::invalid_argument("readout fit needs at least one image");
  const std::size_t last = model.spec.layers.size() - 1;
  const auto* dense = std::get_if<nn::Dense>(&model.spec.layers[last].kind);
  if (!dense) throw std::invalid_argument(model.spec.name + ": final layer is not dense");
  const bool spiking = model.spec.is_spiking();

  nn::Model body = model;
  body.spec.layers.pop_back();
  body.params.erase(last);
  const std::size_t features = body.spec.output_shape().size();
  const std::size_t classes = dense->out_features;

  std::vector<std::vector<double>> mean(classes, std::vector<double>(features, 0.0));
  std::vector<std::size_t> members(classes, 0);
  for (std::size_t i = 0; i < images.count(); ++i) {
    const auto img = images.image_tensor(i);
    std::vector<double> f;
    if (spiking) {
      f = snn::spiking_forward(body, snn::encode_constant_current(img, lif, seq_length), lif).accumulated;
    } else {
      f = nn::float_forward_layers(model, img)[last - 1].data;
    }
    const std::size_t c = images.labels[i];
    if (c >= classes) throw std::invalid_argument("label outside the readout range");
    for (std::size_t k = 0; k < features; ++k) mean[c][k] += f[k];
    ++members[c];
  }

  // Accumulated spiking output adds the bias once per step.
  const double bias_steps = spiking ? static_cast<double>(seq_length) : 1.0;
  nn::LayerParams& lp = model.params.at(last);
  for (std::size_t c = 0; c < classes; ++c) {
    double norm = 0.0;
    for (std::size_t k = 0; k < features; ++k) {
      if (members[c] > 0) mean[c][k] /= static_cast<double>(members[c]);
      norm += mean[c][k] * mean[c][k];
      lp.weight[c * features + k] = static_cast<float>(mean[c][k]);
    }
    lp.bias[c] = static_cast<float>(-0.5 * norm / bias_steps);
  }
  return model;
}

}  // namespace spyking::experiment
