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

#include "spyking/snn/lif.hpp"

#include <stdexcept>

#include "spyking/nn/float_forward.hpp"

namespace spyking::snn {

void LifParams::validate() const {
  if (!(tau_syn_inv > 0) || !(tau_mem_inv > 0)) {
    throw std::invalid_argument("LIF time constants must be positive");
  }
  if (!(v_th > v_reset)) throw std::invalid_argument("LIF threshold must exceed reset potential");
  if (!(dt > 0)) throw std::invalid_argument("LIF step must be positive");
}

std::vector<std::uint8_t> lif_advance(LifState& s, std::span<const double> input, const LifParams& p) {
  if (input.size() != s.size()) {
    throw nn::ShapeError("LIF input has " + std::to_string(input.size()) + " currents for " +
                         std::to_string(s.size()) + " neurons");
  }
  std::vector<std::uint8_t> spikes(s.size(), 0);
  const double syn_decay = p.dt * p.tau_syn_inv;
  const double mem_rate = p.dt * p.tau_mem_inv;
  for (std::size_t k = 0; k < s.size(); ++k) {
    const double i_new = s.i[k] - syn_decay * s.i[k] + input[k];
    double v_new = s.v[k] + mem_rate * (p.v_leak - s.v[k] + i_new);
    if (v_new >= p.v_th) {
      spikes[k] = 1;
      v_new = p.v_reset;
    }
    s.i[k] = i_new;
    s.v[k] = v_new;
  }
  return spikes;
}

LifStepResult lif_step(const LifState& state, std::span<const double> input, const LifParams& p) {
  LifStepResult r{state, {}};
  r.spikes = lif_advance(r.state, input, p);
  return r;
}

std::vector<std::uint8_t> lif_advance_quantized(LifState& state, std::span<const i64> centered,
                                                double scale, const LifParams& p) {
  std::vector<double> current(centered.size());
  for (std::size_t k = 0; k < centered.size(); ++k) current[k] = static_cast<double>(centered[k]) / scale;
  return lif_advance(state, current, p);
}

SpikeTrain encode_constant_current(const nn::Tensor3<float>& image, const LifParams& p,
                                   std::size_t seq_length) {
  if (seq_length == 0) throw std::invalid_argument("seq_length must be at least 1");
  p.validate();
  SpikeTrain train;
  train.shape = image.shape;
  const std::vector<double> current(image.data.begin(), image.data.end());
  LifState state(current.size());
  for (std::size_t step = 0; step < seq_length; ++step) {
    train.steps.push_back(lif_advance(state, current, p));
  }
  return train;
}

namespace {

void check_train(const nn::NetworkSpec& net, const SpikeTrain& train) {
  if (!net.is_spiking()) {
    throw std::invalid_argument(net.name + " has ReLU activations; spiking execution needs LIF sites");
  }
  if (train.shape != net.input) {
    throw nn::ShapeError("spike train shape " + train.shape.describe() +
                         " does not match network input " + net.input.describe());
  }
  for (const auto& s : train.steps) {
    if (s.size() != net.input.size()) throw nn::ShapeError("spike tensor has wrong element count");
  }
}

}  // namespace

SpikingResult spiking_forward(const nn::Model& model, const SpikeTrain& train, const LifParams& p) {
  const nn::NetworkSpec& net = model.spec;
  check_train(net, train);
  p.validate();
  const auto shapes = net.layer_shapes();
  std::vector<LifState> states;
  for (std::size_t i = 0; i < net.layers.size(); ++i) {
    if (net.layers[i].is_activation()) states.emplace_back(shapes[i].size());
  }

  SpikingResult result;
  result.accumulated.assign(net.output_shape().size(), 0.0);
  for (const auto& spikes : train.steps) {
    nn::Tensor3<double> cur(net.input);
    for (std::size_t k = 0; k < spikes.size(); ++k) cur.data[k] = spikes[k];
    StepTrace st;
    std::size_t site = 0;
    for (std::size_t i = 0; i < net.layers.size(); ++i) {
      const nn::LayerSpec& layer = net.layers[i];
      if (layer.is_activation()) {
        const auto out = lif_advance(states[site], cur.data, p);
        std::size_t count = 0;
        for (std::size_t k = 0; k < out.size(); ++k) {
          cur.data[k] = out[k];
          count += out[k];
        }
        st.spikes_per_site.push_back(count);
        ++site;
      } else {
        const nn::LayerParams* lp = layer.has_parameters() ? &model.layer_params(i) : nullptr;
        cur = nn::float_linear_layer(layer, lp, cur, shapes[i]);
      }
    }
    for (std::size_t k = 0; k < cur.data.size(); ++k) result.accumulated[k] += cur.data[k];
    st.output = cur.data;
    result.trace.push_back(std::move(st));
    ++result.linear_sweeps;
  }
  return result;
}

QuantSpikingResult spiking_forward_quantized(const nn::QuantizedNet& qnet, const SpikeTrain& train,
                                             const LifParams& p) {
  check_train(qnet.spec, train);
  p.validate();
  const nn::PlainRange range = qnet.range();
  std::vector<LifState> states;
  for (const auto& layer : qnet.layers) {
    if (layer.spec.is_activation()) states.emplace_back(layer.out_shape.size());
  }
  QuantSpikingResult result;
  result.accumulated.assign(qnet.layers.back().out_shape.size(), 0);
  for (const auto& spikes : train.steps) {
    std::vector<i64> cur(spikes.begin(), spikes.end());
    for (auto& v : cur) v = range.saturate(v);
    for (const auto& layer : qnet.layers) {
      if (layer.spec.is_activation()) {
        const auto out = lif_advance_quantized(states[layer.activation_site], cur, layer.in_scale, p);
        cur.assign(out.begin(), out.end());
        for (auto& v : cur) v = range.saturate(v);
      } else {
        cur = layer.apply_linear(cur, range);
      }
    }
    for (std::size_t k = 0; k < cur.size(); ++k) result.accumulated[k] += cur[k];
    result.step_outputs.push_back(std::move(cur));
  }
  return result;
}

}  // namespace spyking::snn
