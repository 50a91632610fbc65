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

// Leaky integrate-and-fire dynamics, constant-current spike encoding and the
// time-stepped spiking forward pass.

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "spyking/nn/network.hpp"
#include "spyking/nn/quant.hpp"

namespace spyking::snn {

struct LifParams {
  double tau_syn_inv = 200.0;  // 1/s
  double tau_mem_inv = 100.0;  // 1/s
  double v_leak = 0.0;
  double v_th = 0.5;
  double v_reset = 0.0;
  double dt = 0.001;  // s

  void validate() const;
};

inline constexpr std::size_t kDefaultSeqLength = 30;

struct LifState {
  std::vector<double> v;  // membrane potential
  std::vector<double> i;  // synaptic current

  LifState() = default;
  explicit LifState(std::size_t neurons) : v(neurons, 0.0), i(neurons, 0.0) {}
  std::size_t size() const { return v.size(); }
};

struct LifStepResult {
  LifState state;
  std::vector<std::uint8_t> spikes;
};

// One explicit Euler step:
//   i' = i - dt * tau_syn_inv * i + input
//   v' = v + dt * tau_mem_inv * (v_leak - v + i')
// then spike where v' >= v_th and reset those neurons to v_reset.
LifStepResult lif_step(const LifState& state, std::span<const double> input_current, const LifParams& p);

// In-place form of lif_step; returns the spikes.
std::vector<std::uint8_t> lif_advance(LifState& state, std::span<const double> input_current,
                                      const LifParams& p);

// Same step driven by centered integers at the given scale (current = v / scale).
std::vector<std::uint8_t> lif_advance_quantized(LifState& state, std::span<const i64> centered,
                                                double scale, const LifParams& p);

struct SpikeTrain {
  nn::Shape3 shape;
  std::vector<std::vector<std::uint8_t>> steps;

  std::size_t seq_length() const { return steps.size(); }
};

// Each pixel drives one LIF neuron as a constant input current.
SpikeTrain encode_constant_current(const nn::Tensor3<float>& image, const LifParams& p,
                                   std::size_t seq_length = kDefaultSeqLength);

struct StepTrace {
  std::vector<std::size_t> spikes_per_site;  // per activation site
  std::vector<double> output;                // output-layer value this step
};

struct SpikingResult {
  std::vector<double> accumulated;  // output layer integrated over all steps
  std::vector<StepTrace> trace;
  std::size_t linear_sweeps = 0;
};

// Float spiking inference. The output layer has no threshold: its value is
// integrated (summed) over the sequence.
SpikingResult spiking_forward(const nn::Model& model, const SpikeTrain& train, const LifParams& p);

struct QuantSpikingResult {
  std::vector<i64> accumulated;               // sum of per-step centered outputs
  std::vector<std::vector<i64>> step_outputs;  // centered mod t
};

// Integer mirror of spiking_forward: linear layers exact mod t, LIF applied
// to dequantized currents. This is the oracle for encrypted spiking runs.
QuantSpikingResult spiking_forward_quantized(const nn::QuantizedNet& qnet, const SpikeTrain& train,
                                             const LifParams& p);

// Argmax with lowest-index tie-break.
template <typename T>
std::size_t decode_output(std::span<const T> accumulated) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < accumulated.size(); ++i) {
    if (accumulated[i] > accumulated[best]) best = i;
  }
  return best;
}

}  // namespace spyking::snn
