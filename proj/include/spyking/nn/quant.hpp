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

// Integer inference mod t: the decrypted-domain mirror of encrypted
// evaluation. Every value is a centered residue mod t together with a real
// scale, value ~ data / scale.

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "spyking/nn/network.hpp"
#include "spyking/ring/modarith.hpp"

namespace spyking::nn {

// Centered residue range [lo, hi] for modulus t.
struct PlainRange {
  i64 lo = 0;
  i64 hi = 0;
  u64 t = 0;

  static PlainRange for_modulus(u64 t);
  i64 saturate(i64 v) const { return v < lo ? lo : (v > hi ? hi : v); }
  i64 reduce(i128 v) const;
};

struct QuantScheme {
  int weight_bits = 8;
  int input_levels = 255;
  // Per affine layer (conv/dense, in order). Empty: derived from weight_bits
  // as (2^(weight_bits-1) - 1) / max|w| per layer.
  std::vector<double> weight_scales;
  // Per ReLU site. Empty: input_levels at every site.
  std::vector<double> activation_scales;

  double activation_scale(std::size_t site) const;
};

// round(v * scale) clamped into the centered range; saturated is set when
// clamping changed the value.
i64 quantize_value(double v, double scale, u64 t, bool* saturated = nullptr);

struct QuantTensor {
  Shape3 shape;
  std::vector<i64> data;
  double scale = 1.0;
};

struct QuantLayer {
  LayerSpec spec;
  Shape3 in_shape;
  Shape3 out_shape;
  std::vector<i64> weight;  // centered mod t; conv [out][in][k][k], dense [out][in]
  std::vector<i64> bias;
  double weight_scale = 1.0;
  double in_scale = 1.0;
  double out_scale = 1.0;
  std::size_t activation_site = 0;  // index among activation layers

  // Exact linear layer with the result reduced into the centered range.
  std::vector<i64> apply_linear(std::span<const i64> in, const PlainRange& range) const;
};

struct QuantizedNet {
  NetworkSpec spec;
  u64 t = 0;
  QuantScheme scheme;
  double input_scale = 1.0;
  std::vector<QuantLayer> layers;
  std::size_t saturated = 0;
  std::size_t quantized_values = 0;

  PlainRange range() const { return PlainRange::for_modulus(t); }
  double output_scale() const { return layers.back().out_scale; }
};

// Input scale is input_levels for ReLU networks and 1 (binary spikes) for
// spiking networks.
QuantizedNet quantize_net(const Model& model, const QuantScheme& scheme, u64 t);

QuantTensor quantize_image(const Tensor3<float>& image, const QuantizedNet& qnet);

// max(0, v) rescaled from in_scale to out_scale and saturated.
std::vector<i64> relu_requantize(std::span<const i64> centered, double in_scale, double out_scale,
                                 const PlainRange& range);

// ReLU networks only. Returns centered logits mod t.
std::vector<i64> int_forward(const QuantizedNet& qnet, const QuantTensor& image);

// Chooses per-layer scales so accumulators stay inside the centered range of
// t. weight_bits and input_levels of caps bound the resolution. Spiking
// networks use a worst-case bound over binary inputs; ReLU networks use the
// largest magnitudes observed on the calibration images, balancing input and
// weight resolution at each affine layer.
QuantScheme calibrate_scheme(const Model& model, std::span<const Tensor3<float>> calibration, u64 t,
                             const QuantScheme& caps = {});

}  // namespace spyking::nn
