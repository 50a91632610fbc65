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

#include "spyking/nn/quant.hpp"

#include <algorithm>
#include <cmath>

#include "spyking/nn/float_forward.hpp"

namespace spyking::nn {

PlainRange PlainRange::for_modulus(u64 t) {
  if (t < 2) throw std::invalid_argument("plaintext modulus must be >= 2");
  PlainRange r;
  r.t = t;
  r.lo = -static_cast<i64>(t / 2);
  r.hi = static_cast<i64>(t - 1 - t / 2);
  return r;
}

i64 PlainRange::reduce(i128 v) const {
  const i128 m = static_cast<i128>(t);
  i128 r = v % m;
  if (r < 0) r += m;
  if (r > hi) r -= m;
  return static_cast<i64>(r);
}

double QuantScheme::activation_scale(std::size_t site) const {
  if (activation_scales.empty()) return static_cast<double>(input_levels);
  if (site >= activation_scales.size()) {
    throw std::out_of_range("no activation scale for site " + std::to_string(site));
  }
  return activation_scales[site];
}

i64 quantize_value(double v, double scale, u64 t, bool* saturated) {
  const PlainRange range = PlainRange::for_modulus(t);
  const double r = std::round(v * scale);
  i64 q;
  if (r < static_cast<double>(range.lo)) {
    q = range.lo;
  } else if (r > static_cast<double>(range.hi)) {
    q = range.hi;
  } else {
    q = static_cast<i64>(r);
  }
  if (saturated) *saturated = static_cast<double>(q) != r;
  return q;
}

std::vector<i64> QuantLayer::apply_linear(std::span<const i64> in, const PlainRange& range) const {
  if (in.size() != in_shape.size()) {
    throw ShapeError(spec.name + ": input has " + std::to_string(in.size()) + " elements, expected " +
                     std::to_string(in_shape.size()));
  }
  std::vector<i64> out(out_shape.size(), 0);
  const Shape3& is = in_shape;
  const Shape3& os = out_shape;
  auto at = [&](std::size_t c, std::size_t y, std::size_t x) { return in[(c * is.h + y) * is.w + x]; };
  if (const auto* c = std::get_if<Conv2D>(&spec.kind)) {
    const std::size_t k = c->kernel;
    for (std::size_t oc = 0; oc < os.c; ++oc) {
      for (std::size_t oy = 0; oy < os.h; ++oy) {
        for (std::size_t ox = 0; ox < os.w; ++ox) {
          i128 acc = bias[oc];
          for (std::size_t ic = 0; ic < is.c; ++ic) {
            for (std::size_t ky = 0; ky < k; ++ky) {
              const auto iy = static_cast<std::ptrdiff_t>(oy * c->stride + ky) -
                              static_cast<std::ptrdiff_t>(c->pad);
              if (iy < 0 || iy >= static_cast<std::ptrdiff_t>(is.h)) continue;
              for (std::size_t kx = 0; kx < k; ++kx) {
                const auto ix = static_cast<std::ptrdiff_t>(ox * c->stride + kx) -
                                static_cast<std::ptrdiff_t>(c->pad);
                if (ix < 0 || ix >= static_cast<std::ptrdiff_t>(is.w)) continue;
                acc += static_cast<i128>(weight[((oc * is.c + ic) * k + ky) * k + kx]) * at(ic, iy, ix);
              }
            }
          }
          out[(oc * os.h + oy) * os.w + ox] = range.reduce(acc);
        }
      }
    }
  } else if (std::holds_alternative<SumPool2>(spec.kind)) {
    for (std::size_t ch = 0; ch < os.c; ++ch) {
      for (std::size_t oy = 0; oy < os.h; ++oy) {
        for (std::size_t ox = 0; ox < os.w; ++ox) {
          const i128 sum = static_cast<i128>(at(ch, 2 * oy, 2 * ox)) + at(ch, 2 * oy, 2 * ox + 1) +
                           at(ch, 2 * oy + 1, 2 * ox) + at(ch, 2 * oy + 1, 2 * ox + 1);
          out[(ch * os.h + oy) * os.w + ox] = range.reduce(sum);
        }
      }
    }
  } else if (std::holds_alternative<Flatten>(spec.kind)) {
    std::copy(in.begin(), in.end(), out.begin());
  } else if (std::holds_alternative<Dense>(spec.kind)) {
    const std::size_t fan_in = is.size();
    for (std::size_t o = 0; o < os.c; ++o) {
      i128 acc = bias[o];
      for (std::size_t i = 0; i < fan_in; ++i) acc += static_cast<i128>(weight[o * fan_in + i]) * in[i];
      out[o] = range.reduce(acc);
    }
  } else {
    throw std::invalid_argument(spec.name + ": not a linear layer");
  }
  return out;
}

QuantizedNet quantize_net(const Model& model, const QuantScheme& scheme, u64 t) {
  const NetworkSpec& net = model.spec;
  const bool spiking = net.is_spiking();
  const auto shapes = net.layer_shapes();

  QuantizedNet qn;
  qn.spec = net;
  qn.t = t;
  qn.scheme = scheme;
  qn.input_scale = spiking ? 1.0 : static_cast<double>(scheme.input_levels);

  double scale = qn.input_scale;
  Shape3 in_shape = net.input;
  std::size_t affine_index = 0;
  std::size_t activation_site = 0;
  for (std::size_t i = 0; i < net.layers.size(); ++i) {
    QuantLayer ql;
    ql.spec = net.layers[i];
    ql.in_shape = in_shape;
    ql.out_shape = shapes[i];
    ql.in_scale = scale;
    if (ql.spec.has_parameters()) {
      const LayerParams& p = model.layer_params(i);
      if (affine_index < scheme.weight_scales.size()) {
        ql.weight_scale = scheme.weight_scales[affine_index];
      } else if (!scheme.weight_scales.empty()) {
        throw std::out_of_range("no weight scale for affine layer " + std::to_string(affine_index));
      } else {
        float max_abs = 0.0f;
        for (float w : p.weight) max_abs = std::max(max_abs, std::abs(w));
        const double levels = std::ldexp(1.0, scheme.weight_bits - 1) - 1.0;
        ql.weight_scale = max_abs > 0.0f ? levels / max_abs : 1.0;
      }
      ++affine_index;
      ql.out_scale = scale * ql.weight_scale;
      bool sat = false;
      ql.weight.reserve(p.weight.size());
      for (float w : p.weight) {
        ql.weight.push_back(quantize_value(w, ql.weight_scale, t, &sat));
        qn.saturated += sat ? 1 : 0;
      }
      for (float b : p.bias) {
        ql.bias.push_back(quantize_value(b, ql.out_scale, t, &sat));
        qn.saturated += sat ? 1 : 0;
      }
      qn.quantized_values += p.weight.size() + p.bias.size();
    } else if (std::holds_alternative<SumPool2>(ql.spec.kind)) {
      ql.out_scale = 4.0 * scale;
    } else if (ql.spec.is_activation()) {
      ql.activation_site = activation_site;
      ql.out_scale = spiking ? 1.0 : scheme.activation_scale(activation_site);
      ++activation_site;
    } else {
      ql.out_scale = scale;
    }
    scale = ql.out_scale;
    in_shape = ql.out_shape;
    qn.layers.push_back(std::move(ql));
  }
  return qn;
}

QuantTensor quantize_image(const Tensor3<float>& image, const QuantizedNet& qnet) {
  if (image.shape != qnet.spec.input) {
    throw ShapeError("image shape " + image.shape.describe() + " does not match network input");
  }
  QuantTensor qt;
  qt.shape = image.shape;
  qt.scale = qnet.input_scale;
  qt.data.reserve(image.data.size());
  for (float p : image.data) qt.data.push_back(quantize_value(p, qt.scale, qnet.t));
  return qt;
}

std::vector<i64> relu_requantize(std::span<const i64> centered, double in_scale, double out_scale,
                                 const PlainRange& range) {
  std::vector<i64> out(centered.size());
  const double ratio = out_scale / in_scale;
  for (std::size_t i = 0; i < centered.size(); ++i) {
    const double r = std::round(static_cast<double>(std::max<i64>(0, centered[i])) * ratio);
    out[i] = r > static_cast<double>(range.hi) ? range.hi : static_cast<i64>(r);
  }
  return out;
}

std::vector<i64> int_forward(const QuantizedNet& qnet, const QuantTensor& image) {
  if (qnet.spec.is_spiking()) {
    throw std::invalid_argument(qnet.spec.name + " is spiking; use snn::spiking_forward_quantized");
  }
  if (image.shape != qnet.spec.input) throw ShapeError("quantized image shape mismatch");
  const PlainRange range = qnet.range();
  std::vector<i64> cur = image.data;
  for (const QuantLayer& layer : qnet.layers) {
    if (layer.spec.is_activation()) {
      cur = relu_requantize(cur, layer.in_scale, layer.out_scale, range);
    } else {
      cur = layer.apply_linear(cur, range);
    }
  }
  return cur;
}

namespace {

double max_abs(const std::vector<float>& v) {
  double m = 0.0;
  for (float x : v) m = std::max(m, static_cast<double>(std::abs(x)));
  return m;
}

double positive_or_one(double v) { return v > 0.0 ? v : 1.0; }

// max over outputs of sum |w| + |b|, the largest response to inputs in [0, 1].
double l1_response_bound(const LayerParams& p) {
  const std::size_t outputs = p.bias.size();
  const std::size_t per_output = p.weight.size() / outputs;
  double bound = 0.0;
  for (std::size_t o = 0; o < outputs; ++o) {
    double acc = std::abs(static_cast<double>(p.bias[o]));
    for (std::size_t j = 0; j < per_output; ++j) {
      acc += std::abs(static_cast<double>(p.weight[o * per_output + j]));
    }
    bound = std::max(bound, acc);
  }
  return bound;
}

}  // namespace

QuantScheme calibrate_scheme(const Model& model, std::span<const Tensor3<float>> calibration, u64 t,
                             const QuantScheme& caps) {
  const NetworkSpec& net = model.spec;
  const PlainRange range = PlainRange::for_modulus(t);
  const double budget = std::max(0.5, static_cast<double>(range.hi));
  const double weight_cap = std::ldexp(1.0, caps.weight_bits - 1) - 1.0;
  const double level_cap = static_cast<double>(caps.input_levels);

  QuantScheme scheme;
  scheme.weight_bits = caps.weight_bits;
  scheme.input_levels = caps.input_levels;

  if (net.is_spiking()) {
    double pool_factor = 1.0;
    for (std::size_t i = 0; i < net.layers.size(); ++i) {
      const LayerSpec& layer = net.layers[i];
      if (layer.is_activation()) {
        pool_factor = 1.0;
      } else if (std::holds_alternative<SumPool2>(layer.kind)) {
        pool_factor *= 4.0;
      } else if (layer.has_parameters()) {
        const LayerParams& p = model.layer_params(i);
        const double bound = positive_or_one(l1_response_bound(p));
        const double w_max = positive_or_one(max_abs(p.weight));
        scheme.weight_scales.push_back(std::min(weight_cap / w_max, budget / (pool_factor * bound)));
      }
    }
    return scheme;
  }

  if (calibration.empty()) throw std::invalid_argument("calibration needs at least one image");
  std::vector<double> peak(net.layers.size(), 0.0);
  double input_peak = 0.0;
  for (const auto& image : calibration) {
    for (float px : image.data) input_peak = std::max(input_peak, static_cast<double>(std::abs(px)));
    const auto outs = float_forward_layers(model, image);
    for (std::size_t i = 0; i < outs.size(); ++i) {
      for (double v : outs[i].data) peak[i] = std::max(peak[i], std::abs(v));
    }
  }
  for (auto& p : peak) p = positive_or_one(p);
  input_peak = positive_or_one(input_peak);

  // Scale of the current source (image or activation output); chosen when
  // the next affine layer is reached.
  std::ptrdiff_t source = -1;
  for (std::size_t a = 0; a < net.layers.size(); ++a) {
    const LayerSpec& layer = net.layers[a];
    if (layer.is_activation()) {
      source = static_cast<std::ptrdiff_t>(a);
      continue;
    }
    if (!layer.has_parameters()) continue;

    double factor = 1.0;
    double source_cap = source < 0 ? budget / input_peak : budget / peak[source];
    for (std::size_t k = static_cast<std::size_t>(source + 1); k < a; ++k) {
      if (std::holds_alternative<SumPool2>(net.layers[k].kind)) {
        factor *= 4.0;
        source_cap = std::min(source_cap, budget / (factor * peak[k]));
      }
    }
    const double x_peak = a == 0 ? input_peak : peak[a - 1];
    const LayerParams& p = model.layer_params(a);
    const double w_max = positive_or_one(max_abs(p.weight));
    const double product = budget / peak[a];
    const double balanced = std::sqrt(product * w_max / x_peak) / factor;
    double s_source = std::min({balanced, source_cap, level_cap});
    if (source < 0) {
      s_source = std::max(1.0, std::floor(s_source));
      scheme.input_levels = static_cast<int>(s_source);
    } else {
      scheme.activation_scales.push_back(s_source);
    }
    scheme.weight_scales.push_back(std::min(weight_cap / w_max, product / (factor * s_source)));
  }

  // Rounding can push integer values past the float estimate; shrink the
  // first offending scale until the calibration set fits.
  const u64 wide_t = u64{1} << 62;
  for (int round = 0; round < 64; ++round) {
    const QuantizedNet wide = quantize_net(model, scheme, wide_t);
    const PlainRange wide_range = wide.range();
    std::vector<i64> layer_peak(net.layers.size(), 0);
    for (const auto& image : calibration) {
      std::vector<i64> cur = quantize_image(image, wide).data;
      for (std::size_t i = 0; i < wide.layers.size(); ++i) {
        const QuantLayer& l = wide.layers[i];
        cur = l.spec.is_activation() ? relu_requantize(cur, l.in_scale, l.out_scale, wide_range)
                                     : l.apply_linear(cur, wide_range);
        for (i64 v : cur) layer_peak[i] = std::max(layer_peak[i], v < 0 ? -v : v);
      }
    }
    std::size_t affine_index = 0;
    std::size_t site = 0;
    bool fits = true;
    for (std::size_t i = 0; i < net.layers.size() && fits; ++i) {
      const LayerSpec& layer = net.layers[i];
      if (static_cast<double>(layer_peak[i]) > budget) {
        fits = false;
        const double shrink = 0.98 * budget / static_cast<double>(layer_peak[i]);
        if (layer.has_parameters()) {
          scheme.weight_scales[affine_index] *= shrink;
        } else if (layer.is_activation()) {
          scheme.activation_scales[site] *= shrink;
        } else if (site > 0) {
          scheme.activation_scales[site - 1] *= shrink;
        } else {
          scheme.input_levels = std::max(1, static_cast<int>(scheme.input_levels * shrink));
        }
      }
      if (layer.has_parameters()) ++affine_index;
      if (layer.is_activation()) ++site;
    }
    if (fits) break;
  }
  return scheme;
}

}  // namespace spyking::nn
