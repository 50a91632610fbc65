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

#include "spyking/nn/network.hpp"

#include <sstream>

namespace spyking::nn {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

Shape3 propagate(const LayerSpec& layer, const Shape3& in) {
  return std::visit(
      Overloaded{
          [&](const Conv2D& c) {
            if (c.kernel == 0 || c.stride == 0 || c.out_channels == 0) {
              throw ShapeError(layer.name + ": degenerate convolution");
            }
            if (in.h + 2 * c.pad < c.kernel || in.w + 2 * c.pad < c.kernel) {
              throw ShapeError(layer.name + ": kernel larger than padded input " + in.describe());
            }
            return Shape3{c.out_channels, (in.h + 2 * c.pad - c.kernel) / c.stride + 1,
                          (in.w + 2 * c.pad - c.kernel) / c.stride + 1};
          },
          [&](const SumPool2&) {
            if (in.h < 2 || in.w < 2 || in.h % 2 != 0 || in.w % 2 != 0) {
              throw ShapeError(layer.name + ": 2x2 pooling needs even spatial dims, got " +
                               in.describe());
            }
            return Shape3{in.c, in.h / 2, in.w / 2};
          },
          [&](const Flatten&) { return Shape3{in.size(), 1, 1}; },
          [&](const Dense& d) {
            if (in.h != 1 || in.w != 1) {
              throw ShapeError(layer.name + ": dense layer needs a flat input, got " + in.describe());
            }
            if (d.out_features == 0) throw ShapeError(layer.name + ": zero output features");
            return Shape3{d.out_features, 1, 1};
          },
          [&](const Activation&) { return in; },
      },
      layer.kind);
}

}  // namespace

std::vector<Shape3> NetworkSpec::layer_shapes() const {
  std::vector<Shape3> shapes;
  shapes.reserve(layers.size());
  Shape3 cur = input;
  if (cur.size() == 0) throw ShapeError("empty input shape");
  for (const auto& layer : layers) {
    cur = propagate(layer, cur);
    shapes.push_back(cur);
  }
  return shapes;
}

Shape3 NetworkSpec::output_shape() const {
  const auto shapes = layer_shapes();
  return shapes.empty() ? input : shapes.back();
}

std::vector<ParameterInfo> NetworkSpec::parameters() const {
  std::vector<ParameterInfo> out;
  Shape3 cur = input;
  for (const auto& layer : layers) {
    const Shape3 next = propagate(layer, cur);
    if (const auto* c = std::get_if<Conv2D>(&layer.kind)) {
      out.push_back({layer.weight_name(),
                     {static_cast<std::uint32_t>(c->out_channels), static_cast<std::uint32_t>(cur.c),
                      static_cast<std::uint32_t>(c->kernel), static_cast<std::uint32_t>(c->kernel)}});
      out.push_back({layer.bias_name(), {static_cast<std::uint32_t>(c->out_channels)}});
    } else if (const auto* d = std::get_if<Dense>(&layer.kind)) {
      out.push_back({layer.weight_name(),
                     {static_cast<std::uint32_t>(d->out_features), static_cast<std::uint32_t>(cur.c)}});
      out.push_back({layer.bias_name(), {static_cast<std::uint32_t>(d->out_features)}});
    }
    cur = next;
  }
  return out;
}

std::size_t NetworkSpec::parameter_count() const {
  std::size_t total = 0;
  for (const auto& p : parameters()) {
    std::size_t count = 1;
    for (auto d : p.dims) count *= d;
    total += count;
  }
  return total;
}

std::size_t NetworkSpec::activation_count() const {
  std::size_t n = 0;
  for (const auto& l : layers) n += l.is_activation() ? 1 : 0;
  return n;
}

bool NetworkSpec::is_spiking() const {
  bool relu = false;
  bool lif = false;
  for (const auto& l : layers) {
    if (const auto* a = std::get_if<Activation>(&l.kind)) {
      (a->kind == ActivationKind::ReLU ? relu : lif) = true;
    }
  }
  if (relu && lif) throw ShapeError(name + ": mixes ReLU and LIF activations");
  return lif;
}

void NetworkSpec::validate() const {
  const Shape3 out = output_shape();
  if (out != Shape3{10, 1, 1}) {
    throw ShapeError(name + ": network must end in 10 logits, got " + out.describe());
  }
  if (layers.empty() || layers.back().is_activation()) {
    throw ShapeError(name + ": the output layer must be linear");
  }
  (void)is_spiking();
}

NetworkSpec build_architecture(std::string_view name, ActivationKind activation) {
  const Activation act{activation};
  NetworkSpec net;
  net.input = Shape3{1, 28, 28};
  if (name == "lenet5") {
    net.name = "lenet5";
    net.layers = {
        {"conv1", Conv2D{6, 5, 1, 2}}, {"act1", act}, {"pool1", SumPool2{}},
        {"conv2", Conv2D{16, 5, 1, 0}}, {"act2", act}, {"pool2", SumPool2{}},
        {"flatten", Flatten{}},
        {"fc1", Dense{120}}, {"act3", act},
        {"fc2", Dense{84}}, {"act4", act},
        {"fc3", Dense{10}},
    };
  } else if (name == "micronet") {
    net.name = "micronet";
    net.layers = {
        {"conv1", Conv2D{4, 5, 2, 0}}, {"act1", act},
        {"flatten", Flatten{}},
        {"fc1", Dense{10}},
    };
  } else {
    throw std::invalid_argument("unknown architecture: " + std::string(name));
  }
  if (activation == ActivationKind::LifThreshold) net.name = "s" + net.name;
  net.validate();
  return net;
}

bool is_spiking_model(std::string_view model) { return model == "slenet5" || model == "smicronet"; }

NetworkSpec model_architecture(std::string_view model) {
  if (model == "lenet5" || model == "micronet") return build_architecture(model);
  if (model == "slenet5") return build_architecture("lenet5", ActivationKind::LifThreshold);
  if (model == "smicronet") return build_architecture("micronet", ActivationKind::LifThreshold);
  throw std::invalid_argument("unknown model: " + std::string(model) +
                              " (expected lenet5, slenet5, micronet or smicronet)");
}

const LayerParams& Model::layer_params(std::size_t index) const {
  const auto it = params.find(index);
  if (it == params.end()) {
    throw BindingError("layer " + std::to_string(index) + " has no bound parameters");
  }
  return it->second;
}

Model bind_weights(NetworkSpec spec, const std::vector<NamedTensor>& tensors) {
  std::map<std::string, const NamedTensor*> by_name;
  for (const auto& t : tensors) by_name[t.name] = &t;

  std::vector<std::string> problems;
  auto fetch = [&](const ParameterInfo& info) -> const NamedTensor* {
    const auto it = by_name.find(info.name);
    if (it == by_name.end()) {
      problems.push_back("missing tensor '" + info.name + "'");
      return nullptr;
    }
    if (it->second->dims != info.dims) {
      problems.push_back("tensor '" + info.name + "' has wrong dimensions");
      return nullptr;
    }
    return it->second;
  };

  Model model;
  const auto infos = spec.parameters();
  std::size_t next = 0;
  for (std::size_t i = 0; i < spec.layers.size(); ++i) {
    if (!spec.layers[i].has_parameters()) continue;
    const NamedTensor* w = fetch(infos[next]);
    const NamedTensor* b = fetch(infos[next + 1]);
    next += 2;
    if (w && b) model.params[i] = LayerParams{w->values, b->values};
  }
  if (!problems.empty()) {
    std::ostringstream msg;
    msg << "cannot bind weights to " << spec.name << ":";
    for (const auto& p : problems) msg << " " << p << ";";
    throw BindingError(msg.str());
  }
  model.spec = std::move(spec);
  return model;
}

std::vector<NamedTensor> export_weights(const Model& model) {
  std::vector<NamedTensor> out;
  const auto infos = model.spec.parameters();
  std::size_t next = 0;
  for (std::size_t i = 0; i < model.spec.layers.size(); ++i) {
    if (!model.spec.layers[i].has_parameters()) continue;
    const LayerParams& p = model.layer_params(i);
    out.push_back({infos[next].name, infos[next].dims, p.weight});
    out.push_back({infos[next + 1].name, infos[next + 1].dims, p.bias});
    next += 2;
  }
  return out;
}

}  // namespace spyking::nn
