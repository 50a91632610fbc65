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

#include "spyking/he/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "spyking/ring/prng.hpp"

namespace spyking::he {

namespace {

// Stream tags for derive_seed.
constexpr std::uint64_t kInputStream = 0x1e9;
constexpr std::uint64_t kOracleStream = 0x0c1;

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double ms() const {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

void check_keys(const nn::QuantizedNet& qnet, const bfv::KeyPair& keys) {
  const auto& ctx = *keys.public_key.context();
  bfv::require_same_params(ctx, *keys.secret.context());
  if (ctx.t() != qnet.t) {
    throw ParameterMismatch("network quantized for t=" + std::to_string(qnet.t) + " but keys use " +
                            ctx.params().describe());
  }
}

struct Evaluator {
  const nn::QuantizedNet& qnet;
  const bfv::KeyPair& keys;
  const RunOptions& options;
  std::vector<std::optional<AffineMap>> maps;
  std::vector<ActivationOracle> oracles;
  RunSummary& summary;

  Evaluator(const nn::QuantizedNet& q, const bfv::KeyPair& k, const RunOptions& o, RunSummary& s)
      : qnet(q), keys(k), options(o), summary(s) {
    summary.min_nb = std::numeric_limits<double>::infinity();
    for (const auto& layer : qnet.layers) {
      if (layer.spec.is_activation()) {
        maps.emplace_back();
        oracles.emplace_back(keys.secret, keys.public_key,
                             std::get<nn::Activation>(layer.spec.kind).kind, options.lif);
      } else if (std::holds_alternative<nn::Flatten>(layer.spec.kind)) {
        maps.emplace_back();
      } else {
        maps.emplace_back(affine_map(layer));
      }
    }
  }

  void note_nb(double nb) {
    summary.min_nb = std::min(summary.min_nb, nb);
  }

  EncryptedTensor encrypt_input(const nn::QuantTensor& x, std::size_t step) {
    Stopwatch sw;
    EncryptedTensor ct = encrypt_tensor(
        x, keys.public_key, derive_seed(options.seed, {options.image_id, step, kInputStream}));
    summary.trace.push_back({"input", step, std::nullopt, sw.ms()});
    return ct;
  }

  EncryptedTensor sweep(EncryptedTensor x, std::size_t step) {
    for (std::size_t i = 0; i < qnet.layers.size(); ++i) {
      const nn::QuantLayer& layer = qnet.layers[i];
      Stopwatch sw;
      std::optional<double> nb;
      if (layer.spec.is_activation()) {
        ActivationOracle& oracle = oracles[layer.activation_site];
        const std::size_t before = oracle.corruption_events();
        x = oracle.apply(x, layer.out_scale, derive_seed(options.seed, {options.image_id, step, i, kOracleStream}));
        nb = oracle.nb_log().back();
        note_nb(*nb);
        ++summary.oracle_calls;
        summary.corruption_events += oracle.corruption_events() - before;
      } else if (!maps[i]) {
        x.shape = layer.out_shape;
      } else {
        x = he_affine(*maps[i], x);
        if (options.layer_noise) {
          const double measured = decrypt_tensor_with_noise(keys.secret, x).min_noise_budget;
          nb = measured;
          note_nb(measured);
        }
      }
      summary.trace.push_back({layer.spec.name, step, nb, sw.ms()});
    }
    return x;
  }

  nn::QuantTensor decrypt_output(const EncryptedTensor& x, std::size_t step) {
    Stopwatch sw;
    NoisyDecryption d = decrypt_tensor_with_noise(keys.secret, x);
    note_nb(d.min_noise_budget);
    if (d.min_noise_budget <= 0.0) ++summary.corruption_events;
    summary.trace.push_back({"output", step, d.min_noise_budget, sw.ms()});
    return std::move(d.values);
  }
};

}  // namespace

ActivationOracle::ActivationOracle(bfv::SecretKey sk, bfv::PublicKey pk, nn::ActivationKind kind,
                                   snn::LifParams lif)
    : sk_(std::move(sk)), pk_(std::move(pk)), kind_(kind), lif_(lif) {
  bfv::require_same_params(*sk_.context(), *pk_.context());
  if (kind_ == nn::ActivationKind::LifThreshold) lif_.validate();
}

EncryptedTensor ActivationOracle::apply(const EncryptedTensor& x, double out_scale, std::uint64_t seed) {
  const NoisyDecryption d = decrypt_tensor_with_noise(sk_, x);
  nb_log_.push_back(d.min_noise_budget);
  if (d.min_noise_budget <= 0.0) ++corruption_events_;
  const nn::PlainRange range = nn::PlainRange::for_modulus(sk_.context()->t());
  nn::QuantTensor out{x.shape, {}, out_scale};
  if (kind_ == nn::ActivationKind::ReLU) {
    out.data = nn::relu_requantize(d.values.data, x.scale, out_scale, range);
  } else {
    if (state_.size() == 0) state_ = snn::LifState(x.size());
    const auto spikes = snn::lif_advance_quantized(state_, d.values.data, x.scale, lif_);
    out.data.assign(spikes.begin(), spikes.end());
    for (auto& v : out.data) v = range.saturate(v);
    out.scale = 1.0;
  }
  return encrypt_tensor(out, pk_, seed);
}

DnnRun run_encrypted_dnn(const nn::QuantizedNet& qnet, const nn::Tensor3<float>& image,
                         const bfv::KeyPair& keys, const RunOptions& options) {
  if (qnet.spec.is_spiking()) {
    throw std::invalid_argument(qnet.spec.name + " is spiking; use run_encrypted_snn");
  }
  check_keys(qnet, keys);
  Stopwatch total;
  DnnRun run;
  Evaluator ev(qnet, keys, options, run);
  EncryptedTensor x = ev.encrypt_input(nn::quantize_image(image, qnet), 0);
  run.encrypted_logits = ev.sweep(std::move(x), 0);
  run.logits = ev.decrypt_output(run.encrypted_logits, 0).data;
  run.ms = total.ms();
  return run;
}

SnnRun run_encrypted_snn(const nn::QuantizedNet& qnet, const nn::Tensor3<float>& image,
                         const bfv::KeyPair& keys, const RunOptions& options) {
  if (!qnet.spec.is_spiking()) {
    throw std::invalid_argument(qnet.spec.name + " has ReLU activations; use run_encrypted_dnn");
  }
  check_keys(qnet, keys);
  Stopwatch total;
  SnnRun run;
  Evaluator ev(qnet, keys, options, run);
  const snn::SpikeTrain train = snn::encode_constant_current(image, options.lif, options.seq_length);
  run.accumulated.assign(qnet.layers.back().out_shape.size(), 0);
  for (std::size_t step = 0; step < train.seq_length(); ++step) {
    const auto& spikes = train.steps[step];
    nn::QuantTensor input{train.shape, std::vector<i64>(spikes.begin(), spikes.end()), qnet.input_scale};
    EncryptedTensor x = ev.encrypt_input(input, step);
    x = ev.sweep(std::move(x), step);
    const nn::QuantTensor out = ev.decrypt_output(x, step);
    for (std::size_t k = 0; k < out.data.size(); ++k) run.accumulated[k] += out.data[k];
  }
  run.ms = total.ms();
  return run;
}

void write_trace_header(std::ostream& out) { out << "run_id,image_id,t,layer,step,nb_bits,ms\n"; }

void write_trace_rows(std::ostream& out, const std::string& run_id, std::size_t image_id, u64 t,
                      const std::vector<TraceRecord>& trace, bool timings) {
  char buf[64];
  for (const auto& r : trace) {
    out << run_id << ',' << image_id << ',' << t << ',' << r.layer << ',' << r.step << ',';
    if (r.nb_bits) {
      std::snprintf(buf, sizeof buf, "%.6f", *r.nb_bits);
      out << buf;
    }
    out << ',';
    if (timings) {
      std::snprintf(buf, sizeof buf, "%.3f", r.ms);
      out << buf;
    }
    out << '\n';
  }
}

}  // namespace spyking::he
