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

// Encrypted inference runs. Nonlinearities go through an explicit
// decrypt / apply / re-encrypt oracle that stands in for a client round trip;
// it holds the secret key, counts its invocations and logs the noise budget
// of every ciphertext it consumes.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "spyking/he/affine.hpp"
#include "spyking/he/encrypted_tensor.hpp"
#include "spyking/nn/quant.hpp"
#include "spyking/snn/lif.hpp"

namespace spyking::he {

class ActivationOracle {
 public:
  ActivationOracle(bfv::SecretKey sk, bfv::PublicKey pk, nn::ActivationKind kind,
                   snn::LifParams lif = {});

  // ReLU results are requantized to out_scale; LIF results are spikes at
  // scale 1 and the membrane state persists across calls.
  EncryptedTensor apply(const EncryptedTensor& x, double out_scale, std::uint64_t seed);

  nn::ActivationKind kind() const { return kind_; }
  std::size_t invocations() const { return nb_log_.size(); }
  const std::vector<double>& nb_log() const { return nb_log_; }
  // Calls that consumed a ciphertext with no noise budget left.
  std::size_t corruption_events() const { return corruption_events_; }
  const snn::LifState& lif_state() const { return state_; }

 private:
  bfv::SecretKey sk_;
  bfv::PublicKey pk_;
  nn::ActivationKind kind_;
  snn::LifParams lif_;
  snn::LifState state_;
  std::vector<double> nb_log_;
  std::size_t corruption_events_ = 0;
};

struct TraceRecord {
  std::string layer;
  std::size_t step = 0;
  std::optional<double> nb_bits;  // unset where nothing was decrypted
  double ms = 0.0;
};

struct RunOptions {
  std::uint64_t seed = 0;
  std::size_t image_id = 0;
  // Also decrypt after every affine layer to log its noise budget. Costs one
  // extra decryption per element.
  bool layer_noise = false;
  snn::LifParams lif;
  std::size_t seq_length = snn::kDefaultSeqLength;
};

struct RunSummary {
  std::vector<TraceRecord> trace;
  std::size_t oracle_calls = 0;
  std::size_t corruption_events = 0;
  double min_nb = 0.0;  // over every decryption in the run
  double ms = 0.0;
};

struct DnnRun : RunSummary {
  EncryptedTensor encrypted_logits;
  std::vector<i64> logits;  // centered mod t
};

struct SnnRun : RunSummary {
  std::vector<i64> accumulated;  // sum of per-step centered outputs
};

DnnRun run_encrypted_dnn(const nn::QuantizedNet& qnet, const nn::Tensor3<float>& image,
                         const bfv::KeyPair& keys, const RunOptions& options);

SnnRun run_encrypted_snn(const nn::QuantizedNet& qnet, const nn::Tensor3<float>& image,
                         const bfv::KeyPair& keys, const RunOptions& options);

// Columns: run_id,image_id,t,layer,step,nb_bits,ms. Without timings the ms
// field is left empty so reruns compare byte for byte.
void write_trace_header(std::ostream& out);
void write_trace_rows(std::ostream& out, const std::string& run_id, std::size_t image_id, u64 t,
                      const std::vector<TraceRecord>& trace, bool timings = true);

}  // namespace spyking::he
