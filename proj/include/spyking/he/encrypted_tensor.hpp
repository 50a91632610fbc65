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

// One ciphertext per tensor element.

#pragma once

#include <cstdint>
#include <vector>

#include "spyking/bfv/bfv.hpp"
#include "spyking/nn/quant.hpp"

namespace spyking::he {

using bfv::Ciphertext;

struct EncryptedTensor {
  nn::Shape3 shape;
  std::vector<Ciphertext> cts;
  double scale = 1.0;

  std::size_t size() const { return cts.size(); }
  const bfv::BfvContextPtr& context() const { return cts.front().context(); }
};

// Element i is encrypted with a generator seeded from derive_seed(seed, {i}),
// so the result does not depend on the thread count.
EncryptedTensor encrypt_tensor(const nn::QuantTensor& x, const bfv::PublicKey& pk, std::uint64_t seed);
nn::QuantTensor decrypt_tensor(const bfv::SecretKey& sk, const EncryptedTensor& x);

struct NoisyDecryption {
  nn::QuantTensor values;
  double min_noise_budget = 0.0;
};
NoisyDecryption decrypt_tensor_with_noise(const bfv::SecretKey& sk, const EncryptedTensor& x);

}  // namespace spyking::he
