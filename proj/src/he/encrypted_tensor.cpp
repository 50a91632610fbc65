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

#include "spyking/he/encrypted_tensor.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

#include "spyking/ring/prng.hpp"

namespace spyking::he {

EncryptedTensor encrypt_tensor(const nn::QuantTensor& x, const bfv::PublicKey& pk, std::uint64_t seed) {
  if (x.data.size() != x.shape.size()) throw nn::ShapeError("quantized tensor does not match its shape");
  if (x.data.empty()) throw nn::ShapeError("cannot encrypt an empty tensor");
  for (i64 v : x.data) pk.context()->require_plain(v);
  EncryptedTensor out;
  out.shape = x.shape;
  out.scale = x.scale;
  out.cts.resize(x.data.size());
  const auto count = static_cast<std::ptrdiff_t>(x.data.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    Prng rng(derive_seed(seed, {static_cast<std::uint64_t>(i)}));
    out.cts[i] = bfv::encrypt(pk, x.data[i], rng);
  }
  return out;
}

nn::QuantTensor decrypt_tensor(const bfv::SecretKey& sk, const EncryptedTensor& x) {
  nn::QuantTensor out{x.shape, std::vector<i64>(x.size()), x.scale};
  const auto count = static_cast<std::ptrdiff_t>(x.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < count; ++i) out.data[i] = bfv::decrypt(sk, x.cts[i]);
  return out;
}

NoisyDecryption decrypt_tensor_with_noise(const bfv::SecretKey& sk, const EncryptedTensor& x) {
  NoisyDecryption out{{x.shape, std::vector<i64>(x.size()), x.scale}, 0.0};
  std::vector<double> budgets(x.size());
  const auto count = static_cast<std::ptrdiff_t>(x.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    const auto d = bfv::debug::decrypt_with_noise(sk, x.cts[i]);
    out.values.data[i] = d.value;
    budgets[i] = d.noise_budget;
  }
  out.min_noise_budget =
      budgets.empty() ? std::numeric_limits<double>::infinity() : *std::min_element(budgets.begin(), budgets.end());
  return out;
}

}  // namespace spyking::he
