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

// Homomorphic evaluation of conv, dense and sum-pool layers as sparse affine
// maps over element ciphertexts.

#pragma once

#include <cstdint>
#include <vector>

#include "spyking/he/encrypted_tensor.hpp"
#include "spyking/nn/quant.hpp"

namespace spyking::he {

// Row r of the map is  bias[r] + sum_k weights[k] * x[cols[k]]  for k in
// [row_begin[r], row_begin[r+1]). Unweighted maps (sum pooling) add inputs
// without plaintext multiplication and carry no bias.
struct AffineMap {
  std::string name;
  nn::Shape3 in_shape;
  nn::Shape3 out_shape;
  std::vector<std::size_t> row_begin;
  std::vector<std::uint32_t> cols;
  std::vector<i64> weights;
  std::vector<i64> bias;
  bool weighted = true;
  double out_scale = 1.0;

  std::size_t rows() const { return row_begin.empty() ? 0 : row_begin.size() - 1; }
  std::size_t max_fan_in() const;
  i64 max_abs_weight() const;
};

// Conv2D, Dense and SumPool2 layers only.
AffineMap affine_map(const nn::QuantLayer& layer);

// Fused accumulation over coefficient vectors, parallel across output rows.
EncryptedTensor he_affine(const AffineMap& map, const EncryptedTensor& x);

// The literal he_mul_plain / he_add / he_add_plain chain, serial. Produces
// ciphertexts identical to he_affine.
EncryptedTensor he_affine_reference(const AffineMap& map, const EncryptedTensor& x);

}  // namespace spyking::he
