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

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "spyking/ring/modarith.hpp"

namespace spyking {

// Negacyclic number-theoretic transform over Z_q[x]/(x^n + 1). Needs a prime
// q = 1 mod 2n. Forward output is in bit-reversed order; pointwise products
// of two forward transforms invert to the negacyclic product.
class NttTables {
 public:
  static std::optional<NttTables> create(std::size_t n, u64 q);

  std::size_t degree() const { return n_; }
  u64 modulus() const { return q_; }
  u64 root() const { return psi_; }

  void forward(std::span<u64> a) const;
  void inverse(std::span<u64> a) const;

 private:
  NttTables() = default;

  std::size_t n_ = 0;
  u64 q_ = 0;
  u64 psi_ = 0;
  std::vector<ShoupConstant> psi_rev_;
  std::vector<ShoupConstant> psi_inv_rev_;
  ShoupConstant n_inv_;
};

}  // namespace spyking
