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

#include "spyking/ring/ntt.hpp"

#include <bit>

namespace spyking {

namespace {

std::size_t bit_reverse(std::size_t x, int bits) {
  std::size_t r = 0;
  for (int i = 0; i < bits; ++i) {
    r = (r << 1) | (x & 1);
    x >>= 1;
  }
  return r;
}

// Smallest primitive 2n-th root of unity reachable as g^((q-1)/2n).
u64 find_primitive_root(std::size_t n, u64 q) {
  const u64 order = 2 * static_cast<u64>(n);
  for (u64 g = 2; g < q; ++g) {
    const u64 psi = pow_mod(g, (q - 1) / order, q);
    // Order divides 2n (a power of two); psi^n = -1 pins it to exactly 2n.
    if (pow_mod(psi, n, q) == q - 1) return psi;
  }
  return 0;
}

}  // namespace

std::optional<NttTables> NttTables::create(std::size_t n, u64 q) {
  if (n < 2 || !std::has_single_bit(n)) return std::nullopt;
  if (q >= (u64{1} << kMaxModulusBits) || (q - 1) % (2 * n) != 0 || !is_prime(q)) {
    return std::nullopt;
  }
  const u64 psi = find_primitive_root(n, q);
  if (psi == 0) return std::nullopt;

  NttTables t;
  t.n_ = n;
  t.q_ = q;
  t.psi_ = psi;
  const int bits = std::countr_zero(n);
  const u64 psi_inv = pow_mod(psi, q - 2, q);
  t.psi_rev_.resize(n);
  t.psi_inv_rev_.resize(n);
  u64 pw = 1;
  u64 pw_inv = 1;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t r = bit_reverse(i, bits);
    t.psi_rev_[r] = make_shoup(pw, q);
    t.psi_inv_rev_[r] = make_shoup(pw_inv, q);
    pw = mul_mod(pw, psi, q);
    pw_inv = mul_mod(pw_inv, psi_inv, q);
  }
  t.n_inv_ = make_shoup(pow_mod(n % q, q - 2, q), q);
  return t;
}

void NttTables::forward(std::span<u64> a) const {
  const u64 q = q_;
  std::size_t span = n_;
  for (std::size_t m = 1; m < n_; m <<= 1) {
    span >>= 1;
    for (std::size_t i = 0; i < m; ++i) {
      const std::size_t j1 = 2 * i * span;
      const ShoupConstant& w = psi_rev_[m + i];
      for (std::size_t j = j1; j < j1 + span; ++j) {
        const u64 u = a[j];
        const u64 v = mul_shoup(a[j + span], w, q);
        a[j] = add_mod(u, v, q);
        a[j + span] = sub_mod(u, v, q);
      }
    }
  }
}

void NttTables::inverse(std::span<u64> a) const {
  const u64 q = q_;
  std::size_t span = 1;
  for (std::size_t m = n_; m > 1; m >>= 1) {
    const std::size_t h = m >> 1;
    std::size_t j1 = 0;
    for (std::size_t i = 0; i < h; ++i) {
      const ShoupConstant& w = psi_inv_rev_[h + i];
      for (std::size_t j = j1; j < j1 + span; ++j) {
        const u64 u = a[j];
        const u64 v = a[j + span];
        a[j] = add_mod(u, v, q);
        a[j + span] = mul_shoup(sub_mod(u, v, q), w, q);
      }
      j1 += 2 * span;
    }
    span <<= 1;
  }
  for (auto& x : a) x = mul_shoup(x, n_inv_, q);
}

}  // namespace spyking
