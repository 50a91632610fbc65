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

// Word-level modular arithmetic for moduli below 2^62.

#pragma once

#include <cstdint>

namespace spyking {

using u64 = std::uint64_t;
using i64 = std::int64_t;
using u128 = unsigned __int128;
using i128 = __int128;

inline constexpr int kMaxModulusBits = 62;

inline u64 add_mod(u64 a, u64 b, u64 q) {
  const u64 s = a + b;
  return s >= q ? s - q : s;
}

inline u64 sub_mod(u64 a, u64 b, u64 q) { return a >= b ? a - b : a + (q - b); }

inline u64 neg_mod(u64 a, u64 q) { return a == 0 ? 0 : q - a; }

inline u64 mul_mod(u64 a, u64 b, u64 q) {
  return static_cast<u64>(static_cast<u128>(a) * b % q);
}

u64 pow_mod(u64 base, u64 exp, u64 q);

// Representative of v in [0, q).
inline u64 reduce_signed(i64 v, u64 q) {
  if (v >= 0) return static_cast<u64>(v) % q;
  const u64 r = static_cast<u64>(-(v + 1)) % q;  // avoids overflow at INT64_MIN
  return q - 1 - r;
}

inline u64 reduce_signed128(i128 v, u64 q) {
  if (v >= 0) return static_cast<u64>(static_cast<u128>(v) % q);
  const u64 r = static_cast<u64>(static_cast<u128>(-(v + 1)) % q);
  return q - 1 - r;
}

// Unique representative of a (in [0, q)) in [-q/2, q/2).
inline i64 center(u64 a, u64 q) {
  return a >= q - q / 2 ? static_cast<i64>(a) - static_cast<i64>(q) : static_cast<i64>(a);
}

// Multiplication by a fixed operand with a precomputed quotient (Shoup).
struct ShoupConstant {
  u64 value = 0;
  u64 quotient = 0;  // floor(value * 2^64 / q)
};

inline ShoupConstant make_shoup(u64 w, u64 q) {
  return {w, static_cast<u64>((static_cast<u128>(w) << 64) / q)};
}

inline u64 mul_shoup(u64 x, const ShoupConstant& w, u64 q) {
  const u64 hi = static_cast<u64>((static_cast<u128>(x) * w.quotient) >> 64);
  const u64 r = x * w.value - hi * q;
  return r >= q ? r - q : r;
}

// Barrett reduction of a full 64-bit word.
class Barrett64 {
 public:
  Barrett64() = default;
  explicit Barrett64(u64 q) : q_(q), ratio_(~u64{0} / q) {}

  u64 modulus() const { return q_; }

  u64 reduce(u64 x) const {
    const u64 est = static_cast<u64>((static_cast<u128>(x) * ratio_) >> 64);
    u64 r = x - est * q_;
    while (r >= q_) r -= q_;
    return r;
  }

  u64 reduce_signed(i64 v) const {
    if (v >= 0) return reduce(static_cast<u64>(v));
    const u64 r = reduce(static_cast<u64>(-(v + 1)));
    return q_ - 1 - r;
  }

 private:
  u64 q_ = 1;
  u64 ratio_ = 0;
};

// Deterministic Miller-Rabin, exact for all 64-bit inputs.
bool is_prime(u64 n);

}  // namespace spyking
