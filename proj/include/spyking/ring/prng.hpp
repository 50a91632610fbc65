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

#include <cstdint>
#include <initializer_list>
#include <random>

namespace spyking {

// SplitMix64 finalizer; used to derive independent stream seeds.
std::uint64_t mix64(std::uint64_t x);

// Derives a child seed from a base seed and a path of indices, so that every
// ciphertext in a parallel loop draws from its own reproducible stream.
std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> path);

inline constexpr double kErrorSigma = 3.2;
inline constexpr int kErrorBound = 19;  // floor(6 * sigma)

// Seeded random source for RLWE sampling. Not thread-safe; one per thread.
class Prng {
 public:
  explicit Prng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  // Uniform in [0, bound); rejection sampling, so independent of the
  // standard library's distribution implementation.
  std::uint64_t uniform_below(std::uint64_t bound);

  // Uniform in {-1, 0, 1}.
  int ternary() {
    for (;;) {
      const auto v = static_cast<int>(take_bits(8));
      if (v < 255) return v % 3 - 1;
    }
  }

  // Centered discrete Gaussian, sigma = 3.2, support [-19, 19].
  int gaussian();

 private:
  std::uint64_t take_bits(int k) {
    if (bits_left_ < k) {
      pool_ = engine_();
      bits_left_ = 64;
    }
    const std::uint64_t v = pool_ & ((std::uint64_t{1} << k) - 1);
    pool_ >>= k;
    bits_left_ -= k;
    return v;
  }

  std::mt19937_64 engine_;
  std::uint64_t pool_ = 0;
  int bits_left_ = 0;
};

}  // namespace spyking
