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

#include "spyking/ring/prng.hpp"

#include <array>
#include <cmath>

namespace spyking {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> path) {
  std::uint64_t h = mix64(base);
  for (std::uint64_t p : path) h = mix64(h ^ mix64(p + 0x632be59bd9b4e019ULL));
  return h;
}

std::uint64_t Prng::uniform_below(std::uint64_t bound) {
  if (bound <= 1) return 0;
  // Largest multiple of bound that fits; values above it are rejected.
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
  std::uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return x % bound;
}

namespace {

// Cumulative distribution of |v| for the truncated discrete Gaussian, scaled
// to 2^64. Entry k is P(|v| <= k).
std::array<std::uint64_t, kErrorBound + 1> build_cdt() {
  std::array<long double, kErrorBound + 1> mass{};
  long double total = 0;
  for (int v = 0; v <= kErrorBound; ++v) {
    const long double w = std::exp(-static_cast<long double>(v * v) /
                                   (2.0L * kErrorSigma * kErrorSigma));
    mass[v] = v == 0 ? w : 2 * w;
    total += mass[v];
  }
  std::array<std::uint64_t, kErrorBound + 1> cdt{};
  long double acc = 0;
  for (int v = 0; v <= kErrorBound; ++v) {
    acc += mass[v] / total;
    cdt[v] = v == kErrorBound ? ~std::uint64_t{0}
                              : static_cast<std::uint64_t>(acc * 18446744073709551616.0L);
  }
  return cdt;
}

}  // namespace

int Prng::gaussian() {
  static const auto cdt = build_cdt();
  const std::uint64_t r = engine_();
  // Branch-free table scan.
  int magnitude = 0;
  for (int k = 0; k < kErrorBound; ++k) magnitude += r >= cdt[k] ? 1 : 0;
  const int negate = -static_cast<int>(take_bits(1));
  return (magnitude ^ negate) - negate;
}

}  // namespace spyking
