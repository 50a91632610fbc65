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

// Arithmetic in the negacyclic ring Z_q[x]/(x^n + 1).

#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "spyking/ring/modarith.hpp"
#include "spyking/ring/ntt.hpp"
#include "spyking/ring/prng.hpp"

namespace spyking {

class ParameterMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct RingParams {
  std::size_t n = 0;  // ring degree, power of two
  u64 q = 0;          // coefficient modulus, odd, below 2^62

  bool operator==(const RingParams&) const = default;

  // Throws std::invalid_argument on a malformed parameter set.
  void validate() const;
  std::string describe() const;
};

// Immutable per-parameter-set state: the parameters plus NTT tables when q
// admits them. Shared by every polynomial over the ring.
class RingContext {
 public:
  static std::shared_ptr<const RingContext> create(RingParams params);

  const RingParams& params() const { return params_; }
  std::size_t n() const { return params_.n; }
  u64 q() const { return params_.q; }
  const Barrett64& barrett() const { return barrett_; }

  bool has_ntt() const { return ntt_.has_value(); }
  const NttTables& ntt() const { return *ntt_; }

 private:
  explicit RingContext(RingParams params);

  RingParams params_;
  Barrett64 barrett_;
  std::optional<NttTables> ntt_;
};

using RingContextPtr = std::shared_ptr<const RingContext>;

class RingPoly {
 public:
  RingPoly() = default;
  // Zero polynomial.
  explicit RingPoly(RingContextPtr ctx);
  // Coefficients must already be reduced into [0, q).
  RingPoly(RingContextPtr ctx, std::vector<u64> coeffs);

  static RingPoly from_signed(RingContextPtr ctx, std::span<const i64> values);
  static RingPoly constant(RingContextPtr ctx, i64 value);

  const RingContextPtr& context() const { return ctx_; }
  const RingParams& params() const { return ctx_->params(); }
  std::size_t size() const { return coeffs_.size(); }

  std::span<const u64> coeffs() const { return coeffs_; }
  std::span<u64> mutable_coeffs() { return coeffs_; }
  u64 operator[](std::size_t i) const { return coeffs_[i]; }

  bool is_zero() const;

  friend bool operator==(const RingPoly& a, const RingPoly& b) {
    return a.params() == b.params() && a.coeffs_ == b.coeffs_;
  }

 private:
  RingContextPtr ctx_;
  std::vector<u64> coeffs_;
};

void require_same_ring(const RingPoly& a, const RingPoly& b);

RingPoly poly_add(const RingPoly& a, const RingPoly& b);
RingPoly poly_sub(const RingPoly& a, const RingPoly& b);
RingPoly poly_neg(const RingPoly& a);
// Multiplication by a ring scalar, i.e. by a constant polynomial.
RingPoly poly_scalar_mul(const RingPoly& a, u64 scalar);

// Product modulo (x^n + 1, q). Uses the NTT when the context has one; the
// result is bit-identical to negacyclic_mul_schoolbook.
RingPoly negacyclic_mul(const RingPoly& a, const RingPoly& b);
RingPoly negacyclic_mul_schoolbook(const RingPoly& a, const RingPoly& b);

// Signed view: each coefficient mapped into [-q/2, q/2).
std::vector<i64> center_lift(const RingPoly& a);
i64 inf_norm(const RingPoly& a);

enum class SampleKind { Uniform, TernarySecret, Error };

RingPoly sample(SampleKind kind, const RingContextPtr& ctx, Prng& rng);

}  // namespace spyking
