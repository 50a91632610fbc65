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

#include "spyking/ring/ring.hpp"

#include <algorithm>
#include <bit>
#include <cstdlib>

namespace spyking {

void RingParams::validate() const {
  if (n < 2 || !std::has_single_bit(n)) {
    throw std::invalid_argument("ring degree must be a power of two >= 2, got " +
                                std::to_string(n));
  }
  if (q < 3 || q % 2 == 0) {
    throw std::invalid_argument("coefficient modulus must be odd and >= 3, got " +
                                std::to_string(q));
  }
  if (q >= (u64{1} << kMaxModulusBits)) {
    throw std::invalid_argument("coefficient modulus exceeds 62 bits");
  }
}

std::string RingParams::describe() const {
  return "(n=" + std::to_string(n) + ", q=" + std::to_string(q) + ")";
}

RingContext::RingContext(RingParams params)
    : params_(params), barrett_(params.q), ntt_(NttTables::create(params.n, params.q)) {}

std::shared_ptr<const RingContext> RingContext::create(RingParams params) {
  params.validate();
  return std::shared_ptr<const RingContext>(new RingContext(params));
}

RingPoly::RingPoly(RingContextPtr ctx) : ctx_(std::move(ctx)), coeffs_(ctx_->n(), 0) {}

RingPoly::RingPoly(RingContextPtr ctx, std::vector<u64> coeffs)
    : ctx_(std::move(ctx)), coeffs_(std::move(coeffs)) {
  if (coeffs_.size() != ctx_->n()) {
    throw std::invalid_argument("coefficient count does not match ring degree");
  }
  for (u64 c : coeffs_) {
    if (c >= ctx_->q()) throw std::invalid_argument("coefficient not reduced mod q");
  }
}

RingPoly RingPoly::from_signed(RingContextPtr ctx, std::span<const i64> values) {
  if (values.size() != ctx->n()) {
    throw std::invalid_argument("coefficient count does not match ring degree");
  }
  RingPoly p(std::move(ctx));
  const u64 q = p.ctx_->q();
  for (std::size_t i = 0; i < values.size(); ++i) p.coeffs_[i] = reduce_signed(values[i], q);
  return p;
}

RingPoly RingPoly::constant(RingContextPtr ctx, i64 value) {
  RingPoly p(std::move(ctx));
  p.coeffs_[0] = reduce_signed(value, p.ctx_->q());
  return p;
}

bool RingPoly::is_zero() const {
  return std::all_of(coeffs_.begin(), coeffs_.end(), [](u64 c) { return c == 0; });
}

void require_same_ring(const RingPoly& a, const RingPoly& b) {
  if (!a.context() || !b.context() || a.params() != b.params()) {
    throw ParameterMismatch("ring parameter mismatch: " +
                            (a.context() ? a.params().describe() : std::string("(empty)")) +
                            " vs " +
                            (b.context() ? b.params().describe() : std::string("(empty)")));
  }
}

RingPoly poly_add(const RingPoly& a, const RingPoly& b) {
  require_same_ring(a, b);
  RingPoly r(a.context());
  const u64 q = a.params().q;
  auto out = r.mutable_coeffs();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = add_mod(a[i], b[i], q);
  return r;
}

RingPoly poly_sub(const RingPoly& a, const RingPoly& b) {
  require_same_ring(a, b);
  RingPoly r(a.context());
  const u64 q = a.params().q;
  auto out = r.mutable_coeffs();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = sub_mod(a[i], b[i], q);
  return r;
}

RingPoly poly_neg(const RingPoly& a) {
  RingPoly r(a.context());
  const u64 q = a.params().q;
  auto out = r.mutable_coeffs();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = neg_mod(a[i], q);
  return r;
}

RingPoly poly_scalar_mul(const RingPoly& a, u64 scalar) {
  const u64 q = a.params().q;
  const ShoupConstant w = make_shoup(scalar % q, q);
  RingPoly r(a.context());
  auto out = r.mutable_coeffs();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = mul_shoup(a[i], w, q);
  return r;
}

RingPoly negacyclic_mul_schoolbook(const RingPoly& a, const RingPoly& b) {
  require_same_ring(a, b);
  const std::size_t n = a.size();
  const u64 q = a.params().q;
  const int log_n = std::countr_zero(n);
  // Accumulate a whole output coefficient in 128 bits when n products of two
  // residues cannot overflow; otherwise reduce every product.
  const bool wide_ok = 2 * std::bit_width(q) + log_n + 1 < 128;
  std::vector<u64> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    if (wide_ok) {
      u128 pos = 0;
      u128 neg = 0;
      for (std::size_t i = 0; i <= k; ++i) pos += static_cast<u128>(a[i]) * b[k - i];
      for (std::size_t i = k + 1; i < n; ++i) neg += static_cast<u128>(a[i]) * b[n + k - i];
      out[k] = sub_mod(static_cast<u64>(pos % q), static_cast<u64>(neg % q), q);
    } else {
      u64 acc = 0;
      for (std::size_t i = 0; i <= k; ++i) acc = add_mod(acc, mul_mod(a[i], b[k - i], q), q);
      for (std::size_t i = k + 1; i < n; ++i) acc = sub_mod(acc, mul_mod(a[i], b[n + k - i], q), q);
      out[k] = acc;
    }
  }
  return RingPoly(a.context(), std::move(out));
}

RingPoly negacyclic_mul(const RingPoly& a, const RingPoly& b) {
  require_same_ring(a, b);
  const RingContext& ctx = *a.context();
  if (!ctx.has_ntt()) return negacyclic_mul_schoolbook(a, b);
  const u64 q = ctx.q();
  std::vector<u64> fa(a.coeffs().begin(), a.coeffs().end());
  std::vector<u64> fb(b.coeffs().begin(), b.coeffs().end());
  ctx.ntt().forward(fa);
  ctx.ntt().forward(fb);
  for (std::size_t i = 0; i < fa.size(); ++i) fa[i] = mul_mod(fa[i], fb[i], q);
  ctx.ntt().inverse(fa);
  return RingPoly(a.context(), std::move(fa));
}

std::vector<i64> center_lift(const RingPoly& a) {
  const u64 q = a.params().q;
  std::vector<i64> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = center(a[i], q);
  return out;
}

i64 inf_norm(const RingPoly& a) {
  const u64 q = a.params().q;
  i64 m = 0;
  for (u64 c : a.coeffs()) m = std::max(m, std::abs(center(c, q)));
  return m;
}

namespace {

// |v| < q.
u64 small_to_residue(int v, u64 q) {
  return static_cast<u64>(static_cast<i64>(v)) + (q & (u64{0} - static_cast<u64>(v < 0)));
}

}  // namespace

RingPoly sample(SampleKind kind, const RingContextPtr& ctx, Prng& rng) {
  RingPoly p(ctx);
  const u64 q = ctx->q();
  auto out = p.mutable_coeffs();
  switch (kind) {
    case SampleKind::Uniform:
      for (auto& c : out) c = rng.uniform_below(q);
      break;
    case SampleKind::TernarySecret:
      for (auto& c : out) c = small_to_residue(rng.ternary(), q);
      break;
    case SampleKind::Error:
      for (auto& c : out) c = small_to_residue(rng.gaussian(), q);
      break;
  }
  return p;
}

}  // namespace spyking
