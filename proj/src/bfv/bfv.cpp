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

#include "spyking/bfv/bfv.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>

#include <boost/multiprecision/cpp_int.hpp>

namespace spyking::bfv {

using boost::multiprecision::int256_t;

void BfvParams::validate() const {
  ring.validate();
  if (t < 2) throw std::invalid_argument("plaintext modulus must be >= 2");
  if (t >= ring.q) throw std::invalid_argument("plaintext modulus must be below q");
}

std::string BfvParams::describe() const {
  return "(n=" + std::to_string(ring.n) + ", q=" + std::to_string(ring.q) +
         ", t=" + std::to_string(t) + ")";
}

BfvContext::BfvContext(BfvParams params)
    : params_(params), ring_(RingContext::create(params.ring)), delta_(params.delta()) {}

std::shared_ptr<const BfvContext> BfvContext::create(BfvParams params) {
  params.validate();
  return std::shared_ptr<const BfvContext>(new BfvContext(params));
}

void BfvContext::require_plain(i64 m) const {
  if (!in_plain_range(m)) {
    throw PlaintextRangeError("plaintext " + std::to_string(m) + " outside [" +
                              std::to_string(min_plain()) + ", " + std::to_string(max_plain()) +
                              "] for t=" + std::to_string(params_.t));
  }
}

i64 BfvContext::reduce_plain(i64 m) const { return reduce_plain128(m); }

i64 BfvContext::reduce_plain128(i128 m) const {
  const i128 t = static_cast<i128>(params_.t);
  i128 r = m % t;
  if (r < 0) r += t;
  if (r > max_plain()) r -= t;
  return static_cast<i64>(r);
}

u64 BfvContext::scaled_plain(i64 m) const {
  return mul_mod(delta_, reduce_signed(m, q()), q());
}

void require_same_params(const BfvContext& a, const BfvContext& b) {
  if (a.params() != b.params()) {
    throw ParameterMismatch("BFV parameter mismatch: " + a.params().describe() + " vs " +
                            b.params().describe());
  }
}

namespace {

std::vector<ShoupConstant> to_ntt_shoup(const RingPoly& p) {
  const RingContext& ring = *p.context();
  std::vector<u64> f(p.coeffs().begin(), p.coeffs().end());
  ring.ntt().forward(f);
  std::vector<ShoupConstant> out(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) out[i] = make_shoup(f[i], ring.q());
  return out;
}

// floor(num / den) for den > 0.
int256_t floor_div(const int256_t& num, const int256_t& den) {
  int256_t quot = num / den;
  if ((num % den != 0) && (num < 0)) --quot;
  return quot;
}

// Nearest integer to num / den, ties rounded up.
int256_t round_div(const int256_t& num, const int256_t& den) {
  return floor_div(2 * num + den, 2 * den);
}

// round(t/q * centered constant coefficient), reduced into the centered range.
i64 constant_to_plain(const BfvContext& ctx, u64 constant) {
  const i64 x = center(constant, ctx.q());
  const int256_t rounded = round_div(int256_t(x) * int256_t(ctx.t()), int256_t(ctx.q()));
  return ctx.reduce_plain128(static_cast<i128>(static_cast<i64>(rounded % int256_t(ctx.t()))));
}

}  // namespace

SecretKey::SecretKey(BfvContextPtr ctx, RingPoly s) : ctx_(std::move(ctx)), s_(std::move(s)) {
  if (s_.params() != ctx_->params().ring) throw ParameterMismatch("secret key ring mismatch");
  if (ctx_->ring()->has_ntt()) s_ntt_ = to_ntt_shoup(s_);
  // (c1 * s)[0] = c1[0] s[0] - sum_{j>0} c1[j] s[n-j]
  const std::size_t n = ctx_->n();
  const std::vector<i64> lifted = center_lift(s_);
  i64 widest = 0;
  for (i64 v : lifted) widest = std::max(widest, v < 0 ? -v : v);
  if (static_cast<u128>(widest) * ctx_->q() * n < (u128{1} << 126)) {
    s_rotated_.resize(n);
    s_rotated_[0] = lifted[0];
    for (std::size_t j = 1; j < n; ++j) s_rotated_[j] = -lifted[n - j];
  }
}

u64 SecretKey::evaluate_constant(const std::vector<RingPoly>& parts) const {
  if (parts.size() != 2 || s_rotated_.empty()) return evaluate(parts)[0];
  require_same_ring(parts[0], s_);
  require_same_ring(parts[1], s_);
  const u64* c1 = parts[1].coeffs().data();
  i128 acc = 0;
  for (std::size_t j = 0; j < s_rotated_.size(); ++j) acc += static_cast<i128>(s_rotated_[j]) * c1[j];
  return add_mod(parts[0][0], reduce_signed128(acc, ctx_->q()), ctx_->q());
}

RingPoly SecretKey::evaluate(const std::vector<RingPoly>& parts) const {
  if (parts.empty()) throw std::invalid_argument("ciphertext has no parts");
  const RingContext& ring = *ctx_->ring();
  const u64 q = ring.q();
  if (parts.size() == 1) return parts[0];
  if (s_ntt_.empty()) {
    RingPoly acc = parts[0];
    RingPoly power = s_;
    for (std::size_t i = 1; i < parts.size(); ++i) {
      acc = poly_add(acc, negacyclic_mul(parts[i], power));
      if (i + 1 < parts.size()) power = negacyclic_mul(power, s_);
    }
    return acc;
  }
  const std::size_t n = ring.n();
  std::vector<u64> acc(n, 0);
  std::vector<u64> power(n);
  for (std::size_t k = 0; k < n; ++k) power[k] = s_ntt_[k].value;
  std::vector<u64> f(n);
  for (std::size_t i = 1; i < parts.size(); ++i) {
    require_same_ring(parts[i], s_);
    std::copy(parts[i].coeffs().begin(), parts[i].coeffs().end(), f.begin());
    ring.ntt().forward(f);
    if (i == 1) {
      for (std::size_t k = 0; k < n; ++k) acc[k] = add_mod(acc[k], mul_shoup(f[k], s_ntt_[k], q), q);
    } else {
      for (std::size_t k = 0; k < n; ++k) {
        power[k] = mul_shoup(power[k], s_ntt_[k], q);
        acc[k] = add_mod(acc[k], mul_mod(f[k], power[k], q), q);
      }
    }
  }
  ring.ntt().inverse(acc);
  for (std::size_t k = 0; k < n; ++k) acc[k] = add_mod(acc[k], parts[0][k], q);
  return RingPoly(ctx_->ring(), std::move(acc));
}

PublicKey::PublicKey(BfvContextPtr ctx, RingPoly p0, RingPoly p1)
    : ctx_(std::move(ctx)), p0_(std::move(p0)), p1_(std::move(p1)) {
  require_same_ring(p0_, p1_);
  if (p0_.params() != ctx_->params().ring) throw ParameterMismatch("public key ring mismatch");
  if (ctx_->ring()->has_ntt()) {
    p0_ntt_ = to_ntt_shoup(p0_);
    p1_ntt_ = to_ntt_shoup(p1_);
  }
}

std::pair<RingPoly, RingPoly> PublicKey::mask(const RingPoly& u) const {
  if (p0_ntt_.empty()) return {negacyclic_mul(p0_, u), negacyclic_mul(p1_, u)};
  const RingContext& ring = *ctx_->ring();
  const u64 q = ring.q();
  const std::size_t n = ring.n();
  std::vector<u64> fu(u.coeffs().begin(), u.coeffs().end());
  ring.ntt().forward(fu);
  std::vector<u64> a0(n);
  std::vector<u64> a1(n);
  for (std::size_t k = 0; k < n; ++k) {
    a0[k] = mul_shoup(fu[k], p0_ntt_[k], q);
    a1[k] = mul_shoup(fu[k], p1_ntt_[k], q);
  }
  ring.ntt().inverse(a0);
  ring.ntt().inverse(a1);
  return {RingPoly(ctx_->ring(), std::move(a0)), RingPoly(ctx_->ring(), std::move(a1))};
}

Ciphertext::Ciphertext(BfvContextPtr ctx, std::vector<RingPoly> parts, unsigned mult_depth)
    : ctx_(std::move(ctx)), parts_(std::move(parts)), mult_depth_(mult_depth) {
  if (parts_.size() < 2) throw std::invalid_argument("ciphertext needs at least two parts");
  for (const auto& p : parts_) {
    if (p.params() != ctx_->params().ring) throw ParameterMismatch("ciphertext part ring mismatch");
  }
}

KeyPair keygen(const BfvContextPtr& ctx, Prng& rng) {
  const auto& ring = ctx->ring();
  RingPoly s = sample(SampleKind::TernarySecret, ring, rng);
  RingPoly a = sample(SampleKind::Uniform, ring, rng);
  RingPoly e = sample(SampleKind::Error, ring, rng);
  RingPoly p0 = poly_neg(poly_add(negacyclic_mul(a, s), e));
  return KeyPair{SecretKey(ctx, std::move(s)), PublicKey(ctx, std::move(p0), std::move(a))};
}

i64 public_key_error_norm(const KeyPair& keys) {
  const PublicKey& pk = keys.public_key;
  return inf_norm(poly_add(pk.p0(), negacyclic_mul(pk.p1(), keys.secret.poly())));
}

Ciphertext encrypt(const PublicKey& pk, i64 m, Prng& rng) {
  const BfvContextPtr& ctx = pk.context();
  ctx->require_plain(m);
  const auto& ring = ctx->ring();
  RingPoly u = sample(SampleKind::TernarySecret, ring, rng);
  RingPoly e1 = sample(SampleKind::Error, ring, rng);
  RingPoly e2 = sample(SampleKind::Error, ring, rng);
  auto [c0, c1] = pk.mask(u);
  const u64 q = ctx->q();
  auto c0_coeffs = c0.mutable_coeffs();
  auto c1_coeffs = c1.mutable_coeffs();
  for (std::size_t k = 0; k < c0_coeffs.size(); ++k) {
    c0_coeffs[k] = add_mod(c0_coeffs[k], e1[k], q);
    c1_coeffs[k] = add_mod(c1_coeffs[k], e2[k], q);
  }
  c0_coeffs[0] = add_mod(c0_coeffs[0], ctx->scaled_plain(m), q);
  return Ciphertext(ctx, {std::move(c0), std::move(c1)});
}

i64 decrypt(const SecretKey& sk, const Ciphertext& ct) {
  require_same_params(*sk.context(), *ct.context());
  return constant_to_plain(*ct.context(), sk.evaluate_constant(ct.parts()));
}

Ciphertext he_add(const Ciphertext& a, const Ciphertext& b) {
  require_same_params(*a.context(), *b.context());
  const Ciphertext& longer = a.size() >= b.size() ? a : b;
  const Ciphertext& shorter = a.size() >= b.size() ? b : a;
  std::vector<RingPoly> parts = longer.parts();
  for (std::size_t i = 0; i < shorter.size(); ++i) parts[i] = poly_add(parts[i], shorter.parts()[i]);
  return Ciphertext(a.context(), std::move(parts), std::max(a.mult_depth(), b.mult_depth()));
}

Ciphertext he_add_plain(const Ciphertext& a, i64 m) {
  const BfvContext& ctx = *a.context();
  ctx.require_plain(m);
  std::vector<RingPoly> parts = a.parts();
  auto c0 = parts[0].mutable_coeffs();
  c0[0] = add_mod(c0[0], ctx.scaled_plain(m), ctx.q());
  return Ciphertext(a.context(), std::move(parts), a.mult_depth());
}

Ciphertext he_mul_plain(const Ciphertext& a, i64 m) {
  const BfvContext& ctx = *a.context();
  ctx.require_plain(m);
  const u64 scalar = reduce_signed(m, ctx.q());
  std::vector<RingPoly> parts;
  parts.reserve(a.size());
  for (const auto& p : a.parts()) parts.push_back(poly_scalar_mul(p, scalar));
  return Ciphertext(a.context(), std::move(parts), a.mult_depth() + 1);
}

namespace {

// Exact (unreduced) negacyclic product of centered polynomials, accumulated
// into out. Acc must hold n * (q/2)^2 times the number of summed products.
template <typename Acc>
void accumulate_integer_product(const std::vector<i64>& a, const std::vector<i64>& b,
                                std::vector<Acc>& out) {
  const std::size_t n = a.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (a[i] == 0) continue;
    const Acc ai = a[i];
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t k = i + j;
      if (k < n) {
        out[k] += ai * b[j];
      } else {
        out[k - n] -= ai * b[j];
      }
    }
  }
}

template <typename Acc>
std::vector<RingPoly> tensor_and_scale(const Ciphertext& a, const Ciphertext& b) {
  const BfvContext& ctx = *a.context();
  const std::size_t n = ctx.n();
  const std::size_t out_parts = a.size() + b.size() - 1;
  std::vector<std::vector<i64>> la;
  std::vector<std::vector<i64>> lb;
  for (const auto& p : a.parts()) la.push_back(center_lift(p));
  for (const auto& p : b.parts()) lb.push_back(center_lift(p));

  const int256_t t(ctx.t());
  const int256_t q(ctx.q());
  std::vector<RingPoly> parts;
  parts.reserve(out_parts);
  for (std::size_t k = 0; k < out_parts; ++k) {
    std::vector<Acc> acc(n, Acc(0));
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (k < i || k - i >= b.size()) continue;
      accumulate_integer_product(la[i], lb[k - i], acc);
    }
    std::vector<u64> coeffs(n);
    for (std::size_t c = 0; c < n; ++c) {
      int256_t r = round_div(int256_t(acc[c]) * t, q) % q;
      if (r < 0) r += q;
      coeffs[c] = static_cast<u64>(r);
    }
    parts.emplace_back(ctx.ring(), std::move(coeffs));
  }
  return parts;
}

}  // namespace

Ciphertext he_mul_ct(const Ciphertext& a, const Ciphertext& b) {
  require_same_params(*a.context(), *b.context());
  const BfvContext& ctx = *a.context();
  const int coeff_bits = std::bit_width(ctx.q() / 2);
  const int fan_bits = std::bit_width(ctx.n()) + std::bit_width(std::min(a.size(), b.size()));
  std::vector<RingPoly> parts = 2 * coeff_bits + fan_bits < 126
                                    ? tensor_and_scale<i128>(a, b)
                                    : tensor_and_scale<int256_t>(a, b);
  return Ciphertext(a.context(), std::move(parts), std::max(a.mult_depth(), b.mult_depth()) + 1);
}

int max_modulus_bits(std::size_t n, int security_bits) {
  // Ternary-secret bounds from the homomorphic encryption security standard.
  static const std::map<std::pair<std::size_t, int>, int> kBounds = {
      {{1024, 128}, 27}, {{1024, 192}, 19}, {{1024, 256}, 14},
      {{2048, 128}, 54}, {{2048, 192}, 37}, {{2048, 256}, 29},
      {{4096, 128}, 109}, {{4096, 192}, 75}, {{4096, 256}, 58},
  };
  const auto it = kBounds.find({n, security_bits});
  if (it == kBounds.end()) {
    throw std::invalid_argument("no modulus bound for n=" + std::to_string(n) +
                                " at " + std::to_string(security_bits) + "-bit security");
  }
  return std::min(it->second, kMaxModulusBits);
}

u64 select_q(std::size_t n, int security_bits) {
  const int bits = max_modulus_bits(n, security_bits);
  const u64 step = 2 * static_cast<u64>(n);
  const u64 bound = (bits >= 64) ? ~u64{0} : (u64{1} << bits) - 1;
  for (u64 q = bound / step * step + 1; q > step; q -= step) {
    if (q <= bound && is_prime(q)) return q;
  }
  throw std::runtime_error("no NTT-friendly prime below the modulus bound");
}

namespace debug {

double noise_budget_from_phase(const BfvContext& ctx, const RingPoly& phase) {
  const u64 q = ctx.q();
  const u64 t = ctx.t() % q;
  // Plaintexts are constant polynomials, so a non-constant coefficient that
  // decodes to anything but 0 means the noise has wrapped modulo q; the
  // reduced residue alone would then understate it.
  const auto coeffs = phase.coeffs();
  for (std::size_t i = 1; i < coeffs.size(); ++i) {
    if (constant_to_plain(ctx, coeffs[i]) != 0) return 0.0;
  }
  i64 worst = 0;
  for (u64 c : coeffs) worst = std::max(worst, std::abs(center(mul_mod(t, c, q), q)));
  const double bits = std::log2(static_cast<double>(q)) - 1.0 -
                      std::log2(static_cast<double>(std::max<i64>(worst, 1)));
  const double stepped = std::floor(bits / kNoiseBudgetResolution) * kNoiseBudgetResolution;
  return std::max(0.0, stepped);
}

Decryption decrypt_with_noise(const SecretKey& sk, const Ciphertext& ct) {
  require_same_params(*sk.context(), *ct.context());
  const BfvContext& ctx = *ct.context();
  const RingPoly phase = sk.evaluate(ct.parts());
  Decryption d;
  d.value = constant_to_plain(ctx, phase[0]);
  d.noise_budget = noise_budget_from_phase(ctx, phase);
  return d;
}

double noise_budget(const SecretKey& sk, const Ciphertext& ct) {
  return decrypt_with_noise(sk, ct).noise_budget;
}

}  // namespace debug

}  // namespace spyking::bfv
