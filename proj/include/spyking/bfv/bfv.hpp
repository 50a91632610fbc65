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

// BFV public-key encryption of scalar integers mod t.
//
// A plaintext m in [-t/2, t/2) is carried in the constant coefficient as
// Delta * m with Delta = floor(q / t). Ciphertexts are never relinearized, so
// a ciphertext-ciphertext product grows the part count by one.

#pragma once

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "spyking/ring/ring.hpp"

namespace spyking::bfv {

class PlaintextRangeError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

struct BfvParams {
  RingParams ring;
  u64 t = 0;

  u64 delta() const { return ring.q / t; }
  bool operator==(const BfvParams&) const = default;
  void validate() const;
  std::string describe() const;
};

class BfvContext {
 public:
  static std::shared_ptr<const BfvContext> create(BfvParams params);
  static std::shared_ptr<const BfvContext> create(std::size_t n, u64 q, u64 t) {
    return create(BfvParams{{n, q}, t});
  }

  const BfvParams& params() const { return params_; }
  const RingContextPtr& ring() const { return ring_; }
  std::size_t n() const { return params_.ring.n; }
  u64 q() const { return params_.ring.q; }
  u64 t() const { return params_.t; }
  u64 delta() const { return delta_; }

  // Centered plaintext range [min_plain, max_plain].
  i64 min_plain() const { return -static_cast<i64>(params_.t / 2); }
  i64 max_plain() const { return static_cast<i64>(params_.t - 1 - params_.t / 2); }
  bool in_plain_range(i64 m) const { return m >= min_plain() && m <= max_plain(); }
  void require_plain(i64 m) const;

  // m reduced into the centered range.
  i64 reduce_plain(i64 m) const;
  i64 reduce_plain128(i128 m) const;

  // Delta * m mod q for a centered plaintext.
  u64 scaled_plain(i64 m) const;

 private:
  explicit BfvContext(BfvParams params);

  BfvParams params_;
  RingContextPtr ring_;
  u64 delta_;
};

using BfvContextPtr = std::shared_ptr<const BfvContext>;

void require_same_params(const BfvContext& a, const BfvContext& b);

class SecretKey {
 public:
  SecretKey(BfvContextPtr ctx, RingPoly s);

  const BfvContextPtr& context() const { return ctx_; }
  const RingPoly& poly() const { return s_; }

  // c(s) = sum_i parts[i] * s^i.
  RingPoly evaluate(const std::vector<RingPoly>& parts) const;
  // Constant coefficient of c(s); linear time for two-part ciphertexts.
  u64 evaluate_constant(const std::vector<RingPoly>& parts) const;

 private:
  BfvContextPtr ctx_;
  RingPoly s_;
  std::vector<ShoupConstant> s_ntt_;  // empty without NTT support
  std::vector<i64> s_rotated_;        // constant-coefficient weights; empty if s is wide
};

class PublicKey {
 public:
  PublicKey(BfvContextPtr ctx, RingPoly p0, RingPoly p1);

  const BfvContextPtr& context() const { return ctx_; }
  const RingPoly& p0() const { return p0_; }
  const RingPoly& p1() const { return p1_; }

  // (p0 * u, p1 * u) for a short polynomial u.
  std::pair<RingPoly, RingPoly> mask(const RingPoly& u) const;

 private:
  BfvContextPtr ctx_;
  RingPoly p0_;
  RingPoly p1_;
  std::vector<ShoupConstant> p0_ntt_;
  std::vector<ShoupConstant> p1_ntt_;
};

struct KeyPair {
  SecretKey secret;
  PublicKey public_key;
};

class Ciphertext {
 public:
  Ciphertext() = default;
  Ciphertext(BfvContextPtr ctx, std::vector<RingPoly> parts, unsigned mult_depth = 0);

  const BfvContextPtr& context() const { return ctx_; }
  const std::vector<RingPoly>& parts() const { return parts_; }
  std::vector<RingPoly>& mutable_parts() { return parts_; }
  std::size_t size() const { return parts_.size(); }
  unsigned mult_depth() const { return mult_depth_; }

  friend bool operator==(const Ciphertext& a, const Ciphertext& b) {
    return a.ctx_->params() == b.ctx_->params() && a.parts_ == b.parts_ &&
           a.mult_depth_ == b.mult_depth_;
  }

 private:
  BfvContextPtr ctx_;
  std::vector<RingPoly> parts_;
  unsigned mult_depth_ = 0;
};

KeyPair keygen(const BfvContextPtr& ctx, Prng& rng);

// ||p0 + p1 * s||_inf; small for a well-formed key pair.
i64 public_key_error_norm(const KeyPair& keys);

Ciphertext encrypt(const PublicKey& pk, i64 m, Prng& rng);
i64 decrypt(const SecretKey& sk, const Ciphertext& ct);

Ciphertext he_add(const Ciphertext& a, const Ciphertext& b);
Ciphertext he_add_plain(const Ciphertext& a, i64 m);
Ciphertext he_mul_plain(const Ciphertext& a, i64 m);
Ciphertext he_mul_ct(const Ciphertext& a, const Ciphertext& b);

// Largest prime q = 1 mod 2n within the homomorphic-encryption-standard
// modulus bound for (n, security_bits), capped at 62 bits.
u64 select_q(std::size_t n, int security_bits = 128);
int max_modulus_bits(std::size_t n, int security_bits);

// Secret-key introspection. A real server cannot observe any of this.
namespace debug {

// Budgets are reported in steps of this many bits; headroom below one step
// reads as exhausted.
inline constexpr double kNoiseBudgetResolution = 1.0 / 64.0;

struct Decryption {
  i64 value = 0;
  double noise_budget = 0.0;  // bits
};

// log2(q / (2 ||[t * c(s)]_q||_inf)), floored to the resolution, clamped at
// 0. Also 0 when a non-constant coefficient decodes to a nonzero plaintext.
double noise_budget(const SecretKey& sk, const Ciphertext& ct);
Decryption decrypt_with_noise(const SecretKey& sk, const Ciphertext& ct);
double noise_budget_from_phase(const BfvContext& ctx, const RingPoly& phase);

}  // namespace debug

}  // namespace spyking::bfv
