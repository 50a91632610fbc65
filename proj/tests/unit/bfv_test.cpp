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

#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "spyking/bfv/serialize.hpp"

namespace spyking::bfv {
namespace {

// Centered modular reference, written independently of BfvContext.
i64 centered_mod(i64 v, i64 t) {
  i64 r = ((v % t) + t) % t;
  return r >= t - t / 2 ? r - t : r;
}

i64 random_plain(std::mt19937_64& gen, u64 t) {
  std::uniform_int_distribution<i64> dist(-static_cast<i64>(t / 2),
                                          static_cast<i64>(t - 1 - t / 2));
  return dist(gen);
}

struct Fixture {
  explicit Fixture(u64 t, std::uint64_t seed = 1, std::size_t n = 1024)
      : ctx(BfvContext::create(n, select_q(n), t)), rng(seed), keys(keygen(ctx, rng)) {}
  Ciphertext enc(i64 m) { return encrypt(keys.public_key, m, rng); }
  i64 dec(const Ciphertext& ct) const { return decrypt(keys.secret, ct); }
  double nb(const Ciphertext& ct) const { return debug::noise_budget(keys.secret, ct); }

  BfvContextPtr ctx;
  Prng rng;
  KeyPair keys;
};

TEST(BfvParams, Validation) {
  EXPECT_THROW(BfvContext::create(1024, select_q(1024), 1), std::invalid_argument);
  EXPECT_THROW(BfvContext::create(16, 97, 97), std::invalid_argument);
  auto ctx = BfvContext::create(1024, select_q(1024), 100);
  EXPECT_EQ(ctx->delta(), select_q(1024) / 100);
  EXPECT_EQ(ctx->min_plain(), -50);
  EXPECT_EQ(ctx->max_plain(), 49);
}

TEST(Keygen, DeterministicForSeed) {
  auto ctx = BfvContext::create(1024, select_q(1024), 50);
  Prng r1(9);
  Prng r2(9);
  const KeyPair k1 = keygen(ctx, r1);
  const KeyPair k2 = keygen(ctx, r2);
  EXPECT_EQ(k1.secret.poly(), k2.secret.poly());
  EXPECT_EQ(k1.public_key.p0(), k2.public_key.p0());
  EXPECT_EQ(k1.public_key.p1(), k2.public_key.p1());
}

TEST(Keygen, RlweRelationHasSmallError) {
  auto ctx = BfvContext::create(1024, select_q(1024), 50);
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    Prng rng(seed);
    const KeyPair k = keygen(ctx, rng);
    ASSERT_LE(public_key_error_norm(k), 19) << seed;
  }
}

TEST(Keygen, DifferentSeedsDiffer) {
  auto ctx = BfvContext::create(1024, select_q(1024), 50);
  Prng r1(1);
  Prng r2(2);
  EXPECT_NE(keygen(ctx, r1).public_key.p1(), keygen(ctx, r2).public_key.p1());
}

TEST(Encrypt, RoundTripExamples) {
  Fixture f100(100);
  EXPECT_EQ(f100.dec(f100.enc(0)), 0);
  EXPECT_EQ(f100.dec(f100.enc(-18)), -18);
  Fixture f50(50);
  EXPECT_EQ(f50.dec(f50.enc(7)), 7);
}

TEST(Encrypt, RangeChecked) {
  Fixture f(100);
  EXPECT_THROW(f.enc(50), PlaintextRangeError);
  EXPECT_THROW(f.enc(-51), PlaintextRangeError);
  EXPECT_NO_THROW(f.enc(-50));
  EXPECT_NO_THROW(f.enc(49));
}

TEST(Encrypt, ExhaustiveRoundTripSmallT) {
  for (u64 t : {2ULL, 3ULL, 10ULL, 97ULL, 100ULL}) {
    Fixture f(t, t);
    for (i64 m = f.ctx->min_plain(); m <= f.ctx->max_plain(); ++m) {
      const Ciphertext ct = f.enc(m);
      ASSERT_GT(f.nb(ct), 0.0);
      ASSERT_EQ(f.dec(ct), m) << "t=" << t;
    }
  }
}

TEST(Encrypt, SampledRoundTripAcrossT) {
  std::mt19937_64 gen(77);
  for (u64 t : {50ULL, 500ULL, 5000ULL}) {
    Fixture f(t, t + 1);
    for (int i = 0; i < 1000; ++i) {
      const i64 m = random_plain(gen, t);
      ASSERT_EQ(f.dec(f.enc(m)), m);
    }
  }
}

TEST(HeAdd, WorkedExample) {
  Fixture f(100);
  EXPECT_EQ(f.dec(he_add(f.enc(2), f.enc(-18))), -16);
}

TEST(HeAdd, ZeroIsIdentity) {
  Fixture f(100);
  EXPECT_EQ(f.dec(he_add(f.enc(33), f.enc(0))), 33);
}

TEST(HeAdd, MatchesModularOracle) {
  Fixture f(97);
  std::mt19937_64 gen(5);
  for (int i = 0; i < 500; ++i) {
    const i64 a = random_plain(gen, 97);
    const i64 b = random_plain(gen, 97);
    const Ciphertext sum = he_add(f.enc(a), f.enc(b));
    ASSERT_EQ(f.dec(sum), centered_mod(a + b, 97));
  }
}

TEST(HeAdd, CostsAtMostOneBit) {
  Fixture f(500);
  std::mt19937_64 gen(6);
  for (int i = 0; i < 100; ++i) {
    const Ciphertext a = f.enc(random_plain(gen, 500));
    const Ciphertext b = f.enc(random_plain(gen, 500));
    ASSERT_GE(f.nb(he_add(a, b)), std::min(f.nb(a), f.nb(b)) - 1.0);
  }
}

TEST(HeAdd, ParameterMismatch) {
  Fixture a(100);
  Fixture b(50);
  EXPECT_THROW(he_add(a.enc(1), b.enc(1)), ParameterMismatch);
  EXPECT_THROW(decrypt(a.keys.secret, b.enc(1)), ParameterMismatch);
}

TEST(HeAddPlain, Examples) {
  Fixture f(200);
  EXPECT_EQ(f.dec(he_add_plain(f.enc(10), -90)), -80);
  EXPECT_EQ(f.dec(he_add_plain(f.enc(-7), 0)), -7);
  EXPECT_THROW(he_add_plain(f.enc(1), 100), PlaintextRangeError);
}

TEST(HeAddPlain, MatchesModularOracle) {
  Fixture f(200);
  std::mt19937_64 gen(8);
  for (int i = 0; i < 500; ++i) {
    const i64 a = random_plain(gen, 200);
    const i64 m = random_plain(gen, 200);
    ASSERT_EQ(f.dec(he_add_plain(f.enc(a), m)), centered_mod(a + m, 200));
  }
}

TEST(HeMulPlain, Examples) {
  Fixture f(200);
  EXPECT_EQ(f.dec(he_mul_plain(f.enc(-16), 5)), -80);
  EXPECT_EQ(f.dec(he_mul_plain(f.enc(41), 1)), 41);
  EXPECT_THROW(he_mul_plain(f.enc(1), -101), PlaintextRangeError);
}

TEST(HeMulPlain, MatchesOracleAndConsumesBudget) {
  Fixture f(200);
  std::mt19937_64 gen(10);
  for (int i = 0; i < 500; ++i) {
    const i64 a = random_plain(gen, 200);
    i64 m = random_plain(gen, 200);
    if (std::abs(m) < 2) m = 2;
    const Ciphertext ct = f.enc(a);
    const Ciphertext prod = he_mul_plain(ct, m);
    ASSERT_EQ(f.dec(prod), centered_mod(a * m, 200));
    ASSERT_LT(f.nb(prod), f.nb(ct));
  }
}

TEST(HeMulPlain, EqualsNegacyclicProductWithConstantPolynomial) {
  Fixture f(200);
  const Ciphertext ct = f.enc(17);
  const Ciphertext prod = he_mul_plain(ct, -37);
  const RingPoly m = RingPoly::constant(f.ctx->ring(), -37);
  for (std::size_t i = 0; i < ct.size(); ++i) {
    EXPECT_EQ(prod.parts()[i], negacyclic_mul_schoolbook(ct.parts()[i], m));
  }
}

// A 27-bit modulus at n = 1024 leaves no room for a ciphertext-ciphertext
// product, so these run at n = 2048 with the 54-bit modulus.
TEST(HeMulCt, Examples) {
  Fixture f(100, 1, 2048);
  EXPECT_EQ(f.dec(he_mul_ct(f.enc(3), f.enc(-6))), -18);
  EXPECT_EQ(f.dec(he_mul_ct(f.enc(1), f.enc(-43))), -43);
  // Worked example: 2 + 3 * (-6) evaluated entirely on ciphertexts.
  EXPECT_EQ(f.dec(he_add(f.enc(2), he_mul_ct(f.enc(3), f.enc(-6)))), -16);
  const Ciphertext p = he_mul_ct(f.enc(3), f.enc(4));
  EXPECT_EQ(p.size(), 3u);
  EXPECT_EQ(p.mult_depth(), 1u);
}

TEST(HeMulCt, MatchesModularOracle) {
  Fixture f(97, 1, 2048);
  std::mt19937_64 gen(12);
  for (int i = 0; i < 200; ++i) {
    const i64 a = random_plain(gen, 97);
    const i64 b = random_plain(gen, 97);
    const Ciphertext ca = f.enc(a);
    const Ciphertext cb = f.enc(b);
    const Ciphertext prod = he_mul_ct(ca, cb);
    ASSERT_GT(f.nb(prod), 0.0);
    ASSERT_EQ(f.dec(prod), centered_mod(a * b, 97));
    ASSERT_LT(f.nb(prod), std::min(f.nb(ca), f.nb(cb)));
  }
}

TEST(HeMulCt, ExhaustsSmallModulus) {
  Fixture f(100);
  const auto d = debug::decrypt_with_noise(f.keys.secret, he_mul_ct(f.enc(3), f.enc(-6)));
  EXPECT_EQ(d.noise_budget, 0.0);
}

TEST(HeMulCt, PartCountGrowsWithoutRelinearization) {
  auto big = BfvContext::create(2048, select_q(2048), 17);
  Prng rng(4);
  const KeyPair keys = keygen(big, rng);
  const Ciphertext a = encrypt(keys.public_key, 3, rng);
  const Ciphertext b = encrypt(keys.public_key, -5, rng);
  const Ciphertext c = encrypt(keys.public_key, 2, rng);
  const Ciphertext ab = he_mul_ct(a, b);
  const Ciphertext abc = he_mul_ct(ab, c);
  EXPECT_EQ(abc.size(), 4u);
  EXPECT_GT(debug::noise_budget(keys.secret, abc), 0.0);
  EXPECT_EQ(decrypt(keys.secret, abc), centered_mod(3 * -5 * 2, 17));
  EXPECT_EQ(decrypt(keys.secret, he_add(abc, a)), centered_mod(-30 + 3, 17));
}

TEST(NoiseBudget, FreshIsPositive) {
  Fixture f(50);
  EXPECT_GT(f.nb(f.enc(3)), 0.0);
}

TEST(NoiseBudget, StrictlyDecreasesUnderPlainMultiplication) {
  Fixture f(50);
  std::mt19937_64 gen(14);
  for (int i = 0; i < 200; ++i) {
    const Ciphertext ct = f.enc(random_plain(gen, 50));
    i64 m = random_plain(gen, 50);
    if (std::abs(m) < 2) m = -3;
    ASSERT_LT(f.nb(he_mul_plain(ct, m)), f.nb(ct));
  }
}

TEST(NoiseBudget, ClampsAtZeroForMaximalNoise) {
  Fixture f(50);
  const u64 q = f.ctx->q();
  // Choose c0 so that t * c0 = (q - 1) / 2 mod q: the largest possible noise.
  const u64 t_inv = pow_mod(50, q - 2, q);
  std::vector<u64> c0(f.ctx->n(), 0);
  c0[0] = mul_mod((q - 1) / 2, t_inv, q);
  const Ciphertext ct(f.ctx, {RingPoly(f.ctx->ring(), c0), RingPoly(f.ctx->ring())});
  EXPECT_EQ(f.nb(ct), 0.0);
}

TEST(NoiseBudget, ExhaustionCorruptsDecryption) {
  Fixture f(50);
  Ciphertext ct = f.enc(3);
  i64 expected = 3;
  bool mismatch_seen = false;
  for (int step = 0; step < 40 && !mismatch_seen; ++step) {
    ct = he_mul_plain(ct, 23);
    expected = centered_mod(expected * 23, 50);
    const auto d = debug::decrypt_with_noise(f.keys.secret, ct);
    if (d.noise_budget > 0) {
      ASSERT_EQ(d.value, expected) << "step " << step;
    } else if (d.value != expected) {
      mismatch_seen = true;
    }
  }
  EXPECT_TRUE(mismatch_seen);
}

TEST(NoiseBudget, NoMismatchWhileBudgetRemains) {
  std::mt19937_64 gen(17);
  for (u64 t : {50u, 500u, 5000u}) {
    Fixture f(t, t);
    for (int ladder = 0; ladder < 300; ++ladder) {
      i64 expected = random_plain(gen, t);
      Ciphertext ct = f.enc(expected);
      for (int step = 0; step < 12; ++step) {
        i64 factor = 0;
        while (std::abs(factor) < 2) factor = random_plain(gen, std::min<u64>(t, 64));
        ct = he_mul_plain(ct, factor);
        expected = centered_mod(expected * factor, static_cast<i64>(t));
        const auto d = debug::decrypt_with_noise(f.keys.secret, ct);
        if (d.noise_budget <= 0) break;
        ASSERT_EQ(d.value, expected) << "t=" << t << " ladder " << ladder << " step " << step;
      }
    }
  }
}

TEST(NoiseBudget, WrappedNonConstantCoefficientReadsZero) {
  Fixture f(50);
  const u64 delta = f.ctx->delta();
  std::vector<u64> c0(f.ctx->n(), 0);
  c0[5] = 3 * delta + 1;
  const Ciphertext ct(f.ctx, {RingPoly(f.ctx->ring(), c0), RingPoly(f.ctx->ring())});
  EXPECT_EQ(f.nb(ct), 0.0);
  c0[5] = 1;
  EXPECT_GT(f.nb(Ciphertext(f.ctx, {RingPoly(f.ctx->ring(), c0), RingPoly(f.ctx->ring())})), 0.0);
}

TEST(SelectQ, N1024PrimeWithinBound) {
  const u64 q = select_q(1024, 128);
  EXPECT_LT(q, u64{1} << 27);
  EXPECT_EQ(q % 2048, 1u);
  auto trial_prime = [](u64 n) {
    for (u64 d = 2; d * d <= n; ++d) {
      if (n % d == 0) return false;
    }
    return n > 1;
  };
  EXPECT_TRUE(trial_prime(q));
  // No larger candidate below the bound is prime.
  for (u64 c = q + 2048; c < (u64{1} << 27); c += 2048) EXPECT_FALSE(trial_prime(c)) << c;
  EXPECT_EQ(q, 134215681u);
}

TEST(SelectQ, DeterministicAndMonotone) {
  EXPECT_EQ(select_q(1024), select_q(1024));
  EXPECT_GT(select_q(2048), select_q(1024));
  EXPECT_GT(select_q(4096), select_q(2048));
  EXPECT_LT(select_q(4096), u64{1} << 62);
  EXPECT_LT(select_q(1024, 192), select_q(1024, 128));
  EXPECT_THROW(select_q(512), std::invalid_argument);
  EXPECT_THROW(select_q(1024, 100), std::invalid_argument);
}

TEST(Serialization, CiphertextAndKeysRoundTrip) {
  Fixture f(100, 1, 2048);
  const Ciphertext ct = he_mul_ct(f.enc(5), f.enc(-7));
  std::stringstream buf;
  write_ciphertext(buf, ct);
  write_public_key(buf, f.keys.public_key);
  write_secret_key(buf, f.keys.secret);
  const Ciphertext ct2 = read_ciphertext(buf, f.ctx);
  const PublicKey pk2 = read_public_key(buf, f.ctx);
  const SecretKey sk2 = read_secret_key(buf, f.ctx);
  EXPECT_EQ(ct2, ct);
  EXPECT_EQ(pk2.p0(), f.keys.public_key.p0());
  EXPECT_EQ(decrypt(sk2, ct2), -35);
}

TEST(Serialization, HeaderLayout) {
  Fixture f(100);
  std::stringstream buf;
  write_ciphertext(buf, f.enc(1));
  const std::string bytes = buf.str();
  ASSERT_GE(bytes.size(), 30u);
  EXPECT_EQ(bytes.substr(0, 8), "BFVSER01");
  EXPECT_EQ(bytes[8], 1);   // version
  EXPECT_EQ(bytes[9], 1);   // ciphertext
  EXPECT_EQ(static_cast<unsigned char>(bytes[10]), 0x00);  // n = 1024 = 0x400 LE
  EXPECT_EQ(static_cast<unsigned char>(bytes[11]), 0x04);
  // header(30) + depth(4) + count(4) + 2 * (len(4) + 1024 * 8)
  EXPECT_EQ(bytes.size(), 30u + 4 + 4 + 2 * (4 + 1024 * 8));
}

TEST(Serialization, RejectsCorruptInput) {
  Fixture f(100);
  std::stringstream buf;
  write_ciphertext(buf, f.enc(1));
  std::string bytes = buf.str();
  std::string bad_magic = bytes;
  bad_magic[0] = 'X';
  std::stringstream s1(bad_magic);
  EXPECT_THROW(read_ciphertext(s1, f.ctx), SerializationError);
  std::stringstream s2(bytes.substr(0, bytes.size() - 5));
  EXPECT_THROW(read_ciphertext(s2, f.ctx), SerializationError);
  std::stringstream s3(bytes);
  EXPECT_THROW(read_ciphertext(s3, BfvContext::create(1024, select_q(1024), 50)),
               ParameterMismatch);
}

}  // namespace
}  // namespace spyking::bfv
