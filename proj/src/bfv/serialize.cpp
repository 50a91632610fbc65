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

#include "spyking/bfv/serialize.hpp"

#include <array>
#include <cstring>
#include <istream>
#include <ostream>

namespace spyking::bfv {

namespace {

template <typename T>
void put(std::ostream& out, T value) {
  std::array<char, sizeof(T)> bytes{};
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    bytes[i] = static_cast<char>((static_cast<u64>(value) >> (8 * i)) & 0xff);
  }
  out.write(bytes.data(), bytes.size());
}

template <typename T>
T get(std::istream& in) {
  std::array<unsigned char, sizeof(T)> bytes{};
  if (!in.read(reinterpret_cast<char*>(bytes.data()), bytes.size())) {
    throw SerializationError("unexpected end of stream");
  }
  u64 v = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<u64>(bytes[i]) << (8 * i);
  return static_cast<T>(v);
}

void write_header(std::ostream& out, SerialKind kind, const BfvParams& p) {
  out.write(kSerialMagic, sizeof(kSerialMagic));
  put<std::uint8_t>(out, kSerialVersion);
  put<std::uint8_t>(out, static_cast<std::uint8_t>(kind));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(p.ring.n));
  put<std::uint64_t>(out, p.ring.q);
  put<std::uint64_t>(out, p.t);
}

void write_parts(std::ostream& out, const std::vector<const RingPoly*>& parts) {
  put<std::uint32_t>(out, static_cast<std::uint32_t>(parts.size()));
  for (const RingPoly* p : parts) {
    put<std::uint32_t>(out, static_cast<std::uint32_t>(p->size()));
    for (u64 c : p->coeffs()) put<std::uint64_t>(out, c);
  }
  if (!out) throw SerializationError("write failed");
}

std::vector<RingPoly> read_parts(std::istream& in, const BfvContext& ctx) {
  const auto count = get<std::uint32_t>(in);
  if (count > 1024) throw SerializationError("implausible part count");
  std::vector<RingPoly> parts;
  parts.reserve(count);
  for (std::uint32_t i = 0; i < count; ++i) {
    const auto len = get<std::uint32_t>(in);
    if (len != ctx.n()) throw SerializationError("part length does not match ring degree");
    std::vector<u64> coeffs(len);
    for (auto& c : coeffs) {
      c = get<std::uint64_t>(in);
      if (c >= ctx.q()) throw SerializationError("coefficient not reduced mod q");
    }
    parts.emplace_back(ctx.ring(), std::move(coeffs));
  }
  return parts;
}

void require_match(const BfvParams& stored, const BfvContextPtr& ctx) {
  if (stored != ctx->params()) {
    throw ParameterMismatch("serialized parameters " + stored.describe() +
                            " do not match context " + ctx->params().describe());
  }
}

}  // namespace

BfvParams read_header(std::istream& in, SerialKind expected) {
  char magic[sizeof(kSerialMagic)];
  if (!in.read(magic, sizeof(magic))) throw SerializationError("unexpected end of stream");
  if (std::memcmp(magic, kSerialMagic, sizeof(magic)) != 0) {
    throw SerializationError("bad magic: not a BFVSER01 stream");
  }
  const auto version = get<std::uint8_t>(in);
  if (version != kSerialVersion) {
    throw SerializationError("unsupported version " + std::to_string(version));
  }
  const auto kind = get<std::uint8_t>(in);
  if (kind != static_cast<std::uint8_t>(expected)) {
    throw SerializationError("unexpected object kind " + std::to_string(kind));
  }
  BfvParams p;
  p.ring.n = get<std::uint32_t>(in);
  p.ring.q = get<std::uint64_t>(in);
  p.t = get<std::uint64_t>(in);
  return p;
}

void write_ciphertext(std::ostream& out, const Ciphertext& ct) {
  write_header(out, SerialKind::Ciphertext, ct.context()->params());
  put<std::uint32_t>(out, ct.mult_depth());
  std::vector<const RingPoly*> parts;
  for (const auto& p : ct.parts()) parts.push_back(&p);
  write_parts(out, parts);
}

void write_public_key(std::ostream& out, const PublicKey& pk) {
  write_header(out, SerialKind::PublicKey, pk.context()->params());
  write_parts(out, {&pk.p0(), &pk.p1()});
}

void write_secret_key(std::ostream& out, const SecretKey& sk) {
  write_header(out, SerialKind::SecretKey, sk.context()->params());
  write_parts(out, {&sk.poly()});
}

Ciphertext read_ciphertext(std::istream& in, const BfvContextPtr& ctx) {
  require_match(read_header(in, SerialKind::Ciphertext), ctx);
  const auto depth = get<std::uint32_t>(in);
  auto parts = read_parts(in, *ctx);
  if (parts.size() < 2) throw SerializationError("ciphertext needs at least two parts");
  return Ciphertext(ctx, std::move(parts), depth);
}

PublicKey read_public_key(std::istream& in, const BfvContextPtr& ctx) {
  require_match(read_header(in, SerialKind::PublicKey), ctx);
  auto parts = read_parts(in, *ctx);
  if (parts.size() != 2) throw SerializationError("public key needs two parts");
  return PublicKey(ctx, std::move(parts[0]), std::move(parts[1]));
}

SecretKey read_secret_key(std::istream& in, const BfvContextPtr& ctx) {
  require_match(read_header(in, SerialKind::SecretKey), ctx);
  auto parts = read_parts(in, *ctx);
  if (parts.size() != 1) throw SerializationError("secret key needs one part");
  return SecretKey(ctx, std::move(parts[0]));
}

}  // namespace spyking::bfv
