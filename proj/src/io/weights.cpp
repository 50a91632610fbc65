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

#include "spyking/io/weights.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include <zlib.h>

#include "spyking/ring/prng.hpp"

namespace spyking::io {

namespace {

using Kind = WeightFormatError::Kind;

class Writer {
 public:
  void bytes(const void* p, std::size_t n) {
    const auto* b = static_cast<const std::uint8_t*>(p);
    out_.insert(out_.end(), b, b + n);
  }
  void u8(std::uint8_t v) { out_.push_back(v); }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void f32(float v) { u32(std::bit_cast<std::uint32_t>(v)); }
  std::vector<std::uint8_t>& data() { return out_; }

 private:
  std::vector<std::uint8_t> out_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> b) : b_(b) {}

  std::size_t remaining() const { return b_.size() - pos_; }
  void need(std::size_t n) const {
    if (remaining() < n) throw WeightFormatError(Kind::Truncated, "weight container truncated");
  }
  std::uint8_t u8() {
    need(1);
    return b_[pos_++];
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= std::uint32_t{b_[pos_ + i]} << (8 * i);
    pos_ += 4;
    return v;
  }
  float f32() { return std::bit_cast<float>(u32()); }
  std::string str(std::size_t n) {
    need(n);
    std::string s(reinterpret_cast<const char*>(b_.data() + pos_), n);
    pos_ += n;
    return s;
  }

 private:
  std::span<const std::uint8_t> b_;
  std::size_t pos_ = 0;
};

}  // namespace

std::uint32_t crc32(std::span<const std::uint8_t> bytes) {
  return static_cast<std::uint32_t>(
      ::crc32(::crc32(0L, Z_NULL, 0), bytes.data(), static_cast<uInt>(bytes.size())));
}

const nn::NamedTensor* WeightContainer::find(const std::string& name) const {
  for (const auto& t : tensors) {
    if (t.name == name) return &t;
  }
  return nullptr;
}

std::vector<std::uint8_t> encode_weights(const WeightContainer& container) {
  Writer w;
  w.bytes(kWeightMagic, sizeof(kWeightMagic));
  w.u8(kWeightVersion);
  w.u32(static_cast<std::uint32_t>(container.tensors.size()));
  for (const auto& t : container.tensors) {
    if (t.dims.size() > 255) {
      throw WeightFormatError(Kind::DimensionOverflow, t.name + ": rank above 255");
    }
    if (t.values.size() != t.element_count()) {
      throw WeightFormatError(Kind::DimensionOverflow, t.name + ": payload does not match dims");
    }
    w.u32(static_cast<std::uint32_t>(t.name.size()));
    w.bytes(t.name.data(), t.name.size());
    w.u8(static_cast<std::uint8_t>(t.dims.size()));
    for (auto d : t.dims) w.u32(d);
    for (float v : t.values) w.f32(v);
  }
  w.u32(crc32(w.data()));
  return std::move(w.data());
}

WeightContainer decode_weights(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < sizeof(kWeightMagic) ||
      std::memcmp(bytes.data(), kWeightMagic, sizeof(kWeightMagic)) != 0) {
    throw WeightFormatError(Kind::BadMagic, "not a SPYKW001 weight container");
  }
  if (bytes.size() < sizeof(kWeightMagic) + 1 + 4 + 4) {
    throw WeightFormatError(Kind::Truncated, "weight container truncated");
  }
  const auto body = bytes.first(bytes.size() - 4);
  Reader tail(bytes.last(4));
  if (crc32(body) != tail.u32()) {
    throw WeightFormatError(Kind::CrcMismatch, "weight container CRC mismatch");
  }

  Reader r(body);
  r.str(sizeof(kWeightMagic));
  const std::uint8_t version = r.u8();
  if (version != kWeightVersion) {
    throw WeightFormatError(Kind::UnsupportedVersion, "unsupported weight version " + std::to_string(version));
  }
  const std::uint32_t count = r.u32();
  WeightContainer c;
  for (std::uint32_t i = 0; i < count; ++i) {
    nn::NamedTensor t;
    const std::uint32_t name_len = r.u32();
    t.name = r.str(name_len);
    const std::uint8_t rank = r.u8();
    std::uint64_t elements = 1;
    for (std::uint8_t k = 0; k < rank; ++k) {
      const std::uint32_t d = r.u32();
      t.dims.push_back(d);
      elements *= d;
      if (elements > bytes.size()) {
        throw WeightFormatError(Kind::DimensionOverflow, t.name + ": dimensions exceed payload");
      }
    }
    if (elements * 4 > r.remaining()) {
      throw WeightFormatError(Kind::DimensionOverflow, t.name + ": dimensions exceed payload");
    }
    t.values.resize(elements);
    for (auto& v : t.values) v = r.f32();
    c.tensors.push_back(std::move(t));
  }
  if (r.remaining() != 0) throw WeightFormatError(Kind::Truncated, "trailing bytes before CRC");
  return c;
}

void write_weights(const std::filesystem::path& path, const WeightContainer& container) {
  const auto bytes = encode_weights(container);
  std::ofstream out(path, std::ios::binary);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw WeightFormatError(Kind::Io, "cannot write " + path.string());
}

WeightContainer read_weights(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw WeightFormatError(Kind::Io, "cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode_weights(bytes);
}

WeightContainer fixture_weights(const std::string& model, std::uint64_t seed) {
  const nn::NetworkSpec spec = nn::model_architecture(model);
  Prng rng(derive_seed(seed, {0x5759ULL}));
  WeightContainer c;
  for (const auto& info : spec.parameters()) {
    nn::NamedTensor t{info.name, info.dims, {}};
    t.values.resize(t.element_count());
    for (auto& v : t.values) {
      const double u = static_cast<double>(rng.next() >> 11) * 0x1.0p-53;
      v = static_cast<float>(u - 0.5);
    }
    c.tensors.push_back(std::move(t));
  }
  return c;
}

nn::Model load_model(const std::string& model, const WeightContainer& container) {
  return nn::bind_weights(nn::model_architecture(model), container.tensors);
}

}  // namespace spyking::io
