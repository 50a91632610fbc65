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

// Weight container shared with the trainer.
//
//   magic "SPYKW001" | version u8 (= 1) | tensor count u32
//   per tensor: name length u32 | UTF-8 name | rank u8 | dims u32 x rank |
//               float32 payload, product(dims) values
//   CRC-32 (zlib polynomial) of every preceding byte, u32
//
// All integers and floats little-endian.

#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "spyking/nn/network.hpp"

namespace spyking::io {

class WeightFormatError : public std::runtime_error {
 public:
  enum class Kind { Io, BadMagic, UnsupportedVersion, Truncated, DimensionOverflow, CrcMismatch };

  WeightFormatError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

inline constexpr char kWeightMagic[8] = {'S', 'P', 'Y', 'K', 'W', '0', '0', '1'};
inline constexpr std::uint8_t kWeightVersion = 1;

struct WeightContainer {
  std::vector<nn::NamedTensor> tensors;

  const nn::NamedTensor* find(const std::string& name) const;
  bool operator==(const WeightContainer&) const = default;
};

std::vector<std::uint8_t> encode_weights(const WeightContainer& container);
WeightContainer decode_weights(std::span<const std::uint8_t> bytes);

void write_weights(const std::filesystem::path& path, const WeightContainer& container);
WeightContainer read_weights(const std::filesystem::path& path);

std::uint32_t crc32(std::span<const std::uint8_t> bytes);

// Deterministic uniform [-0.5, 0.5] weights for a model name (lenet5,
// slenet5, micronet, smicronet).
WeightContainer fixture_weights(const std::string& model, std::uint64_t seed);

// Binds a container to the named model's topology.
nn::Model load_model(const std::string& model, const WeightContainer& container);

}  // namespace spyking::io
