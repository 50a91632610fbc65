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

// FashionMNIST IDX files (big-endian, optionally gzip-compressed).

#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "spyking/nn/tensor.hpp"

namespace spyking::io {

class IdxError : public std::runtime_error {
 public:
  enum class Kind { Io, BadMagic, Truncated, BadDimensions, CountMismatch, BadLabel };

  IdxError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

inline constexpr std::uint32_t kIdxImageMagic = 0x00000803;
inline constexpr std::uint32_t kIdxLabelMagic = 0x00000801;

struct IdxImageSet {
  std::size_t rows = 28;
  std::size_t cols = 28;
  std::vector<std::vector<std::uint8_t>> images;  // rows * cols bytes each
  std::vector<std::uint8_t> labels;               // 0-9

  std::size_t count() const { return images.size(); }
  // Pixels scaled to [0, 1], shape 1 x rows x cols.
  nn::Tensor3<float> image_tensor(std::size_t index) const;
};

// Parsers over in-memory bytes; each failure is a typed IdxError.
std::vector<std::vector<std::uint8_t>> parse_idx_images(std::span<const std::uint8_t> bytes,
                                                         std::size_t* rows = nullptr,
                                                         std::size_t* cols = nullptr);
std::vector<std::uint8_t> parse_idx_labels(std::span<const std::uint8_t> bytes);

// Whole file, decompressing gzip transparently. Falls back to path + ".gz".
std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path);

IdxImageSet read_idx(const std::filesystem::path& images_path,
                     const std::filesystem::path& labels_path);

// The 10k test split from a dataset directory in the standard layout.
IdxImageSet read_test_split(const std::filesystem::path& dataset_dir);
IdxImageSet read_train_split(const std::filesystem::path& dataset_dir);

std::vector<std::uint8_t> encode_idx_images(const IdxImageSet& set);
std::vector<std::uint8_t> encode_idx_labels(const IdxImageSet& set);
void write_idx(const IdxImageSet& set, const std::filesystem::path& images_path,
               const std::filesystem::path& labels_path);

}  // namespace spyking::io
