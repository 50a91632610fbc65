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

#include "spyking/io/idx.hpp"

#include <fstream>

#include <zlib.h>

namespace spyking::io {

namespace {

std::uint32_t read_be32(std::span<const std::uint8_t> b, std::size_t off) {
  return (std::uint32_t{b[off]} << 24) | (std::uint32_t{b[off + 1]} << 16) |
         (std::uint32_t{b[off + 2]} << 8) | std::uint32_t{b[off + 3]};
}

void put_be32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  out.push_back(static_cast<std::uint8_t>(v >> 24));
  out.push_back(static_cast<std::uint8_t>(v >> 16));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
  out.push_back(static_cast<std::uint8_t>(v));
}

void require_bytes(std::span<const std::uint8_t> b, std::size_t needed, const char* what) {
  if (b.size() < needed) {
    throw IdxError(IdxError::Kind::Truncated, std::string("truncated IDX ") + what + ": need " +
                                                  std::to_string(needed) + " bytes, have " +
                                                  std::to_string(b.size()));
  }
}

void write_bytes(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IdxError(IdxError::Kind::Io, "cannot write " + path.string());
}

}  // namespace

nn::Tensor3<float> IdxImageSet::image_tensor(std::size_t index) const {
  const auto& img = images.at(index);
  nn::Tensor3<float> t(nn::Shape3{1, rows, cols});
  for (std::size_t i = 0; i < img.size(); ++i) t.data[i] = static_cast<float>(img[i]) / 255.0f;
  return t;
}

std::vector<std::vector<std::uint8_t>> parse_idx_images(std::span<const std::uint8_t> bytes,
                                                         std::size_t* rows_out,
                                                         std::size_t* cols_out) {
  require_bytes(bytes, 4, "image header");
  const std::uint32_t magic = read_be32(bytes, 0);
  if (magic != kIdxImageMagic) {
    throw IdxError(IdxError::Kind::BadMagic, "bad IDX image magic " + std::to_string(magic));
  }
  require_bytes(bytes, 16, "image header");
  const std::size_t count = read_be32(bytes, 4);
  const std::size_t rows = read_be32(bytes, 8);
  const std::size_t cols = read_be32(bytes, 12);
  if (rows == 0 || cols == 0 || rows > 4096 || cols > 4096) {
    throw IdxError(IdxError::Kind::BadDimensions,
                   "implausible image dimensions " + std::to_string(rows) + "x" + std::to_string(cols));
  }
  const std::size_t pixels = rows * cols;
  if (count > (bytes.size() - 16) / pixels) {
    throw IdxError(IdxError::Kind::Truncated, "truncated IDX image payload: header declares " +
                                                  std::to_string(count) + " images");
  }
  std::vector<std::vector<std::uint8_t>> images(count);
  for (std::size_t i = 0; i < count; ++i) {
    const auto first = bytes.begin() + static_cast<std::ptrdiff_t>(16 + i * pixels);
    images[i].assign(first, first + static_cast<std::ptrdiff_t>(pixels));
  }
  if (rows_out) *rows_out = rows;
  if (cols_out) *cols_out = cols;
  return images;
}

std::vector<std::uint8_t> parse_idx_labels(std::span<const std::uint8_t> bytes) {
  require_bytes(bytes, 4, "label header");
  const std::uint32_t magic = read_be32(bytes, 0);
  if (magic != kIdxLabelMagic) {
    throw IdxError(IdxError::Kind::BadMagic, "bad IDX label magic " + std::to_string(magic));
  }
  require_bytes(bytes, 8, "label header");
  const std::size_t count = read_be32(bytes, 4);
  if (count > bytes.size() - 8) {
    throw IdxError(IdxError::Kind::Truncated, "truncated IDX label payload: header declares " +
                                                  std::to_string(count) + " labels");
  }
  std::vector<std::uint8_t> labels(bytes.begin() + 8, bytes.begin() + 8 + static_cast<std::ptrdiff_t>(count));
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] > 9) {
      throw IdxError(IdxError::Kind::BadLabel,
                     "label " + std::to_string(labels[i]) + " at index " + std::to_string(i));
    }
  }
  return labels;
}

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
  std::filesystem::path actual = path;
  if (!std::filesystem::exists(actual)) {
    std::filesystem::path gz = path;
    gz += ".gz";
    if (!std::filesystem::exists(gz)) {
      throw IdxError(IdxError::Kind::Io, "no such file: " + path.string() + "[.gz]");
    }
    actual = gz;
  }
  // gzread passes uncompressed files through unchanged.
  gzFile f = gzopen(actual.c_str(), "rb");
  if (!f) throw IdxError(IdxError::Kind::Io, "cannot open " + actual.string());
  std::vector<std::uint8_t> out;
  std::vector<std::uint8_t> chunk(1 << 16);
  int got;
  while ((got = gzread(f, chunk.data(), static_cast<unsigned>(chunk.size()))) > 0) {
    out.insert(out.end(), chunk.begin(), chunk.begin() + got);
  }
  const bool failed = got < 0;
  gzclose(f);
  if (failed) throw IdxError(IdxError::Kind::Io, "read error in " + actual.string());
  return out;
}

IdxImageSet read_idx(const std::filesystem::path& images_path,
                     const std::filesystem::path& labels_path) {
  IdxImageSet set;
  const auto image_bytes = read_file_bytes(images_path);
  const auto label_bytes = read_file_bytes(labels_path);
  set.images = parse_idx_images(image_bytes, &set.rows, &set.cols);
  set.labels = parse_idx_labels(label_bytes);
  if (set.images.size() != set.labels.size()) {
    throw IdxError(IdxError::Kind::CountMismatch,
                   std::to_string(set.images.size()) + " images but " +
                       std::to_string(set.labels.size()) + " labels");
  }
  return set;
}

IdxImageSet read_test_split(const std::filesystem::path& dir) {
  return read_idx(dir / "t10k-images-idx3-ubyte", dir / "t10k-labels-idx1-ubyte");
}

IdxImageSet read_train_split(const std::filesystem::path& dir) {
  return read_idx(dir / "train-images-idx3-ubyte", dir / "train-labels-idx1-ubyte");
}

std::vector<std::uint8_t> encode_idx_images(const IdxImageSet& set) {
  std::vector<std::uint8_t> out;
  put_be32(out, kIdxImageMagic);
  put_be32(out, static_cast<std::uint32_t>(set.count()));
  put_be32(out, static_cast<std::uint32_t>(set.rows));
  put_be32(out, static_cast<std::uint32_t>(set.cols));
  for (const auto& img : set.images) out.insert(out.end(), img.begin(), img.end());
  return out;
}

std::vector<std::uint8_t> encode_idx_labels(const IdxImageSet& set) {
  std::vector<std::uint8_t> out;
  put_be32(out, kIdxLabelMagic);
  put_be32(out, static_cast<std::uint32_t>(set.labels.size()));
  out.insert(out.end(), set.labels.begin(), set.labels.end());
  return out;
}

void write_idx(const IdxImageSet& set, const std::filesystem::path& images_path,
               const std::filesystem::path& labels_path) {
  write_bytes(images_path, encode_idx_images(set));
  write_bytes(labels_path, encode_idx_labels(set));
}

}  // namespace spyking::io
