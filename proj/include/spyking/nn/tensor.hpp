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

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace spyking::nn {

class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Channel-major activation shape; vectors are (features, 1, 1).
struct Shape3 {
  std::size_t c = 0;
  std::size_t h = 1;
  std::size_t w = 1;

  std::size_t size() const { return c * h * w; }
  bool operator==(const Shape3&) const = default;
  std::string describe() const {
    return std::to_string(c) + "x" + std::to_string(h) + "x" + std::to_string(w);
  }
};

template <typename T>
struct Tensor3 {
  Shape3 shape;
  std::vector<T> data;

  Tensor3() = default;
  explicit Tensor3(Shape3 s, T fill = T{}) : shape(s), data(s.size(), fill) {}
  Tensor3(Shape3 s, std::vector<T> values) : shape(s), data(std::move(values)) {
    if (data.size() != shape.size()) throw ShapeError("tensor data does not match shape");
  }

  T& at(std::size_t c, std::size_t y, std::size_t x) { return data[(c * shape.h + y) * shape.w + x]; }
  const T& at(std::size_t c, std::size_t y, std::size_t x) const {
    return data[(c * shape.h + y) * shape.w + x];
  }
};

// A named float32 parameter tensor with arbitrary rank, as stored on disk.
struct NamedTensor {
  std::string name;
  std::vector<std::uint32_t> dims;
  std::vector<float> values;

  std::size_t element_count() const {
    return std::accumulate(dims.begin(), dims.end(), std::size_t{1}, std::multiplies<>());
  }
  bool operator==(const NamedTensor&) const = default;
};

}  // namespace spyking::nn
