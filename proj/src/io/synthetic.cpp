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

#include "spyking/io/synthetic.hpp"

#include <algorithm>
#include <array>

#include "spyking/ring/prng.hpp"

namespace spyking::io {

namespace {

struct Ellipse {
  double cy, cx, ry, rx;
};

void draw(std::vector<std::uint8_t>& img, std::size_t rows, std::size_t cols, const Ellipse& e,
          std::uint8_t level) {
  for (std::size_t y = 0; y < rows; ++y) {
    for (std::size_t x = 0; x < cols; ++x) {
      const double dy = (static_cast<double>(y) - e.cy) / e.ry;
      const double dx = (static_cast<double>(x) - e.cx) / e.rx;
      if (dy * dy + dx * dx <= 1.0) {
        auto& px = img[y * cols + x];
        px = std::max(px, level);
      }
    }
  }
}

double signed_jitter(Prng& rng, std::uint64_t span) {
  return static_cast<double>(rng.uniform_below(2 * span + 1)) - static_cast<double>(span);
}

}  // namespace

IdxImageSet synthetic_images(std::size_t count, std::uint64_t seed) {
  IdxImageSet set;
  for (std::size_t i = 0; i < count; ++i) {
    Prng rng(derive_seed(seed, {0x1d7ULL, i}));
    std::vector<std::uint8_t> img(set.rows * set.cols, 0);
    const int blobs = 1 + static_cast<int>(rng.uniform_below(3));
    for (int b = 0; b < blobs; ++b) {
      const double cy = 4.0 + static_cast<double>(rng.uniform_below(20));
      const double cx = 4.0 + static_cast<double>(rng.uniform_below(20));
      const double ry = 2.0 + static_cast<double>(rng.uniform_below(9));
      const double rx = 2.0 + static_cast<double>(rng.uniform_below(9));
      const auto level = static_cast<std::uint8_t>(80 + rng.uniform_below(176));
      for (std::size_t y = 0; y < set.rows; ++y) {
        for (std::size_t x = 0; x < set.cols; ++x) {
          const double dy = (static_cast<double>(y) - cy) / ry;
          const double dx = (static_cast<double>(x) - cx) / rx;
          if (dy * dy + dx * dx <= 1.0) {
            auto& px = img[y * set.cols + x];
            px = std::max(px, level);
          }
        }
      }
    }
    set.images.push_back(std::move(img));
    set.labels.push_back(static_cast<std::uint8_t>(rng.uniform_below(10)));
  }
  return set;
}

IdxImageSet synthetic_classes(std::size_t count, std::uint64_t seed) {
  std::vector<std::array<Ellipse, 2>> prototypes;
  for (std::uint64_t k = 0; k < 10; ++k) {
    Prng rng(derive_seed(0xc1a55ULL, {k}));
    std::array<Ellipse, 2> p{};
    for (auto& e : p) {
      e.cy = 6.0 + static_cast<double>(rng.uniform_below(17));
      e.cx = 6.0 + static_cast<double>(rng.uniform_below(17));
      e.ry = 2.0 + static_cast<double>(rng.uniform_below(6));
      e.rx = 2.0 + static_cast<double>(rng.uniform_below(6));
    }
    prototypes.push_back(p);
  }
  IdxImageSet set;
  for (std::size_t i = 0; i < count; ++i) {
    Prng rng(derive_seed(seed, {0xc1a55ULL, i}));
    const auto label = static_cast<std::uint8_t>(rng.uniform_below(10));
    std::vector<std::uint8_t> img(set.rows * set.cols, 0);
    for (Ellipse e : prototypes[label]) {
      e.cy += signed_jitter(rng, 2);
      e.cx += signed_jitter(rng, 2);
      e.ry = std::max(1.5, e.ry + signed_jitter(rng, 1));
      e.rx = std::max(1.5, e.rx + signed_jitter(rng, 1));
      draw(img, set.rows, set.cols, e, static_cast<std::uint8_t>(120 + rng.uniform_below(136)));
    }
    for (auto& px : img) {
      if (rng.uniform_below(16) == 0) px = static_cast<std::uint8_t>(rng.uniform_below(96));
    }
    set.images.push_back(std::move(img));
    set.labels.push_back(label);
  }
  return set;
}

}  // namespace spyking::io
