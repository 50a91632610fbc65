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

#include "spyking/he/affine.hpp"

#include <algorithm>
#include <stdexcept>

namespace spyking::he {

std::size_t AffineMap::max_fan_in() const {
  std::size_t m = 0;
  for (std::size_t r = 0; r < rows(); ++r) m = std::max(m, row_begin[r + 1] - row_begin[r]);
  return m;
}

i64 AffineMap::max_abs_weight() const {
  if (!weighted) return 1;
  i64 m = 0;
  for (i64 w : weights) m = std::max(m, w < 0 ? -w : w);
  return m;
}

AffineMap affine_map(const nn::QuantLayer& layer) {
  AffineMap map;
  map.name = layer.spec.name;
  map.in_shape = layer.in_shape;
  map.out_shape = layer.out_shape;
  map.out_scale = layer.out_scale;
  const nn::Shape3& is = layer.in_shape;
  const nn::Shape3& os = layer.out_shape;
  map.row_begin.push_back(0);
  auto in_index = [&](std::size_t c, std::size_t y, std::size_t x) {
    return static_cast<std::uint32_t>((c * is.h + y) * is.w + x);
  };

  if (const auto* conv = std::get_if<nn::Conv2D>(&layer.spec.kind)) {
    const std::size_t k = conv->kernel;
    for (std::size_t oc = 0; oc < os.c; ++oc) {
      for (std::size_t oy = 0; oy < os.h; ++oy) {
        for (std::size_t ox = 0; ox < os.w; ++ox) {
          for (std::size_t ic = 0; ic < is.c; ++ic) {
            for (std::size_t ky = 0; ky < k; ++ky) {
              const auto iy = static_cast<std::ptrdiff_t>(oy * conv->stride + ky) -
                              static_cast<std::ptrdiff_t>(conv->pad);
              if (iy < 0 || iy >= static_cast<std::ptrdiff_t>(is.h)) continue;
              for (std::size_t kx = 0; kx < k; ++kx) {
                const auto ix = static_cast<std::ptrdiff_t>(ox * conv->stride + kx) -
                                static_cast<std::ptrdiff_t>(conv->pad);
                if (ix < 0 || ix >= static_cast<std::ptrdiff_t>(is.w)) continue;
                map.cols.push_back(in_index(ic, iy, ix));
                map.weights.push_back(layer.weight[((oc * is.c + ic) * k + ky) * k + kx]);
              }
            }
          }
          map.bias.push_back(layer.bias[oc]);
          map.row_begin.push_back(map.cols.size());
        }
      }
    }
  } else if (std::holds_alternative<nn::Dense>(layer.spec.kind)) {
    const std::size_t fan_in = is.size();
    for (std::size_t o = 0; o < os.size(); ++o) {
      for (std::size_t i = 0; i < fan_in; ++i) {
        map.cols.push_back(static_cast<std::uint32_t>(i));
        map.weights.push_back(layer.weight[o * fan_in + i]);
      }
      map.bias.push_back(layer.bias[o]);
      map.row_begin.push_back(map.cols.size());
    }
  } else if (std::holds_alternative<nn::SumPool2>(layer.spec.kind)) {
    map.weighted = false;
    for (std::size_t c = 0; c < os.c; ++c) {
      for (std::size_t oy = 0; oy < os.h; ++oy) {
        for (std::size_t ox = 0; ox < os.w; ++ox) {
          for (std::size_t dy = 0; dy < 2; ++dy) {
            for (std::size_t dx = 0; dx < 2; ++dx) map.cols.push_back(in_index(c, 2 * oy + dy, 2 * ox + dx));
          }
          map.row_begin.push_back(map.cols.size());
        }
      }
    }
  } else {
    throw std::invalid_argument(layer.spec.name + ": not an affine layer");
  }
  return map;
}

namespace {

void check_input(const AffineMap& map, const EncryptedTensor& x) {
  if (x.shape != map.in_shape || x.cts.size() != map.in_shape.size()) {
    throw nn::ShapeError(map.name + ": encrypted input " + x.shape.describe() + " does not match " +
                         map.in_shape.describe());
  }
  if (x.cts.empty()) return;
  const auto& ctx = x.cts.front().context();
  for (const auto& ct : x.cts) bfv::require_same_params(*ctx, *ct.context());
}

template <typename Acc>
void axpy(Acc* __restrict a, const u64* __restrict c, Acc w, std::size_t n) {
  for (std::size_t j = 0; j < n; ++j) a[j] += w * static_cast<Acc>(c[j]);
}

template <typename Acc>
Ciphertext fused_row(const AffineMap& map, const EncryptedTensor& x, std::size_t r, std::vector<Acc>& acc) {
  const bfv::BfvContextPtr& ctx = x.context();
  const std::size_t n = ctx->n();
  const u64 q = ctx->q();
  std::size_t parts = 0;
  unsigned depth = 0;
  for (std::size_t k = map.row_begin[r]; k < map.row_begin[r + 1]; ++k) {
    const Ciphertext& ct = x.cts[map.cols[k]];
    parts = std::max(parts, ct.size());
    depth = std::max(depth, ct.mult_depth());
  }
  acc.assign(parts * n, Acc{0});
  for (std::size_t k = map.row_begin[r]; k < map.row_begin[r + 1]; ++k) {
    const Ciphertext& ct = x.cts[map.cols[k]];
    const Acc w = map.weighted ? static_cast<Acc>(map.weights[k]) : Acc{1};
    for (std::size_t p = 0; p < ct.size(); ++p) {
      axpy(acc.data() + p * n, ct.parts()[p].coeffs().data(), w, n);
    }
  }
  const Barrett64& barrett = ctx->ring()->barrett();
  std::vector<RingPoly> out;
  out.reserve(parts);
  for (std::size_t p = 0; p < parts; ++p) {
    std::vector<u64> coeffs(n);
    const Acc* a = acc.data() + p * n;
    if constexpr (sizeof(Acc) == sizeof(i64)) {
      for (std::size_t j = 0; j < n; ++j) coeffs[j] = barrett.reduce_signed(a[j]);
    } else {
      // a = hi * 2^64 + lo
      const ShoupConstant two64 = make_shoup((~u64{0} % q + 1) % q, q);
      for (std::size_t j = 0; j < n; ++j) {
        const u64 lo = static_cast<u64>(a[j]);
        const auto hi = static_cast<i64>(a[j] >> 64);
        coeffs[j] = add_mod(mul_shoup(barrett.reduce_signed(hi), two64, q), barrett.reduce(lo), q);
      }
    }
    out.emplace_back(ctx->ring(), std::move(coeffs));
  }
  if (!map.bias.empty()) {
    auto c0 = out[0].mutable_coeffs();
    c0[0] = add_mod(c0[0], ctx->scaled_plain(map.bias[r]), q);
  }
  return Ciphertext(ctx, std::move(out), map.weighted ? depth + 1 : depth);
}

template <typename Acc>
void fused_rows(const AffineMap& map, const EncryptedTensor& x, EncryptedTensor& out) {
  const auto rows = static_cast<std::ptrdiff_t>(map.rows());
#pragma omp parallel
  {
    std::vector<Acc> acc;
#pragma omp for schedule(dynamic, 16)
    for (std::ptrdiff_t r = 0; r < rows; ++r) out.cts[r] = fused_row<Acc>(map, x, r, acc);
  }
}

}  // namespace

EncryptedTensor he_affine(const AffineMap& map, const EncryptedTensor& x) {
  check_input(map, x);
  EncryptedTensor out;
  out.shape = map.out_shape;
  out.scale = map.out_scale;
  out.cts.resize(map.rows());
  for (i64 b : map.bias) x.context()->require_plain(b);
  if (map.weighted) {
    for (i64 w : map.weights) x.context()->require_plain(w);
  }
  const u128 bound = static_cast<u128>(map.max_fan_in()) * static_cast<u128>(map.max_abs_weight()) *
                     static_cast<u128>(x.context()->q());
  if (bound < (u128{1} << 63)) {
    fused_rows<i64>(map, x, out);
  } else {
    fused_rows<i128>(map, x, out);
  }
  return out;
}

EncryptedTensor he_affine_reference(const AffineMap& map, const EncryptedTensor& x) {
  check_input(map, x);
  EncryptedTensor out;
  out.shape = map.out_shape;
  out.scale = map.out_scale;
  out.cts.reserve(map.rows());
  for (std::size_t r = 0; r < map.rows(); ++r) {
    auto term = [&](std::size_t k) {
      const Ciphertext& ct = x.cts[map.cols[k]];
      return map.weighted ? bfv::he_mul_plain(ct, map.weights[k]) : ct;
    };
    Ciphertext acc = term(map.row_begin[r]);
    for (std::size_t k = map.row_begin[r] + 1; k < map.row_begin[r + 1]; ++k) acc = bfv::he_add(acc, term(k));
    if (!map.bias.empty()) acc = bfv::he_add_plain(acc, map.bias[r]);
    out.cts.push_back(std::move(acc));
  }
  return out;
}

}  // namespace spyking::he
