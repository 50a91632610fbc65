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

// Parallel/fused kernels against their serial references.

#include <benchmark/benchmark.h>

#include "spyking/bfv/bfv.hpp"
#include "spyking/he/affine.hpp"
#include "spyking/he/encrypted_tensor.hpp"
#include "spyking/io/weights.hpp"
#include "spyking/nn/quant.hpp"
#include "spyking/ring/ring.hpp"

namespace {

using namespace spyking;

struct AffineCase {
  bfv::BfvContextPtr ctx;
  bfv::KeyPair keys;
  he::AffineMap map;
  he::EncryptedTensor x;

  explicit AffineCase(const std::string& model) : ctx(bfv::BfvContext::create(1024, bfv::select_q(1024), 500)), keys(make(ctx)) {
    const nn::Model m = io::load_model(model, io::fixture_weights(model, 7));
    const nn::QuantizedNet q = nn::quantize_net(m, nn::calibrate_scheme(m, {}, 500), 500);
    map = he::affine_map(q.layers.front());
    nn::QuantTensor in{map.in_shape, std::vector<i64>(map.in_shape.size()), 1.0};
    for (std::size_t i = 0; i < in.data.size(); ++i) in.data[i] = static_cast<i64>(i % 7);
    x = he::encrypt_tensor(in, keys.public_key, 1);
  }
  static bfv::KeyPair make(const bfv::BfvContextPtr& ctx) {
    Prng rng(1);
    return bfv::keygen(ctx, rng);
  }
};

const AffineCase& affine_case() {
  static const AffineCase c("smicronet");
  return c;
}

void BM_HeAffineFused(benchmark::State& state) {
  const AffineCase& c = affine_case();
  for (auto _ : state) benchmark::DoNotOptimize(he::he_affine(c.map, c.x));
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * c.map.cols.size()));
}
BENCHMARK(BM_HeAffineFused)->Unit(benchmark::kMillisecond);

void BM_HeAffineReference(benchmark::State& state) {
  const AffineCase& c = affine_case();
  for (auto _ : state) benchmark::DoNotOptimize(he::he_affine_reference(c.map, c.x));
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * c.map.cols.size()));
}
BENCHMARK(BM_HeAffineReference)->Unit(benchmark::kMillisecond);

struct PolyPair {
  RingPoly a;
  RingPoly b;
};

PolyPair poly_pair(std::size_t n) {
  const auto ctx = RingContext::create({n, bfv::select_q(n)});
  Prng rng(n);
  return {sample(SampleKind::Uniform, ctx, rng), sample(SampleKind::Uniform, ctx, rng)};
}

void BM_NegacyclicNtt(benchmark::State& state) {
  const PolyPair p = poly_pair(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(negacyclic_mul(p.a, p.b));
}
BENCHMARK(BM_NegacyclicNtt)->Arg(1024)->Arg(2048)->Unit(benchmark::kMicrosecond);

void BM_NegacyclicSchoolbook(benchmark::State& state) {
  const PolyPair p = poly_pair(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(negacyclic_mul_schoolbook(p.a, p.b));
}
BENCHMARK(BM_NegacyclicSchoolbook)->Arg(1024)->Arg(2048)->Unit(benchmark::kMicrosecond);

void BM_EncryptTensor(benchmark::State& state) {
  const AffineCase& c = affine_case();
  const nn::QuantTensor x{{1, 28, 28}, std::vector<i64>(784, 1), 1.0};
  for (auto _ : state) benchmark::DoNotOptimize(he::encrypt_tensor(x, c.keys.public_key, 3));
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * 784));
}
BENCHMARK(BM_EncryptTensor)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
