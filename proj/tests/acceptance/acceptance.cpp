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

// One PASS/FAIL line per acceptance criterion; exits nonzero if any fails.

#include <chrono>
#include <cstdlib>
#include <cstdio>
#include <functional>
#include <random>
#include <string>

#include "spyking/bfv/bfv.hpp"
#include "spyking/experiment/sweep.hpp"
#include "spyking/he/affine.hpp"
#include "spyking/he/encrypted_tensor.hpp"
#include "spyking/he/pipeline.hpp"
#include "spyking/nn/quant.hpp"
#include "spyking/snn/lif.hpp"
#include "support/fixtures.hpp"

namespace {

using namespace spyking;
using testing::fitted_model;
using testing::tensors;

struct Outcome {
  bool pass = true;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// Centered residue of v mod t in [-floor(t/2), t - 1 - floor(t/2)].
i64 centered_mod(__int128 v, u64 t) {
  const auto tt = static_cast<__int128>(t);
  __int128 r = v % tt;
  if (r < 0) r += tt;
  if (r > tt - 1 - tt / 2) r -= tt;
  return static_cast<i64>(r);
}

struct Keys {
  bfv::BfvContextPtr ctx;
  bfv::KeyPair keys;
  Prng rng;

  Keys(u64 t, std::size_t n, std::uint64_t seed)
      : ctx(bfv::BfvContext::create(n, bfv::select_q(n), t)), keys(make(ctx, seed)), rng(seed + 1) {}
  static bfv::KeyPair make(const bfv::BfvContextPtr& ctx, std::uint64_t seed) {
    Prng r(seed);
    return bfv::keygen(ctx, r);
  }
  bfv::Ciphertext enc(i64 m) { return bfv::encrypt(keys.public_key, m, rng); }
  i64 dec(const bfv::Ciphertext& c) const { return bfv::decrypt(keys.secret, c); }
};

i64 uniform_plain(std::mt19937_64& gen, u64 t) {
  const i64 lo = -static_cast<i64>(t / 2);
  return lo + static_cast<i64>(gen() % t);
}

Outcome round_trip() {
  std::mt19937_64 gen(1);
  std::size_t exact = 0;
  std::size_t total = 0;
  for (u64 t : {50u, 500u, 5000u}) {
    Keys k(t, 1024, t);
    for (int i = 0; i < 1000; ++i) {
      const i64 m = uniform_plain(gen, t);
      exact += k.dec(k.enc(m)) == m;
      ++total;
    }
  }
  return {exact == total, std::to_string(exact) + "/" + std::to_string(total) + " exact"};
}

Outcome homomorphism() {
  std::size_t exact = 0;
  std::size_t total = 0;
  std::mt19937_64 gen(2);
  for (const auto& [t, n] : {std::pair<u64, std::size_t>{50, 1024}, {5000, 2048}}) {
    Keys k(t, n, 10 + t);
    for (int i = 0; i < 1000; ++i) {
      const i64 a = uniform_plain(gen, t);
      const i64 b = uniform_plain(gen, t);
      const auto ea = k.enc(a);
      exact += k.dec(bfv::he_add(ea, k.enc(b))) == centered_mod(__int128{a} + b, t);
      exact += k.dec(bfv::he_mul_plain(ea, b)) == centered_mod(__int128{a} * b, t);
      total += 2;
    }
  }
  Keys k(5000, 1024, 3);
  const i64 worked = k.dec(bfv::he_add(k.enc(2), k.enc(-18)));
  const bool ok = exact == total && worked == -16;
  return {ok, std::to_string(exact) + "/" + std::to_string(total) + " exact; E(2)+E(-18) -> " + std::to_string(worked)};
}

// The laws are checked up to the first product that exhausts the budget; the
// corrupted products after it only feed the mismatch count.
Outcome noise_laws() {
  std::mt19937_64 gen(3);
  std::size_t chains = 0;
  std::size_t violations = 0;
  std::size_t exhausted_with_mismatch = 0;
  std::size_t live_steps = 0;
  std::size_t wrapped_positive = 0;
  const u64 ts[] = {50, 500, 5000};
  std::vector<Keys> keys;
  for (u64 t : ts) keys.emplace_back(t, 1024, 100 + t);
  for (int c = 0; c < 200; ++c) {
    Keys& k = keys[c % 3];
    const u64 t = k.ctx->t();
    i64 expect = uniform_plain(gen, t);
    auto ct = k.enc(expect);
    double nb = bfv::debug::noise_budget(k.keys.secret, ct);
    bool exhausted = false;
    bool mismatch_after_exhaustion = false;
    for (int extra = 0; extra < 3;) {
      i64 factor = 0;
      while (std::abs(factor) < 2) factor = uniform_plain(gen, std::min<u64>(t, 64));
      ct = bfv::he_mul_plain(ct, factor);
      expect = centered_mod(__int128{expect} * factor, t);
      const bfv::debug::Decryption d = bfv::debug::decrypt_with_noise(k.keys.secret, ct);
      if (!exhausted) {
        ++live_steps;
        if (!(d.noise_budget < nb)) ++violations;
        if (d.noise_budget > 0.0 && d.value != expect) ++violations;
        nb = d.noise_budget;
        exhausted = nb <= 0.0;
      } else {
        ++extra;
        wrapped_positive += d.noise_budget > 0.0;
      }
      if (exhausted && d.value != expect) mismatch_after_exhaustion = true;
    }
    exhausted_with_mismatch += mismatch_after_exhaustion;
    ++chains;
  }
  const bool ok = violations == 0 && exhausted_with_mismatch > 0;
  return {ok, std::to_string(chains) + " chains, " + std::to_string(live_steps) + " products before exhaustion, " +
                  std::to_string(violations) + " violations, " + std::to_string(exhausted_with_mismatch) +
                  " exhausted chains decrypt wrong, " + std::to_string(wrapped_positive) +
                  " post-exhaustion readings above 0"};
}

// Explicit-loop reference for one quantized layer, reduced mod t.
std::vector<i64> reference_layer(const nn::QuantLayer& l, const std::vector<i64>& x, u64 t) {
  const nn::Shape3& is = l.in_shape;
  const nn::Shape3& os = l.out_shape;
  std::vector<i64> y(os.size());
  if (const auto* conv = std::get_if<nn::Conv2D>(&l.spec.kind)) {
    const long k = static_cast<long>(conv->kernel);
    for (std::size_t oc = 0; oc < os.c; ++oc) {
      for (std::size_t oy = 0; oy < os.h; ++oy) {
        for (std::size_t ox = 0; ox < os.w; ++ox) {
          __int128 acc = l.bias[oc];
          for (std::size_t ic = 0; ic < is.c; ++ic) {
            for (long ky = 0; ky < k; ++ky) {
              for (long kx = 0; kx < k; ++kx) {
                const long iy = static_cast<long>(oy * conv->stride) + ky - static_cast<long>(conv->pad);
                const long ix = static_cast<long>(ox * conv->stride) + kx - static_cast<long>(conv->pad);
                if (iy < 0 || ix < 0 || iy >= static_cast<long>(is.h) || ix >= static_cast<long>(is.w)) continue;
                acc += __int128{l.weight[((oc * is.c + ic) * k + ky) * k + kx]} * x[(ic * is.h + iy) * is.w + ix];
              }
            }
          }
          y[(oc * os.h + oy) * os.w + ox] = centered_mod(acc, t);
        }
      }
    }
  } else if (std::holds_alternative<nn::Dense>(l.spec.kind)) {
    for (std::size_t o = 0; o < os.size(); ++o) {
      __int128 acc = l.bias[o];
      for (std::size_t i = 0; i < is.size(); ++i) acc += __int128{l.weight[o * is.size() + i]} * x[i];
      y[o] = centered_mod(acc, t);
    }
  } else {
    for (std::size_t c = 0; c < os.c; ++c) {
      for (std::size_t oy = 0; oy < os.h; ++oy) {
        for (std::size_t ox = 0; ox < os.w; ++ox) {
          __int128 acc = 0;
          for (std::size_t dy = 0; dy < 2; ++dy) {
            for (std::size_t dx = 0; dx < 2; ++dx) acc += x[(c * is.h + 2 * oy + dy) * is.w + 2 * ox + dx];
          }
          y[(c * os.h + oy) * os.w + ox] = centered_mod(acc, t);
        }
      }
    }
  }
  return y;
}

Outcome layer_equivalence() {
  std::mt19937_64 gen(4);
  std::vector<std::pair<std::string, nn::Model>> models = {{"micronet", fitted_model("micronet")},
                                                           {"lenet5", fitted_model("lenet5")}};
  const auto calibration = tensors(io::synthetic_classes(20, testing::kCalibrationSeed));
  std::size_t exact = 0;
  std::size_t cases = 0;
  double worst_nb = 1e9;
  for (int c = 0; c < 50; ++c) {
    const u64 t = std::array<u64, 3>{50, 200, 1000}[c % 3];
    const nn::Model& m = models[c % 2].second;
    const nn::QuantizedNet q = nn::quantize_net(m, nn::calibrate_scheme(m, calibration, t), t);
    std::vector<const nn::QuantLayer*> affine;
    for (const auto& l : q.layers) {
      if (!l.spec.is_activation() && !std::holds_alternative<nn::Flatten>(l.spec.kind)) affine.push_back(&l);
    }
    const nn::QuantLayer& l = *affine[gen() % affine.size()];
    Keys k(t, 1024, 200 + c);
    nn::QuantTensor x{l.in_shape, std::vector<i64>(l.in_shape.size()), l.in_scale};
    const i64 hi = std::min<i64>(static_cast<i64>(t / 2) - 1, 12);
    for (auto& v : x.data) v = static_cast<i64>(gen() % static_cast<u64>(hi + 1));
    const he::EncryptedTensor y = he::he_affine(he::affine_map(l), he::encrypt_tensor(x, k.keys.public_key, c));
    const he::NoisyDecryption d = he::decrypt_tensor_with_noise(k.keys.secret, y);
    worst_nb = std::min(worst_nb, d.min_noise_budget);
    exact += d.values.data == reference_layer(l, x.data, t);
    ++cases;
  }
  char nb[32];
  std::snprintf(nb, sizeof nb, "%.3f", worst_nb);
  return {exact == cases, std::to_string(exact) + "/" + std::to_string(cases) + " layers exact, min NB " + nb};
}

Outcome pipeline_equivalence() {
  const u64 t = 500;
  Keys k(t, 1024, 5);
  const auto calibration = tensors(io::synthetic_classes(20, testing::kCalibrationSeed));
  const io::IdxImageSet images = io::synthetic_classes(20, testing::kImageSeed);
  bool all_nb_positive = true;
  auto nb_positive = [&](const he::RunSummary& r) {
    for (const auto& rec : r.trace) {
      if (rec.nb_bits && *rec.nb_bits <= 0.0) return false;
    }
    return r.min_nb > 0.0;
  };
  auto options = [](std::size_t i) {
    he::RunOptions o;
    o.seed = 42;
    o.image_id = i;
    o.layer_noise = true;
    return o;
  };

  std::size_t dnn_exact = 0;
  double micronet_s = 0.0;
  {
    const nn::Model m = fitted_model("micronet");
    const nn::QuantizedNet q = nn::quantize_net(m, nn::calibrate_scheme(m, calibration, t), t);
    for (std::size_t i = 0; i < 20; ++i) {
      const auto img = images.image_tensor(i);
      const he::DnnRun run = he::run_encrypted_dnn(q, img, k.keys, options(i));
      micronet_s += run.ms / 1000.0;
      all_nb_positive &= nb_positive(run);
      dnn_exact += run.logits == nn::int_forward(q, nn::quantize_image(img, q));
    }
    micronet_s /= 20.0;
  }
  std::size_t lenet_exact = 0;
  double lenet_s = 0.0;
  {
    const nn::Model m = fitted_model("lenet5");
    const nn::QuantizedNet q = nn::quantize_net(m, nn::calibrate_scheme(m, calibration, t), t);
    for (std::size_t i = 0; i < 2; ++i) {
      const auto img = images.image_tensor(i);
      const he::DnnRun run = he::run_encrypted_dnn(q, img, k.keys, options(i));
      lenet_s += run.ms / 1000.0;
      all_nb_positive &= nb_positive(run);
      lenet_exact += run.logits == nn::int_forward(q, nn::quantize_image(img, q));
    }
    lenet_s /= 2.0;
  }
  std::size_t snn_exact = 0;
  {
    const nn::Model m = fitted_model("smicronet");
    const nn::QuantizedNet q = nn::quantize_net(m, nn::calibrate_scheme(m, {}, t), t);
    for (std::size_t i = 0; i < 10; ++i) {
      const auto img = images.image_tensor(i);
      he::RunOptions o = options(i);
      o.layer_noise = false;
      const he::SnnRun run = he::run_encrypted_snn(q, img, k.keys, o);
      all_nb_positive &= nb_positive(run);
      const auto want = snn::spiking_forward_quantized(q, snn::encode_constant_current(img, {}), {});
      snn_exact += run.accumulated == want.accumulated;
    }
  }
  const bool ok = dnn_exact == 20 && lenet_exact == 2 && snn_exact == 10 && all_nb_positive && micronet_s < 5.0 &&
                  lenet_s < 60.0;
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "micronet %zu/20, lenet5 %zu/2, smicronet %zu/10 exact; NB>0 throughout: %s; "
                "micronet %.2f s/image, lenet5 %.2f s/image",
                dnn_exact, lenet_exact, snn_exact, all_nb_positive ? "yes" : "no", micronet_s, lenet_s);
  return {ok, buf};
}

Outcome category_invariants() {
  experiment::SweepConfig cfg;
  cfg.model = "micronet";
  cfg.t_list = {10, 50, 200, 1000, 5000};
  cfg.image_count = 20;
  const auto r = experiment::run_sweep(cfg, fitted_model("micronet"), io::synthetic_classes(20, testing::kImageSeed),
                                       tensors(io::synthetic_classes(20, testing::kCalibrationSeed)));
  bool ok = !r.cells.empty();
  std::string standard_line;
  std::size_t standard = 0;
  for (std::size_t i = 0; i < r.cells.size(); ++i) {
    const auto& s = r.cells[i];
    std::size_t total = 0;
    for (auto c : s.counts) total += c;
    ok &= total == s.images;
    std::size_t per_t = 0;
    for (const auto& rec : r.records) {
      if (rec.t != s.t) continue;
      ok &= rec.category == experiment::classify_outcome(rec.true_label, rec.standard_pred, rec.encrypted_pred);
      ++per_t;
    }
    ok &= per_t == s.images;
    const std::size_t std_correct =
        s.count(experiment::Category::BothCorrect) + s.count(experiment::Category::StandardCorrect);
    if (i == 0) standard = std_correct;
    ok &= std_correct == standard;
    standard_line += (i ? "," : "") + std::to_string(s.count(experiment::Category::BothCorrect));
  }
  return {ok, "5 t values partition 20 records each; both+standard correct = " + std::to_string(standard) +
                  " at every t; both correct per t = " + standard_line};
}

Outcome timing_ratio() {
  const u64 t = 500;
  Keys k(t, 1024, 7);
  const auto calibration = tensors(io::synthetic_classes(20, testing::kCalibrationSeed));
  const io::IdxImageSet images = io::synthetic_classes(5, testing::kImageSeed);
  const nn::Model dm = fitted_model("micronet");
  const nn::Model sm = fitted_model("smicronet");
  const nn::QuantizedNet dq = nn::quantize_net(dm, nn::calibrate_scheme(dm, calibration, t), t);
  const nn::QuantizedNet sq = nn::quantize_net(sm, nn::calibrate_scheme(sm, {}, t), t);
  double dnn_s = 0.0;
  double snn_s = 0.0;
  for (std::size_t i = 0; i < images.count(); ++i) {
    he::RunOptions o;
    o.seed = 9;
    o.image_id = i;
    const auto img = images.image_tensor(i);
    auto start = Clock::now();
    he::run_encrypted_dnn(dq, img, k.keys, o);
    dnn_s += seconds_since(start);
    start = Clock::now();
    he::run_encrypted_snn(sq, img, k.keys, o);
    snn_s += seconds_since(start);
  }
  const double ratio = snn_s / dnn_s;
  const double seq = static_cast<double>(snn::kDefaultSeqLength);
  char buf[160];
  std::snprintf(buf, sizeof buf, "smicronet %.2f s / micronet %.2f s = %.1f (window %.0f-%.0f)", snn_s, dnn_s, ratio,
                0.7 * seq, 1.3 * seq);
  return {ratio >= 0.7 * seq && ratio <= 1.3 * seq, buf};
}

Outcome lif_properties() {
  const snn::LifParams p;
  snn::LifState s(4);
  bool rest = true;
  for (int i = 0; i < 1000; ++i) {
    const auto spikes = snn::lif_advance(s, std::vector<double>(4, 0.0), p);
    for (std::size_t k = 0; k < 4; ++k) rest &= spikes[k] == 0 && s.v[k] == 0.0 && s.i[k] == 0.0;
  }
  bool monotone = true;
  std::size_t prev = 0;
  std::string counts;
  for (int level = 0; level < 20; ++level) {
    snn::LifState n(1);
    std::size_t spikes = 0;
    for (std::size_t step = 0; step < snn::kDefaultSeqLength; ++step) {
      spikes += snn::lif_advance(n, std::vector<double>{level / 19.0}, p)[0];
    }
    monotone &= spikes >= prev;
    prev = spikes;
    counts += (level ? "," : "") + std::to_string(spikes);
  }
  const auto train = snn::encode_constant_current(nn::Tensor3<float>({1, 28, 28}), p);
  std::size_t zero_spikes = 0;
  for (const auto& step : train.steps) {
    for (auto v : step) zero_spikes += v;
  }
  return {rest && monotone && zero_spikes == 0 && prev > 0,
          std::string("rest ") + (rest ? "exact" : "drifts") + "; counts " + counts + "; zero image spikes " +
              std::to_string(zero_spikes)};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"bfv round trip", round_trip},
      {"homomorphism oracle", homomorphism},
      {"noise budget laws", noise_laws},
      {"layer equivalence", layer_equivalence},
      {"pipeline equivalence", pipeline_equivalence},
      {"category invariants", category_invariants},
      {"timing ratio", timing_ratio},
      {"lif properties", lif_properties},
  };
  std::vector<bool> selected(criteria.size(), argc == 1);
  for (int a = 1; a < argc; ++a) {
    const int index = std::atoi(argv[a]);
    if (index < 1 || index > static_cast<int>(criteria.size())) {
      std::fprintf(stderr, "usage: acceptance [criterion number...]\n");
      return 2;
    }
    selected[index - 1] = true;
  }
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    if (!selected[i]) continue;
    const auto start = Clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("criterion %zu %s: %s (%s; %.1f s)\n", i + 1, o.pass ? "PASS" : "FAIL", criteria[i].first.c_str(),
                o.detail.c_str(), seconds_since(start));
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
