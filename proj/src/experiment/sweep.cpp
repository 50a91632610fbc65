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

#include "spyking/experiment/sweep.hpp"

#include <chrono>
#include <exception>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "spyking/bfv/bfv.hpp"
#include "spyking/io/weights.hpp"
#include "spyking/nn/float_forward.hpp"
#include "spyking/nn/quant.hpp"
#include "spyking/ring/prng.hpp"
#include "spyking/snn/lif.hpp"

namespace spyking::experiment {

namespace {

constexpr std::uint64_t kKeyStream = 0x6b6579;
constexpr std::uint64_t kRunStream = 0x72756e;

double elapsed_ms(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
}

int as_label(std::size_t index) { return static_cast<int>(index); }

// Runs body(i) for i in [0, count) across OpenMP threads and rethrows the
// first failure on the calling thread.
template <typename F>
void parallel_for(std::size_t count, F&& body) {
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic)
  for (std::size_t i = 0; i < count; ++i) {
    try {
      body(i);
    } catch (...) {
#pragma omp critical(spyking_sweep_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace

std::string_view category_name(Category c) {
  switch (c) {
    case Category::BothCorrect: return "both_correct";
    case Category::StandardCorrect: return "standard_correct";
    case Category::EncryptedCorrect: return "encrypted_correct";
    case Category::BothWrongEqual: return "both_wrong_equal";
    case Category::BothWrongDifferent: return "both_wrong_different";
  }
  throw std::invalid_argument("unknown category");
}

Category classify_outcome(int true_label, int standard_pred, int encrypted_pred) {
  for (int v : {true_label, standard_pred, encrypted_pred}) {
    if (v < 0 || v > 9) throw std::out_of_range("label " + std::to_string(v) + " outside [0, 9]");
  }
  const bool std_ok = standard_pred == true_label;
  const bool enc_ok = encrypted_pred == true_label;
  if (std_ok && enc_ok) return Category::BothCorrect;
  if (std_ok) return Category::StandardCorrect;
  if (enc_ok) return Category::EncryptedCorrect;
  return standard_pred == encrypted_pred ? Category::BothWrongEqual : Category::BothWrongDifferent;
}

double CellSummary::percent(Category c) const {
  return images == 0 ? 0.0 : 100.0 * static_cast<double>(count(c)) / static_cast<double>(images);
}

void SweepConfig::validate() const {
  nn::model_architecture(model);
  if (t_list.empty()) throw std::invalid_argument("t list is empty");
  for (u64 t : t_list) {
    if (t < 2) throw std::invalid_argument("plaintext modulus t=" + std::to_string(t) + " is below 2");
  }
  if (image_count == 0 && !full_testset) throw std::invalid_argument("image count must be at least 1");
  if (seq_length == 0) throw std::invalid_argument("sequence length must be at least 1");
  if (calibration_images == 0) throw std::invalid_argument("calibration image count must be at least 1");
}

u64 sweep_modulus(const SweepConfig& cfg) {
  return cfg.override_q ? *cfg.override_q : bfv::select_q(cfg.n, cfg.security_bits);
}

SweepResult run_sweep(const SweepConfig& cfg, const nn::Model& model, const io::IdxImageSet& images,
                      std::span<const nn::Tensor3<float>> calibration, std::ostream* log) {
  cfg.validate();
  if (model.spec.name != nn::model_architecture(cfg.model).name ||
      model.spec.is_spiking() != nn::is_spiking_model(cfg.model)) {
    throw std::invalid_argument("loaded model does not match " + cfg.model);
  }
  const bool spiking = model.spec.is_spiking();
  const std::size_t count = cfg.full_testset ? images.count() : std::min(cfg.image_count, images.count());
  if (count == 0) throw std::invalid_argument("no images to evaluate");
  const u64 q = sweep_modulus(cfg);
  const snn::LifParams lif;

  std::vector<nn::Tensor3<float>> tensors(count);
  std::vector<int> std_pred(count);
  std::vector<double> ms_std(count);
  parallel_for(count, [&](std::size_t i) {
    tensors[i] = images.image_tensor(i);
    const auto start = std::chrono::steady_clock::now();
    if (spiking) {
      const auto train = snn::encode_constant_current(tensors[i], lif, cfg.seq_length);
      const auto out = snn::spiking_forward(model, train, lif).accumulated;
      std_pred[i] = as_label(snn::decode_output<double>(out));
    } else {
      const auto out = nn::float_forward(model, tensors[i]);
      std_pred[i] = as_label(snn::decode_output<double>(out));
    }
    ms_std[i] = elapsed_ms(start);
  });

  SweepResult result;
  result.model = cfg.model;
  for (u64 t : cfg.t_list) {
    const auto ctx = bfv::BfvContext::create(cfg.n, q, t);
    Prng key_rng(derive_seed(cfg.seed, {t, kKeyStream}));
    const bfv::KeyPair keys = bfv::keygen(ctx, key_rng);
    const nn::QuantizedNet qnet = nn::quantize_net(model, nn::calibrate_scheme(model, calibration, t), t);

    std::vector<OutcomeRecord> cell(count);
    std::vector<ImageTrace> traces(count);
    parallel_for(count, [&](std::size_t i) {
      he::RunOptions opts;
      opts.seed = derive_seed(cfg.seed, {t, kRunStream});
      opts.image_id = i;
      opts.lif = lif;
      opts.seq_length = cfg.seq_length;
      OutcomeRecord& r = cell[i];
      r.image_id = i;
      r.t = t;
      r.true_label = images.labels[i];
      r.standard_pred = std_pred[i];
      r.ms_std = ms_std[i];
      he::RunSummary summary;
      if (spiking) {
        he::SnnRun run = he::run_encrypted_snn(qnet, tensors[i], keys, opts);
        r.encrypted_pred = as_label(snn::decode_output<i64>(run.accumulated));
        summary = std::move(run);
      } else {
        he::DnnRun run = he::run_encrypted_dnn(qnet, tensors[i], keys, opts);
        r.encrypted_pred = as_label(snn::decode_output<i64>(run.logits));
        summary = std::move(run);
      }
      r.category = classify_outcome(r.true_label, r.standard_pred, r.encrypted_pred);
      r.min_nb = summary.min_nb;
      r.ms_enc = summary.ms;
      r.corruption_events = summary.corruption_events;
      traces[i] = {t, i, std::move(summary.trace)};
    });

    CellSummary s;
    s.t = t;
    s.q = q;
    s.images = count;
    s.min_nb = std::numeric_limits<double>::infinity();
    for (const auto& r : cell) {
      ++s.counts[static_cast<std::size_t>(r.category)];
      s.min_nb = std::min(s.min_nb, r.min_nb);
      s.corruption_events += r.corruption_events;
      s.ms_enc_total += r.ms_enc;
    }
    if (log) {
      char line[256];
      std::snprintf(line, sizeof line,
                    "%s t=%llu q=%llu images=%zu both_correct=%.1f%% standard_acc=%.1f%% min_nb=%.3f "
                    "corrupt=%zu enc_s_per_image=%.3f\n",
                    cfg.model.c_str(), static_cast<unsigned long long>(t), static_cast<unsigned long long>(q),
                    count, s.percent(Category::BothCorrect),
                    s.percent(Category::BothCorrect) + s.percent(Category::StandardCorrect), s.min_nb,
                    s.corruption_events, s.ms_enc_total / 1000.0 / static_cast<double>(count));
      *log << line << std::flush;
    }
    result.cells.push_back(s);
    result.records.insert(result.records.end(), cell.begin(), cell.end());
    for (auto& tr : traces) result.traces.push_back(std::move(tr));
  }
  return result;
}

SweepResult run_sweep(const SweepConfig& cfg, std::ostream* log) {
  cfg.validate();
  const nn::Model model = io::load_model(cfg.model, io::read_weights(cfg.weights));
  const io::IdxImageSet test = io::read_test_split(cfg.dataset);
  const std::size_t count = cfg.full_testset ? test.count() : std::min(cfg.image_count, test.count());

  std::vector<nn::Tensor3<float>> calibration;
  if (!model.spec.is_spiking()) {
    std::optional<io::IdxImageSet> train;
    try {
      train = io::read_train_split(cfg.dataset);
    } catch (const io::IdxError& e) {
      if (e.kind() != io::IdxError::Kind::Io) throw;
    }
    if (train) {
      for (std::size_t i = 0; i < std::min(cfg.calibration_images, train->count()); ++i) {
        calibration.push_back(train->image_tensor(i));
      }
    } else {
      // Disjoint from the evaluated images when the split is large enough.
      const std::size_t begin = test.count() >= count + cfg.calibration_images
                                    ? count
                                    : test.count() - std::min(cfg.calibration_images, test.count());
      for (std::size_t i = begin; i < std::min(begin + cfg.calibration_images, test.count()); ++i) {
        calibration.push_back(test.image_tensor(i));
      }
      if (log) *log << "no training split in " << cfg.dataset.string() << "; calibrating on test images\n";
    }
  }
  return run_sweep(cfg, model, test, calibration, log);
}

}  // namespace spyking::experiment
