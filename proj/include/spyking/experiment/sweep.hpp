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

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "spyking/he/pipeline.hpp"
#include "spyking/io/idx.hpp"
#include "spyking/nn/network.hpp"
#include "spyking/ring/modarith.hpp"

namespace spyking::experiment {

enum class Category { BothCorrect, StandardCorrect, EncryptedCorrect, BothWrongEqual, BothWrongDifferent };
inline constexpr std::size_t kCategoryCount = 5;
inline constexpr std::array<Category, kCategoryCount> kCategories = {
    Category::BothCorrect, Category::StandardCorrect, Category::EncryptedCorrect, Category::BothWrongEqual,
    Category::BothWrongDifferent};

std::string_view category_name(Category c);

// Throws std::out_of_range for a label outside [0, 9].
Category classify_outcome(int true_label, int standard_pred, int encrypted_pred);

struct OutcomeRecord {
  std::size_t image_id = 0;
  u64 t = 0;
  int true_label = 0;
  int standard_pred = 0;
  int encrypted_pred = 0;
  Category category = Category::BothCorrect;
  double min_nb = 0.0;
  double ms_std = 0.0;
  double ms_enc = 0.0;
  std::size_t corruption_events = 0;
};

struct SweepConfig {
  std::string model;
  std::vector<u64> t_list = {10, 20, 50, 100, 200, 500, 1000, 2000, 5000};
  std::size_t n = 1024;
  std::size_t image_count = 200;
  bool full_testset = false;
  std::uint64_t seed = 42;
  std::filesystem::path weights;
  std::filesystem::path dataset;
  std::filesystem::path out;
  std::optional<u64> override_q;
  int security_bits = 128;
  // Images used to fit the quantization scales of a non-spiking model.
  std::size_t calibration_images = 32;
  std::size_t seq_length = 30;

  // Throws std::invalid_argument.
  void validate() const;
};

struct CellSummary {
  u64 t = 0;
  u64 q = 0;
  std::size_t images = 0;
  std::array<std::size_t, kCategoryCount> counts{};
  double min_nb = 0.0;
  std::size_t corruption_events = 0;
  double ms_enc_total = 0.0;

  std::size_t count(Category c) const { return counts[static_cast<std::size_t>(c)]; }
  double percent(Category c) const;
};

struct ImageTrace {
  u64 t = 0;
  std::size_t image_id = 0;
  std::vector<he::TraceRecord> records;
};

struct SweepResult {
  std::string model;
  std::vector<OutcomeRecord> records;  // ordered by (t, image_id)
  std::vector<CellSummary> cells;      // ordered as t_list
  std::vector<ImageTrace> traces;
};

// Loads weights and the test split named by cfg, calibrates on training
// images (or, without a training split, on test images after the evaluated
// range), and sweeps. Progress lines go to log when given.
SweepResult run_sweep(const SweepConfig& cfg, std::ostream* log = nullptr);

// Sweep over already-loaded data; cfg.weights and cfg.dataset are ignored.
SweepResult run_sweep(const SweepConfig& cfg, const nn::Model& model, const io::IdxImageSet& images,
                      std::span<const nn::Tensor3<float>> calibration, std::ostream* log = nullptr);

// Per-cell q: the override if given, else select_q(n, security_bits).
u64 sweep_modulus(const SweepConfig& cfg);

struct ReportOptions {
  bool timings = true;
};

struct ReportFiles {
  std::filesystem::path per_image;
  std::filesystem::path summary;
  std::filesystem::path trace;
};

// Writes per_image.csv, summary.csv and trace.csv into dir. Throws
// std::invalid_argument on an empty result and std::runtime_error when a file
// cannot be written.
ReportFiles emit_report(const SweepResult& result, const std::filesystem::path& dir, const ReportOptions& options = {});

void write_per_image_csv(std::ostream& out, const SweepResult& result, const ReportOptions& options = {});
void write_summary_csv(std::ostream& out, const SweepResult& result, const ReportOptions& options = {});

}  // namespace spyking::experiment
