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

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <sstream>

#include <gtest/gtest.h>
#include <omp.h>

#include "spyking/experiment/fixture.hpp"
#include "spyking/experiment/sweep.hpp"
#include "spyking/io/synthetic.hpp"
#include "spyking/nn/float_forward.hpp"
#include "support/fixtures.hpp"

namespace spyking::experiment {
namespace {

namespace fs = std::filesystem;
using testing::fitted_model;
using testing::tensors;

const fs::path kData = SPYKING_TEST_DATA_DIR;

class TempDir {
 public:
  TempDir() {
    path_ = fs::temp_directory_path() / ("spyking-exp-" + std::to_string(std::random_device{}()));
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream lines(text);
  std::string line;
  while (std::getline(lines, line)) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream fields(line);
    while (std::getline(fields, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    rows.push_back(std::move(cells));
  }
  return rows;
}

TEST(Classify, Definitions) {
  EXPECT_EQ(classify_outcome(3, 3, 3), Category::BothCorrect);
  EXPECT_EQ(classify_outcome(3, 3, 7), Category::StandardCorrect);
  EXPECT_EQ(classify_outcome(3, 7, 3), Category::EncryptedCorrect);
  EXPECT_EQ(classify_outcome(3, 5, 5), Category::BothWrongEqual);
  EXPECT_EQ(classify_outcome(3, 5, 6), Category::BothWrongDifferent);
}

TEST(Classify, ExhaustivePartition) {
  std::array<std::size_t, kCategoryCount> counts{};
  for (int t = 0; t < 10; ++t) {
    for (int s = 0; s < 10; ++s) {
      for (int e = 0; e < 10; ++e) {
        const Category c = classify_outcome(t, s, e);
        ++counts[static_cast<std::size_t>(c)];
        EXPECT_EQ(c == Category::BothCorrect || c == Category::StandardCorrect, s == t);
        EXPECT_EQ(c == Category::BothCorrect || c == Category::EncryptedCorrect, e == t);
      }
    }
  }
  EXPECT_EQ(counts, (std::array<std::size_t, kCategoryCount>{10, 90, 90, 90, 720}));
}

TEST(Classify, RejectsOutOfRange) {
  EXPECT_THROW(classify_outcome(10, 0, 0), std::out_of_range);
  EXPECT_THROW(classify_outcome(0, -1, 0), std::out_of_range);
  EXPECT_THROW(classify_outcome(0, 0, 11), std::out_of_range);
}

TEST(Config, Validation) {
  SweepConfig cfg;
  cfg.model = "micronet";
  EXPECT_NO_THROW(cfg.validate());
  EXPECT_EQ(cfg.t_list, (std::vector<u64>{10, 20, 50, 100, 200, 500, 1000, 2000, 5000}));
  EXPECT_EQ(cfg.n, 1024u);
  EXPECT_EQ(cfg.image_count, 200u);
  auto bad = cfg;
  bad.model = "alexnet";
  EXPECT_THROW(bad.validate(), std::invalid_argument);
  bad = cfg;
  bad.t_list.clear();
  EXPECT_THROW(bad.validate(), std::invalid_argument);
  bad = cfg;
  bad.t_list = {50, 1};
  EXPECT_THROW(bad.validate(), std::invalid_argument);
  bad = cfg;
  bad.image_count = 0;
  EXPECT_THROW(bad.validate(), std::invalid_argument);
  EXPECT_EQ(sweep_modulus(cfg), bfv::select_q(1024));
  bad = cfg;
  bad.override_q = 12289;
  EXPECT_EQ(sweep_modulus(bad), 12289u);
}

TEST(Fixture, SyntheticClassesAreLearnable) {
  const io::IdxImageSet a = io::synthetic_classes(50, 4);
  EXPECT_EQ(a.images, io::synthetic_classes(50, 4).images);
  std::array<int, 10> seen{};
  for (auto l : a.labels) ++seen[l];
  EXPECT_GT(*std::min_element(seen.begin(), seen.end()), 0);

  for (const char* name : {"micronet", "lenet5"}) {
    const nn::Model m = fitted_model(name);
    const io::IdxImageSet test = io::synthetic_classes(100, 3);
    int ok = 0;
    for (std::size_t i = 0; i < test.count(); ++i) {
      ok += snn::decode_output<double>(nn::float_forward(m, test.image_tensor(i))) == test.labels[i];
    }
    EXPECT_GE(ok, 80) << name;
  }
}

TEST(Fixture, ReadoutRejectsBadInput) {
  EXPECT_THROW(fit_readout(testing::fixture_model("micronet"), io::IdxImageSet{}), std::invalid_argument);
  nn::Model m = testing::fixture_model("micronet");
  const nn::Model fitted = fit_readout(m, io::synthetic_classes(20, 1));
  EXPECT_EQ(fitted.params.at(0).weight, m.params.at(0).weight);
  EXPECT_NE(fitted.params.at(3).weight, m.params.at(3).weight);
}

struct GoldenSweep {
  SweepConfig cfg;
  nn::Model model;
  io::IdxImageSet images;
  std::vector<nn::Tensor3<float>> calibration;

  GoldenSweep()
      : model(fitted_model("micronet")),
        images(io::synthetic_classes(5, testing::kImageSeed)),
        calibration(tensors(io::synthetic_classes(20, testing::kCalibrationSeed))) {
    cfg.model = "micronet";
    cfg.t_list = {50, 1000};
    cfg.image_count = 5;
    cfg.seed = 42;
  }
  SweepResult run() const { return run_sweep(cfg, model, images, calibration); }
};

TEST(Report, GoldenFiles) {
  const GoldenSweep g;
  const SweepResult r = g.run();
  TempDir dir;
  const ReportFiles files = emit_report(r, dir.path(), {.timings = false});
  if (std::getenv("SPYKING_UPDATE_GOLDEN")) {
    fs::copy_file(files.per_image, kData / "golden_per_image.csv", fs::copy_options::overwrite_existing);
    fs::copy_file(files.summary, kData / "golden_summary.csv", fs::copy_options::overwrite_existing);
  }
  EXPECT_EQ(slurp(files.per_image), slurp(kData / "golden_per_image.csv"));
  EXPECT_EQ(slurp(files.summary), slurp(kData / "golden_summary.csv"));
}

TEST(Report, RerunIsByteIdenticalAcrossThreadCounts) {
  const GoldenSweep g;
  const int saved = omp_get_max_threads();
  omp_set_num_threads(1);
  const SweepResult a = g.run();
  omp_set_num_threads(3);
  const SweepResult b = g.run();
  omp_set_num_threads(saved);
  TempDir da;
  TempDir db;
  const ReportFiles fa = emit_report(a, da.path(), {.timings = false});
  const ReportFiles fb = emit_report(b, db.path(), {.timings = false});
  for (auto member : {&ReportFiles::per_image, &ReportFiles::summary, &ReportFiles::trace}) {
    EXPECT_EQ(slurp(fa.*member), slurp(fb.*member));
  }
  const auto trace = csv_rows(slurp(fa.trace));
  EXPECT_EQ(trace[0], (std::vector<std::string>{"run_id", "image_id", "t", "layer", "step", "nb_bits", "ms"}));
  EXPECT_EQ(trace.size(), 1 + 2 * 5 * (g.model.spec.layers.size() + 2));
}

TEST(Report, SummaryRecomputesFromPerImage) {
  const SweepResult r = GoldenSweep().run();
  std::ostringstream per_image;
  write_per_image_csv(per_image, r);
  std::ostringstream summary;
  write_summary_csv(summary, r);
  const auto rows = csv_rows(per_image.str());
  ASSERT_EQ(rows.size(), 1 + r.records.size());
  std::map<std::string, std::map<std::string, int>> counts;
  std::map<std::string, int> totals;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    ++counts[rows[i][1]][rows[i][5]];
    ++totals[rows[i][1]];
    EXPECT_EQ(rows[i][5], category_name(classify_outcome(std::stoi(rows[i][2]), std::stoi(rows[i][3]),
                                                         std::stoi(rows[i][4]))));
  }
  const auto srows = csv_rows(summary.str());
  ASSERT_EQ(srows.size(), 1 + r.cells.size());
  for (std::size_t i = 1; i < srows.size(); ++i) {
    const std::string& t = srows[i][1];
    EXPECT_EQ(std::stoi(srows[i][3]), totals[t]);
    int sum = 0;
    for (std::size_t c = 0; c < kCategoryCount; ++c) {
      const int n = counts[t][std::string(category_name(kCategories[c]))];
      sum += n;
      char want[32];
      std::snprintf(want, sizeof want, "%.4f", 100.0 * n / totals[t]);
      EXPECT_EQ(srows[i][4 + c], want) << t << " " << c;
    }
    EXPECT_EQ(sum, totals[t]);
  }
}

TEST(Report, Guards) {
  TempDir dir;
  EXPECT_THROW(emit_report(SweepResult{}, dir.path()), std::invalid_argument);
  const SweepResult r = GoldenSweep().run();
  std::ofstream(dir.path() / "file") << "x";
  EXPECT_THROW(emit_report(r, dir.path() / "file" / "sub"), std::runtime_error);
}

TEST(Sweep, LoadsFromDisk) {
  TempDir dir;
  io::write_idx(io::synthetic_classes(40, 1), dir.path() / "t10k-images-idx3-ubyte", dir.path() / "t10k-labels-idx1-ubyte");
  io::write_weights(dir.path() / "w.spykw", io::WeightContainer{nn::export_weights(fitted_model("micronet"))});
  SweepConfig cfg;
  cfg.model = "micronet";
  cfg.t_list = {200};
  cfg.image_count = 3;
  cfg.weights = dir.path() / "w.spykw";
  cfg.dataset = dir.path();
  std::ostringstream log;
  const SweepResult r = run_sweep(cfg, &log);
  EXPECT_EQ(r.records.size(), 3u);
  EXPECT_NE(log.str().find("calibrating on test images"), std::string::npos);
  EXPECT_NE(log.str().find("micronet t=200"), std::string::npos);
  cfg.model = "lenet5";
  EXPECT_THROW(run_sweep(cfg), nn::BindingError);
  cfg.model = "micronet";
  cfg.dataset = dir.path() / "missing";
  EXPECT_THROW(run_sweep(cfg), io::IdxError);
}

TEST(Sweep, MicronetUShape) {
  SweepConfig cfg;
  cfg.model = "micronet";
  cfg.t_list = {10, 200, 500, 1000, 5000};
  cfg.image_count = 50;
  const SweepResult r = run_sweep(cfg, fitted_model("micronet"), io::synthetic_classes(50, testing::kImageSeed),
                                  tensors(io::synthetic_classes(20, testing::kCalibrationSeed)));
  ASSERT_EQ(r.cells.size(), 5u);
  std::size_t standard = 0;
  std::size_t best_mid = 0;
  for (std::size_t i = 0; i < r.cells.size(); ++i) {
    const CellSummary& s = r.cells[i];
    std::size_t total = 0;
    for (auto c : s.counts) total += c;
    EXPECT_EQ(total, s.images);
    const std::size_t std_correct = s.count(Category::BothCorrect) + s.count(Category::StandardCorrect);
    if (i == 0) standard = std_correct;
    EXPECT_EQ(std_correct, standard);
    if (i > 0 && i + 1 < r.cells.size()) best_mid = std::max(best_mid, s.count(Category::BothCorrect));
  }
  EXPECT_GE(standard, 40u);
  EXPECT_LT(r.cells.front().count(Category::BothCorrect), best_mid);
  EXPECT_LE(r.cells.back().count(Category::BothCorrect), best_mid);
  EXPECT_GT(r.cells.front().min_nb, 0.0);
  EXPECT_EQ(r.cells.back().min_nb, 0.0);
}

}  // namespace
}  // namespace spyking::experiment
