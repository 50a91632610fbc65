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

#include <cstdio>
#include <fstream>
#include <ostream>
#include <stdexcept>

#include "spyking/experiment/sweep.hpp"

namespace spyking::experiment {

namespace {

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::ofstream open_for_write(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
  out.close();
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

}  // namespace

void write_per_image_csv(std::ostream& out, const SweepResult& result, const ReportOptions& options) {
  out << "image_id,t,true,std_pred,enc_pred,category,min_nb,ms_std,ms_enc\n";
  for (const auto& r : result.records) {
    out << r.image_id << ',' << r.t << ',' << r.true_label << ',' << r.standard_pred << ',' << r.encrypted_pred
        << ',' << category_name(r.category) << ',' << fixed(r.min_nb, 6) << ',';
    if (options.timings) out << fixed(r.ms_std, 3) << ',' << fixed(r.ms_enc, 3);
    else out << ',';
    out << '\n';
  }
}

void write_summary_csv(std::ostream& out, const SweepResult& result, const ReportOptions& options) {
  out << "model,t,q,images";
  for (Category c : kCategories) out << ',' << category_name(c) << "_pct";
  out << ",standard_accuracy_pct,min_nb,corruption_events,mean_ms_enc\n";
  for (const auto& s : result.cells) {
    out << result.model << ',' << s.t << ',' << s.q << ',' << s.images;
    for (Category c : kCategories) out << ',' << fixed(s.percent(c), 4);
    const double standard = 100.0 * static_cast<double>(s.count(Category::BothCorrect) + s.count(Category::StandardCorrect)) /
                            static_cast<double>(s.images);
    out << ',' << fixed(standard, 4) << ',' << fixed(s.min_nb, 6) << ',' << s.corruption_events << ',';
    if (options.timings) out << fixed(s.ms_enc_total / static_cast<double>(s.images), 3);
    out << '\n';
  }
}

ReportFiles emit_report(const SweepResult& result, const std::filesystem::path& dir, const ReportOptions& options) {
  if (result.records.empty() || result.cells.empty()) {
    throw std::invalid_argument("refusing to write a report with no records");
  }
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create " + dir.string() + ": " + ec.message());
  ReportFiles files{dir / "per_image.csv", dir / "summary.csv", dir / "trace.csv"};

  auto per_image = open_for_write(files.per_image);
  write_per_image_csv(per_image, result, options);
  finish(per_image, files.per_image);

  auto summary = open_for_write(files.summary);
  write_summary_csv(summary, result, options);
  finish(summary, files.summary);

  auto trace = open_for_write(files.trace);
  he::write_trace_header(trace);
  for (const auto& tr : result.traces) {
    he::write_trace_rows(trace, result.model + "-t" + std::to_string(tr.t), tr.image_id, tr.t, tr.records,
                         options.timings);
  }
  finish(trace, files.trace);
  return files;
}

}  // namespace spyking::experiment
