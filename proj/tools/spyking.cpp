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

#include <omp.h>

#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "spyking/bfv/bfv.hpp"
#include "spyking/experiment/fixture.hpp"
#include "spyking/experiment/sweep.hpp"
#include "spyking/io/idx.hpp"
#include "spyking/io/synthetic.hpp"
#include "spyking/io/weights.hpp"

namespace {

using namespace spyking;

enum ExitCode { kOk = 0, kFailure = 1, kUsage = 2, kInput = 3, kParameter = 4, kOutput = 5 };

std::string_view idx_kind(io::IdxError::Kind k) {
  switch (k) {
    case io::IdxError::Kind::Io: return "io";
    case io::IdxError::Kind::BadMagic: return "bad-magic";
    case io::IdxError::Kind::Truncated: return "truncated";
    case io::IdxError::Kind::BadDimensions: return "bad-dimensions";
    case io::IdxError::Kind::CountMismatch: return "count-mismatch";
    case io::IdxError::Kind::BadLabel: return "bad-label";
  }
  return "unknown";
}

std::string_view weight_kind(io::WeightFormatError::Kind k) {
  switch (k) {
    case io::WeightFormatError::Kind::Io: return "io";
    case io::WeightFormatError::Kind::BadMagic: return "bad-magic";
    case io::WeightFormatError::Kind::UnsupportedVersion: return "unsupported-version";
    case io::WeightFormatError::Kind::Truncated: return "truncated";
    case io::WeightFormatError::Kind::DimensionOverflow: return "dimension-overflow";
    case io::WeightFormatError::Kind::CrcMismatch: return "crc-mismatch";
  }
  return "unknown";
}

int fail(int code, std::string_view type, const std::string& what) {
  std::cerr << "spyking: error [" << type << "]: " << what << '\n';
  return code;
}

void apply_thread_cap() {
  const char* env = std::getenv("SPYKING_THREADS");
  if (!env || !*env) return;
  std::size_t used = 0;
  int cap = 0;
  try {
    cap = std::stoi(env, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != std::string(env).size() || cap < 1) {
    throw std::invalid_argument("SPYKING_THREADS must be a positive integer, got '" + std::string(env) + "'");
  }
  omp_set_num_threads(cap);
}

void write_dataset(const std::filesystem::path& dir, std::size_t train, std::size_t test, std::uint64_t seed) {
  std::filesystem::create_directories(dir);
  io::write_idx(io::synthetic_classes(train, seed), dir / "train-images-idx3-ubyte", dir / "train-labels-idx1-ubyte");
  io::write_idx(io::synthetic_classes(test, seed + 1), dir / "t10k-images-idx3-ubyte", dir / "t10k-labels-idx1-ubyte");
}

int dispatch(int argc, char** argv) {
  CLI::App app{"Encrypted DNN/SNN inference over BFV"};
  app.require_subcommand(1);

  experiment::SweepConfig cfg;
  bool no_timings = false;
  std::uint64_t override_q = 0;
  auto* run = app.add_subcommand("run", "Sweep t, run standard and encrypted inference, write CSV reports");
  run->add_option("--model", cfg.model, "lenet5 | slenet5 | micronet | smicronet")->required();
  run->add_option("--t-list", cfg.t_list, "Plaintext moduli, comma separated")->delimiter(',')->capture_default_str();
  run->add_option("--n", cfg.n, "Ring dimension")->capture_default_str();
  run->add_option("--images", cfg.image_count, "Test images per t")->capture_default_str();
  run->add_option("--weights", cfg.weights, "Weight container (.spykw)")->required();
  run->add_option("--dataset", cfg.dataset, "Directory with the IDX test split")->required();
  run->add_option("--seed", cfg.seed, "Seed for keys and encryption")->capture_default_str();
  run->add_option("--out", cfg.out, "Report directory")->required();
  run->add_flag("--full-testset", cfg.full_testset, "Use every test image");
  run->add_option("--override-q", override_q, "Ciphertext modulus instead of the security-derived prime");
  run->add_option("--security-bits", cfg.security_bits, "Security level for q selection")->capture_default_str();
  run->add_option("--seq-length", cfg.seq_length, "Spiking time steps")->capture_default_str();
  run->add_option("--calibration-images", cfg.calibration_images, "Images for DNN scale calibration")
      ->capture_default_str();
  run->add_flag("--no-timings", no_timings, "Leave timing columns empty (byte-stable reports)");

  std::string fixture_model;
  std::uint64_t fixture_seed = 7;
  std::filesystem::path fixture_out;
  std::filesystem::path fit_dataset;
  std::size_t fit_images = 1000;
  auto* fixture = app.add_subcommand("fixture-weights", "Write deterministic pseudo-random weights");
  fixture->add_option("--model", fixture_model, "lenet5 | slenet5 | micronet | smicronet")->required();
  fixture->add_option("--seed", fixture_seed)->capture_default_str();
  fixture->add_option("--out", fixture_out)->required();
  fixture->add_option("--fit-dataset", fit_dataset,
                      "Refit the final dense layer as nearest class mean on this dataset's training split");
  fixture->add_option("--fit-images", fit_images, "Training images used by --fit-dataset")->capture_default_str();

  std::filesystem::path synth_out;
  std::size_t synth_train = 2000;
  std::size_t synth_test = 1000;
  std::uint64_t synth_seed = 11;
  auto* synth = app.add_subcommand("synthetic-dataset", "Write a class-conditional synthetic IDX dataset");
  synth->add_option("--out", synth_out)->required();
  synth->add_option("--train", synth_train)->capture_default_str();
  synth->add_option("--test", synth_test)->capture_default_str();
  synth->add_option("--seed", synth_seed)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kUsage;
  }

  apply_thread_cap();
  if (*run) {
    if (run->count("--override-q")) cfg.override_q = override_q;
    const experiment::SweepResult result = experiment::run_sweep(cfg, &std::cerr);
    experiment::ReportOptions options;
    options.timings = !no_timings;
    const auto files = experiment::emit_report(result, cfg.out, options);
    std::cout << files.per_image.string() << '\n' << files.summary.string() << '\n' << files.trace.string() << '\n';
  } else if (*fixture) {
    nn::Model model = io::load_model(fixture_model, io::fixture_weights(fixture_model, fixture_seed));
    if (!fit_dataset.empty()) {
      io::IdxImageSet train = io::read_train_split(fit_dataset);
      if (train.count() > fit_images) {
        train.images.resize(fit_images);
        train.labels.resize(fit_images);
      }
      model = experiment::fit_readout(std::move(model), train);
    }
    io::write_weights(fixture_out, io::WeightContainer{nn::export_weights(model)});
    std::cout << fixture_out.string() << '\n';
  } else if (*synth) {
    write_dataset(synth_out, synth_train, synth_test, synth_seed);
    std::cout << synth_out.string() << '\n';
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return dispatch(argc, argv);
  } catch (const io::IdxError& e) {
    return fail(kInput, "dataset/" + std::string(idx_kind(e.kind())), e.what());
  } catch (const io::WeightFormatError& e) {
    return fail(kInput, "weights/" + std::string(weight_kind(e.kind())), e.what());
  } catch (const nn::BindingError& e) {
    return fail(kInput, "weights/binding", e.what());
  } catch (const ParameterMismatch& e) {
    return fail(kParameter, "parameter-mismatch", e.what());
  } catch (const std::invalid_argument& e) {
    return fail(kParameter, "invalid-argument", e.what());
  } catch (const std::out_of_range& e) {
    return fail(kParameter, "out-of-range", e.what());
  } catch (const std::filesystem::filesystem_error& e) {
    return fail(kOutput, "filesystem", e.what());
  } catch (const std::runtime_error& e) {
    return fail(kOutput, "runtime", e.what());
  } catch (const std::exception& e) {
    return fail(kFailure, "internal", e.what());
  }
}
