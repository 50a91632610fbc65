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

#include <string>
#include <vector>

#include "spyking/experiment/fixture.hpp"
#include "spyking/io/synthetic.hpp"
#include "spyking/io/weights.hpp"
#include "spyking/nn/network.hpp"

namespace spyking::testing {

inline constexpr std::uint64_t kWeightSeed = 7;
inline constexpr std::uint64_t kImageSeed = 3;

inline nn::Model fixture_model(const std::string& name, std::uint64_t seed = kWeightSeed) {
  return io::load_model(name, io::fixture_weights(name, seed));
}

inline std::vector<nn::Tensor3<float>> fixture_images(std::size_t count, std::uint64_t seed = kImageSeed) {
  const io::IdxImageSet set = io::synthetic_images(count, seed);
  std::vector<nn::Tensor3<float>> out;
  for (std::size_t i = 0; i < count; ++i) out.push_back(set.image_tensor(i));
  return out;
}

inline std::vector<nn::Tensor3<float>> tensors(const io::IdxImageSet& set) {
  std::vector<nn::Tensor3<float>> out;
  for (std::size_t i = 0; i < set.count(); ++i) out.push_back(set.image_tensor(i));
  return out;
}

inline constexpr std::uint64_t kFitSeed = 11;
inline constexpr std::uint64_t kCalibrationSeed = 100;

// Fixture weights with the final dense layer fitted to class-conditional
// synthetic images.
inline nn::Model fitted_model(const std::string& name, std::uint64_t seed = kWeightSeed) {
  return experiment::fit_readout(fixture_model(name, seed), io::synthetic_classes(300, kFitSeed));
}

}  // namespace spyking::testing
