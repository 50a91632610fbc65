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

#include <cstdint>

#include "spyking/io/idx.hpp"

namespace spyking::io {

// 28x28 images of a few filled ellipses on a dark background, with uniform
// random labels. Stands in for FashionMNIST where the dataset is absent.
IdxImageSet synthetic_images(std::size_t count, std::uint64_t seed);

// 28x28 images whose content depends on the label: each class has a fixed
// two-ellipse prototype, and every image jitters its position, size and
// brightness and adds speckle. Labels are uniform.
IdxImageSet synthetic_classes(std::size_t count, std::uint64_t seed);

}  // namespace spyking::io
