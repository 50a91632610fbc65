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

#include "spyking/io/idx.hpp"
#include "spyking/nn/network.hpp"
#include "spyking/snn/lif.hpp"

namespace spyking::experiment {

// Refits the final dense layer as a nearest-class-mean classifier over the
// features that feed it (spike counts for a spiking model). Every other
// layer is left as is. Throws std::invalid_argument if the last layer is not
// dense or no images are given.
nn::Model fit_readout(nn::Model model, const io::IdxImageSet& images, const snn::LifParams& lif = {},
                      std::size_t seq_length = snn::kDefaultSeqLength);

}  // namespace spyking::experiment
