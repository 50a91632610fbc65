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

// Binary encoding of keys and ciphertexts.
//
//   magic   "BFVSER01"            8 bytes
//   version u8 (= 1)
//   kind    u8 (1 ciphertext, 2 public key, 3 secret key)
//   n u32, q u64, t u64           little-endian
//   [ciphertext only] mult_depth u32
//   part count u32, then per part: length u32 followed by that many u64
//   coefficients in [0, q)

#pragma once

#include <iosfwd>
#include <stdexcept>

#include "spyking/bfv/bfv.hpp"

namespace spyking::bfv {

class SerializationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr char kSerialMagic[8] = {'B', 'F', 'V', 'S', 'E', 'R', '0', '1'};
inline constexpr std::uint8_t kSerialVersion = 1;

enum class SerialKind : std::uint8_t { Ciphertext = 1, PublicKey = 2, SecretKey = 3 };

void write_ciphertext(std::ostream& out, const Ciphertext& ct);
void write_public_key(std::ostream& out, const PublicKey& pk);
void write_secret_key(std::ostream& out, const SecretKey& sk);

// ctx must match the parameters in the header.
Ciphertext read_ciphertext(std::istream& in, const BfvContextPtr& ctx);
PublicKey read_public_key(std::istream& in, const BfvContextPtr& ctx);
SecretKey read_secret_key(std::istream& in, const BfvContextPtr& ctx);

// Parameters recorded in a header, leaving the stream positioned after it.
BfvParams read_header(std::istream& in, SerialKind expected);

}  // namespace spyking::bfv
