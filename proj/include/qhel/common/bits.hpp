// Copyright 2026 The qhelearn Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace qhel::common {

/// A bit vector stored one bit per byte, values restricted to {0, 1}.
using Bits = std::vector<std::uint8_t>;

/// Bit i of x, little-endian (bit 0 = least significant).
inline int bit_of(std::uint64_t x, int i) {
    return static_cast<int>((x >> i) & 1u);
}

/// Integer from little-endian bits: bits[0] is the least significant.
inline std::uint64_t bits_to_uint(const Bits &bits) {
    std::uint64_t x = 0;
    for (std::size_t i = 0; i < bits.size(); ++i)
        x |= static_cast<std::uint64_t>(bits[i] & 1u) << i;
    return x;
}

/// Little-endian bit expansion of x into n bits.
inline Bits uint_to_bits(std::uint64_t x, int n) {
    Bits bits(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        bits[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>((x >> i) & 1u);
    return bits;
}

/// '0'/'1' rendering, index 0 first.
inline std::string bits_to_string(const Bits &bits) {
    std::string s;
    s.reserve(bits.size());
    for (auto b : bits)
        s.push_back(b ? '1' : '0');
    return s;
}

inline Bits xor_bits(const Bits &x, const Bits &y) {
    Bits out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i)
        out[i] = static_cast<std::uint8_t>((x[i] ^ y[i]) & 1u);
    return out;
}

inline std::string to_hex(const std::vector<std::uint8_t> &bytes) {
    static const char digits[] = "0123456789abcdef";
    std::string s;
    s.reserve(bytes.size() * 2);
    for (auto b : bytes) {
        s.push_back(digits[b >> 4]);
        s.push_back(digits[b & 0xf]);
    }
    return s;
}

} // namespace qhel::common
