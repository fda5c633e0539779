// Copyright 2026 The synthlabel Authors
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
#include <string_view>

namespace synthlabel {

// 64-bit FNV-1a. Used for randomizer name hashes and config fingerprints.
constexpr std::uint64_t fnv1a64(std::string_view bytes) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : bytes) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

// splitmix64 output finalizer; a bijection on 64-bit words.
constexpr std::uint64_t splitmix_finalize(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Seed derivation used everywhere a child stream is split from a parent:
//
//   mix(a, b) = F(F(a) + (2b + 1) * 0x9e3779b97f4a7c15)
//
// with F = splitmix_finalize. For fixed a the map b -> mix(a, b) is a
// bijection (odd multiplier, bijective F), and likewise for fixed b.
constexpr std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) noexcept {
  return splitmix_finalize(splitmix_finalize(a) +
                           (2 * b + 1) * 0x9e3779b97f4a7c15ULL);
}

}  // namespace synthlabel
