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

// Seeded random streams and parameter ranges.
//
// Engine output is std::mt19937_64, whose sequence is fixed by the
// standard. The standard distributions are not (their algorithms are
// implementation-defined), so the conversions to doubles and bounded
// integers are done here to keep draws identical across toolchains.

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "synthlabel/errors.hpp"
#include "synthlabel/hash.hpp"

namespace synthlabel {

class Stream {
 public:
  explicit Stream(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0, 1) with 53 bits of resolution.
  double uniform01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Uniform on [lo, hi); returns lo when lo == hi.
  double uniform(double lo, double hi) {
    if (!(hi > lo)) return lo;
    const double x = lo + (hi - lo) * uniform01();
    return x < hi ? x : std::nextafter(hi, lo);
  }

  // Uniform integer on the closed interval [lo, hi], unbiased.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
    if (hi <= lo) return lo;
    const std::uint64_t span =
        static_cast<std::uint64_t>(hi) - static_cast<std::uint64_t>(lo) + 1;
    if (span == 0) return static_cast<std::int64_t>(next_u64());
    const std::uint64_t limit =
        std::numeric_limits<std::uint64_t>::max() -
        std::numeric_limits<std::uint64_t>::max() % span;
    std::uint64_t r = next_u64();
    while (r >= limit) r = next_u64();
    return static_cast<std::int64_t>(static_cast<std::uint64_t>(lo) + r % span);
  }

  // Uniform index in [0, n); n must be positive.
  std::size_t index(std::size_t n) {
    return static_cast<std::size_t>(
        uniform_int(0, static_cast<std::int64_t>(n) - 1));
  }

 private:
  std::mt19937_64 engine_;
};

// Seed hierarchy: master -> frame -> named randomizer.
struct SeedTree {
  std::uint64_t master_seed = 0;

  std::uint64_t frame_seed(std::uint64_t frame_index) const noexcept {
    return mix_seed(master_seed, frame_index);
  }

  static std::uint64_t sub_seed(std::uint64_t frame_seed,
                                std::string_view randomizer) noexcept {
    return mix_seed(frame_seed, fnv1a64(randomizer));
  }

  static Stream stream(std::uint64_t frame_seed, std::string_view randomizer) {
    return Stream(sub_seed(frame_seed, randomizer));
  }
};

enum class RangeKind { uniform_continuous, uniform_discrete, categorical };

struct ParamRange {
  RangeKind kind = RangeKind::uniform_continuous;
  double lo = 0.0;
  double hi = 0.0;
  std::vector<std::string> items;

  static ParamRange continuous(double lo, double hi) {
    return {RangeKind::uniform_continuous, lo, hi, {}};
  }
  static ParamRange discrete(std::int64_t lo, std::int64_t hi) {
    return {RangeKind::uniform_discrete, static_cast<double>(lo),
            static_cast<double>(hi), {}};
  }
  static ParamRange categorical(std::vector<std::string> items) {
    return {RangeKind::categorical, 0.0, 0.0, std::move(items)};
  }

  bool valid() const {
    switch (kind) {
      case RangeKind::uniform_continuous:
        return std::isfinite(lo) && std::isfinite(hi) && lo <= hi;
      case RangeKind::uniform_discrete:
        return std::isfinite(lo) && std::isfinite(hi) && lo <= hi &&
               lo == std::floor(lo) && hi == std::floor(hi);
      case RangeKind::categorical:
        return !items.empty();
    }
    return false;
  }

  bool operator==(const ParamRange&) const = default;
};

using SampledValue = std::variant<double, std::int64_t, std::string>;

inline double sample_real(const ParamRange& range, Stream& stream) {
  return stream.uniform(range.lo, range.hi);
}

inline std::int64_t sample_int(const ParamRange& range, Stream& stream) {
  return stream.uniform_int(static_cast<std::int64_t>(range.lo),
                            static_cast<std::int64_t>(range.hi));
}

inline const std::string& sample_item(const ParamRange& range,
                                      Stream& stream) {
  return range.items[stream.index(range.items.size())];
}

inline SampledValue sample(const ParamRange& range, Stream& stream) {
  if (!range.valid()) throw InvalidConfig("invalid parameter range");
  switch (range.kind) {
    case RangeKind::uniform_continuous:
      return sample_real(range, stream);
    case RangeKind::uniform_discrete:
      return sample_int(range, stream);
    case RangeKind::categorical:
      return sample_item(range, stream);
  }
  return 0.0;
}

}  // namespace synthlabel
