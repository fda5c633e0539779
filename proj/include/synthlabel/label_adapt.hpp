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

// Label adaptation against a reference dataset: box filtering by the
// reference's smallest keypoint-annotated box, and random removal of
// surplus keypoint labels so per-(area range, keypoint) label
// probabilities match the reference.

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "synthlabel/annotation_io.hpp"
#include "synthlabel/errors.hpp"
#include "synthlabel/hash.hpp"
#include "synthlabel/random.hpp"

namespace synthlabel {

enum class AdaptMode { none, box, box_kpt };

inline std::string_view to_string(AdaptMode m) {
  switch (m) {
    case AdaptMode::none: return "none";
    case AdaptMode::box: return "box";
    case AdaptMode::box_kpt: return "box+kpt";
  }
  return "none";
}

inline AdaptMode adapt_mode_from_string(std::string_view s) {
  if (s == "none") return AdaptMode::none;
  if (s == "box") return AdaptMode::box;
  if (s == "box+kpt") return AdaptMode::box_kpt;
  throw InvalidConfig("unknown adaptation mode '" + std::string(s) + "'");
}

inline constexpr std::size_t kNumAreaRanges = 6;

// Six contiguous half-open ranges over box area (px^2):
// [0, b0), [b0, b1), ..., [b4, inf).
struct AreaRanges {
  std::array<double, kNumAreaRanges - 1> boundaries = {
      32.0 * 32.0, 64.0 * 64.0, 96.0 * 96.0, 128.0 * 128.0, 256.0 * 256.0};

  double lower(std::size_t r) const { return r == 0 ? 0.0 : boundaries[r - 1]; }
  double upper(std::size_t r) const {
    return r + 1 == kNumAreaRanges ? std::numeric_limits<double>::infinity()
                                   : boundaries[r];
  }

  std::size_t index_of(double area) const {
    std::size_t r = 0;
    while (r + 1 < kNumAreaRanges && area >= boundaries[r]) ++r;
    return r;
  }

  bool valid() const {
    double prev = 0.0;
    for (double b : boundaries) {
      if (!std::isfinite(b) || !(b > prev)) return false;
      prev = b;
    }
    return true;
  }

  bool operator==(const AreaRanges&) const = default;
};

template <class T>
using RangeKeypointTable = std::array<std::array<T, kNumKeypoints>, kNumAreaRanges>;

struct AdaptationProfile {
  double min_area = 0.0;
  double min_area_ratio = 0.0;
  AreaRanges ranges;
  RangeKeypointTable<double> p_ref{};
  std::array<std::int64_t, kNumAreaRanges> reference_counts{};

  bool operator==(const AdaptationProfile&) const = default;
};

namespace detail {

inline std::unordered_map<std::int64_t, const ImageRecord*> image_index(
    const AnnotatedDataset& ds) {
  std::unordered_map<std::int64_t, const ImageRecord*> out;
  for (const auto& im : ds.images) out.emplace(im.id, &im);
  return out;
}

// Crowd regions carry no per-person keypoints and are left out of counts.
inline bool counts_as_person(const PersonAnnotation& a) { return a.iscrowd == 0; }

}  // namespace detail

// Per-range annotation counts and per-(range, keypoint) labeled counts.
struct RangeCounts {
  std::array<std::int64_t, kNumAreaRanges> annotations{};
  RangeKeypointTable<std::int64_t> labeled{};

  RangeCounts& operator+=(const RangeCounts& o) {
    for (std::size_t r = 0; r < kNumAreaRanges; ++r) {
      annotations[r] += o.annotations[r];
      for (std::size_t k = 0; k < kNumKeypoints; ++k) labeled[r][k] += o.labeled[r][k];
    }
    return *this;
  }

  // labeled / annotations; 0 for an empty range.
  RangeKeypointTable<double> probabilities() const {
    RangeKeypointTable<double> p{};
    for (std::size_t r = 0; r < kNumAreaRanges; ++r)
      for (std::size_t k = 0; k < kNumKeypoints; ++k)
        p[r][k] = annotations[r] == 0
                      ? 0.0
                      : static_cast<double>(labeled[r][k]) /
                            static_cast<double>(annotations[r]);
    return p;
  }

  bool operator==(const RangeCounts&) const = default;
};

inline RangeCounts count_by_range(const AnnotatedDataset& ds,
                                  const AreaRanges& ranges) {
  RangeCounts c;
  for (const auto& a : ds.annotations) {
    if (!detail::counts_as_person(a)) continue;
    const auto r = ranges.index_of(a.box_area());
    ++c.annotations[r];
    for (std::size_t k = 0; k < kNumKeypoints; ++k)
      if (a.keypoints[k].v > 0) ++c.labeled[r][k];
  }
  return c;
}

inline AdaptationProfile compute_profile(const AnnotatedDataset& reference,
                                         const AreaRanges& ranges = {}) {
  if (!ranges.valid()) throw InvalidConfig("invalid area ranges");
  const auto images = detail::image_index(reference);
  AdaptationProfile prof;
  prof.ranges = ranges;
  prof.min_area = std::numeric_limits<double>::infinity();
  prof.min_area_ratio = std::numeric_limits<double>::infinity();
  bool any = false;
  for (const auto& a : reference.annotations) {
    if (!detail::counts_as_person(a) || a.num_keypoints == 0) continue;
    const auto it = images.find(a.image_id);
    if (it == images.end()) throw SchemaViolation("dangling image_id");
    any = true;
    prof.min_area = std::min(prof.min_area, a.box_area());
    prof.min_area_ratio =
        std::min(prof.min_area_ratio, a.box_area() / it->second->pixel_area());
  }
  if (!any) throw NoKeypointAnnotations("reference has no keypoint-annotated boxes");
  const auto counts = count_by_range(reference, ranges);
  prof.p_ref = counts.probabilities();
  prof.reference_counts = counts.annotations;
  return prof;
}

inline bool passes_box_thresholds(const PersonAnnotation& a, const ImageRecord& im,
                                  const AdaptationProfile& profile) {
  return a.box_area() >= profile.min_area &&
         a.box_area() / im.pixel_area() > profile.min_area_ratio;
}

// Keeps annotations with area >= min_area and area / image area >
// min_area_ratio. Images are kept even when left without annotations.
inline AnnotatedDataset adapt_boxes(const AnnotatedDataset& ds,
                                    const AdaptationProfile& profile) {
  const auto images = detail::image_index(ds);
  AnnotatedDataset out = ds;
  out.annotations.clear();
  for (const auto& a : ds.annotations) {
    const auto it = images.find(a.image_id);
    if (it == images.end()) throw SchemaViolation("dangling image_id");
    if (passes_box_thresholds(a, *it->second, profile)) out.annotations.push_back(a);
  }
  return out;
}

// Round-half-up target count for a (range, keypoint) cell.
inline std::int64_t keypoint_target(double p_ref, std::int64_t n) {
  return static_cast<std::int64_t>(std::floor(p_ref * static_cast<double>(n) + 0.5));
}

// For every (range r, keypoint k) with c labeled instances among N_r
// annotations, drops c - round(p_ref[r][k] * N_r) of them (when positive),
// chosen uniformly without replacement from a stream seeded by
// mix(mix(seed, r), k).
inline AnnotatedDataset adapt_keypoints(const AnnotatedDataset& ds,
                                        const AdaptationProfile& profile,
                                        std::uint64_t seed) {
  AnnotatedDataset out = ds;
  std::array<std::vector<std::size_t>, kNumAreaRanges> members;
  for (std::size_t i = 0; i < out.annotations.size(); ++i) {
    const auto& a = out.annotations[i];
    if (detail::counts_as_person(a))
      members[profile.ranges.index_of(a.box_area())].push_back(i);
  }
  for (std::size_t r = 0; r < kNumAreaRanges; ++r) {
    const auto n = static_cast<std::int64_t>(members[r].size());
    for (std::size_t k = 0; k < kNumKeypoints; ++k) {
      std::vector<std::size_t> labeled;
      for (auto i : members[r])
        if (out.annotations[i].keypoints[k].v > 0) labeled.push_back(i);
      const auto target = keypoint_target(profile.p_ref[r][k], n);
      const auto count = static_cast<std::int64_t>(labeled.size());
      if (count <= target) continue;
      Stream stream(mix_seed(mix_seed(seed, r), k));
      const auto surplus = static_cast<std::size_t>(count - target);
      // Partial Fisher-Yates: the first `surplus` slots become the sample.
      for (std::size_t s = 0; s < surplus; ++s) {
        const std::size_t pick = s + stream.index(labeled.size() - s);
        std::swap(labeled[s], labeled[pick]);
        out.annotations[labeled[s]].unlabel(k);
      }
    }
  }
  return out;
}

inline AnnotatedDataset adapt(const AnnotatedDataset& ds,
                              const AdaptationProfile& profile, AdaptMode mode,
                              std::uint64_t seed) {
  switch (mode) {
    case AdaptMode::none:
      return ds;
    case AdaptMode::box:
      return adapt_boxes(ds, profile);
    case AdaptMode::box_kpt:
      return adapt_keypoints(adapt_boxes(ds, profile), profile, seed);
  }
  return ds;
}

struct AdaptSummary {
  std::array<std::int64_t, kNumAreaRanges> removed_boxes{};
  std::array<std::int64_t, kNumAreaRanges> removed_keypoints{};
};

// What adapt() removed, bucketed by the range of the affected box.
inline AdaptSummary summarize_adaptation(const AnnotatedDataset& before,
                                         const AnnotatedDataset& after,
                                         const AreaRanges& ranges) {
  AdaptSummary s;
  std::unordered_map<std::int64_t, const PersonAnnotation*> kept;
  for (const auto& a : after.annotations) kept.emplace(a.id, &a);
  for (const auto& a : before.annotations) {
    const auto r = ranges.index_of(a.box_area());
    const auto it = kept.find(a.id);
    if (it == kept.end()) {
      ++s.removed_boxes[r];
      continue;
    }
    s.removed_keypoints[r] += a.num_keypoints - it->second->num_keypoints;
  }
  return s;
}

// ---- JSON ----------------------------------------------------------------

inline nlohmann::json ranges_to_json(const AreaRanges& ranges) {
  nlohmann::json out = nlohmann::json::array();
  for (std::size_t r = 0; r < kNumAreaRanges; ++r) {
    const double hi = ranges.upper(r);
    out.push_back({ranges.lower(r), std::isinf(hi) ? nlohmann::json(nullptr)
                                                   : nlohmann::json(hi)});
  }
  return out;
}

// Accepts either {"boundaries": [b0..b4]} or a list of six [lo, hi] pairs
// (hi = null for the last, unbounded range).
inline AreaRanges ranges_from_json(const nlohmann::json& j) {
  AreaRanges ranges;
  try {
    if (j.is_object()) {
      const auto& b = j.at("boundaries");
      if (!b.is_array() || b.size() != kNumAreaRanges - 1)
        throw InvalidConfig("expected five range boundaries");
      for (std::size_t i = 0; i < b.size(); ++i) ranges.boundaries[i] = b[i].get<double>();
    } else {
      if (!j.is_array() || j.size() != kNumAreaRanges)
        throw InvalidConfig("expected exactly six area ranges");
      if (j[0].at(0).get<double>() != 0.0)
        throw InvalidConfig("first area range must start at 0");
      if (!j[kNumAreaRanges - 1].at(1).is_null())
        throw InvalidConfig("last area range must be unbounded");
      for (std::size_t r = 0; r + 1 < kNumAreaRanges; ++r) {
        const double hi = j[r].at(1).get<double>();
        if (j[r + 1].at(0).get<double>() != hi)
          throw InvalidConfig("area ranges must be contiguous");
        ranges.boundaries[r] = hi;
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw InvalidConfig(std::string("area ranges: ") + e.what());
  }
  if (!ranges.valid()) throw InvalidConfig("area range boundaries must ascend");
  return ranges;
}

inline nlohmann::json profile_to_json(const AdaptationProfile& p) {
  nlohmann::json j;
  j["min_area"] = p.min_area;
  j["min_area_ratio"] = p.min_area_ratio;
  j["ranges"] = ranges_to_json(p.ranges);
  j["p_ref"] = p.p_ref;
  j["reference_counts"] = p.reference_counts;
  j["keypoint_names"] = kKeypointNames;
  return j;
}

inline AdaptationProfile profile_from_json(const nlohmann::json& j) {
  AdaptationProfile p;
  try {
    p.min_area = j.at("min_area").get<double>();
    p.min_area_ratio = j.at("min_area_ratio").get<double>();
    p.ranges = ranges_from_json(j.at("ranges"));
    const auto& m = j.at("p_ref");
    if (!m.is_array() || m.size() != kNumAreaRanges)
      throw InvalidConfig("p_ref must have six rows");
    for (std::size_t r = 0; r < kNumAreaRanges; ++r) {
      if (!m[r].is_array() || m[r].size() != kNumKeypoints)
        throw InvalidConfig("p_ref rows must have 17 entries");
      for (std::size_t k = 0; k < kNumKeypoints; ++k) {
        const double v = m[r][k].get<double>();
        if (!(v >= 0.0 && v <= 1.0)) throw InvalidConfig("p_ref entry outside [0, 1]");
        p.p_ref[r][k] = v;
      }
    }
    const auto& counts = j.at("reference_counts");
    if (!counts.is_array() || counts.size() != kNumAreaRanges)
      throw InvalidConfig("reference_counts must have six entries");
    for (std::size_t r = 0; r < kNumAreaRanges; ++r)
      p.reference_counts[r] = counts[r].get<std::int64_t>();
  } catch (const nlohmann::json::exception& e) {
    throw InvalidConfig(std::string("profile: ") + e.what());
  }
  if (!(p.min_area > 0.0)) throw InvalidConfig("min_area must be positive");
  if (!(p.min_area_ratio > 0.0 && p.min_area_ratio <= 1.0))
    throw InvalidConfig("min_area_ratio must lie in (0, 1]");
  return p;
}

}  // namespace synthlabel
