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

// Dataset diagnostics: per-range box counts and keypoint label
// probabilities, box shape summaries, and torso-normalized pose heatmaps.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Core>
#include <nlohmann/json.hpp>

#include "synthlabel/annotation_io.hpp"
#include "synthlabel/errors.hpp"
#include "synthlabel/label_adapt.hpp"

namespace synthlabel {

using Vec2 = Eigen::Vector2d;

struct AlignedSkeleton {
  std::array<std::optional<Vec2>, kNumKeypoints> points;
  double torso_length = 0.0;
};

inline constexpr double kMinTorsoLength = 1e-6;

// Translates labeled keypoints so the mid-hip sits at (0, 0) and divides by
// the mid-hip to mid-shoulder distance. nullopt unless both hips and both
// shoulders are labeled.
inline std::optional<AlignedSkeleton> align_skeleton(const PersonAnnotation& a) {
  const auto& k = a.keypoints;
  for (auto j : {kLeftHip, kRightHip, kLeftShoulder, kRightShoulder})
    if (k[j].v == 0) return std::nullopt;
  auto at = [&](std::size_t j) { return Vec2(k[j].x, k[j].y); };
  const Vec2 mid_hip = 0.5 * (at(kLeftHip) + at(kRightHip));
  const Vec2 mid_shoulder = 0.5 * (at(kLeftShoulder) + at(kRightShoulder));
  AlignedSkeleton out;
  out.torso_length = (mid_shoulder - mid_hip).norm();
  if (out.torso_length < kMinTorsoLength)
    throw DegenerateTorso("annotation " + std::to_string(a.id));
  for (std::size_t j = 0; j < kNumKeypoints; ++j)
    if (k[j].v > 0) out.points[j] = (at(j) - mid_hip) / out.torso_length;
  return out;
}

// Heatmap channels: the 17 keypoints plus the mid-hip alignment origin.
inline constexpr std::size_t kHeatmapChannels = kNumKeypoints + 1;
inline constexpr std::size_t kMidHipChannel = kNumKeypoints;

inline std::string heatmap_channel_name(std::size_t c) {
  return c == kMidHipChannel ? std::string("mid_hip")
                             : std::string(kKeypointNames[c]);
}

struct PoseHeatmapGrid {
  double extent = 3.0;
  int resolution = 101;
  // Row-major resolution x resolution counts per channel; rows follow +y
  // (image down), columns +x.
  std::array<std::vector<std::int64_t>, kHeatmapChannels> grids;
  std::array<std::int64_t, kHeatmapChannels> overflow{};
  std::int64_t instance_count = 0;
  std::int64_t rejected = 0;
  std::int64_t degenerate = 0;

  PoseHeatmapGrid() : PoseHeatmapGrid(3.0, 101) {}
  PoseHeatmapGrid(double extent_, int resolution_)
      : extent(extent_), resolution(resolution_) {
    if (resolution < 3 || resolution % 2 == 0)
      throw InvalidConfig("heatmap resolution must be odd and >= 3");
    if (!(extent > 0.0) || !std::isfinite(extent))
      throw InvalidConfig("heatmap extent must be positive");
    for (auto& g : grids)
      g.assign(static_cast<std::size_t>(resolution) * resolution, 0);
  }

  std::int64_t at(std::size_t channel, int row, int col) const {
    return grids[channel][static_cast<std::size_t>(row) * resolution + col];
  }

  std::int64_t mass(std::size_t channel) const {
    std::int64_t m = 0;
    for (auto c : grids[channel]) m += c;
    return m;
  }

  int center_bin() const { return resolution / 2; }

  // Bin of a normalized coordinate, or -1 outside [-extent, extent).
  int bin(double x) const {
    const double width = 2.0 * extent / resolution;
    const double b = std::floor((x + extent) / width);
    if (!(b >= 0.0) || b >= resolution) return -1;
    return static_cast<int>(b);
  }

  void add_point(std::size_t channel, const Vec2& p) {
    const int col = bin(p.x());
    const int row = bin(p.y());
    if (col < 0 || row < 0) {
      ++overflow[channel];
      return;
    }
    ++grids[channel][static_cast<std::size_t>(row) * resolution + col];
  }

  void add(const AlignedSkeleton& s) {
    ++instance_count;
    for (std::size_t j = 0; j < kNumKeypoints; ++j)
      if (s.points[j]) add_point(j, *s.points[j]);
    add_point(kMidHipChannel, Vec2::Zero());
  }

  PoseHeatmapGrid& operator+=(const PoseHeatmapGrid& o) {
    if (o.extent != extent || o.resolution != resolution)
      throw InvalidConfig("cannot merge heatmaps of different geometry");
    for (std::size_t c = 0; c < kHeatmapChannels; ++c) {
      for (std::size_t i = 0; i < grids[c].size(); ++i) grids[c][i] += o.grids[c][i];
      overflow[c] += o.overflow[c];
    }
    instance_count += o.instance_count;
    rejected += o.rejected;
    degenerate += o.degenerate;
    return *this;
  }

  bool operator==(const PoseHeatmapGrid&) const = default;
};

inline PoseHeatmapGrid pose_heatmaps(const AnnotatedDataset& ds, double extent = 3.0,
                                     int resolution = 101) {
  PoseHeatmapGrid grid(extent, resolution);
  for (const auto& a : ds.annotations) {
    try {
      if (auto s = align_skeleton(a))
        grid.add(*s);
      else
        ++grid.rejected;
    } catch (const DegenerateTorso&) {
      ++grid.degenerate;
    }
  }
  return grid;
}

inline std::string heatmap_csv(const PoseHeatmapGrid& g, std::size_t channel) {
  std::ostringstream out;
  for (int r = 0; r < g.resolution; ++r) {
    for (int c = 0; c < g.resolution; ++c) {
      if (c) out << ',';
      out << g.at(channel, r, c);
    }
    out << '\n';
  }
  return out.str();
}

inline nlohmann::json heatmap_summary_json(const PoseHeatmapGrid& g) {
  nlohmann::json channels = nlohmann::json::array();
  for (std::size_t c = 0; c < kHeatmapChannels; ++c)
    channels.push_back({{"name", heatmap_channel_name(c)},
                        {"file", "heatmap_" + heatmap_channel_name(c) + ".csv"},
                        {"mass", g.mass(c)},
                        {"overflow", g.overflow[c]}});
  return {{"extent", g.extent},
          {"resolution", g.resolution},
          {"instance_count", g.instance_count},
          {"rejected", g.rejected},
          {"degenerate", g.degenerate},
          {"channels", channels}};
}

// Streaming min / max / mean / standard deviation.
struct Summary {
  std::int64_t count = 0;
  double min = std::numeric_limits<double>::infinity();
  double max = -std::numeric_limits<double>::infinity();
  double sum = 0.0;
  double sum_sq = 0.0;

  void add(double x) {
    ++count;
    min = std::min(min, x);
    max = std::max(max, x);
    sum += x;
    sum_sq += x * x;
  }
  Summary& operator+=(const Summary& o) {
    count += o.count;
    min = std::min(min, o.min);
    max = std::max(max, o.max);
    sum += o.sum;
    sum_sq += o.sum_sq;
    return *this;
  }
  double mean() const { return count ? sum / count : 0.0; }
  double stddev() const {
    if (count == 0) return 0.0;
    const double m = mean();
    return std::sqrt(std::max(0.0, sum_sq / count - m * m));
  }
};

struct DatasetStatistics {
  AreaRanges ranges;
  std::int64_t images = 0;
  std::int64_t annotations = 0;
  RangeCounts counts;
  Summary box_area;
  Summary box_aspect;  // w / h
  std::map<std::int64_t, std::int64_t> boxes_per_image;  // boxes -> images

  // Count-weighted merge; assumes disjoint image sets.
  DatasetStatistics& operator+=(const DatasetStatistics& o) {
    if (!(o.ranges == ranges)) throw InvalidConfig("cannot merge statistics over different ranges");
    images += o.images;
    annotations += o.annotations;
    counts += o.counts;
    box_area += o.box_area;
    box_aspect += o.box_aspect;
    for (auto [k, v] : o.boxes_per_image) boxes_per_image[k] += v;
    return *this;
  }

  RangeKeypointTable<double> probabilities() const { return counts.probabilities(); }
};

inline DatasetStatistics dataset_statistics(const AnnotatedDataset& ds,
                                            const AreaRanges& ranges = {}) {
  DatasetStatistics s;
  s.ranges = ranges;
  s.images = static_cast<std::int64_t>(ds.images.size());
  s.annotations = static_cast<std::int64_t>(ds.annotations.size());
  s.counts = count_by_range(ds, ranges);
  std::unordered_map<std::int64_t, std::int64_t> per_image;
  for (const auto& im : ds.images) per_image[im.id] = 0;
  for (const auto& a : ds.annotations) {
    s.box_area.add(a.box_area());
    s.box_aspect.add(a.bbox.w / a.bbox.h);
    ++per_image[a.image_id];
  }
  for (auto [id, n] : per_image) ++s.boxes_per_image[n];
  return s;
}

inline nlohmann::json statistics_to_json(const DatasetStatistics& s) {
  using nlohmann::json;
  auto summary = [](const Summary& x) -> json {
    if (x.count == 0) return {{"count", 0}, {"min", nullptr}, {"max", nullptr},
                              {"mean", nullptr}, {"stddev", nullptr}};
    return {{"count", x.count}, {"min", x.min}, {"max", x.max},
            {"mean", x.mean()}, {"stddev", x.stddev()}};
  };
  const auto p = s.probabilities();
  json ranges = json::array();
  const auto bounds = ranges_to_json(s.ranges);
  for (std::size_t r = 0; r < kNumAreaRanges; ++r) {
    json probs = json::object();
    for (std::size_t k = 0; k < kNumKeypoints; ++k)
      probs[std::string(kKeypointNames[k])] =
          s.counts.annotations[r] == 0 ? json(nullptr) : json(p[r][k]);
    ranges.push_back({{"range", bounds[r]},
                      {"annotations", s.counts.annotations[r]},
                      {"keypoint_probability", probs}});
  }
  json hist = json::object();
  for (auto [boxes, images] : s.boxes_per_image) hist[std::to_string(boxes)] = images;
  return {{"images", s.images},
          {"annotations", s.annotations},
          {"area_ranges", ranges},
          {"box_area", summary(s.box_area)},
          {"box_aspect", summary(s.box_aspect)},
          {"boxes_per_image", hist}};
}

}  // namespace synthlabel
