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

#include <array>
#include <cstddef>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace synthlabel {

inline constexpr std::size_t kNumKeypoints = 17;

// COCO person keypoint order.
enum Keypoint : std::size_t {
  kNose = 0,
  kLeftEye,
  kRightEye,
  kLeftEar,
  kRightEar,
  kLeftShoulder,
  kRightShoulder,
  kLeftElbow,
  kRightElbow,
  kLeftWrist,
  kRightWrist,
  kLeftHip,
  kRightHip,
  kLeftKnee,
  kRightKnee,
  kLeftAnkle,
  kRightAnkle,
};

inline constexpr std::array<std::string_view, kNumKeypoints> kKeypointNames = {
    "nose",           "left_eye",       "right_eye",  "left_ear",
    "right_ear",      "left_shoulder",  "right_shoulder",
    "left_elbow",     "right_elbow",    "left_wrist", "right_wrist",
    "left_hip",       "right_hip",      "left_knee",  "right_knee",
    "left_ankle",     "right_ankle"};

// Left/right mirror of each keypoint (the nose maps to itself).
inline constexpr std::array<std::size_t, kNumKeypoints> kMirrorKeypoint = {
    kNose,      kRightEye,     kLeftEye,   kRightEar,   kLeftEar,
    kRightShoulder, kLeftShoulder, kRightElbow, kLeftElbow, kRightWrist,
    kLeftWrist, kRightHip,     kLeftHip,   kRightKnee,  kLeftKnee,
    kRightAnkle, kLeftAnkle};

inline constexpr int keypoint_index(std::string_view name) {
  for (std::size_t i = 0; i < kNumKeypoints; ++i)
    if (kKeypointNames[i] == name) return static_cast<int>(i);
  return -1;
}

// Names plus skeleton edges. Edges are 1-based, as written in COCO files.
struct KeypointSchema {
  std::vector<std::string> names;
  std::vector<std::pair<int, int>> skeleton_edges;

  static KeypointSchema coco() {
    KeypointSchema s;
    for (auto n : kKeypointNames) s.names.emplace_back(n);
    s.skeleton_edges = {{16, 14}, {14, 12}, {17, 15}, {15, 13}, {12, 13},
                        {6, 12},  {7, 13},  {6, 7},   {6, 8},   {7, 9},
                        {8, 10},  {9, 11},  {2, 3},   {1, 2},   {1, 3},
                        {2, 4},   {3, 5},   {4, 6},   {5, 7}};
    return s;
  }

  bool operator==(const KeypointSchema&) const = default;
};

}  // namespace synthlabel
