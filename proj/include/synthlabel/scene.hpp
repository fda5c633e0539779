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

// Scene value types. Conventions: right-handed world, +y up. A camera
// frame has +x right, +y up and looks along its -z axis. Images have the
// origin at the top-left corner, +u right and +v down.

#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include "synthlabel/errors.hpp"
#include "synthlabel/geometry.hpp"
#include "synthlabel/keypoints.hpp"

namespace synthlabel {

struct OrbitCamera {
  Vec3 target = Vec3::Zero();
  double radius = 5.0;
  double azimuth = 0.0;
  double elevation = 0.0;
  double vertical_fov = kPi / 3.0;
  int image_width = 1280;
  int image_height = 720;

  bool valid() const {
    return target.allFinite() && std::isfinite(radius) && radius > 0.0 &&
           std::isfinite(azimuth) && std::isfinite(elevation) &&
           std::abs(elevation) < kPi / 2.0 && vertical_fov > 0.0 &&
           vertical_fov < kPi && image_width >= 1 && image_height >= 1;
  }
  bool operator==(const OrbitCamera&) const = default;
};

// World-from-camera rigid transform. Columns of `rotation` are the camera
// axes expressed in world coordinates.
struct CameraPose {
  Vec3 position = Vec3::Zero();
  Mat3 rotation = Mat3::Identity();

  Vec3 view_axis() const { return -rotation.col(2); }
};

inline CameraPose camera_pose(const OrbitCamera& cam) {
  if (!cam.valid()) throw InvalidScene("invalid orbit camera");
  const double ce = std::cos(cam.elevation);
  const double se = std::sin(cam.elevation);
  const double ca = std::cos(cam.azimuth);
  const double sa = std::sin(cam.azimuth);
  if (std::abs(ce) < 1e-9)
    throw DegenerateUp("view axis parallel to world up");

  const Vec3 back(ce * sa, se, ce * ca);
  CameraPose pose;
  pose.position = cam.target + cam.radius * back;
  const Vec3 right = Vec3::UnitY().cross(back).normalized();
  const Vec3 up = back.cross(right);
  pose.rotation.col(0) = right;
  pose.rotation.col(1) = up;
  pose.rotation.col(2) = back;
  return pose;
}

struct BoneCapsule {
  int a = 0;
  int b = 0;
  double radius = 0.05;
  bool operator==(const BoneCapsule&) const = default;
};

struct SkeletonPose {
  std::array<Vec3, kNumKeypoints> joints{};
  std::vector<BoneCapsule> bone_capsules;
  std::string pose_id;
  // Placement that produced the joints, kept for scene sidecars.
  Vec3 root = Vec3::Zero();
  double heading = 0.0;
  double scale = 1.0;

  Capsule capsule(const BoneCapsule& bc) const {
    return {joints[static_cast<std::size_t>(bc.a)],
            joints[static_cast<std::size_t>(bc.b)], bc.radius};
  }
  Vec3 mid_hip() const { return 0.5 * (joints[kLeftHip] + joints[kRightHip]); }

  bool valid() const {
    for (const auto& j : joints)
      if (!j.allFinite()) return false;
    for (const auto& c : bone_capsules) {
      if (!(c.radius > 0.0) || c.a == c.b) return false;
      if (c.a < 0 || c.b < 0 || c.a >= int(kNumKeypoints) ||
          c.b >= int(kNumKeypoints))
        return false;
    }
    return true;
  }
  bool operator==(const SkeletonPose&) const = default;
};

enum class OccluderShape { sphere, capsule, box };

struct OccluderPrimitive {
  Solid solid = Sphere{};
  std::int64_t texture_id = 0;

  OccluderShape shape() const {
    return static_cast<OccluderShape>(solid.index());
  }
  bool valid() const {
    return std::visit(
        [](const auto& s) {
          using T = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<T, Aabb>)
            return s.center.allFinite() && (s.half_extents.array() > 0.0).all();
          else if constexpr (std::is_same_v<T, Capsule>)
            return s.a.allFinite() && s.b.allFinite() && s.radius > 0.0;
          else
            return s.center.allFinite() && s.radius > 0.0;
        },
        solid);
  }
  bool operator==(const OccluderPrimitive&) const = default;
};

inline Vec3 occluder_center(const OccluderPrimitive& o) {
  return std::visit(
      [](const auto& s) -> Vec3 {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Capsule>)
          return 0.5 * (s.a + s.b);
        else
          return s.center;
      },
      o.solid);
}

struct LightingMeta {
  double intensity = 1.0;
  double sun_time_of_day = 12.0;  // hours
  int sun_day_of_year = 172;
  bool operator==(const LightingMeta&) const = default;
};

// Rendering switches recorded for downstream renderers; no geometric effect.
struct RenderMeta {
  bool shader_graph = true;
  bool smaa = false;
  std::string occluder_assets = "primitive";
  bool operator==(const RenderMeta&) const = default;
};

inline constexpr int kDefaultHdriCount = 510;

struct SceneDescription {
  std::vector<SkeletonPose> humans;
  std::vector<OccluderPrimitive> occluders;
  OrbitCamera camera;
  LightingMeta lighting_meta;
  RenderMeta render_meta;
  int background_hdri_id = 0;
  std::uint64_t frame_seed = 0;
  std::uint64_t frame_index = 0;

  bool operator==(const SceneDescription&) const = default;
};

// Checks the catalog bound and that every placement lies within
// `scene_extent` of the vertical axis through the origin.
inline void validate_scene(const SceneDescription& scene, int hdri_count,
                           double scene_extent) {
  if (scene.background_hdri_id < 0 || scene.background_hdri_id >= hdri_count)
    throw InvalidScene("background_hdri_id outside catalog");
  if (!scene.camera.valid()) throw InvalidScene("invalid camera");
  auto horizontal = [](const Vec3& p) { return std::hypot(p.x(), p.z()); };
  for (const auto& h : scene.humans) {
    if (!h.valid()) throw InvalidScene("invalid skeleton");
    if (horizontal(h.mid_hip()) > scene_extent * (1.0 + 1e-12))
      throw InvalidScene("human outside scene extent");
  }
  for (const auto& o : scene.occluders) {
    if (!o.valid()) throw InvalidScene("invalid occluder");
    if (horizontal(occluder_center(o)) > scene_extent * (1.0 + 1e-12))
      throw InvalidScene("occluder outside scene extent");
  }
}

}  // namespace synthlabel
