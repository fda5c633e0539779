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

// Pose library: named static skeleton configurations in a body frame
// (mid-hip at the origin, facing +z, +y up, the person's left on +x),
// shared capsule body proxies, and per-bone angular limits.
//
// Limb bones are described by two angles of their unit direction d:
//   d = (side * sin(roll), -cos(roll) * cos(pitch), cos(roll) * sin(pitch))
// where side = +1 for left limbs and -1 for right limbs. pitch swings the
// limb forward, roll abducts it away from the body midline.

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "synthlabel/errors.hpp"
#include "synthlabel/geometry.hpp"
#include "synthlabel/keypoints.hpp"
#include "synthlabel/random.hpp"
#include "synthlabel/scene.hpp"

namespace synthlabel {

enum class PoseMode { simple, diverse };

inline std::string_view to_string(PoseMode m) {
  return m == PoseMode::simple ? "simple" : "diverse";
}

inline PoseMode pose_mode_from_string(std::string_view s) {
  if (s == "simple") return PoseMode::simple;
  if (s == "diverse") return PoseMode::diverse;
  throw InvalidConfig("unknown pose mode '" + std::string(s) + "'");
}

// Families used in simple mode.
inline constexpr std::array<std::string_view, 3> kSimpleFamilies = {
    "walk", "run", "idle"};

struct StoredPose {
  std::string id;
  std::string family;
  std::array<Vec3, kNumKeypoints> joints{};
  bool operator==(const StoredPose&) const = default;
};

struct AngleRange {
  double lo = 0.0;
  double hi = 0.0;
  bool contains(double x, double tol = 1e-9) const {
    return x >= lo - tol && x <= hi + tol;
  }
  bool operator==(const AngleRange&) const = default;
};

struct JointLimit {
  int parent = 0;
  int child = 0;
  AngleRange pitch;
  AngleRange roll;
  double jitter = 0.0;  // half-width of the diverse-mode perturbation
  bool operator==(const JointLimit&) const = default;
};

struct BoneAngles {
  double pitch = 0.0;
  double roll = 0.0;
};

inline double limb_side(int joint) {
  // Left keypoints have odd indices from the eyes onward.
  return (joint % 2 == 1) ? 1.0 : -1.0;
}

inline Vec3 bone_direction(BoneAngles a, double side) {
  return {side * std::sin(a.roll), -std::cos(a.roll) * std::cos(a.pitch),
          std::cos(a.roll) * std::sin(a.pitch)};
}

inline BoneAngles bone_angles(const Vec3& dir, double side) {
  const Vec3 d = dir.normalized();
  return {std::atan2(d.z(), -d.y()),
          std::asin(std::clamp(side * d.x(), -1.0, 1.0))};
}

struct PoseLibrary {
  PoseMode mode = PoseMode::diverse;
  int version = 1;
  std::vector<StoredPose> poses;
  std::vector<BoneCapsule> capsules;
  // Ordered so that a parent bone precedes its child bone.
  std::vector<JointLimit> joint_limits;

  const StoredPose& find(std::string_view id) const {
    for (const auto& p : poses)
      if (p.id == id) return p;
    throw UnknownPose(std::string(id));
  }

  bool in_mode(const StoredPose& p) const {
    if (mode == PoseMode::diverse) return true;
    return std::find(kSimpleFamilies.begin(), kSimpleFamilies.end(),
                     p.family) != kSimpleFamilies.end();
  }

  std::vector<std::string> pose_ids() const {
    std::vector<std::string> out;
    for (const auto& p : poses)
      if (in_mode(p)) out.push_back(p.id);
    return out;
  }

  bool satisfies_limits(const StoredPose& p) const {
    for (const auto& lim : joint_limits) {
      const Vec3 d = p.joints[std::size_t(lim.child)] -
                     p.joints[std::size_t(lim.parent)];
      const auto a = bone_angles(d, limb_side(lim.parent));
      if (!lim.pitch.contains(a.pitch) || !lim.roll.contains(a.roll))
        return false;
    }
    return true;
  }

  void validate() const {
    if (poses.empty()) throw InvalidConfig("pose library is empty");
    for (const auto& p : poses) {
      for (const auto& j : p.joints)
        if (!j.allFinite()) throw InvalidConfig("non-finite joint in " + p.id);
      if (!satisfies_limits(p))
        throw InvalidConfig("pose " + p.id + " violates joint limits");
    }
    for (auto fam : kSimpleFamilies) {
      const bool present = std::any_of(poses.begin(), poses.end(),
                                       [&](const auto& p) { return p.family == fam; });
      if (!present)
        throw InvalidConfig("pose library lacks family " + std::string(fam));
    }
    // Roll beyond a quarter turn aliases to another (pitch, roll) pair.
    for (const auto& lim : joint_limits)
      if (!(lim.roll.lo >= -kPi / 2 && lim.roll.hi <= kPi / 2 && lim.roll.lo <= lim.roll.hi &&
            lim.pitch.lo <= lim.pitch.hi))
        throw InvalidConfig("joint limit out of range");
    for (const auto& c : capsules)
      if (!(c.radius > 0.0) || c.a == c.b || c.a < 0 || c.b < 0 ||
          c.a >= int(kNumKeypoints) || c.b >= int(kNumKeypoints))
        throw InvalidConfig("invalid capsule spec");
  }
};

// Default capsule radii in meters.
struct CapsuleRadii {
  double head = 0.11;
  double face = 0.03;
  double torso = 0.16;
  double upper_limbs = 0.05;
  double lower_limbs = 0.07;
};

inline std::vector<BoneCapsule> default_capsules(const CapsuleRadii& r = {}) {
  return {
      {kLeftEar, kRightEar, r.head},
      {kNose, kLeftEye, r.face},
      {kNose, kRightEye, r.face},
      {kLeftEye, kLeftEar, r.face},
      {kRightEye, kRightEar, r.face},
      {kLeftShoulder, kLeftHip, r.torso},
      {kRightShoulder, kRightHip, r.torso},
      {kLeftShoulder, kRightShoulder, r.torso},
      {kLeftShoulder, kLeftElbow, r.upper_limbs},
      {kLeftElbow, kLeftWrist, r.upper_limbs},
      {kRightShoulder, kRightElbow, r.upper_limbs},
      {kRightElbow, kRightWrist, r.upper_limbs},
      {kLeftHip, kLeftKnee, r.lower_limbs},
      {kLeftKnee, kLeftAnkle, r.lower_limbs},
      {kRightHip, kRightKnee, r.lower_limbs},
      {kRightKnee, kRightAnkle, r.lower_limbs},
  };
}

inline std::vector<JointLimit> default_joint_limits() {
  std::vector<JointLimit> out;
  for (double side : {1.0, -1.0}) {
    const bool left = side > 0.0;
    const int sho = left ? kLeftShoulder : kRightShoulder;
    const int elb = left ? kLeftElbow : kRightElbow;
    const int wri = left ? kLeftWrist : kRightWrist;
    const int hip = left ? kLeftHip : kRightHip;
    const int kne = left ? kLeftKnee : kRightKnee;
    const int ank = left ? kLeftAnkle : kRightAnkle;
    out.push_back({sho, elb, {-1.2, 2.6}, {0.45, 1.55}, 0.35});
    out.push_back({elb, wri, {-0.6, 2.9}, {0.2, 1.55}, 0.35});
    out.push_back({hip, kne, {-0.9, 1.6}, {-0.05, 0.6}, 0.25});
    out.push_back({kne, ank, {-2.4, 1.0}, {-0.1, 0.5}, 0.25});
  }
  return out;
}

// Bone lengths (meters) of the template skeleton.
struct BodyTemplate {
  double hip_half_width = 0.10;
  double shoulder_half_width = 0.19;
  double torso_height = 0.50;
  double upper_arm = 0.29;
  double forearm = 0.26;
  double thigh = 0.44;
  double shin = 0.43;
};

// Limb angles per pose: upper arm, forearm, thigh, shin for each side.
struct LimbAngles {
  BoneAngles upper_arm, forearm, thigh, shin;
};

inline StoredPose build_pose(std::string id, std::string family,
                             const LimbAngles& left_limbs,
                             const LimbAngles& right_limbs,
                             const BodyTemplate& t = {}) {
  StoredPose p;
  p.id = std::move(id);
  p.family = std::move(family);
  auto& j = p.joints;
  const double sh = t.torso_height;
  j[kLeftHip] = {t.hip_half_width, 0.0, 0.0};
  j[kRightHip] = {-t.hip_half_width, 0.0, 0.0};
  j[kLeftShoulder] = {t.shoulder_half_width, sh, 0.0};
  j[kRightShoulder] = {-t.shoulder_half_width, sh, 0.0};
  j[kLeftEar] = {0.075, sh + 0.20, 0.0};
  j[kRightEar] = {-0.075, sh + 0.20, 0.0};
  j[kLeftEye] = {0.035, sh + 0.24, 0.11};
  j[kRightEye] = {-0.035, sh + 0.24, 0.11};
  j[kNose] = {0.0, sh + 0.20, 0.125};
  for (double side : {1.0, -1.0}) {
    const bool left = side > 0.0;
    const auto& a = left ? left_limbs : right_limbs;
    const auto sho = left ? kLeftShoulder : kRightShoulder;
    const auto elb = left ? kLeftElbow : kRightElbow;
    const auto wri = left ? kLeftWrist : kRightWrist;
    const auto hip = left ? kLeftHip : kRightHip;
    const auto kne = left ? kLeftKnee : kRightKnee;
    const auto ank = left ? kLeftAnkle : kRightAnkle;
    j[elb] = j[sho] + t.upper_arm * bone_direction(a.upper_arm, side);
    j[wri] = j[elb] + t.forearm * bone_direction(a.forearm, side);
    j[kne] = j[hip] + t.thigh * bone_direction(a.thigh, side);
    j[ank] = j[kne] + t.shin * bone_direction(a.shin, side);
  }
  return p;
}

namespace detail {

// Builds a pose and its left/right mirror image (limb angles swapped).
inline void add_mirrored(std::vector<StoredPose>& out, const std::string& family,
                         int index, const LimbAngles& l, const LimbAngles& r) {
  out.push_back(build_pose(family + "_" + std::to_string(index), family, l, r));
  out.push_back(
      build_pose(family + "_" + std::to_string(index + 1), family, r, l));
}

}  // namespace detail

inline PoseLibrary default_pose_library(PoseMode mode = PoseMode::diverse) {
  PoseLibrary lib;
  lib.mode = mode;
  lib.capsules = default_capsules();
  lib.joint_limits = default_joint_limits();
  auto& P = lib.poses;
  using L = LimbAngles;
  // {upper_arm, forearm, thigh, shin} as {pitch, roll}
  detail::add_mirrored(P, "walk", 0,
                       L{{-0.35, 0.5}, {-0.15, 0.3}, {0.35, 0.05}, {0.10, 0.02}},
                       L{{0.35, 0.5}, {0.55, 0.3}, {-0.30, 0.05}, {-0.55, 0.02}});
  detail::add_mirrored(P, "walk", 2,
                       L{{0.05, 0.5}, {0.20, 0.3}, {0.10, 0.05}, {-0.30, 0.02}},
                       L{{-0.05, 0.5}, {0.10, 0.3}, {-0.05, 0.05}, {0.0, 0.02}});
  detail::add_mirrored(P, "run", 0,
                       L{{-0.7, 0.55}, {0.9, 0.35}, {0.9, 0.05}, {-0.3, 0.02}},
                       L{{0.8, 0.55}, {1.6, 0.35}, {-0.5, 0.05}, {-1.5, 0.02}});
  detail::add_mirrored(P, "run", 2,
                       L{{-0.4, 0.55}, {1.1, 0.35}, {0.4, 0.05}, {-1.2, 0.02}},
                       L{{0.5, 0.55}, {1.4, 0.35}, {-0.2, 0.05}, {-0.6, 0.02}});
  P.push_back(build_pose("idle_0", "idle",
                         L{{0.0, 0.5}, {0.1, 0.3}, {0.0, 0.04}, {0.0, 0.02}},
                         L{{0.0, 0.5}, {0.1, 0.3}, {0.0, 0.04}, {0.0, 0.02}}));
  detail::add_mirrored(P, "idle", 1,
                       L{{0.1, 0.55}, {0.3, 0.3}, {0.05, 0.12}, {0.0, 0.05}},
                       L{{-0.05, 0.5}, {0.15, 0.3}, {-0.05, 0.04}, {0.0, 0.02}});
  // Families only sampled in diverse mode.
  detail::add_mirrored(P, "wave", 0,
                       L{{0.0, 1.5}, {2.8, 0.3}, {0.0, 0.05}, {0.0, 0.02}},
                       L{{0.05, 0.5}, {0.15, 0.3}, {0.0, 0.05}, {0.0, 0.02}});
  P.push_back(build_pose("reach_0", "reach",
                         L{{1.5, 0.5}, {1.6, 0.3}, {0.1, 0.05}, {0.0, 0.02}},
                         L{{1.5, 0.5}, {1.6, 0.3}, {-0.1, 0.05}, {-0.1, 0.02}}));
  P.push_back(build_pose("squat_0", "squat",
                         L{{1.2, 0.5}, {1.3, 0.3}, {1.4, 0.25}, {-0.3, 0.05}},
                         L{{1.2, 0.5}, {1.3, 0.3}, {1.4, 0.25}, {-0.3, 0.05}}));
  detail::add_mirrored(P, "kick", 0,
                       L{{0.3, 0.9}, {0.5, 0.4}, {1.2, 0.05}, {0.8, 0.02}},
                       L{{-0.3, 0.9}, {0.2, 0.4}, {-0.2, 0.05}, {-0.2, 0.02}});
  return lib;
}

// Diverse-mode perturbation: each limited bone's (pitch, roll) is redrawn
// uniformly from [angle - jitter, angle + jitter] intersected with its
// limits, and the child joint is rebuilt from the (possibly moved) parent.
// Joints further down the chain keep their own absolute bone angles.
inline StoredPose perturb_pose(const PoseLibrary& lib, const StoredPose& base,
                               Stream& stream) {
  StoredPose out = base;
  auto draw = [&](double x, const AngleRange& lim, double jitter) {
    const double lo = std::max(lim.lo, x - jitter);
    const double hi = std::min(lim.hi, x + jitter);
    return lo < hi ? stream.uniform(lo, hi) : std::clamp(x, lim.lo, lim.hi);
  };
  for (const auto& lim : lib.joint_limits) {
    const auto parent = std::size_t(lim.parent);
    const auto child = std::size_t(lim.child);
    const double side = limb_side(lim.parent);
    const Vec3 bone = base.joints[child] - base.joints[parent];
    const auto a = bone_angles(bone, side);
    const BoneAngles b{draw(a.pitch, lim.pitch, lim.jitter),
                       draw(a.roll, lim.roll, lim.jitter)};
    out.joints[child] = out.joints[parent] + bone.norm() * bone_direction(b, side);
  }
  return out;
}

// Rotates the stored joints by `heading` about world up, scales them
// uniformly and translates them so that the mid-hip lands on `root`.
inline SkeletonPose instantiate_pose(const StoredPose& pose,
                                     const std::vector<BoneCapsule>& capsules,
                                     const Vec3& root, double heading,
                                     double scale) {
  SkeletonPose out;
  out.pose_id = pose.id;
  out.root = root;
  out.heading = heading;
  out.scale = scale;
  const Vec3 mid_hip = 0.5 * (pose.joints[kLeftHip] + pose.joints[kRightHip]);
  const Mat3 rot = rotation_y(heading);
  for (std::size_t i = 0; i < kNumKeypoints; ++i)
    out.joints[i] = root + scale * (rot * (pose.joints[i] - mid_hip));
  out.bone_capsules = capsules;
  for (auto& c : out.bone_capsules) c.radius *= scale;
  return out;
}

inline SkeletonPose instantiate_pose(const PoseLibrary& lib,
                                     std::string_view pose_id, const Vec3& root,
                                     double heading, double scale) {
  return instantiate_pose(lib.find(pose_id), lib.capsules, root, heading, scale);
}

// Height of the mid-hip above the ground for a unit-scale pose, so the
// lowest joint's capsule touches y = 0.
inline double ground_clearance(const PoseLibrary& lib, const StoredPose& p) {
  const Vec3 mid_hip = 0.5 * (p.joints[kLeftHip] + p.joints[kRightHip]);
  double min_y = 0.0;
  for (const auto& j : p.joints) min_y = std::min(min_y, j.y() - mid_hip.y());
  double radius = 0.0;
  for (const auto& c : lib.capsules)
    if (c.a == kLeftAnkle || c.b == kLeftAnkle) radius = c.radius;
  return -min_y + radius;
}

// JSON document: {version, capsules, joint_limits, poses}. Joint and
// capsule endpoints are named with COCO keypoint names.
inline nlohmann::json pose_library_to_json(const PoseLibrary& lib) {
  using nlohmann::json;
  auto name = [](int i) { return std::string(kKeypointNames[std::size_t(i)]); };
  json j;
  j["version"] = lib.version;
  json caps = json::array();
  for (const auto& c : lib.capsules)
    caps.push_back({{"a", name(c.a)}, {"b", name(c.b)}, {"radius", c.radius}});
  j["capsules"] = std::move(caps);
  json limits = json::array();
  for (const auto& l : lib.joint_limits)
    limits.push_back({{"parent", name(l.parent)},
                      {"child", name(l.child)},
                      {"pitch", {l.pitch.lo, l.pitch.hi}},
                      {"roll", {l.roll.lo, l.roll.hi}},
                      {"jitter", l.jitter}});
  j["joint_limits"] = std::move(limits);
  json poses = json::array();
  for (const auto& p : lib.poses) {
    json joints = json::object();
    for (std::size_t i = 0; i < kNumKeypoints; ++i)
      joints[name(int(i))] = {p.joints[i].x(), p.joints[i].y(), p.joints[i].z()};
    poses.push_back({{"id", p.id}, {"family", p.family}, {"joints", joints}});
  }
  j["poses"] = std::move(poses);
  return j;
}

inline PoseLibrary pose_library_from_json(const nlohmann::json& j,
                                          PoseMode mode) {
  auto index = [](const nlohmann::json& n) {
    const int i = keypoint_index(n.get<std::string>());
    if (i < 0) throw InvalidConfig("unknown joint name " + n.dump());
    return i;
  };
  auto range = [](const nlohmann::json& r) {
    if (!r.is_array() || r.size() != 2)
      throw InvalidConfig("angle range must be [lo, hi]");
    return AngleRange{r[0].get<double>(), r[1].get<double>()};
  };
  PoseLibrary lib;
  lib.mode = mode;
  try {
    lib.version = j.at("version").get<int>();
    for (const auto& c : j.at("capsules"))
      lib.capsules.push_back(
          {index(c.at("a")), index(c.at("b")), c.at("radius").get<double>()});
    for (const auto& l : j.at("joint_limits"))
      lib.joint_limits.push_back({index(l.at("parent")), index(l.at("child")),
                                  range(l.at("pitch")), range(l.at("roll")),
                                  l.at("jitter").get<double>()});
    for (const auto& p : j.at("poses")) {
      StoredPose sp;
      sp.id = p.at("id").get<std::string>();
      sp.family = p.at("family").get<std::string>();
      const auto& joints = p.at("joints");
      for (std::size_t i = 0; i < kNumKeypoints; ++i) {
        const auto& xyz = joints.at(std::string(kKeypointNames[i]));
        if (!xyz.is_array() || xyz.size() != 3)
          throw InvalidConfig("joint must be [x, y, z]");
        sp.joints[i] = {xyz[0].get<double>(), xyz[1].get<double>(),
                        xyz[2].get<double>()};
      }
      lib.poses.push_back(std::move(sp));
    }
  } catch (const nlohmann::json::exception& e) {
    throw InvalidConfig(std::string("pose library: ") + e.what());
  }
  lib.validate();
  return lib;
}

}  // namespace synthlabel
