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

// Analytic 2D labels for a scene: pinhole projection, occlusion-tested
// keypoint visibility and tight silhouette boxes of the capsule bodies.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include "synthlabel/annotation_io.hpp"
#include "synthlabel/errors.hpp"
#include "synthlabel/geometry.hpp"
#include "synthlabel/scene.hpp"

namespace synthlabel {

struct Intrinsics {
  double fx = 1.0;
  double fy = 1.0;
  double cx = 0.0;
  double cy = 0.0;

  static Intrinsics from_camera(const OrbitCamera& cam) {
    const double fy = cam.image_height / (2.0 * std::tan(cam.vertical_fov / 2.0));
    return {fy, fy, cam.image_width / 2.0, cam.image_height / 2.0};
  }
};

// Everything needed to project into one image.
struct View {
  CameraPose pose;
  Intrinsics intrinsics;
  double width = 0.0;
  double height = 0.0;

  static View from_camera(const OrbitCamera& cam) {
    return {camera_pose(cam), Intrinsics::from_camera(cam),
            static_cast<double>(cam.image_width),
            static_cast<double>(cam.image_height)};
  }

  Vec3 to_camera(const Vec3& p) const {
    return pose.rotation.transpose() * (p - pose.position);
  }

  bool in_image(double u, double v) const {
    return u >= 0.0 && u <= width && v >= 0.0 && v <= height;
  }
};

struct PixelPoint {
  double u = 0.0;
  double v = 0.0;
  double depth = 0.0;
};

inline constexpr double kMinDepth = 1e-6;

// Continuous pixel coordinates; nullopt when the point is behind the camera
// (view depth <= 1e-6 m).
inline std::optional<PixelPoint> project_point(const Vec3& p, const CameraPose& pose,
                                               const Intrinsics& k) {
  const Vec3 q = pose.rotation.transpose() * (p - pose.position);
  const double depth = -q.z();
  if (depth <= kMinDepth) return std::nullopt;
  return PixelPoint{k.fx * q.x() / depth + k.cx, k.cy - k.fy * q.y() / depth,
                    depth};
}

inline std::optional<PixelPoint> project_point(const Vec3& p, const View& view) {
  return project_point(p, view.pose, view.intrinsics);
}

inline constexpr double kSegmentEps = 1e-6;

// True when the open segment from the camera to `target` passes through any
// occluder, any capsule of another human, or a capsule of the owner that is
// not incident to `joint` (pass joint < 0 to test all of the owner's).
inline bool segment_occluded(const SceneDescription& scene, const Vec3& from,
                             const Vec3& target, std::size_t owner, int joint) {
  for (const auto& occ : scene.occluders)
    if (segment_hits(occ.solid, from, target, kSegmentEps)) return true;
  for (std::size_t h = 0; h < scene.humans.size(); ++h) {
    const auto& human = scene.humans[h];
    for (const auto& bc : human.bone_capsules) {
      if (h == owner && (bc.a == joint || bc.b == joint)) continue;
      if (segment_hits(human.capsule(bc), from, target, kSegmentEps)) return true;
    }
  }
  return false;
}

inline int keypoint_visibility(const SceneDescription& scene, const View& view,
                               std::size_t owner, std::size_t joint) {
  if (owner >= scene.humans.size() || joint >= kNumKeypoints)
    throw IndexOutOfRange("human " + std::to_string(owner) + ", joint " +
                          std::to_string(joint));
  const Vec3& kp = scene.humans[owner].joints[joint];
  const auto px = project_point(kp, view);
  if (!px || !view.in_image(px->u, px->v)) return 0;
  return segment_occluded(scene, view.pose.position, kp, owner, int(joint)) ? 1 : 2;
}

inline int keypoint_visibility(const SceneDescription& scene, std::size_t owner,
                               std::size_t joint) {
  return keypoint_visibility(scene, View::from_camera(scene.camera), owner, joint);
}

namespace detail {

struct Extent {
  double u0 = std::numeric_limits<double>::infinity();
  double u1 = -std::numeric_limits<double>::infinity();
  double v0 = std::numeric_limits<double>::infinity();
  double v1 = -std::numeric_limits<double>::infinity();

  bool empty() const { return !(u0 <= u1); }
  void add(double ua, double ub, double va, double vb) {
    u0 = std::min({u0, ua, ub});
    u1 = std::max({u1, ua, ub});
    v0 = std::min({v0, va, vb});
    v1 = std::max({v1, va, vb});
  }
};

// Exact image extent of one sphere. Tangent planes through the camera
// centre that contain the image's vertical (resp. horizontal) direction
// bound the silhouette; for a sphere centred at camera coordinates (X, Y, Z)
// with Z > r their slopes are (X*Z +- r*sqrt(X^2 + Z^2 - r^2)) / (Z^2 - r^2).
inline void add_sphere(Extent& e, const Vec3& center_cam, double r,
                       const View& view) {
  const double x = center_cam.x();
  const double y = center_cam.y();
  const double z = -center_cam.z();
  if (z <= -r) return;
  if (z <= r) {
    e.add(0.0, view.width, 0.0, view.height);
    return;
  }
  const auto& k = view.intrinsics;
  const double denom = z * z - r * r;
  const double su = r * std::sqrt(x * x + denom);
  const double sv = r * std::sqrt(y * y + denom);
  e.add(k.fx * (x * z - su) / denom + k.cx, k.fx * (x * z + su) / denom + k.cx,
        k.cy - k.fy * (y * z + sv) / denom, k.cy - k.fy * (y * z - sv) / denom);
}

inline std::optional<BBox> clip(const Extent& e, const View& view) {
  if (e.empty()) return std::nullopt;
  const double x0 = std::max(e.u0, 0.0);
  const double x1 = std::min(e.u1, view.width);
  const double y0 = std::max(e.v0, 0.0);
  const double y1 = std::min(e.v1, view.height);
  if (!(x1 > x0) || !(y1 > y0)) return std::nullopt;
  return BBox{x0, y0, x1 - x0, y1 - y0};
}

}  // namespace detail

inline constexpr int kDefaultSpheresPerCapsule = 64;

// Union of the exact extents of `spheres_per_capsule` spheres spaced
// uniformly along every capsule axis (endpoints included), clipped to the
// image. nullopt when nothing lies in front of the camera inside the image.
inline std::optional<BBox> silhouette_bbox(
    const SkeletonPose& human, const View& view,
    int spheres_per_capsule = kDefaultSpheresPerCapsule) {
  detail::Extent e;
  const int k = std::max(spheres_per_capsule, 1);
  for (const auto& bc : human.bone_capsules) {
    const Vec3 a = view.to_camera(human.joints[std::size_t(bc.a)]);
    const Vec3 b = view.to_camera(human.joints[std::size_t(bc.b)]);
    if (k == 1) {
      detail::add_sphere(e, 0.5 * (a + b), bc.radius, view);
      continue;
    }
    for (int i = 0; i < k; ++i) {
      const double t = static_cast<double>(i) / (k - 1);
      detail::add_sphere(e, a + t * (b - a), bc.radius, view);
    }
  }
  return detail::clip(e, view);
}

// Points spread over a capsule surface: Fibonacci spheres at both ends and
// rings along the cylinder.
inline std::vector<Vec3> capsule_surface_points(const Capsule& c, int per_part) {
  std::vector<Vec3> pts;
  const double golden = kPi * (3.0 - std::sqrt(5.0));
  for (const Vec3& center : {c.a, c.b}) {
    for (int i = 0; i < per_part; ++i) {
      const double y = 1.0 - 2.0 * (i + 0.5) / per_part;
      const double rho = std::sqrt(std::max(0.0, 1.0 - y * y));
      const double phi = golden * i;
      pts.push_back(center + c.radius * Vec3(rho * std::cos(phi), y, rho * std::sin(phi)));
    }
  }
  const Vec3 axis = c.b - c.a;
  if (axis.squaredNorm() == 0.0) return pts;
  const Vec3 w = axis.normalized();
  const Vec3 helper = std::abs(w.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
  const Vec3 u = w.cross(helper).normalized();
  const Vec3 v = w.cross(u);
  const int rings = std::max(2, static_cast<int>(std::sqrt(double(per_part))));
  const int around = std::max(3, per_part / rings);
  for (int i = 0; i < rings; ++i) {
    const Vec3 base = c.a + axis * (static_cast<double>(i) / (rings - 1));
    for (int j = 0; j < around; ++j) {
      const double phi = 2.0 * kPi * j / around;
      pts.push_back(base + c.radius * (std::cos(phi) * u + std::sin(phi) * v));
    }
  }
  return pts;
}

// Box of the surface points that are in front of the camera, inside the
// image and not occluded; the occlusion-truncated alternative to
// silhouette_bbox.
inline std::optional<BBox> visible_bbox(const SceneDescription& scene,
                                        const View& view, std::size_t owner,
                                        int points_per_part = 256) {
  detail::Extent e;
  const auto& human = scene.humans.at(owner);
  for (const auto& bc : human.bone_capsules) {
    for (const Vec3& p : capsule_surface_points(human.capsule(bc), points_per_part)) {
      const auto px = project_point(p, view);
      if (!px || !view.in_image(px->u, px->v)) continue;
      if (segment_occluded(scene, view.pose.position, p, owner, -1)) continue;
      e.add(px->u, px->u, px->v, px->v);
    }
  }
  return detail::clip(e, view);
}

enum class BoxMode { full_silhouette, visible_only };

struct LabelOptions {
  int spheres_per_capsule = kDefaultSpheresPerCapsule;
  BoxMode box_mode = BoxMode::full_silhouette;
};

struct FrameLabels {
  ImageRecord image;
  std::vector<PersonAnnotation> annotations;
};

inline std::string frame_file_name(std::uint64_t frame_index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "frame_%06llu.png",
                static_cast<unsigned long long>(frame_index));
  return buf;
}

// One annotation per human with a non-empty box, in human order. Annotation
// ids count up from `first_annotation_id`.
inline FrameLabels label_frame(const SceneDescription& scene, std::int64_t image_id,
                               std::int64_t first_annotation_id = 1,
                               const LabelOptions& options = {}) {
  FrameLabels out;
  out.image.id = image_id;
  out.image.width = scene.camera.image_width;
  out.image.height = scene.camera.image_height;
  out.image.file_name = frame_file_name(scene.frame_index);

  const View view = View::from_camera(scene.camera);
  std::int64_t next_id = first_annotation_id;
  for (std::size_t h = 0; h < scene.humans.size(); ++h) {
    const auto& human = scene.humans[h];
    const auto box = options.box_mode == BoxMode::full_silhouette
                         ? silhouette_bbox(human, view, options.spheres_per_capsule)
                         : visible_bbox(scene, view, h);
    if (!box) continue;
    PersonAnnotation a;
    a.id = next_id++;
    a.image_id = image_id;
    a.bbox = *box;
    a.area = box->area();
    for (std::size_t j = 0; j < kNumKeypoints; ++j) {
      const int v = keypoint_visibility(scene, view, h, j);
      if (v == 0) continue;
      const auto px = project_point(human.joints[j], view);
      a.keypoints[j] = {px->u, px->v, v};
    }
    a.num_keypoints = count_labeled(a.keypoints);
    out.annotations.push_back(std::move(a));
  }
  return out;
}

}  // namespace synthlabel
