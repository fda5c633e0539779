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

// Independent reference implementations used by the unit and acceptance
// tests. Nothing here calls into the library's geometry or projection code.

#include <Eigen/Geometry>
#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "synthlabel/synthlabel.hpp"

namespace oracle {

using synthlabel::Vec3;
using Mat4 = Eigen::Matrix4d;

inline constexpr double kPi = 3.14159265358979323846;

// Camera-to-world transform composed from elementary rotations: start at
// distance `radius` on +z, tilt up by the elevation, swing around +y by the
// azimuth.
inline Mat4 camera_to_world(const synthlabel::OrbitCamera& cam) {
  const Eigen::Matrix3d r =
      (Eigen::AngleAxisd(cam.azimuth, Vec3::UnitY()) *
       Eigen::AngleAxisd(-cam.elevation, Vec3::UnitX()))
          .toRotationMatrix();
  Mat4 m = Mat4::Identity();
  m.topLeftCorner<3, 3>() = r;
  m.topRightCorner<3, 1>() = cam.target + r * Vec3(0.0, 0.0, cam.radius);
  return m;
}

// 3x4 pinhole projection with the image v axis pointing down and the camera
// looking along its local -z.
inline Eigen::Matrix<double, 3, 4> projection(double fx, double fy, double cx,
                                              double cy) {
  Eigen::Matrix<double, 3, 4> k;
  k << fx, 0.0, -cx, 0.0,  //
      0.0, -fy, -cy, 0.0,  //
      0.0, 0.0, -1.0, 0.0;
  return k;
}

inline double focal_from_fov(const synthlabel::OrbitCamera& cam) {
  return 0.5 * cam.image_height / std::tan(0.5 * cam.vertical_fov);
}

struct Pixel {
  double u, v, w;
};

inline Pixel project(const synthlabel::OrbitCamera& cam, const Vec3& p) {
  const double f = focal_from_fov(cam);
  const Eigen::Matrix<double, 3, 4> full =
      projection(f, f, 0.5 * cam.image_width, 0.5 * cam.image_height) *
      camera_to_world(cam).inverse();
  const Eigen::Vector3d h = full * p.homogeneous();
  return {h.x() / h.z(), h.y() / h.z(), h.z()};
}

// ---- signed distance functions -------------------------------------------

inline double sdf_sphere(const Vec3& c, double r, const Vec3& p) {
  return (p - c).norm() - r;
}

inline double sdf_capsule(const Vec3& a, const Vec3& b, double r, const Vec3& p) {
  const Vec3 ab = b - a;
  const double len2 = ab.squaredNorm();
  const double t = len2 > 0.0 ? std::clamp((p - a).dot(ab) / len2, 0.0, 1.0) : 0.0;
  return (p - (a + t * ab)).norm() - r;
}

inline double sdf_box(const Vec3& c, const Vec3& half, const Vec3& p) {
  const Vec3 q = (p - c).cwiseAbs() - half;
  return q.cwiseMax(0.0).norm() + std::min(q.maxCoeff(), 0.0);
}

inline double sdf_solid(const synthlabel::Solid& s, const Vec3& p) {
  if (const auto* sp = std::get_if<synthlabel::Sphere>(&s))
    return sdf_sphere(sp->center, sp->radius, p);
  if (const auto* c = std::get_if<synthlabel::Capsule>(&s))
    return sdf_capsule(c->a, c->b, c->radius, p);
  const auto& b = std::get<synthlabel::Aabb>(s);
  return sdf_box(b.center, b.half_extents, p);
}

// Distance field of everything that can hide keypoint `joint` of human
// `owner`.
inline double scene_sdf(const synthlabel::SceneDescription& scene, std::size_t owner,
                        int joint, const Vec3& p) {
  double d = std::numeric_limits<double>::infinity();
  for (const auto& o : scene.occluders) d = std::min(d, sdf_solid(o.solid, p));
  for (std::size_t h = 0; h < scene.humans.size(); ++h) {
    const auto& hu = scene.humans[h];
    for (const auto& bc : hu.bone_capsules) {
      if (h == owner && (bc.a == joint || bc.b == joint)) continue;
      d = std::min(d, sdf_capsule(hu.joints[std::size_t(bc.a)],
                                  hu.joints[std::size_t(bc.b)], bc.radius, p));
    }
  }
  return d;
}

inline constexpr double kEps = 1e-6;

// Uniform ray-march: `steps` evenly spaced samples strictly inside
// (eps, 1 - eps); hit when any sample lies inside a solid.
template <class Sdf>
bool march_uniform(const Vec3& from, const Vec3& to, Sdf&& sdf, int steps = 10000) {
  for (int i = 0; i < steps; ++i) {
    const double t = kEps + (1.0 - 2.0 * kEps) * (i + 0.5) / steps;
    if (sdf(from + t * (to - from)) < 0.0) return true;
  }
  return false;
}

// Sphere tracing along the segment. Each step advances by the distance to
// the nearest surface, so no solid can be skipped; the march reports a hit
// once it is within `tol` of a surface at a parameter in (eps, 1 - eps).
struct TraceResult {
  bool hit = false;
  bool exhausted = false;
};

template <class Sdf>
TraceResult sphere_trace(const Vec3& from, const Vec3& to, Sdf&& sdf,
                         int max_steps = 10000, double tol = 1e-10) {
  const double len = (to - from).norm();
  double t = 0.0;
  for (int i = 0; i < max_steps; ++i) {
    const Vec3 p = from + t * (to - from);
    const double d = sdf(p);
    if (d <= tol) {
      if (t >= 1.0 - kEps) return {};
      if (t > kEps) return {true, false};
      // Starting inside or touching: the solid must reach past eps.
      return {sdf(from + 2.0 * kEps * (to - from)) < 0.0, false};
    }
    t += d / len;
    if (t >= 1.0 - kEps) return {};
  }
  return {false, true};
}

// ---- silhouette sampling ---------------------------------------------------

struct Box {
  double u0 = std::numeric_limits<double>::infinity();
  double u1 = -std::numeric_limits<double>::infinity();
  double v0 = std::numeric_limits<double>::infinity();
  double v1 = -std::numeric_limits<double>::infinity();
  bool empty() const { return !(u0 <= u1); }
  void add(double u, double v) {
    u0 = std::min(u0, u);
    u1 = std::max(u1, u);
    v0 = std::min(v0, v);
    v1 = std::max(v1, v);
  }
};

// Roughly `points` samples over the surface of capsule (a, b, r): Fibonacci
// lattices on both end spheres plus rings on the cylinder wall.
inline std::vector<Vec3> capsule_samples(const Vec3& a, const Vec3& b, double r,
                                         int points = 10000) {
  std::vector<Vec3> out;
  out.reserve(std::size_t(points) + 64);
  const int per_sphere = points * 2 / 5;
  const double golden = kPi * (3.0 - std::sqrt(5.0));
  for (const Vec3& c : {a, b}) {
    for (int i = 0; i < per_sphere; ++i) {
      const double z = 1.0 - (2.0 * i + 1.0) / per_sphere;
      const double s = std::sqrt(1.0 - z * z);
      out.emplace_back(c + r * Vec3(s * std::cos(golden * i), s * std::sin(golden * i), z));
    }
  }
  const Vec3 axis = b - a;
  if (axis.norm() == 0.0) return out;
  const Vec3 w = axis.normalized();
  const Vec3 u = w.unitOrthogonal();
  const Vec3 v = w.cross(u);
  const int rest = points - 2 * per_sphere;
  const int rings = std::max(2, int(std::sqrt(rest / 4.0)));
  const int around = std::max(8, rest / rings);
  for (int i = 0; i < rings; ++i)
    for (int j = 0; j < around; ++j) {
      const double phi = 2.0 * kPi * j / around;
      out.emplace_back(a + axis * (double(i) / (rings - 1)) +
                       r * (std::cos(phi) * u + std::sin(phi) * v));
    }
  return out;
}

// Box of the projected surface samples of every capsule, clipped to the
// image; nullopt when empty.
inline std::optional<Box> sampled_silhouette(const synthlabel::SkeletonPose& human,
                                             const synthlabel::OrbitCamera& cam,
                                             int points_per_capsule = 10000) {
  const double f = focal_from_fov(cam);
  const Eigen::Matrix<double, 3, 4> full =
      projection(f, f, 0.5 * cam.image_width, 0.5 * cam.image_height) *
      camera_to_world(cam).inverse();
  Box box;
  for (const auto& bc : human.bone_capsules) {
    for (const Vec3& p : capsule_samples(human.joints[std::size_t(bc.a)],
                                         human.joints[std::size_t(bc.b)], bc.radius,
                                         points_per_capsule)) {
      const Eigen::Vector3d h = full * p.homogeneous();
      if (h.z() <= 0.0) continue;
      box.add(h.x() / h.z(), h.y() / h.z());
    }
  }
  if (box.empty()) return std::nullopt;
  box.u0 = std::max(box.u0, 0.0);
  box.v0 = std::max(box.v0, 0.0);
  box.u1 = std::min(box.u1, double(cam.image_width));
  box.v1 = std::min(box.v1, double(cam.image_height));
  if (!(box.u1 > box.u0) || !(box.v1 > box.v0)) return std::nullopt;
  return box;
}

// Every body sphere strictly in front of the camera (no straddling).
inline bool fully_in_front(const synthlabel::SkeletonPose& human,
                           const synthlabel::OrbitCamera& cam) {
  const Mat4 w2c = camera_to_world(cam).inverse();
  for (const auto& bc : human.bone_capsules)
    for (int end : {bc.a, bc.b}) {
      const Eigen::Vector4d q = w2c * human.joints[std::size_t(end)].homogeneous();
      if (!(-q.z() > bc.radius)) return false;
    }
  return true;
}

// ---- annealing replay --------------------------------------------------------

struct ReplayEntry {
  std::string decision;
  std::string tag;
  double lr, epsilon;
  std::int64_t patience;
  int reductions;
};

// Recomputes every decision from the whole prefix of the trace: the
// stagnation window is measured from the later of the last improvement and
// the last reduction.
inline std::vector<ReplayEntry> replay(const synthlabel::AnnealingConfig& cfg,
                                       const std::vector<synthlabel::TraceRow>& trace) {
  std::vector<ReplayEntry> out;
  for (std::size_t i = 0; i < trace.size(); ++i) {
    int reductions = 0;
    double eps = cfg.initial_epsilon;
    std::int64_t patience = cfg.initial_patience;
    double reference = -std::numeric_limits<double>::infinity();
    std::int64_t window_start = trace[0].epoch;
    bool stopped = false;
    for (std::size_t j = 0; j <= i; ++j) {
      if (trace[j].metric > reference + eps) {
        reference = trace[j].metric;
        window_start = trace[j].epoch;
      }
      if (trace[j].epoch - window_start >= patience) {
        if (reductions == cfg.max_reductions) {
          stopped = true;
        } else {
          ++reductions;
          eps *= 0.5;
          patience = std::max<std::int64_t>(1, patience / 2);
          window_start = trace[j].epoch;
        }
        if (j == i) {
          std::size_t best = 0;
          for (std::size_t k = 1; k <= i; ++k)
            if (trace[k].metric > trace[best].metric) best = k;
          out.push_back({stopped ? "stop" : "reduce_and_restore", trace[best].tag,
                         cfg.initial_lr / std::pow(cfg.reduction_factor, reductions), eps,
                         patience, reductions});
        }
      } else if (j == i) {
        out.push_back({"continue", "",
                       cfg.initial_lr / std::pow(cfg.reduction_factor, reductions), eps,
                       patience, reductions});
      }
    }
    if (stopped) break;
  }
  return out;
}

}  // namespace oracle
