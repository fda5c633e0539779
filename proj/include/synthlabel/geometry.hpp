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

// Solid primitives used as body proxies and occluders, with exact
// line-intersection intervals and signed distances.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <variant>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace synthlabel {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

inline constexpr double kPi = 3.14159265358979323846;

struct Sphere {
  Vec3 center = Vec3::Zero();
  double radius = 1.0;
  bool operator==(const Sphere&) const = default;
};

// Set of points within `radius` of the segment [a, b].
struct Capsule {
  Vec3 a = Vec3::Zero();
  Vec3 b = Vec3::Zero();
  double radius = 1.0;
  bool operator==(const Capsule&) const = default;
};

struct Aabb {
  Vec3 center = Vec3::Zero();
  Vec3 half_extents = Vec3::Ones();
  bool operator==(const Aabb&) const = default;
};

using Solid = std::variant<Sphere, Capsule, Aabb>;

// Parameter interval [t0, t1] where the line o + t*d lies inside a solid.
struct Interval {
  double t0 = 0.0;
  double t1 = 0.0;
};

namespace detail {

inline std::optional<Interval> hull(std::optional<Interval> a,
                                    std::optional<Interval> b) {
  if (!a) return b;
  if (!b) return a;
  return Interval{std::min(a->t0, b->t0), std::max(a->t1, b->t1)};
}

}  // namespace detail

inline std::optional<Interval> line_interval(const Sphere& s, const Vec3& o,
                                             const Vec3& d) {
  const Vec3 oc = o - s.center;
  const double a = d.squaredNorm();
  if (a == 0.0) return std::nullopt;
  const double half_b = oc.dot(d);
  const double c = oc.squaredNorm() - s.radius * s.radius;
  const double disc = half_b * half_b - a * c;
  if (disc < 0.0) return std::nullopt;
  const double root = std::sqrt(disc);
  return Interval{(-half_b - root) / a, (-half_b + root) / a};
}

// Capsules are convex, so the line meets them in one interval: the hull of
// the intervals through the finite cylinder and the two end spheres.
inline std::optional<Interval> line_interval(const Capsule& c, const Vec3& o,
                                             const Vec3& d) {
  const Vec3 axis = c.b - c.a;
  const double len2 = axis.squaredNorm();
  auto result = line_interval(Sphere{c.a, c.radius}, o, d);
  if (len2 == 0.0) return result;
  result = detail::hull(result, line_interval(Sphere{c.b, c.radius}, o, d));

  // Components perpendicular to the axis.
  const Vec3 oa = o - c.a;
  const Vec3 d_perp = d - axis * (d.dot(axis) / len2);
  const Vec3 o_perp = oa - axis * (oa.dot(axis) / len2);
  const double qa = d_perp.squaredNorm();
  const double qb = o_perp.dot(d_perp);
  const double qc = o_perp.squaredNorm() - c.radius * c.radius;
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  if (qa == 0.0) {
    if (qc > 0.0) return result;  // parallel to the axis, outside
  } else {
    const double disc = qb * qb - qa * qc;
    if (disc < 0.0) return result;
    const double root = std::sqrt(disc);
    lo = (-qb - root) / qa;
    hi = (-qb + root) / qa;
  }
  // Clip to the slab 0 <= (p - a).axis <= |axis|^2.
  const double s0 = oa.dot(axis);
  const double ds = d.dot(axis);
  if (ds == 0.0) {
    if (s0 < 0.0 || s0 > len2) return result;
  } else {
    double e0 = (0.0 - s0) / ds;
    double e1 = (len2 - s0) / ds;
    if (e0 > e1) std::swap(e0, e1);
    lo = std::max(lo, e0);
    hi = std::min(hi, e1);
  }
  if (lo > hi) return result;
  return detail::hull(result, Interval{lo, hi});
}

inline std::optional<Interval> line_interval(const Aabb& box, const Vec3& o,
                                             const Vec3& d) {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 3; ++i) {
    const double bmin = box.center[i] - box.half_extents[i];
    const double bmax = box.center[i] + box.half_extents[i];
    if (d[i] == 0.0) {
      if (o[i] < bmin || o[i] > bmax) return std::nullopt;
      continue;
    }
    double e0 = (bmin - o[i]) / d[i];
    double e1 = (bmax - o[i]) / d[i];
    if (e0 > e1) std::swap(e0, e1);
    lo = std::max(lo, e0);
    hi = std::min(hi, e1);
    if (lo > hi) return std::nullopt;
  }
  return Interval{lo, hi};
}

inline std::optional<Interval> line_interval(const Solid& s, const Vec3& o,
                                             const Vec3& d) {
  return std::visit([&](const auto& p) { return line_interval(p, o, d); }, s);
}

// True when the open segment p(t) = from + t*(to - from), t in (eps, 1-eps),
// passes through the solid.
template <class Primitive>
bool segment_hits(const Primitive& solid, const Vec3& from, const Vec3& to,
                  double eps) {
  const auto iv = line_interval(solid, from, to - from);
  return iv && iv->t0 < 1.0 - eps && iv->t1 > eps;
}

inline double signed_distance(const Sphere& s, const Vec3& p) {
  return (p - s.center).norm() - s.radius;
}

inline Vec3 closest_on_segment(const Vec3& a, const Vec3& b, const Vec3& p) {
  const Vec3 ab = b - a;
  const double len2 = ab.squaredNorm();
  if (len2 == 0.0) return a;
  const double t = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
  return a + t * ab;
}

inline double signed_distance(const Capsule& c, const Vec3& p) {
  return (p - closest_on_segment(c.a, c.b, p)).norm() - c.radius;
}

inline double signed_distance(const Aabb& box, const Vec3& p) {
  const Vec3 q = (p - box.center).cwiseAbs() - box.half_extents;
  return q.cwiseMax(0.0).norm() + std::min(q.maxCoeff(), 0.0);
}

inline double signed_distance(const Solid& s, const Vec3& p) {
  return std::visit([&](const auto& x) { return signed_distance(x, p); }, s);
}

inline Mat3 rotation_y(double angle) {
  return Eigen::AngleAxisd(angle, Vec3::UnitY()).toRotationMatrix();
}

}  // namespace synthlabel
