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

// Seeded randomizers that turn a RandomizerConfig into per-frame
// SceneDescriptions. Every frame draws from its own seed
// (mix(master_seed, frame_index)) and every randomizer from its own named
// sub-stream of that seed, so frames are independent and a change to one
// randomizer's range leaves the other randomizers' draws untouched.

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "synthlabel/errors.hpp"
#include "synthlabel/hash.hpp"
#include "synthlabel/label_adapt.hpp"
#include "synthlabel/pose_library.hpp"
#include "synthlabel/random.hpp"
#include "synthlabel/scene.hpp"

namespace synthlabel {

enum class OccluderMode { none, primitive, highquality_id };

inline std::string_view to_string(OccluderMode m) {
  switch (m) {
    case OccluderMode::none: return "none";
    case OccluderMode::primitive: return "primitive";
    case OccluderMode::highquality_id: return "highquality-id";
  }
  return "none";
}

inline OccluderMode occluder_mode_from_string(std::string_view s) {
  if (s == "none") return OccluderMode::none;
  if (s == "primitive") return OccluderMode::primitive;
  if (s == "highquality-id") return OccluderMode::highquality_id;
  throw InvalidConfig("unknown occluder mode '" + std::string(s) + "'");
}

// Defaults are toolkit constants; all of them can be overridden.
struct RandomizerConfig {
  ParamRange human_count = ParamRange::discrete(1, 10);
  ParamRange human_scale = ParamRange::continuous(0.9, 1.1);
  ParamRange occluder_count = ParamRange::discrete(0, 8);
  OccluderMode occluder_mode = OccluderMode::primitive;
  ParamRange occluder_size = ParamRange::continuous(0.1, 0.5);
  double placement_extent = 2.0;

  ParamRange camera_radius = ParamRange::continuous(3.0, 12.0);
  ParamRange camera_azimuth = ParamRange::continuous(0.0, 2.0 * kPi);
  ParamRange camera_elevation = ParamRange::continuous(-0.2, 1.0);
  ParamRange camera_fov = ParamRange::continuous(30.0 * kPi / 180.0,
                                                 70.0 * kPi / 180.0);
  ParamRange camera_target_height = ParamRange::continuous(0.8, 1.2);
  int image_width = 1280;
  int image_height = 720;

  ParamRange light_intensity = ParamRange::continuous(0.5, 2.0);
  ParamRange sun_time_of_day = ParamRange::continuous(0.0, 24.0);
  ParamRange sun_day_of_year = ParamRange::discrete(1, 365);

  PoseMode pose_mode = PoseMode::diverse;
  int hdri_count = kDefaultHdriCount;

  bool shader_graph = true;
  bool smaa = false;
  AdaptMode label_adaptation = AdaptMode::none;
  std::optional<std::string> preset;

  void validate() const {
    auto need = [](bool ok, const char* what) {
      if (!ok) throw InvalidConfig(what);
    };
    auto discrete = [](const ParamRange& r) {
      return r.kind == RangeKind::uniform_discrete && r.valid();
    };
    auto continuous = [](const ParamRange& r) {
      return r.kind == RangeKind::uniform_continuous && r.valid();
    };
    need(discrete(human_count) && human_count.lo >= 0, "human_count");
    need(discrete(occluder_count) && occluder_count.lo >= 0, "occluder_count");
    need(continuous(human_scale) && human_scale.lo > 0, "human_scale");
    need(continuous(occluder_size) && occluder_size.lo > 0, "occluder_size");
    need(std::isfinite(placement_extent) && placement_extent > 0,
         "placement_extent");
    need(continuous(camera_radius) && camera_radius.lo > 0, "camera_radius");
    need(continuous(camera_azimuth), "camera_azimuth");
    need(continuous(camera_elevation) && camera_elevation.lo > -kPi / 2 &&
             camera_elevation.hi < kPi / 2,
         "camera_elevation");
    need(continuous(camera_fov) && camera_fov.lo > 0 && camera_fov.hi < kPi,
         "camera_fov");
    need(continuous(camera_target_height), "camera_target_height");
    need(image_width >= 1 && image_height >= 1, "image size");
    need(continuous(light_intensity), "light_intensity");
    need(continuous(sun_time_of_day), "sun_time_of_day");
    need(discrete(sun_day_of_year), "sun_day_of_year");
    need(hdri_count >= 1, "hdri_count");
  }

  bool operator==(const RandomizerConfig&) const = default;
};

inline constexpr std::array<std::string_view, 9> kPresetNames = {
    "psp-hdri",       "box-adapt",      "box-kpt-adapt",
    "no-occluders",   "polyhaven-occluders", "no-shadergraph",
    "smaa",           "simple-anims",   "psp-hdri-plus"};

// Named variants. Each one changes a single flag of psp-hdri;
// psp-hdri-plus turns on five of them together.
inline RandomizerConfig preset(std::string_view name) {
  RandomizerConfig cfg;
  cfg.preset = std::string(name);
  if (name == "psp-hdri") return cfg;
  if (name == "box-adapt") {
    cfg.label_adaptation = AdaptMode::box;
  } else if (name == "box-kpt-adapt") {
    cfg.label_adaptation = AdaptMode::box_kpt;
  } else if (name == "no-occluders") {
    cfg.occluder_mode = OccluderMode::none;
  } else if (name == "polyhaven-occluders") {
    cfg.occluder_mode = OccluderMode::highquality_id;
  } else if (name == "no-shadergraph") {
    cfg.shader_graph = false;
  } else if (name == "smaa") {
    cfg.smaa = true;
  } else if (name == "simple-anims") {
    cfg.pose_mode = PoseMode::simple;
  } else if (name == "psp-hdri-plus") {
    cfg.label_adaptation = AdaptMode::box_kpt;
    cfg.occluder_mode = OccluderMode::highquality_id;
    cfg.shader_graph = false;
    cfg.smaa = true;
    cfg.pose_mode = PoseMode::simple;
  } else {
    throw UnknownPreset(std::string(name));
  }
  return cfg;
}

namespace detail {

inline std::pair<double, double> sample_disc(Stream& s, double radius) {
  const double r = radius * std::sqrt(s.uniform01());
  const double theta = 2.0 * kPi * s.uniform01();
  return {r * std::cos(theta), r * std::sin(theta)};
}

inline Vec3 sample_unit_vector(Stream& s) {
  const double z = s.uniform(-1.0, 1.0);
  const double phi = 2.0 * kPi * s.uniform01();
  const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
  return {rho * std::cos(phi), rho * std::sin(phi), z};
}

}  // namespace detail

inline SceneDescription generate_scene(const RandomizerConfig& cfg,
                                       const PoseLibrary& library,
                                       std::uint64_t master_seed,
                                       std::uint64_t frame_index) {
  cfg.validate();
  PoseLibrary lib = library;
  lib.mode = cfg.pose_mode;
  const auto pose_ids = lib.pose_ids();
  if (pose_ids.empty()) throw InvalidConfig("no poses available for pose mode");

  SceneDescription scene;
  scene.frame_index = frame_index;
  scene.frame_seed = SeedTree{master_seed}.frame_seed(frame_index);
  const auto seed = scene.frame_seed;

  {
    auto count_stream = SeedTree::stream(seed, "human_count");
    auto place = SeedTree::stream(seed, "human_placement");
    auto poses = SeedTree::stream(seed, "human_pose");
    const auto n = sample_int(cfg.human_count, count_stream);
    const auto choices = ParamRange::categorical(pose_ids);
    for (std::int64_t i = 0; i < n; ++i) {
      const auto [x, z] = detail::sample_disc(place, cfg.placement_extent);
      const double heading = place.uniform(0.0, 2.0 * kPi);
      const double scale = sample_real(cfg.human_scale, place);
      const auto& id = sample_item(choices, poses);
      StoredPose pose = lib.find(id);
      if (lib.mode == PoseMode::diverse) pose = perturb_pose(lib, pose, poses);
      const Vec3 root(x, scale * ground_clearance(lib, pose), z);
      scene.humans.push_back(
          instantiate_pose(pose, lib.capsules, root, heading, scale));
    }
  }

  if (cfg.occluder_mode != OccluderMode::none) {
    auto s = SeedTree::stream(seed, "occluders");
    const auto n = sample_int(cfg.occluder_count, s);
    for (std::int64_t i = 0; i < n; ++i) {
      const auto [x, z] = detail::sample_disc(s, cfg.placement_extent);
      const Vec3 center(x, s.uniform(0.0, 2.0), z);
      OccluderPrimitive occ;
      switch (s.index(3)) {
        case 0:
          occ.solid = Sphere{center, sample_real(cfg.occluder_size, s)};
          break;
        case 1: {
          const Vec3 axis = detail::sample_unit_vector(s);
          const double half_length = sample_real(cfg.occluder_size, s);
          const double radius = 0.5 * sample_real(cfg.occluder_size, s);
          occ.solid = Capsule{center - half_length * axis,
                              center + half_length * axis, radius};
          break;
        }
        default: {
          Vec3 half;
          for (int k = 0; k < 3; ++k) half[k] = sample_real(cfg.occluder_size, s);
          occ.solid = Aabb{center, half};
        }
      }
      occ.texture_id = s.uniform_int(0, cfg.hdri_count - 1);
      scene.occluders.push_back(std::move(occ));
    }
  }

  {
    auto s = SeedTree::stream(seed, "camera");
    auto& cam = scene.camera;
    cam.target = Vec3(0.0, sample_real(cfg.camera_target_height, s), 0.0);
    cam.radius = sample_real(cfg.camera_radius, s);
    cam.azimuth = sample_real(cfg.camera_azimuth, s);
    cam.elevation = sample_real(cfg.camera_elevation, s);
    cam.vertical_fov = sample_real(cfg.camera_fov, s);
    cam.image_width = cfg.image_width;
    cam.image_height = cfg.image_height;
  }
  {
    auto s = SeedTree::stream(seed, "lighting");
    scene.lighting_meta.intensity = sample_real(cfg.light_intensity, s);
    scene.lighting_meta.sun_time_of_day = sample_real(cfg.sun_time_of_day, s);
    scene.lighting_meta.sun_day_of_year =
        static_cast<int>(sample_int(cfg.sun_day_of_year, s));
  }
  {
    auto s = SeedTree::stream(seed, "background");
    scene.background_hdri_id =
        static_cast<int>(s.uniform_int(0, cfg.hdri_count - 1));
  }
  scene.render_meta.shader_graph = cfg.shader_graph;
  scene.render_meta.smaa = cfg.smaa;
  scene.render_meta.occluder_assets = std::string(to_string(cfg.occluder_mode));
  return scene;
}

inline SceneDescription generate_scene(const RandomizerConfig& cfg,
                                       std::uint64_t master_seed,
                                       std::uint64_t frame_index) {
  static const PoseLibrary lib = default_pose_library();
  return generate_scene(cfg, lib, master_seed, frame_index);
}

// ---- JSON ----------------------------------------------------------------

inline nlohmann::json to_json(const ParamRange& r) {
  switch (r.kind) {
    case RangeKind::uniform_continuous:
      return {{"kind", "uniform"}, {"min", r.lo}, {"max", r.hi}};
    case RangeKind::uniform_discrete:
      return {{"kind", "discrete"},
              {"min", static_cast<std::int64_t>(r.lo)},
              {"max", static_cast<std::int64_t>(r.hi)}};
    case RangeKind::categorical:
      return {{"kind", "categorical"}, {"items", r.items}};
  }
  return {};
}

inline ParamRange param_range_from_json(const nlohmann::json& j) {
  const auto kind = j.at("kind").get<std::string>();
  ParamRange r;
  if (kind == "uniform") {
    r = ParamRange::continuous(j.at("min").get<double>(), j.at("max").get<double>());
  } else if (kind == "discrete") {
    r = ParamRange::discrete(j.at("min").get<std::int64_t>(),
                             j.at("max").get<std::int64_t>());
  } else if (kind == "categorical") {
    r = ParamRange::categorical(j.at("items").get<std::vector<std::string>>());
  } else {
    throw InvalidConfig("unknown range kind '" + kind + "'");
  }
  if (!r.valid()) throw InvalidConfig("invalid range " + j.dump());
  return r;
}

inline nlohmann::json config_to_json(const RandomizerConfig& c) {
  nlohmann::json j;
  j["human_count"] = to_json(c.human_count);
  j["human_scale"] = to_json(c.human_scale);
  j["occluder_count"] = to_json(c.occluder_count);
  j["occluder_mode"] = to_string(c.occluder_mode);
  j["occluder_size"] = to_json(c.occluder_size);
  j["placement_extent"] = c.placement_extent;
  j["camera_radius"] = to_json(c.camera_radius);
  j["camera_azimuth"] = to_json(c.camera_azimuth);
  j["camera_elevation"] = to_json(c.camera_elevation);
  j["camera_fov"] = to_json(c.camera_fov);
  j["camera_target_height"] = to_json(c.camera_target_height);
  j["image_width"] = c.image_width;
  j["image_height"] = c.image_height;
  j["light_intensity"] = to_json(c.light_intensity);
  j["sun_time_of_day"] = to_json(c.sun_time_of_day);
  j["sun_day_of_year"] = to_json(c.sun_day_of_year);
  j["pose_mode"] = to_string(c.pose_mode);
  j["hdri_count"] = c.hdri_count;
  j["shader_graph"] = c.shader_graph;
  j["smaa"] = c.smaa;
  j["label_adaptation"] = to_string(c.label_adaptation);
  j["preset"] = c.preset ? nlohmann::json(*c.preset) : nlohmann::json(nullptr);
  return j;
}

// Missing keys keep their defaults (or the named preset's values when the
// document carries "preset").
inline RandomizerConfig config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw InvalidConfig("config must be a JSON object");
  RandomizerConfig c;
  try {
    if (auto it = j.find("preset"); it != j.end() && !it->is_null())
      c = preset(it->get<std::string>());
    auto range = [&](const char* key, ParamRange& out) {
      if (auto it = j.find(key); it != j.end()) out = param_range_from_json(*it);
    };
    range("human_count", c.human_count);
    range("human_scale", c.human_scale);
    range("occluder_count", c.occluder_count);
    range("occluder_size", c.occluder_size);
    range("camera_radius", c.camera_radius);
    range("camera_azimuth", c.camera_azimuth);
    range("camera_elevation", c.camera_elevation);
    range("camera_fov", c.camera_fov);
    range("camera_target_height", c.camera_target_height);
    range("light_intensity", c.light_intensity);
    range("sun_time_of_day", c.sun_time_of_day);
    range("sun_day_of_year", c.sun_day_of_year);
    if (auto it = j.find("occluder_mode"); it != j.end())
      c.occluder_mode = occluder_mode_from_string(it->get<std::string>());
    if (auto it = j.find("placement_extent"); it != j.end())
      c.placement_extent = it->get<double>();
    if (auto it = j.find("image_width"); it != j.end()) c.image_width = it->get<int>();
    if (auto it = j.find("image_height"); it != j.end()) c.image_height = it->get<int>();
    if (auto it = j.find("pose_mode"); it != j.end())
      c.pose_mode = pose_mode_from_string(it->get<std::string>());
    if (auto it = j.find("hdri_count"); it != j.end()) c.hdri_count = it->get<int>();
    if (auto it = j.find("shader_graph"); it != j.end()) c.shader_graph = it->get<bool>();
    if (auto it = j.find("smaa"); it != j.end()) c.smaa = it->get<bool>();
    if (auto it = j.find("label_adaptation"); it != j.end())
      c.label_adaptation = adapt_mode_from_string(it->get<std::string>());
  } catch (const nlohmann::json::exception& e) {
    throw InvalidConfig(e.what());
  }
  c.validate();
  return c;
}

namespace detail {

inline nlohmann::json vec_json(const Vec3& v) { return {v.x(), v.y(), v.z()}; }

inline Vec3 vec_from_json(const nlohmann::json& j) {
  if (!j.is_array() || j.size() != 3) throw InvalidScene("expected [x, y, z]");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

}  // namespace detail

// Per-frame sidecar document.
inline nlohmann::json scene_to_json(const SceneDescription& s) {
  using detail::vec_json;
  nlohmann::json j;
  j["frame_index"] = s.frame_index;
  j["frame_seed"] = s.frame_seed;
  const auto& c = s.camera;
  j["camera"] = {{"target", vec_json(c.target)},
                 {"radius", c.radius},
                 {"azimuth", c.azimuth},
                 {"elevation", c.elevation},
                 {"vertical_fov", c.vertical_fov},
                 {"image_width", c.image_width},
                 {"image_height", c.image_height}};
  j["lighting_meta"] = {{"intensity", s.lighting_meta.intensity},
                        {"sun_time_of_day", s.lighting_meta.sun_time_of_day},
                        {"sun_day_of_year", s.lighting_meta.sun_day_of_year}};
  j["render_meta"] = {{"shader_graph", s.render_meta.shader_graph},
                      {"smaa", s.render_meta.smaa},
                      {"occluder_assets", s.render_meta.occluder_assets}};
  j["background_hdri_id"] = s.background_hdri_id;
  nlohmann::json humans = nlohmann::json::array();
  for (const auto& h : s.humans) {
    nlohmann::json joints = nlohmann::json::array();
    for (const auto& p : h.joints) joints.push_back(vec_json(p));
    nlohmann::json caps = nlohmann::json::array();
    for (const auto& bc : h.bone_capsules) caps.push_back({bc.a, bc.b, bc.radius});
    humans.push_back({{"pose_id", h.pose_id},
                      {"root", vec_json(h.root)},
                      {"heading", h.heading},
                      {"scale", h.scale},
                      {"joints", joints},
                      {"capsules", caps}});
  }
  j["human"] = std::move(humans);
  nlohmann::json occs = nlohmann::json::array();
  for (const auto& o : s.occluders) {
    nlohmann::json oj = std::visit(
        [](const auto& solid) -> nlohmann::json {
          using T = std::decay_t<decltype(solid)>;
          if constexpr (std::is_same_v<T, Sphere>)
            return {{"shape", "sphere"},
                    {"center", vec_json(solid.center)},
                    {"radius", solid.radius}};
          else if constexpr (std::is_same_v<T, Capsule>)
            return {{"shape", "capsule"},
                    {"a", vec_json(solid.a)},
                    {"b", vec_json(solid.b)},
                    {"radius", solid.radius}};
          else
            return {{"shape", "box"},
                    {"center", vec_json(solid.center)},
                    {"half_extents", vec_json(solid.half_extents)}};
        },
        o.solid);
    oj["texture_id"] = o.texture_id;
    occs.push_back(std::move(oj));
  }
  j["occluders"] = std::move(occs);
  return j;
}

inline SceneDescription scene_from_json(const nlohmann::json& j) {
  using detail::vec_from_json;
  SceneDescription s;
  try {
    s.frame_index = j.at("frame_index").get<std::uint64_t>();
    s.frame_seed = j.at("frame_seed").get<std::uint64_t>();
    const auto& c = j.at("camera");
    s.camera.target = vec_from_json(c.at("target"));
    s.camera.radius = c.at("radius").get<double>();
    s.camera.azimuth = c.at("azimuth").get<double>();
    s.camera.elevation = c.at("elevation").get<double>();
    s.camera.vertical_fov = c.at("vertical_fov").get<double>();
    s.camera.image_width = c.at("image_width").get<int>();
    s.camera.image_height = c.at("image_height").get<int>();
    const auto& l = j.at("lighting_meta");
    s.lighting_meta.intensity = l.at("intensity").get<double>();
    s.lighting_meta.sun_time_of_day = l.at("sun_time_of_day").get<double>();
    s.lighting_meta.sun_day_of_year = l.at("sun_day_of_year").get<int>();
    const auto& r = j.at("render_meta");
    s.render_meta.shader_graph = r.at("shader_graph").get<bool>();
    s.render_meta.smaa = r.at("smaa").get<bool>();
    s.render_meta.occluder_assets = r.at("occluder_assets").get<std::string>();
    s.background_hdri_id = j.at("background_hdri_id").get<int>();
    for (const auto& h : j.at("human")) {
      SkeletonPose p;
      p.pose_id = h.at("pose_id").get<std::string>();
      p.root = vec_from_json(h.at("root"));
      p.heading = h.at("heading").get<double>();
      p.scale = h.at("scale").get<double>();
      const auto& joints = h.at("joints");
      if (joints.size() != kNumKeypoints) throw InvalidScene("expected 17 joints");
      for (std::size_t i = 0; i < kNumKeypoints; ++i)
        p.joints[i] = vec_from_json(joints[i]);
      for (const auto& bc : h.at("capsules"))
        p.bone_capsules.push_back(
            {bc.at(0).get<int>(), bc.at(1).get<int>(), bc.at(2).get<double>()});
      if (!p.valid()) throw InvalidScene("invalid skeleton in sidecar");
      s.humans.push_back(std::move(p));
    }
    for (const auto& o : j.at("occluders")) {
      OccluderPrimitive occ;
      const auto shape = o.at("shape").get<std::string>();
      if (shape == "sphere")
        occ.solid = Sphere{vec_from_json(o.at("center")), o.at("radius").get<double>()};
      else if (shape == "capsule")
        occ.solid = Capsule{vec_from_json(o.at("a")), vec_from_json(o.at("b")),
                            o.at("radius").get<double>()};
      else if (shape == "box")
        occ.solid = Aabb{vec_from_json(o.at("center")),
                         vec_from_json(o.at("half_extents"))};
      else
        throw InvalidScene("unknown occluder shape '" + shape + "'");
      occ.texture_id = o.at("texture_id").get<std::int64_t>();
      s.occluders.push_back(std::move(occ));
    }
  } catch (const nlohmann::json::exception& e) {
    throw InvalidScene(e.what());
  }
  return s;
}

}  // namespace synthlabel
