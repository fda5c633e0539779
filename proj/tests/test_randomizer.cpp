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

#include <gtest/gtest.h>

#include <map>
#include <numeric>
#include <set>
#include <unordered_set>

#include "support.hpp"

using namespace synthlabel;
using namespace testing_support;

namespace {

struct Moments {
  double mean = 0.0;
  double variance = 0.0;
};

template <class Draw>
Moments moments(int n, Draw&& draw) {
  double sum = 0.0;
  double sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = draw();
    sum += x;
    sq += x * x;
  }
  const double mean = sum / n;
  return {mean, sq / n - mean * mean};
}

RandomizerConfig small_config() {
  RandomizerConfig cfg;
  cfg.human_count = ParamRange::discrete(1, 4);
  return cfg;
}

}  // namespace

TEST(Hash, KnownVectors) {
  EXPECT_EQ(fnv1a64(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(fnv1a64("a"), 0xaf63dc4c8601ec8cULL);
  EXPECT_EQ(fnv1a64("foobar"), 0x85944171f73967e8ULL);
  // First output of the reference splitmix64 generator seeded with 0.
  EXPECT_EQ(splitmix_finalize(0x9e3779b97f4a7c15ULL), 0xe220a8397b1dcdafULL);
}

TEST(SeedTree, DistinctFrameAndSubSeeds) {
  std::unordered_set<std::uint64_t> seen;
  seen.reserve(1 << 21);
  for (std::uint64_t master : {0ULL, 1ULL, 2ULL, 3ULL})
    for (std::uint64_t i = 0; i < 250000; ++i)
      ASSERT_TRUE(seen.insert(SeedTree{master}.frame_seed(i)).second);
  const std::array<std::string_view, 7> names = {
      "human_count", "human_placement", "human_pose", "occluders", "camera", "lighting",
      "background"};
  std::unordered_set<std::uint64_t> subs;
  for (std::uint64_t i = 0; i < 10000; ++i)
    for (auto n : names)
      ASSERT_TRUE(subs.insert(SeedTree::sub_seed(SeedTree{7}.frame_seed(i), n)).second);
}

TEST(Sampler, DegenerateRangesReturnTheirBound) {
  Stream s(1);
  EXPECT_EQ(sample_real(ParamRange::continuous(2.5, 2.5), s), 2.5);
  EXPECT_EQ(sample_int(ParamRange::discrete(4, 4), s), 4);
  EXPECT_EQ(sample_item(ParamRange::categorical({"only"}), s), "only");
}

TEST(Sampler, UniformMoments) {
  for (std::uint64_t seed : {1ULL, 2ULL, 3ULL, 12345ULL, 0xdeadbeefULL}) {
    Stream s(seed);
    const auto m = moments(100000, [&] { return sample_real(ParamRange::continuous(0, 1), s); });
    EXPECT_NEAR(m.mean, 0.5, 0.01) << seed;
    EXPECT_NEAR(m.variance, 1.0 / 12.0, 0.005) << seed;
  }
}

TEST(Sampler, SameSeedSameSequence) {
  const auto r = ParamRange::continuous(-3, 7);
  Stream a(42), b(42), c(43);
  bool differs = false;
  for (int i = 0; i < 1000; ++i) {
    const double x = sample_real(r, a);
    EXPECT_EQ(x, sample_real(r, b));
    differs = differs || x != sample_real(r, c);
  }
  EXPECT_TRUE(differs);
}

TEST(Sampler, MillionDrawsStayInBounds) {
  Stream s(8);
  const auto cont = ParamRange::continuous(-0.2, 1.0);
  const auto disc = ParamRange::discrete(1, 10);
  const auto cat = ParamRange::categorical({"a", "b", "c"});
  std::map<std::int64_t, int> hist;
  std::map<std::string, int> items;
  for (int i = 0; i < 1000000; ++i) {
    const double x = sample_real(cont, s);
    ASSERT_TRUE(x >= -0.2 && x < 1.0);
    const auto k = sample_int(disc, s);
    ASSERT_TRUE(k >= 1 && k <= 10);
    ++hist[k];
    ++items[sample_item(cat, s)];
  }
  EXPECT_EQ(hist.size(), 10u);
  for (const auto& [k, n] : hist) EXPECT_NEAR(n, 100000, 1500) << k;
  for (const auto& [k, n] : items) EXPECT_NEAR(n, 1000000 / 3.0, 2500) << k;
}

TEST(Sampler, VariantSampleMatchesKind) {
  Stream s(3);
  EXPECT_TRUE(std::holds_alternative<double>(sample(ParamRange::continuous(0, 1), s)));
  EXPECT_TRUE(std::holds_alternative<std::int64_t>(sample(ParamRange::discrete(0, 1), s)));
  EXPECT_TRUE(std::holds_alternative<std::string>(sample(ParamRange::categorical({"x"}), s)));
}

TEST(Randomizer, ZeroHumanRange) {
  RandomizerConfig cfg;
  cfg.human_count = ParamRange::discrete(0, 0);
  for (std::uint64_t i = 0; i < 20; ++i) EXPECT_TRUE(generate_scene(cfg, 1, i).humans.empty());
}

TEST(Randomizer, NoOccluderPreset) {
  const auto cfg = preset("no-occluders");
  EXPECT_EQ(cfg.occluder_mode, OccluderMode::none);
  for (std::uint64_t i = 0; i < 200; ++i) EXPECT_TRUE(generate_scene(cfg, 9, i).occluders.empty());
}

TEST(Randomizer, DeterministicAndOrderIndependent) {
  const auto cfg = small_config();
  std::vector<SceneDescription> forward;
  for (std::uint64_t i = 0; i < 50; ++i) forward.push_back(generate_scene(cfg, 5, i));
  for (std::uint64_t i = 50; i-- > 0;) EXPECT_EQ(generate_scene(cfg, 5, i), forward[i]);
  EXPECT_NE(generate_scene(cfg, 6, 0), forward[0]);
}

TEST(Randomizer, SubStreamIsolation) {
  auto a = small_config();
  auto b = a;
  b.camera_radius = ParamRange::continuous(20, 30);
  b.light_intensity = ParamRange::continuous(5, 6);
  for (std::uint64_t i = 0; i < 50; ++i) {
    const auto sa = generate_scene(a, 77, i);
    const auto sb = generate_scene(b, 77, i);
    EXPECT_EQ(sa.humans, sb.humans);
    EXPECT_EQ(sa.occluders, sb.occluders);
    EXPECT_EQ(sa.background_hdri_id, sb.background_hdri_id);
    EXPECT_EQ(sa.camera.azimuth, sb.camera.azimuth);
    EXPECT_NE(sa.camera.radius, sb.camera.radius);
  }
}

TEST(Randomizer, ScenesRespectConfiguredRanges) {
  const RandomizerConfig cfg;
  for (std::uint64_t i = 0; i < 500; ++i) {
    const auto s = generate_scene(cfg, 3, i);
    EXPECT_NO_THROW(validate_scene(s, cfg.hdri_count, cfg.placement_extent));
    EXPECT_GE(s.humans.size(), 1u);
    EXPECT_LE(s.humans.size(), 10u);
    EXPECT_LE(s.occluders.size(), 8u);
    EXPECT_TRUE(s.camera.radius >= 3 && s.camera.radius < 12);
    EXPECT_TRUE(s.camera.elevation >= -0.2 && s.camera.elevation < 1.0);
    EXPECT_TRUE(s.lighting_meta.sun_day_of_year >= 1 && s.lighting_meta.sun_day_of_year <= 365);
    EXPECT_EQ(s.frame_seed, SeedTree{3}.frame_seed(i));
    for (const auto& h : s.humans) {
      EXPECT_LT(std::hypot(h.mid_hip().x(), h.mid_hip().z()), cfg.placement_extent + 1e-12);
      EXPECT_TRUE(h.scale >= 0.9 && h.scale < 1.1);
      // Lowest capsule rests on the ground plane.
      double lowest = 1e9;
      for (const auto& bc : h.bone_capsules)
        for (int e : {bc.a, bc.b})
          lowest = std::min(lowest, h.joints[std::size_t(e)].y() - bc.radius);
      EXPECT_GT(lowest, -1e-9);
    }
  }
}

TEST(Randomizer, PlacementIsUniformOverDisc) {
  // Fraction of mid-hips inside radius r/2 of an r-disc is 1/4.
  RandomizerConfig cfg;
  int inner = 0;
  int total = 0;
  for (std::uint64_t i = 0; i < 3000; ++i)
    for (const auto& h : generate_scene(cfg, 4, i).humans) {
      ++total;
      inner += std::hypot(h.mid_hip().x(), h.mid_hip().z()) < 1.0 ? 1 : 0;
    }
  EXPECT_NEAR(double(inner) / total, 0.25, 0.01);
}

TEST(Randomizer, SimpleModeOnlyUsesSimpleFamilies) {
  const auto cfg = preset("simple-anims");
  const auto lib = default_pose_library();
  for (std::uint64_t i = 0; i < 200; ++i)
    for (const auto& h : generate_scene(cfg, lib, 2, i).humans) {
      const auto family = lib.find(h.pose_id).family;
      EXPECT_TRUE(family == "walk" || family == "run" || family == "idle") << family;
      // Unperturbed keyframes.
      const auto ref = instantiate_pose(lib, h.pose_id, h.root, h.heading, h.scale);
      for (std::size_t j = 0; j < kNumKeypoints; ++j)
        EXPECT_LT((ref.joints[j] - h.joints[j]).norm(), 1e-12);
    }
}

TEST(Randomizer, InvalidConfigRejected) {
  RandomizerConfig cfg;
  cfg.human_count = ParamRange::discrete(5, 2);
  EXPECT_THROW(generate_scene(cfg, 1, 0), InvalidConfig);
  cfg = {};
  cfg.camera_elevation = ParamRange::continuous(-2.0, 0.0);
  EXPECT_THROW(cfg.validate(), InvalidConfig);
  cfg = {};
  cfg.placement_extent = 0.0;
  EXPECT_THROW(cfg.validate(), InvalidConfig);
}

TEST(Presets, PlusCombinesFiveFlags) {
  const auto plus = preset("psp-hdri-plus");
  EXPECT_EQ(plus.pose_mode, PoseMode::simple);
  EXPECT_EQ(plus.label_adaptation, AdaptMode::box_kpt);
  EXPECT_EQ(plus.occluder_mode, OccluderMode::highquality_id);
  EXPECT_FALSE(plus.shader_graph);
  EXPECT_TRUE(plus.smaa);
  const auto a = config_to_json(preset("psp-hdri"));
  const auto b = config_to_json(plus);
  std::set<std::string> diff;
  for (auto it = a.begin(); it != a.end(); ++it)
    if (b.at(it.key()) != it.value()) diff.insert(it.key());
  EXPECT_EQ(diff, (std::set<std::string>{"label_adaptation", "occluder_mode", "pose_mode",
                                         "preset", "shader_graph", "smaa"}));
}

TEST(Presets, EachAblationChangesOneFlag) {
  const auto base = config_to_json(preset("psp-hdri"));
  for (auto name : kPresetNames) {
    if (name == "psp-hdri" || name == "psp-hdri-plus") continue;
    const auto j = config_to_json(preset(name));
    int changed = 0;
    for (auto it = base.begin(); it != base.end(); ++it)
      if (it.key() != "preset" && j.at(it.key()) != it.value()) ++changed;
    EXPECT_EQ(changed, 1) << name;
  }
  EXPECT_THROW(preset("psp-hdri-max"), UnknownPreset);
}

TEST(ConfigJson, RoundTripAndPartialDocuments) {
  for (auto name : kPresetNames) {
    const auto cfg = preset(name);
    EXPECT_EQ(config_from_json(config_to_json(cfg)), cfg) << name;
  }
  const auto partial = config_from_json(Json::parse(
      R"({"preset": "smaa", "human_count": {"kind": "discrete", "min": 2, "max": 3}})"));
  EXPECT_TRUE(partial.smaa);
  EXPECT_EQ(partial.human_count.lo, 2);
  EXPECT_THROW(config_from_json(Json::parse(R"({"human_count": {"kind": "gauss"}})")),
               InvalidConfig);
  EXPECT_THROW(config_from_json(Json::parse(R"({"smaa": "yes"})")), InvalidConfig);
  EXPECT_THROW(config_from_json(Json::parse(R"([])")), InvalidConfig);
}

TEST(SceneJson, SidecarRoundTrip) {
  const auto cfg = preset("polyhaven-occluders");
  for (std::uint64_t i = 0; i < 100; ++i) {
    const auto s = generate_scene(cfg, 1234, i);
    const auto j = scene_to_json(s);
    EXPECT_EQ(scene_from_json(Json::parse(j.dump())), s);
    EXPECT_TRUE(j.contains("human"));
    for (const auto& h : j["human"]) {
      EXPECT_TRUE(h.contains("pose_id"));
      EXPECT_TRUE(h.contains("root"));
      EXPECT_TRUE(h.contains("heading"));
      EXPECT_TRUE(h.contains("scale"));
    }
  }
  EXPECT_THROW(scene_from_json(Json::parse("{}")), InvalidScene);
}
