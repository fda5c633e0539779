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

// Command-line front end. Exit codes: 0 success, 1 usage error, 2 data
// error, 3 I/O error.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "synthlabel/synthlabel.hpp"

#ifndef SYNTHLABEL_VERSION
#define SYNTHLABEL_VERSION "0.0.0"
#endif

namespace synthlabel::cli {

namespace fs = std::filesystem;

enum ExitCode { kOk = 0, kUsage = 1, kData = 2, kIo = 3 };

inline unsigned default_jobs() {
  if (const char* env = std::getenv("SYNTHLABEL_JOBS")) {
    try {
      const int n = std::stoi(env);
      if (n > 0) return static_cast<unsigned>(n);
    } catch (const std::exception&) {
    }
  }
  return 1;
}

inline Json read_json_file(const fs::path& path) {
  const auto text = read_file(path);
  try {
    return Json::parse(text);
  } catch (const Json::exception& e) {
    throw MalformedFile(path.string() + ": " + e.what());
  }
}

inline void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoFailure("cannot create directory " + dir.string() + ": " + ec.message());
}

inline std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

struct GenerateArgs {
  std::string config_path;
  std::string preset_name;
  std::uint64_t seed = 0;
  std::int64_t frames = 0;
  std::string out_dir;
  unsigned jobs = 1;
  std::string pose_library;
  std::string profile;
  std::string box_mode = "full";
  int spheres = kDefaultSpheresPerCapsule;
};

inline int cmd_generate(const GenerateArgs& a, std::ostream& out) {
  if (a.config_path.empty() == a.preset_name.empty())
    throw UnknownPreset("exactly one of --config or --preset is required");
  const RandomizerConfig cfg = a.preset_name.empty()
                                   ? config_from_json(read_json_file(a.config_path))
                                   : preset(a.preset_name);
  const PoseLibrary lib =
      a.pose_library.empty()
          ? default_pose_library(cfg.pose_mode)
          : pose_library_from_json(read_json_file(a.pose_library), cfg.pose_mode);
  LabelOptions opts;
  opts.spheres_per_capsule = a.spheres;
  opts.box_mode = a.box_mode == "visible" ? BoxMode::visible_only : BoxMode::full_silhouette;

  auto gen = generate_dataset(cfg, lib, a.seed, static_cast<std::uint64_t>(a.frames),
                              a.jobs, opts);
  bool adapted = false;
  if (!a.profile.empty() && cfg.label_adaptation != AdaptMode::none) {
    const auto profile = profile_from_json(read_json_file(a.profile));
    gen.dataset = adapt(gen.dataset, profile, cfg.label_adaptation, a.seed);
    adapted = true;
  }

  const fs::path root(a.out_dir);
  ensure_dir(root / "scenes");
  write_dataset(gen.dataset, root / "annotations.json");
  parallel_for(gen.scenes.size(), a.jobs, [&](std::size_t i) {
    char name[32];
    std::snprintf(name, sizeof name, "frame_%06zu.json", i);
    write_file(root / "scenes" / name, scene_to_json(gen.scenes[i]).dump(2) + "\n");
  });

  const Json config = config_to_json(cfg);
  Json manifest = {{"toolkit", "synthlabel"},
                   {"version", SYNTHLABEL_VERSION},
                   {"seed", a.seed},
                   {"frames", a.frames},
                   {"config", config},
                   {"config_hash", hex64(fnv1a64(config.dump()))},
                   {"pose_library_version", lib.version},
                   {"box_mode", a.box_mode},
                   {"spheres_per_capsule", a.spheres},
                   {"label_adaptation_applied", adapted}};
  write_file(root / "manifest.json", manifest.dump(2) + "\n");

  out << "wrote " << gen.dataset.images.size() << " images, "
      << gen.dataset.annotations.size() << " annotations to " << root.string() << "\n";
  if (cfg.label_adaptation != AdaptMode::none && !adapted)
    out << "note: config requests '" << to_string(cfg.label_adaptation)
        << "' label adaptation; run `adapt` with a reference profile to apply it\n";
  return kOk;
}

inline AreaRanges load_ranges(const std::string& path) {
  return path.empty() ? AreaRanges{} : ranges_from_json(read_json_file(path));
}

inline void write_or_print(const std::string& path, const std::string& text,
                           std::ostream& out) {
  if (path.empty())
    out << text;
  else
    write_file(path, text);
}

struct ProfileArgs {
  std::string reference;
  std::string ranges;
  std::string out;
  std::optional<double> min_area;
  std::optional<double> min_area_ratio;
};

inline int cmd_profile(const ProfileArgs& a, std::ostream& out) {
  const auto ds = parse_dataset(a.reference);
  auto profile = compute_profile(ds, load_ranges(a.ranges));
  if (a.min_area) profile.min_area = *a.min_area;
  if (a.min_area_ratio) profile.min_area_ratio = *a.min_area_ratio;
  write_or_print(a.out, profile_to_json(profile).dump(2) + "\n", out);
  return kOk;
}

struct AdaptArgs {
  std::string input;
  std::string profile;
  std::string mode = "box+kpt";
  std::uint64_t seed = 0;
  std::string out;
};

inline int cmd_adapt(const AdaptArgs& a, std::ostream& out) {
  const auto ds = parse_dataset(a.input);
  const auto profile = profile_from_json(read_json_file(a.profile));
  const auto mode = adapt_mode_from_string(a.mode);
  const auto adapted = adapt(ds, profile, mode, a.seed);
  write_dataset(adapted, a.out);
  const auto s = summarize_adaptation(ds, adapted, profile.ranges);
  out << "range\tremoved_boxes\tremoved_keypoints\n";
  for (std::size_t r = 0; r < kNumAreaRanges; ++r)
    out << r << '\t' << s.removed_boxes[r] << '\t' << s.removed_keypoints[r] << '\n';
  return kOk;
}

inline int cmd_stats(const std::string& input, const std::string& ranges,
                     const std::string& out_path, std::ostream& out) {
  const auto ds = parse_dataset(input);
  const auto stats = dataset_statistics(ds, load_ranges(ranges));
  write_or_print(out_path, statistics_to_json(stats).dump(2) + "\n", out);
  return kOk;
}

inline int cmd_heatmaps(const std::string& input, const std::string& out_dir,
                        double extent, int resolution, std::ostream& out) {
  const auto ds = parse_dataset(input);
  const auto grid = pose_heatmaps(ds, extent, resolution);
  const fs::path root(out_dir);
  ensure_dir(root);
  for (std::size_t c = 0; c < kHeatmapChannels; ++c)
    write_file(root / ("heatmap_" + heatmap_channel_name(c) + ".csv"), heatmap_csv(grid, c));
  write_file(root / "summary.json", heatmap_summary_json(grid).dump(2) + "\n");
  out << "accumulated " << grid.instance_count << " skeletons (" << grid.rejected
      << " rejected, " << grid.degenerate << " degenerate)\n";
  return kOk;
}

inline int cmd_anneal_sim(const std::string& trace, const std::string& out_path,
                          const AnnealingConfig& cfg, std::ostream& out) {
  const auto rows = parse_trace_csv(read_file(trace));
  write_or_print(out_path, log_to_jsonl(simulate(cfg, rows)), out);
  return kOk;
}

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout,
               std::ostream& err = std::cerr) {
  CLI::App app{"Synthetic human keypoint data: generation, label adaptation and statistics",
               "synthlabel"};
  app.set_version_flag("--version", SYNTHLABEL_VERSION);
  app.require_subcommand(1);

  GenerateArgs gen;
  gen.jobs = default_jobs();
  auto* g = app.add_subcommand("generate", "Generate scenes and COCO annotations");
  g->add_option("--config", gen.config_path, "RandomizerConfig JSON file");
  g->add_option("--preset", gen.preset_name, "Named preset")
      ->check(CLI::IsMember(std::vector<std::string>(kPresetNames.begin(), kPresetNames.end())));
  g->add_option("--seed", gen.seed, "Master seed");
  g->add_option("--frames", gen.frames, "Number of frames")->required()->check(CLI::NonNegativeNumber);
  g->add_option("--out", gen.out_dir, "Output directory")->required();
  g->add_option("--jobs", gen.jobs, "Worker threads (default $SYNTHLABEL_JOBS or 1)")
      ->check(CLI::PositiveNumber);
  g->add_option("--pose-library", gen.pose_library, "Pose library JSON");
  g->add_option("--profile", gen.profile, "Apply the config's label adaptation with this profile");
  g->add_option("--box-mode", gen.box_mode, "full | visible")
      ->check(CLI::IsMember({"full", "visible"}));
  g->add_option("--spheres", gen.spheres, "Spheres per capsule for silhouette boxes")
      ->check(CLI::Range(1, 4096));

  ProfileArgs prof;
  auto* p = app.add_subcommand("profile", "Build an adaptation profile from a reference dataset");
  p->add_option("--reference", prof.reference)->required();
  p->add_option("--ranges", prof.ranges, "Area ranges JSON");
  p->add_option("--out", prof.out, "Output file (stdout if omitted)");
  p->add_option("--min-area", prof.min_area, "Override the area threshold");
  p->add_option("--min-area-ratio", prof.min_area_ratio, "Override the area ratio threshold");

  AdaptArgs ad;
  auto* a = app.add_subcommand("adapt", "Adapt annotations to a reference profile");
  a->add_option("--input", ad.input)->required();
  a->add_option("--profile", ad.profile)->required();
  a->add_option("--mode", ad.mode)->check(CLI::IsMember({"box", "box+kpt"}));
  a->add_option("--seed", ad.seed);
  a->add_option("--out", ad.out)->required();

  std::string stats_in, stats_ranges, stats_out;
  auto* s = app.add_subcommand("stats", "Dataset statistics report (JSON)");
  s->add_option("--input", stats_in)->required();
  s->add_option("--ranges", stats_ranges);
  s->add_option("--out", stats_out);

  std::string hm_in, hm_out;
  double hm_extent = 3.0;
  int hm_resolution = 101;
  auto* h = app.add_subcommand("heatmaps", "Torso-normalized keypoint heatmaps (CSV)");
  h->add_option("--input", hm_in)->required();
  h->add_option("--out", hm_out)->required();
  h->add_option("--extent", hm_extent)->check(CLI::PositiveNumber);
  h->add_option("--resolution", hm_resolution);

  std::string trace, anneal_out;
  AnnealingConfig acfg;
  auto* an = app.add_subcommand("anneal-sim", "Replay a validation trace through the LR schedule");
  an->add_option("--trace", trace, "CSV with epoch,metric,tag")->required();
  an->add_option("--out", anneal_out, "JSON-lines log (stdout if omitted)");
  an->add_option("--initial-lr", acfg.initial_lr);
  an->add_option("--patience", acfg.initial_patience);
  an->add_option("--epsilon", acfg.initial_epsilon);
  an->add_option("--max-reductions", acfg.max_reductions);
  an->add_option("--reduction-factor", acfg.reduction_factor);

  std::string poses_out;
  auto* ep = app.add_subcommand("export-poses", "Write the built-in pose library as JSON");
  ep->add_option("--out", poses_out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kOk : kUsage;
  }

  try {
    if (*g) return cmd_generate(gen, out);
    if (*p) return cmd_profile(prof, out);
    if (*a) return cmd_adapt(ad, out);
    if (*s) return cmd_stats(stats_in, stats_ranges, stats_out, out);
    if (*h) return cmd_heatmaps(hm_in, hm_out, hm_extent, hm_resolution, out);
    if (*an) {
      acfg.validate();
      return cmd_anneal_sim(trace, anneal_out, acfg, out);
    }
    if (*ep) {
      write_or_print(poses_out, pose_library_to_json(default_pose_library()).dump(2) + "\n", out);
      return kOk;
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    switch (e.category()) {
      case ErrorCategory::usage: return kUsage;
      case ErrorCategory::data: return kData;
      case ErrorCategory::io: return kIo;
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kData;
  }
  return kUsage;
}

}  // namespace synthlabel::cli
