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

// Whole-dataset generation: scenes and labels per frame on a worker pool,
// merged in frame order so the output does not depend on the worker count.

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <optional>
#include <thread>
#include <vector>

#include "synthlabel/annotation_io.hpp"
#include "synthlabel/labeler.hpp"
#include "synthlabel/pose_library.hpp"
#include "synthlabel/randomizer.hpp"

namespace synthlabel {

struct GeneratedDataset {
  AnnotatedDataset dataset;
  std::vector<SceneDescription> scenes;
};

// Runs fn(i) for i in [0, n) on up to `jobs` threads. The first exception
// thrown by any call is rethrown after all workers finish.
template <class Fn>
void parallel_for(std::size_t n, unsigned jobs, Fn&& fn) {
  jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
  if (jobs == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::jthread> workers;
  for (unsigned w = 0; w < jobs; ++w) {
    workers.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
          next = n;
        }
      }
    });
  }
  workers.clear();
  if (error) std::rethrow_exception(error);
}

inline GeneratedDataset generate_dataset(const RandomizerConfig& cfg,
                                         const PoseLibrary& library,
                                         std::uint64_t master_seed,
                                         std::uint64_t frames, unsigned jobs = 1,
                                         const LabelOptions& options = {}) {
  cfg.validate();
  std::vector<SceneDescription> scenes(frames);
  std::vector<FrameLabels> labels(frames);
  parallel_for(frames, jobs, [&](std::size_t i) {
    scenes[i] = generate_scene(cfg, library, master_seed, i);
    labels[i] = label_frame(scenes[i], static_cast<std::int64_t>(i) + 1, 1, options);
  });

  GeneratedDataset out;
  std::int64_t next_id = 1;
  for (auto& frame : labels) {
    out.dataset.images.push_back(std::move(frame.image));
    for (auto& a : frame.annotations) {
      a.id = next_id++;
      out.dataset.annotations.push_back(std::move(a));
    }
  }
  out.scenes = std::move(scenes);
  return out;
}

}  // namespace synthlabel
