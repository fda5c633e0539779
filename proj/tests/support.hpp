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

#include <unistd.h>

#include <algorithm>
#include <filesystem>
#include <string>
#include <typeinfo>
#include <vector>

#include "synthlabel/synthlabel.hpp"

namespace testing_support {

namespace fs = std::filesystem;

inline fs::path fixtures() { return fs::path(SYNTHLABEL_FIXTURES); }
inline fs::path data_dir() { return fs::path(SYNTHLABEL_DATA); }

inline std::vector<fs::path> files_in(const fs::path& dir) {
  std::vector<fs::path> out;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_regular_file()) out.push_back(e.path());
  std::sort(out.begin(), out.end());
  return out;
}

// Class name of a typed error, read from the prefix of what().
inline std::string error_class(const synthlabel::Error& e) {
  const std::string w = e.what();
  return w.substr(0, w.find(':'));
}

// Scratch directory removed on destruction.
struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) {
    path = fs::temp_directory_path() /
           ("synthlabel_" + tag + "_" + std::to_string(::getpid()));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
};

inline synthlabel::PersonAnnotation person(std::int64_t id, std::int64_t image_id,
                                           synthlabel::BBox box) {
  synthlabel::PersonAnnotation a;
  a.id = id;
  a.image_id = image_id;
  a.bbox = box;
  a.area = box.area();
  return a;
}

inline void label(synthlabel::PersonAnnotation& a, std::size_t k, double x, double y,
                  int v = 2) {
  if (a.keypoints[k].v == 0) ++a.num_keypoints;
  a.keypoints[k] = {x, y, v};
}

inline synthlabel::ImageRecord image(std::int64_t id, std::int64_t w, std::int64_t h) {
  synthlabel::ImageRecord im;
  im.id = id;
  im.width = w;
  im.height = h;
  im.file_name = "img_" + std::to_string(id) + ".png";
  return im;
}

}  // namespace testing_support
