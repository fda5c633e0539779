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

// COCO person-keypoints files: parsing with full validation, and
// deterministic writing (sorted keys, shortest round-trip floats).

#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "synthlabel/errors.hpp"
#include "synthlabel/keypoints.hpp"

namespace synthlabel {

using Json = nlohmann::json;

struct ImageRecord {
  std::int64_t id = 0;
  std::int64_t width = 0;
  std::int64_t height = 0;
  std::string file_name;
  Json extras = Json::object();

  double pixel_area() const {
    return static_cast<double>(width) * static_cast<double>(height);
  }
  bool operator==(const ImageRecord&) const = default;
};

struct BBox {
  double x = 0.0;
  double y = 0.0;
  double w = 0.0;
  double h = 0.0;

  double area() const { return w * h; }
  bool operator==(const BBox&) const = default;
};

struct KeypointLabel {
  double x = 0.0;
  double y = 0.0;
  int v = 0;  // 0 not labeled, 1 labeled but occluded, 2 labeled and visible

  bool operator==(const KeypointLabel&) const = default;
};

using KeypointLabels = std::array<KeypointLabel, kNumKeypoints>;

inline int count_labeled(const KeypointLabels& kps) {
  int n = 0;
  for (const auto& k : kps) n += k.v > 0 ? 1 : 0;
  return n;
}

struct PersonAnnotation {
  std::int64_t id = 0;
  std::int64_t image_id = 0;
  BBox bbox;
  double area = 0.0;
  KeypointLabels keypoints{};
  int num_keypoints = 0;
  int iscrowd = 0;
  std::int64_t category_id = 1;
  Json extras = Json::object();

  // Box area used for thresholds and area ranges (w*h, not `area`).
  double box_area() const { return bbox.area(); }

  // Drops keypoint k's label and keeps num_keypoints consistent.
  void unlabel(std::size_t k) {
    if (keypoints[k].v > 0) --num_keypoints;
    keypoints[k] = KeypointLabel{};
  }

  bool operator==(const PersonAnnotation&) const = default;
};

struct PersonCategory {
  std::int64_t id = 1;
  std::string name = "person";
  std::string supercategory = "person";
  KeypointSchema schema = KeypointSchema::coco();
  Json extras = Json::object();

  bool operator==(const PersonCategory&) const = default;
};

struct AnnotatedDataset {
  std::vector<ImageRecord> images;
  std::vector<PersonAnnotation> annotations;
  PersonCategory category;
  // Unknown top-level keys (info, licenses, ...), re-emitted verbatim.
  Json extras = Json::object();

  const ImageRecord* find_image(std::int64_t id) const {
    for (const auto& im : images)
      if (im.id == id) return &im;
    return nullptr;
  }

  bool operator==(const AnnotatedDataset&) const = default;
};

namespace detail {

class Reader {
 public:
  explicit Reader(std::string source) : source_(std::move(source)) {}

  [[noreturn]] void fail(const std::string& path,
                         const std::string& msg) const {
    throw SchemaViolation(source_ + ":" + (path.empty() ? "/" : path) + ": " +
                          msg);
  }

  const Json& member(const Json& obj, const std::string& path,
                     const char* key) const {
    auto it = obj.find(key);
    if (it == obj.end()) fail(path, std::string("missing field '") + key + "'");
    return *it;
  }

  std::int64_t integer(const Json& j, const std::string& path) const {
    if (j.is_number_unsigned()) {
      if (j.get<std::uint64_t>() >
          static_cast<std::uint64_t>(INT64_MAX))
        fail(path, "integer out of range");
      return static_cast<std::int64_t>(j.get<std::uint64_t>());
    }
    if (j.is_number_integer()) return j.get<std::int64_t>();
    fail(path, "expected integer");
  }

  double number(const Json& j, const std::string& path) const {
    if (!j.is_number()) fail(path, "expected number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) fail(path, "number is not finite");
    return v;
  }

  std::string text(const Json& j, const std::string& path) const {
    if (!j.is_string()) fail(path, "expected string");
    return j.get<std::string>();
  }

  const Json& array(const Json& j, const std::string& path) const {
    if (!j.is_array()) fail(path, "expected array");
    return j;
  }

  const Json& object(const Json& j, const std::string& path) const {
    if (!j.is_object()) fail(path, "expected object");
    return j;
  }

  static Json extras_of(const Json& obj,
                        std::initializer_list<std::string_view> known) {
    Json out = Json::object();
    for (auto it = obj.begin(); it != obj.end(); ++it) {
      bool is_known = false;
      for (auto k : known) is_known = is_known || it.key() == k;
      if (!is_known) out[it.key()] = it.value();
    }
    return out;
  }

 private:
  std::string source_;
};

inline ImageRecord read_image(const Reader& r, const Json& j,
                              const std::string& path) {
  r.object(j, path);
  ImageRecord im;
  im.id = r.integer(r.member(j, path, "id"), path + "/id");
  im.width = r.integer(r.member(j, path, "width"), path + "/width");
  im.height = r.integer(r.member(j, path, "height"), path + "/height");
  im.file_name = r.text(r.member(j, path, "file_name"), path + "/file_name");
  if (im.id <= 0) r.fail(path + "/id", "image id must be positive");
  if (im.width < 1 || im.height < 1)
    r.fail(path, "image width and height must be >= 1");
  im.extras = Reader::extras_of(j, {"id", "width", "height", "file_name"});
  return im;
}

inline PersonAnnotation read_annotation(const Reader& r, const Json& j,
                                        const std::string& path) {
  r.object(j, path);
  PersonAnnotation a;
  a.id = r.integer(r.member(j, path, "id"), path + "/id");
  a.image_id = r.integer(r.member(j, path, "image_id"), path + "/image_id");
  if (a.id <= 0) r.fail(path + "/id", "annotation id must be positive");

  const auto& bbox = r.array(r.member(j, path, "bbox"), path + "/bbox");
  if (bbox.size() != 4) r.fail(path + "/bbox", "bbox must have 4 numbers");
  a.bbox = {r.number(bbox[0], path + "/bbox/0"),
            r.number(bbox[1], path + "/bbox/1"),
            r.number(bbox[2], path + "/bbox/2"),
            r.number(bbox[3], path + "/bbox/3")};
  if (!(a.bbox.w > 0.0) || !(a.bbox.h > 0.0))
    r.fail(path + "/bbox", "bbox width and height must be positive");

  const auto& kps =
      r.array(r.member(j, path, "keypoints"), path + "/keypoints");
  if (kps.size() != 3 * kNumKeypoints)
    r.fail(path + "/keypoints", "expected 51 numbers, got " +
                                    std::to_string(kps.size()));
  for (std::size_t k = 0; k < kNumKeypoints; ++k) {
    const std::string kp = path + "/keypoints/" + std::to_string(3 * k);
    auto& out = a.keypoints[k];
    out.x = r.number(kps[3 * k], kp);
    out.y = r.number(kps[3 * k + 1], kp);
    const double v = r.number(kps[3 * k + 2], kp);
    if (v != 0.0 && v != 1.0 && v != 2.0)
      r.fail(kp, "visibility flag must be 0, 1 or 2");
    out.v = static_cast<int>(v);
    if (out.v == 0 && (out.x != 0.0 || out.y != 0.0))
      r.fail(kp, "unlabeled keypoint must have zero coordinates");
  }

  const int labeled = count_labeled(a.keypoints);
  if (auto it = j.find("num_keypoints"); it != j.end()) {
    a.num_keypoints =
        static_cast<int>(r.integer(*it, path + "/num_keypoints"));
    if (a.num_keypoints != labeled)
      r.fail(path + "/num_keypoints",
             "num_keypoints " + std::to_string(a.num_keypoints) +
                 " does not match " + std::to_string(labeled) +
                 " labeled triplets");
  } else {
    a.num_keypoints = labeled;
  }

  if (auto it = j.find("area"); it != j.end())
    a.area = r.number(*it, path + "/area");
  else
    a.area = a.bbox.area();
  if (auto it = j.find("iscrowd"); it != j.end()) {
    const auto c = r.integer(*it, path + "/iscrowd");
    if (c != 0 && c != 1) r.fail(path + "/iscrowd", "iscrowd must be 0 or 1");
    a.iscrowd = static_cast<int>(c);
  }
  if (auto it = j.find("category_id"); it != j.end())
    a.category_id = r.integer(*it, path + "/category_id");

  a.extras = Reader::extras_of(
      j, {"id", "image_id", "bbox", "keypoints", "num_keypoints", "area",
          "iscrowd", "category_id"});
  return a;
}

inline PersonCategory read_category(const Reader& r, const Json& j,
                                    const std::string& path) {
  r.object(j, path);
  PersonCategory c;
  c.id = r.integer(r.member(j, path, "id"), path + "/id");
  c.name = r.text(r.member(j, path, "name"), path + "/name");
  if (auto it = j.find("supercategory"); it != j.end())
    c.supercategory = r.text(*it, path + "/supercategory");
  else
    c.supercategory.clear();

  const auto& names =
      r.array(r.member(j, path, "keypoints"), path + "/keypoints");
  if (names.size() != kNumKeypoints)
    r.fail(path + "/keypoints", "expected 17 keypoint names");
  c.schema.names.clear();
  for (std::size_t i = 0; i < names.size(); ++i)
    c.schema.names.push_back(
        r.text(names[i], path + "/keypoints/" + std::to_string(i)));

  const auto& edges =
      r.array(r.member(j, path, "skeleton"), path + "/skeleton");
  c.schema.skeleton_edges.clear();
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const std::string ep = path + "/skeleton/" + std::to_string(i);
    const auto& e = r.array(edges[i], ep);
    if (e.size() != 2) r.fail(ep, "skeleton edge must be a pair");
    const auto a = r.integer(e[0], ep + "/0");
    const auto b = r.integer(e[1], ep + "/1");
    if (a < 1 || a > 17 || b < 1 || b > 17)
      r.fail(ep, "skeleton index outside [1, 17]");
    c.schema.skeleton_edges.emplace_back(static_cast<int>(a),
                                         static_cast<int>(b));
  }
  c.extras = Reader::extras_of(
      j, {"id", "name", "supercategory", "keypoints", "skeleton"});
  return c;
}

}  // namespace detail

// Cross-record invariants: unique ids, resolvable image ids, boxes that
// touch their image.
inline void validate_dataset(const AnnotatedDataset& ds,
                             const std::string& source = "<dataset>") {
  detail::Reader r(source);
  std::set<std::int64_t> image_ids;
  for (std::size_t i = 0; i < ds.images.size(); ++i) {
    if (!image_ids.insert(ds.images[i].id).second)
      r.fail("/images/" + std::to_string(i) + "/id", "duplicate image id");
  }
  std::set<std::int64_t> ann_ids;
  for (std::size_t i = 0; i < ds.annotations.size(); ++i) {
    const auto& a = ds.annotations[i];
    const std::string path = "/annotations/" + std::to_string(i);
    if (!ann_ids.insert(a.id).second) r.fail(path + "/id", "duplicate annotation id");
    if (a.category_id != ds.category.id)
      r.fail(path + "/category_id", "only the person category is supported");
    const auto* im = ds.find_image(a.image_id);
    if (im == nullptr)
      r.fail(path + "/image_id",
             "dangling image_id " + std::to_string(a.image_id));
    const auto& b = a.bbox;
    if (!(b.x < static_cast<double>(im->width) && b.x + b.w > 0.0 &&
          b.y < static_cast<double>(im->height) && b.y + b.h > 0.0))
      r.fail(path + "/bbox", "bbox does not intersect the image");
    if (a.num_keypoints != count_labeled(a.keypoints))
      r.fail(path + "/num_keypoints", "inconsistent num_keypoints");
  }
}

inline AnnotatedDataset dataset_from_json(const Json& root,
                                          const std::string& source) {
  detail::Reader r(source);
  r.object(root, "");
  AnnotatedDataset ds;

  const auto& images = r.array(r.member(root, "", "images"), "/images");
  for (std::size_t i = 0; i < images.size(); ++i)
    ds.images.push_back(
        detail::read_image(r, images[i], "/images/" + std::to_string(i)));

  const auto& anns =
      r.array(r.member(root, "", "annotations"), "/annotations");
  for (std::size_t i = 0; i < anns.size(); ++i)
    ds.annotations.push_back(detail::read_annotation(
        r, anns[i], "/annotations/" + std::to_string(i)));

  const auto& cats = r.array(r.member(root, "", "categories"), "/categories");
  if (cats.size() > 1)
    r.fail("/categories", "only a single person category is supported");
  if (cats.size() == 1) ds.category = detail::read_category(r, cats[0], "/categories/0");

  ds.extras = detail::Reader::extras_of(root,
                                        {"images", "annotations", "categories"});
  validate_dataset(ds, source);
  return ds;
}

inline AnnotatedDataset parse_dataset_text(std::string_view text,
                                           const std::string& source = "<text>") {
  Json root;
  try {
    root = Json::parse(text.begin(), text.end());
  } catch (const Json::parse_error& e) {
    throw MalformedFile(source + ": byte " + std::to_string(e.byte) + ": " +
                        e.what());
  } catch (const Json::exception& e) {
    throw MalformedFile(source + ": " + e.what());
  }
  return dataset_from_json(root, source);
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoFailure("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoFailure("read failed: " + path.string());
  return buf.str();
}

inline void write_file(const std::filesystem::path& path,
                       std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoFailure("cannot open for writing: " + path.string());
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  out.flush();
  if (!out) throw IoFailure("write failed: " + path.string());
}

inline AnnotatedDataset parse_dataset(const std::filesystem::path& path) {
  return parse_dataset_text(read_file(path), path.string());
}

inline Json dataset_to_json(const AnnotatedDataset& ds) {
  Json root = ds.extras;

  Json images = Json::array();
  for (const auto& im : ds.images) {
    Json j = im.extras;
    j["id"] = im.id;
    j["width"] = im.width;
    j["height"] = im.height;
    j["file_name"] = im.file_name;
    images.push_back(std::move(j));
  }

  Json anns = Json::array();
  for (const auto& a : ds.annotations) {
    Json j = a.extras;
    j["id"] = a.id;
    j["image_id"] = a.image_id;
    j["bbox"] = {a.bbox.x, a.bbox.y, a.bbox.w, a.bbox.h};
    j["area"] = a.area;
    Json kps = Json::array();
    for (const auto& k : a.keypoints) {
      kps.push_back(k.x);
      kps.push_back(k.y);
      kps.push_back(k.v);
    }
    j["keypoints"] = std::move(kps);
    j["num_keypoints"] = a.num_keypoints;
    j["iscrowd"] = a.iscrowd;
    j["category_id"] = a.category_id;
    anns.push_back(std::move(j));
  }

  Json cat = ds.category.extras;
  cat["id"] = ds.category.id;
  cat["name"] = ds.category.name;
  if (!ds.category.supercategory.empty())
    cat["supercategory"] = ds.category.supercategory;
  cat["keypoints"] = ds.category.schema.names;
  Json edges = Json::array();
  for (auto [a, b] : ds.category.schema.skeleton_edges) edges.push_back({a, b});
  cat["skeleton"] = std::move(edges);

  root["images"] = std::move(images);
  root["annotations"] = std::move(anns);
  root["categories"] = Json::array({std::move(cat)});
  return root;
}

// Compact JSON with sorted keys and a trailing newline.
inline std::string serialize_dataset(const AnnotatedDataset& ds) {
  return dataset_to_json(ds).dump() + "\n";
}

inline void write_dataset(const AnnotatedDataset& ds,
                          const std::filesystem::path& path) {
  write_file(path, serialize_dataset(ds));
}

}  // namespace synthlabel
