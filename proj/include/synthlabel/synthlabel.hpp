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

#include "synthlabel/anneal.hpp"
#include "synthlabel/annotation_io.hpp"
#include "synthlabel/dataset_stats.hpp"
#include "synthlabel/errors.hpp"
#include "synthlabel/geometry.hpp"
#include "synthlabel/hash.hpp"
#include "synthlabel/keypoints.hpp"
#include "synthlabel/label_adapt.hpp"
#include "synthlabel/labeler.hpp"
#include "synthlabel/pipeline.hpp"
#include "synthlabel/pose_library.hpp"
#include "synthlabel/random.hpp"
#include "synthlabel/randomizer.hpp"
#include "synthlabel/scene.hpp"
