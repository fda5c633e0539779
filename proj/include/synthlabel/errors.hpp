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

#include <stdexcept>
#include <string>

namespace synthlabel {

// Broad classes of failure. The CLI maps these onto exit codes.
enum class ErrorCategory { usage, data, io };

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& what)
      : std::runtime_error(what), category_(category) {}

  ErrorCategory category() const noexcept { return category_; }

 private:
  ErrorCategory category_;
};

#define SYNTHLABEL_DEFINE_ERROR(Name, Category)                      \
  class Name : public Error {                                        \
   public:                                                           \
    explicit Name(const std::string& what)                           \
        : Error(ErrorCategory::Category, #Name ": " + what) {}       \
  };

// annotation-io
SYNTHLABEL_DEFINE_ERROR(MalformedFile, data)
SYNTHLABEL_DEFINE_ERROR(SchemaViolation, data)
SYNTHLABEL_DEFINE_ERROR(IoFailure, io)

// scene-model
SYNTHLABEL_DEFINE_ERROR(DegenerateUp, data)
SYNTHLABEL_DEFINE_ERROR(UnknownPose, data)
SYNTHLABEL_DEFINE_ERROR(InvalidScene, data)

// randomizer-engine
SYNTHLABEL_DEFINE_ERROR(InvalidConfig, data)
SYNTHLABEL_DEFINE_ERROR(UnknownPreset, usage)

// geo-labeler
SYNTHLABEL_DEFINE_ERROR(IndexOutOfRange, data)

// label-adapt
SYNTHLABEL_DEFINE_ERROR(NoKeypointAnnotations, data)

// dataset-stats
SYNTHLABEL_DEFINE_ERROR(DegenerateTorso, data)

// anneal-sched
SYNTHLABEL_DEFINE_ERROR(OutOfWarmup, data)
SYNTHLABEL_DEFINE_ERROR(OutOfOrderEpoch, data)
SYNTHLABEL_DEFINE_ERROR(InvalidPhase, data)

#undef SYNTHLABEL_DEFINE_ERROR

}  // namespace synthlabel
