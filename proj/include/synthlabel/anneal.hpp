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

// Validation-driven learning-rate annealing as a pure state machine.
//
// After a linear warm-up the schedule watches a validation metric. When
// the metric has not exceeded the plateau reference by more than epsilon
// for `patience` epochs, the learning rate drops by `reduction_factor`,
// epsilon and the next patience window are halved and the caller is told
// to restore the best checkpoint seen so far. The stagnation that follows
// the last allowed reduction ends training.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "synthlabel/errors.hpp"

namespace synthlabel {

struct AnnealingConfig {
  double initial_lr = 0.02;
  std::int64_t initial_patience = 38;  // epochs
  double initial_epsilon = 5.0;        // metric points (AP on a 0-100 scale)
  std::int64_t warmup_iterations = 1000;
  int max_reductions = 3;
  double reduction_factor = 10.0;
  std::int64_t eval_period_epochs = 2;

  void validate() const {
    if (!(initial_lr > 0.0) || initial_patience <= 0 || !(initial_epsilon > 0.0) ||
        warmup_iterations <= 0 || max_reductions < 1 || !(reduction_factor > 0.0) ||
        eval_period_epochs <= 0)
      throw InvalidConfig("annealing parameters must be positive");
  }
};

enum class AnnealPhase { warmup, training, finished };

struct AnnealingState {
  double lr = 0.0;
  double epsilon = 0.0;
  std::int64_t patience = 0;
  int reductions_done = 0;
  // Highest metric seen and its checkpoint (earliest on ties).
  double best_metric = -std::numeric_limits<double>::infinity();
  std::string best_tag;
  std::int64_t best_epoch = -1;
  // Level a metric must beat by more than epsilon to count as improvement.
  double reference_metric = -std::numeric_limits<double>::infinity();
  std::int64_t epochs_since_improvement = 0;
  std::optional<std::int64_t> last_epoch;
  AnnealPhase phase = AnnealPhase::warmup;

  bool operator==(const AnnealingState&) const = default;
};

inline AnnealingState initial_state(const AnnealingConfig& cfg) {
  cfg.validate();
  AnnealingState s;
  s.epsilon = cfg.initial_epsilon;
  s.patience = cfg.initial_patience;
  return s;
}

// State at the end of warm-up, ready for the first evaluation.
inline AnnealingState training_state(const AnnealingConfig& cfg) {
  auto s = initial_state(cfg);
  s.lr = cfg.initial_lr;
  s.phase = AnnealPhase::training;
  return s;
}

inline double warmup_lr(const AnnealingConfig& cfg, std::int64_t iteration) {
  if (iteration < 0 || iteration > cfg.warmup_iterations)
    throw OutOfWarmup("iteration " + std::to_string(iteration));
  return cfg.initial_lr * static_cast<double>(iteration) /
         static_cast<double>(cfg.warmup_iterations);
}

// Advances warm-up to `iteration`; the last warm-up iteration switches the
// state to training.
inline AnnealingState warmup_step(AnnealingState s, const AnnealingConfig& cfg,
                                  std::int64_t iteration) {
  if (s.phase != AnnealPhase::warmup) throw InvalidPhase("not in warm-up");
  s.lr = warmup_lr(cfg, iteration);
  if (iteration == cfg.warmup_iterations) s.phase = AnnealPhase::training;
  return s;
}

enum class DecisionKind { cont, reduce_and_restore, stop };

inline std::string_view to_string(DecisionKind k) {
  switch (k) {
    case DecisionKind::cont: return "continue";
    case DecisionKind::reduce_and_restore: return "reduce_and_restore";
    case DecisionKind::stop: return "stop";
  }
  return "continue";
}

struct Decision {
  DecisionKind kind = DecisionKind::cont;
  std::string restore_tag;  // checkpoint to restore; empty for cont
  bool operator==(const Decision&) const = default;
};

inline std::pair<AnnealingState, Decision> observe(AnnealingState s,
                                                   const AnnealingConfig& cfg,
                                                   std::int64_t epoch, double metric,
                                                   const std::string& tag) {
  if (s.phase != AnnealPhase::training)
    throw InvalidPhase(s.phase == AnnealPhase::warmup ? "still in warm-up"
                                                      : "schedule finished");
  if (s.last_epoch && epoch <= *s.last_epoch)
    throw OutOfOrderEpoch("epoch " + std::to_string(epoch) + " after " +
                          std::to_string(*s.last_epoch));
  const std::int64_t elapsed = s.last_epoch ? epoch - *s.last_epoch : 0;
  s.last_epoch = epoch;

  if (metric > s.best_metric) {
    s.best_metric = metric;
    s.best_tag = tag;
    s.best_epoch = epoch;
  }
  if (metric > s.reference_metric + s.epsilon) {
    s.reference_metric = metric;
    s.epochs_since_improvement = 0;
  } else {
    s.epochs_since_improvement += elapsed;
  }

  if (s.epochs_since_improvement < s.patience) return {s, {DecisionKind::cont, {}}};

  if (s.reductions_done >= cfg.max_reductions) {
    s.phase = AnnealPhase::finished;
    return {s, {DecisionKind::stop, s.best_tag}};
  }
  ++s.reductions_done;
  s.lr = cfg.initial_lr / std::pow(cfg.reduction_factor, s.reductions_done);
  s.epsilon /= 2.0;
  s.patience = std::max<std::int64_t>(1, s.patience / 2);
  s.epochs_since_improvement = 0;
  return {s, {DecisionKind::reduce_and_restore, s.best_tag}};
}

struct TraceRow {
  std::int64_t epoch = 0;
  double metric = 0.0;
  std::string tag;
  bool operator==(const TraceRow&) const = default;
};

struct LogEntry {
  std::int64_t epoch = 0;
  double metric = 0.0;
  std::string tag;
  Decision decision;
  // Schedule after the observation.
  double lr = 0.0;
  double epsilon = 0.0;
  std::int64_t patience = 0;
  int reductions_done = 0;
  bool operator==(const LogEntry&) const = default;
};

// Folds observe() over the trace from the end of warm-up. Rows after a
// stop decision are not consumed.
inline std::vector<LogEntry> simulate(const AnnealingConfig& cfg,
                                      const std::vector<TraceRow>& trace) {
  std::vector<LogEntry> log;
  auto state = training_state(cfg);
  for (const auto& row : trace) {
    auto [next, decision] = observe(std::move(state), cfg, row.epoch, row.metric, row.tag);
    state = std::move(next);
    log.push_back({row.epoch, row.metric, row.tag, decision, state.lr, state.epsilon,
                   state.patience, state.reductions_done});
    if (decision.kind == DecisionKind::stop) break;
  }
  return log;
}

// CSV with columns epoch,metric,tag; a header line is optional.
inline std::vector<TraceRow> parse_trace_csv(std::string_view text) {
  std::vector<TraceRow> rows;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line_no == 1 && line.rfind("epoch", 0) == 0) continue;
    const auto c1 = line.find(',');
    const auto c2 = c1 == std::string::npos ? c1 : line.find(',', c1 + 1);
    if (c2 == std::string::npos)
      throw MalformedFile("trace line " + std::to_string(line_no) +
                          ": expected epoch,metric,tag");
    TraceRow row;
    const char* b = line.data();
    auto e1 = std::from_chars(b, b + c1, row.epoch);
    auto e2 = std::from_chars(b + c1 + 1, b + c2, row.metric);
    if (e1.ec != std::errc{} || e1.ptr != b + c1 || e2.ec != std::errc{} ||
        e2.ptr != b + c2 || !std::isfinite(row.metric))
      throw MalformedFile("trace line " + std::to_string(line_no) +
                          ": bad epoch or metric");
    row.tag = line.substr(c2 + 1);
    rows.push_back(std::move(row));
  }
  return rows;
}

inline nlohmann::json to_json(const LogEntry& e) {
  nlohmann::json j = {{"epoch", e.epoch},
                      {"metric", e.metric},
                      {"tag", e.tag},
                      {"decision", to_string(e.decision.kind)},
                      {"lr", e.lr},
                      {"epsilon", e.epsilon},
                      {"patience", e.patience},
                      {"reductions_done", e.reductions_done}};
  if (e.decision.kind != DecisionKind::cont) j["restore_tag"] = e.decision.restore_tag;
  return j;
}

inline std::string log_to_jsonl(const std::vector<LogEntry>& log) {
  std::string out;
  for (const auto& e : log) out += to_json(e).dump() + "\n";
  return out;
}

}  // namespace synthlabel
