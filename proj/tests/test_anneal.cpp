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

#include <random>

#include "oracles.hpp"
#include "support.hpp"

using namespace synthlabel;

namespace {

std::vector<TraceRow> flat_trace(int evals, double metric = 40.0) {
  std::vector<TraceRow> t;
  for (int i = 1; i <= evals; ++i) t.push_back({2 * i, metric, "ckpt_" + std::to_string(2 * i)});
  return t;
}

std::vector<TraceRow> noisy_trace(std::mt19937_64& rng, int evals) {
  std::normal_distribution<double> noise(0.0, 2.0);
  std::vector<TraceRow> t;
  double level = 10.0;
  for (int i = 1; i <= evals; ++i) {
    level += std::max(0.0, 3.0 - 0.05 * i) + noise(rng) * 0.2;
    // Coarse rounding produces ties.
    const double m = std::round((level + noise(rng)) * 2.0) / 2.0;
    t.push_back({2 * i, m, "e" + std::to_string(2 * i)});
  }
  return t;
}

void expect_matches_replay(const AnnealingConfig& cfg, const std::vector<TraceRow>& trace) {
  const auto log = simulate(cfg, trace);
  const auto want = oracle::replay(cfg, trace);
  ASSERT_EQ(log.size(), want.size());
  for (std::size_t i = 0; i < log.size(); ++i) {
    SCOPED_TRACE(i);
    EXPECT_EQ(to_string(log[i].decision.kind), want[i].decision);
    EXPECT_EQ(log[i].decision.restore_tag, want[i].tag);
    EXPECT_EQ(log[i].lr, want[i].lr);
    EXPECT_EQ(log[i].epsilon, want[i].epsilon);
    EXPECT_EQ(log[i].patience, want[i].patience);
    EXPECT_EQ(log[i].reductions_done, want[i].reductions);
  }
}

}  // namespace

TEST(Anneal, FirstObservationSetsBest) {
  const AnnealingConfig cfg;
  auto [s, d] = observe(training_state(cfg), cfg, 2, 31.5, "a");
  EXPECT_EQ(d.kind, DecisionKind::cont);
  EXPECT_EQ(s.best_metric, 31.5);
  EXPECT_EQ(s.best_tag, "a");
}

TEST(Anneal, FlatTraceReducesThreeTimesThenStops) {
  const AnnealingConfig cfg;
  const auto log = simulate(cfg, flat_trace(200));
  std::vector<double> lrs{cfg.initial_lr}, eps, pats;
  std::vector<std::int64_t> epochs;
  double eps_now = cfg.initial_epsilon;
  double pat_now = double(cfg.initial_patience);
  for (const auto& e : log)
    if (e.decision.kind != DecisionKind::cont) {
      epochs.push_back(e.epoch);
      if (e.decision.kind == DecisionKind::reduce_and_restore) {
        eps.push_back(eps_now);
        pats.push_back(pat_now);
        lrs.push_back(e.lr);
      }
      eps_now = e.epsilon;
      pat_now = double(e.patience);
      EXPECT_EQ(e.decision.restore_tag, "ckpt_2");
    }
  EXPECT_EQ(epochs, (std::vector<std::int64_t>{40, 60, 70, 74}));
  EXPECT_EQ(lrs, (std::vector<double>{2e-2, 2e-3, 2e-4, 2e-5}));
  EXPECT_EQ(eps, (std::vector<double>{5, 2.5, 1.25}));
  EXPECT_EQ(pats, (std::vector<double>{38, 19, 9}));
  EXPECT_EQ(log.back().decision.kind, DecisionKind::stop);
  EXPECT_EQ(log.back().lr, 2e-5);
  EXPECT_EQ(log.size(), 37u);
  expect_matches_replay(cfg, flat_trace(200));
}

TEST(Anneal, LrAfterNReductionsIsExact) {
  AnnealingConfig cfg;
  cfg.max_reductions = 6;
  const auto log = simulate(cfg, flat_trace(400));
  for (const auto& e : log)
    EXPECT_EQ(e.lr, cfg.initial_lr / std::pow(10.0, e.reductions_done));
}

TEST(Anneal, CraftedImprovementMatchesReplay) {
  const AnnealingConfig cfg;
  auto t = flat_trace(150);
  for (auto& r : t)
    if (r.epoch >= 10) r.metric = 46.0;
  const auto log = simulate(cfg, t);
  int reductions = 0;
  for (const auto& e : log) {
    if (e.decision.kind == DecisionKind::reduce_and_restore) ++reductions;
    if (e.decision.kind != DecisionKind::cont) EXPECT_EQ(e.decision.restore_tag, "ckpt_10");
  }
  EXPECT_EQ(reductions, 3);
  // Patience restarts at the improvement: first reduction at 10 + 38.
  const auto first = std::find_if(log.begin(), log.end(), [](const auto& e) {
    return e.decision.kind != DecisionKind::cont;
  });
  EXPECT_EQ(first->epoch, 48);
  expect_matches_replay(cfg, t);
}

TEST(Anneal, EmptyTraceEmptyLog) { EXPECT_TRUE(simulate(AnnealingConfig{}, {}).empty()); }

TEST(Anneal, MonotoneTraceNeverStagnates) {
  const AnnealingConfig cfg;
  std::vector<TraceRow> t;
  for (int i = 1; i <= 300; ++i) t.push_back({2 * i, 10.0 * i, "m"});
  const auto log = simulate(cfg, t);
  EXPECT_EQ(log.size(), t.size());
  for (const auto& e : log) EXPECT_EQ(e.decision.kind, DecisionKind::cont);
  expect_matches_replay(cfg, t);
}

TEST(Anneal, RandomTracesMatchReplayAndArgmax) {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 200; ++trial) {
    AnnealingConfig cfg;
    cfg.initial_patience = 4 + std::int64_t(rng() % 40);
    cfg.initial_epsilon = 0.5 + double(rng() % 8);
    cfg.max_reductions = 1 + int(rng() % 4);
    const auto t = noisy_trace(rng, 400);
    expect_matches_replay(cfg, t);
    const auto log = simulate(cfg, t);
    int reductions = 0;
    for (std::size_t i = 0; i < log.size(); ++i) {
      if (log[i].decision.kind == DecisionKind::cont) continue;
      std::size_t best = 0;
      for (std::size_t k = 1; k <= i; ++k)
        if (t[k].metric > t[best].metric) best = k;
      EXPECT_EQ(log[i].decision.restore_tag, t[best].tag);
      reductions += log[i].decision.kind == DecisionKind::reduce_and_restore;
    }
    if (log.back().decision.kind == DecisionKind::stop) EXPECT_EQ(reductions, cfg.max_reductions);
    EXPECT_LE(reductions, cfg.max_reductions);
  }
}

TEST(Anneal, ReplaysAreIdentical) {
  std::mt19937_64 rng(5);
  const auto t = noisy_trace(rng, 300);
  EXPECT_EQ(simulate(AnnealingConfig{}, t), simulate(AnnealingConfig{}, t));
}

TEST(Anneal, SubThresholdPermutationsKeepDecisions) {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const AnnealingConfig cfg;
  for (int trial = 0; trial < 100; ++trial) {
    // Improvement at epoch 2, then values strictly below best + epsilon.
    std::vector<TraceRow> t{{2, 50.0, "start"}};
    for (int i = 2; i <= 60; ++i) t.push_back({2 * i, 50.0 + cfg.initial_epsilon * (u(rng) * 1.2 - 1.0), "x"});
    auto p = t;
    std::shuffle(p.begin() + 1, p.begin() + 19, rng);
    for (std::size_t i = 0; i < t.size(); ++i) p[i].epoch = t[i].epoch;
    const auto a = simulate(cfg, t);
    const auto b = simulate(cfg, p);
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      EXPECT_EQ(a[i].decision.kind, b[i].decision.kind);
      EXPECT_EQ(a[i].lr, b[i].lr);
    }
  }
}

TEST(Anneal, ErrorsAndPhases) {
  const AnnealingConfig cfg;
  auto s = training_state(cfg);
  s = observe(s, cfg, 10, 1.0, "a").first;
  EXPECT_THROW(observe(s, cfg, 10, 1.0, "b"), OutOfOrderEpoch);
  EXPECT_THROW(observe(s, cfg, 8, 1.0, "b"), OutOfOrderEpoch);
  EXPECT_THROW(observe(initial_state(cfg), cfg, 2, 1.0, "a"), InvalidPhase);
  std::vector<TraceRow> t = flat_trace(100);
  auto st = training_state(cfg);
  for (const auto& r : t) {
    auto [n, d] = observe(st, cfg, r.epoch, r.metric, r.tag);
    st = n;
    if (d.kind == DecisionKind::stop) break;
  }
  EXPECT_EQ(st.phase, AnnealPhase::finished);
  EXPECT_THROW(observe(st, cfg, 1000, 1.0, "z"), InvalidPhase);
  EXPECT_THROW(simulate(cfg, {{4, 1, "a"}, {2, 1, "b"}}), OutOfOrderEpoch);
}

TEST(Anneal, WarmupIsLinear) {
  const AnnealingConfig cfg;
  EXPECT_EQ(warmup_lr(cfg, 0), 0.0);
  EXPECT_DOUBLE_EQ(warmup_lr(cfg, 500), 0.01);
  EXPECT_EQ(warmup_lr(cfg, 1000), 0.02);
  EXPECT_THROW(warmup_lr(cfg, 1001), OutOfWarmup);
  EXPECT_THROW(warmup_lr(cfg, -1), OutOfWarmup);
  auto s = initial_state(cfg);
  s = warmup_step(s, cfg, 999);
  EXPECT_EQ(s.phase, AnnealPhase::warmup);
  s = warmup_step(s, cfg, 1000);
  EXPECT_EQ(s.phase, AnnealPhase::training);
  EXPECT_EQ(s.lr, cfg.initial_lr);
  EXPECT_THROW(warmup_step(s, cfg, 1000), InvalidPhase);
}

TEST(Anneal, TraceCsv) {
  const auto rows = parse_trace_csv("epoch,metric,tag\n2,40.5,a\r\n4,41,b,c\n\n");
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[1].tag, "b,c");
  EXPECT_EQ(rows[0].metric, 40.5);
  EXPECT_EQ(parse_trace_csv("2,1,x\n").size(), 1u);
  EXPECT_THROW(parse_trace_csv("2,1,x\n4;2;y\n"), MalformedFile);
  EXPECT_THROW(parse_trace_csv("2,abc,x\n"), MalformedFile);
  EXPECT_THROW(parse_trace_csv("2.5,1,x\n"), MalformedFile);
}

TEST(Anneal, JsonLinesLog) {
  const auto log = simulate(AnnealingConfig{}, flat_trace(200));
  const auto text = log_to_jsonl(log);
  std::istringstream in(text);
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    const auto j = Json::parse(line);
    EXPECT_EQ(j.contains("restore_tag"), j["decision"] != "continue");
    ++n;
  }
  EXPECT_EQ(n, log.size());
}
