// Copyright 2026 The sigbench Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <vector>

#include <gtest/gtest.h>

#include "sigbench/harness.hpp"
#include "sigbench/presets.hpp"

namespace sigbench {
namespace {

TEST(AcquisitionEpochs, FirstEpochAtThreshold) {
  const std::vector<double> s{0.5, 0.9, 1.0, 1.0};
  EXPECT_EQ(acquisition_epochs(s, 1.0), 3);
  EXPECT_EQ(acquisition_epochs(s, 0.0), 1);
  EXPECT_EQ(acquisition_epochs(std::vector<double>{0.2, 0.99}, 1.0), std::nullopt);
  EXPECT_EQ(acquisition_epochs(std::vector<double>{}, 1.0), std::nullopt);
}

TEST(Summarize, MeanAndStandardError) {
  const Summary s = summarize(std::vector<double>{5, 6, 7});
  EXPECT_DOUBLE_EQ(s.mean, 6.0);
  ASSERT_TRUE(s.sem.has_value());
  EXPECT_NEAR(*s.sem, 1.0 / std::sqrt(3.0), 1e-15);

  const Summary flat = summarize(std::vector<double>{4, 4, 4, 4});
  EXPECT_DOUBLE_EQ(*flat.sem, 0.0);

  const Summary one = summarize(std::vector<double>{9});
  EXPECT_DOUBLE_EQ(one.mean, 9.0);
  EXPECT_FALSE(one.sem.has_value());
}

RunRecord fake(std::optional<int> acq, double test, bool failed = false) {
  RunRecord r;
  r.config = RunConfig::attval();
  r.acquisition_epoch = acq;
  r.failed = failed;
  EpochMetrics e;
  e.epoch = 1;
  e.test_metric = test;
  r.epochs.push_back(e);
  return r;
}

TEST(Aggregate, NotReachedAndFailedRunsAreSeparated) {
  const std::vector<RunRecord> rs{fake(5, 0.9), fake(7, 0.8), fake(std::nullopt, 0.1),
                                  fake(3, 0.0, /*failed=*/true)};
  const Aggregate a = aggregate(rs);
  EXPECT_EQ(a.runs, 4u);
  EXPECT_EQ(a.failed, 1u);
  EXPECT_EQ(a.not_reached, 1u);
  EXPECT_DOUBLE_EQ(a.acquisition.mean, 6.0);
  EXPECT_EQ(a.acquisition.count, 2u);
  EXPECT_NEAR(a.final_test_metric.mean, 0.6, 1e-15);
  EXPECT_EQ(a.label, "attval-identity-identity-lstm");
}

TEST(RunConfig, Defaults) {
  const RunConfig a = RunConfig::attval();
  EXPECT_EQ(a.epochs, 500);
  EXPECT_EQ(a.batch_size, 32);
  EXPECT_DOUBLE_EQ(a.lr, 1e-2);
  EXPECT_EQ(a.head(), HeadKind::kClassify);
  const RunConfig c = RunConfig::coordinates();
  EXPECT_EQ(c.epochs, 250);
  EXPECT_DOUBLE_EQ(c.lr, 1e-3);
  EXPECT_EQ(c.n_values, 100);
  EXPECT_EQ(c.head(), HeadKind::kRegress);
}

TEST(RunConfig, Validation) {
  RunConfig c = RunConfig::attval();
  c.language = LanguageKind::kRotated;
  EXPECT_THROW(c.validate(), ConfigError);
  c = RunConfig::attval();
  c.task = TaskKind::kCoordinates;
  EXPECT_THROW(c.validate(), ConfigError);
  c = RunConfig::coordinates();
  c.language = LanguageKind::kIdentity;
  EXPECT_THROW(c.validate(), ConfigError);
  c = RunConfig::attval();
  c.task = TaskKind::kLinear;
  c.pinned_linear = LinearTaskParams{{{{1, 0}, {0, 1}}}, {0, 0}};
  EXPECT_THROW(c.validate(), ConfigError);
  c = RunConfig::attval();
  c.batch_size = 0;
  EXPECT_THROW(c.validate(), ConfigError);
}

RunConfig tiny_attval() {
  RunConfig c = RunConfig::attval();
  c.n_values = 5;
  c.embed_dim = 6;
  c.hidden_dim = 8;
  c.epochs = 4;
  c.batch_size = 4;
  return c;
}

TEST(TrainRun, SameSeedSameRecord) {
  for (CellKind cell : {CellKind::kLstm, CellKind::kGru}) {
    RunConfig c = tiny_attval();
    c.cell = cell;
    c.task = TaskKind::kLinear;
    const auto a = train_run(c, 3);
    const auto b = train_run(c, 3);
    ASSERT_EQ(a.epochs.size(), 4u);
    ASSERT_EQ(a.epochs.size(), b.epochs.size());
    for (std::size_t k = 0; k < a.epochs.size(); ++k) {
      EXPECT_EQ(a.epochs[k].train_loss, b.epochs[k].train_loss);
      EXPECT_EQ(a.epochs[k].test_loss, b.epochs[k].test_loss);
      EXPECT_EQ(a.epochs[k].test_metric, b.epochs[k].test_metric);
    }
    EXPECT_EQ(a.linear, b.linear);
    ASSERT_TRUE(a.linear.has_value());
    EXPECT_TRUE(a.linear->acceptable(5));
  }
}

TEST(TrainRun, DifferentSeedsDiffer) {
  const auto a = train_run(tiny_attval(), 1);
  const auto b = train_run(tiny_attval(), 2);
  EXPECT_NE(a.epochs.back().train_loss, b.epochs.back().train_loss);
}

TEST(TrainRun, PinnedLinearParamsAreUsed) {
  RunConfig c = tiny_attval();
  c.task = TaskKind::kLinear;
  c.pinned_linear = LinearTaskParams{{{{2, 3}, {1, 3}}}, {0, 1}};
  const auto r = train_run(c, 9);
  EXPECT_EQ(r.linear, c.pinned_linear);
}

TEST(TrainRun, MetricsAreInRange) {
  const auto r = train_run(tiny_attval(), 4);
  for (const auto& e : r.epochs) {
    EXPECT_GE(e.train_metric, 0.0);
    EXPECT_LE(e.train_metric, 1.0);
    EXPECT_GE(e.test_metric, 0.0);
    EXPECT_LE(e.test_metric, 1.0);
    EXPECT_GE(e.train_loss, 0.0);
  }
  EXPECT_EQ(r.acquisition_epoch, acquisition_epochs(r, 1.0));
}

TEST(TrainRun, SplitIsHeldOutAndSeedSpecific) {
  const RunConfig c = RunConfig::attval();
  std::optional<LinearTaskParams> lin;
  const auto d1 = detail::attval_data(c, 1, lin);
  const auto d1b = detail::attval_data(c, 1, lin);
  const auto d2 = detail::attval_data(c, 2, lin);
  EXPECT_EQ(d1.train.messages.size(), 769u);
  EXPECT_EQ(d1.test.messages.size(), 192u);
  EXPECT_EQ(d1.test.messages, d1b.test.messages);
  EXPECT_NE(d1.test.messages, d2.test.messages);
  std::set<Message> train(d1.train.messages.begin(), d1.train.messages.end());
  for (const auto& m : d1.test.messages) EXPECT_EQ(train.count(m), 0u);
}

TEST(TrainRun, CoordinatesDataSharedAcrossSeeds) {
  RunConfig c = RunConfig::coordinates();
  c.n_train = 50;
  c.n_test = 20;
  c.epochs = 2;
  c.hidden_dim = 8;
  c.embed_dim = 4;
  const auto d = detail::coordinates_data(c);
  EXPECT_EQ(d.train.messages.size(), 50u);
  EXPECT_EQ(d.test.messages.size(), 20u);
  const auto r = train_run(c, 0);
  ASSERT_EQ(r.epochs.size(), 2u);
  EXPECT_GT(r.epochs[0].test_metric, 0.0);
  EXPECT_EQ(r.epochs[0].test_metric, r.epochs[0].test_loss);
  EXPECT_FALSE(r.acquisition_epoch.has_value());
}

// Train loss falls over the first ten epochs for matched pairs (median over
// seeds).
TEST(TrainRun, MatchedPairLossFallsEarly) {
  for (auto [lang, task] : {std::pair{LanguageKind::kIdentity, TaskKind::kIdentity},
                            std::pair{LanguageKind::kEntangled, TaskKind::kEntangled}}) {
    RunConfig c = RunConfig::attval();
    c.language = lang;
    c.task = task;
    c.epochs = 10;
    std::vector<double> first;
    std::vector<double> last;
    for (std::uint64_t s = 0; s < 3; ++s) {
      const auto r = train_run(c, s);
      first.push_back(r.epochs.front().train_loss);
      last.push_back(r.epochs.back().train_loss);
    }
    std::sort(first.begin(), first.end());
    std::sort(last.begin(), last.end());
    EXPECT_LT(last[1], first[1]);
  }
}

TEST(RunJobs, ParallelMatchesSerialInJobOrder) {
  std::vector<Job> jobs;
  for (std::uint64_t s = 0; s < 4; ++s) jobs.push_back({tiny_attval(), s});
  const auto serial = run_jobs(jobs, 1);
  std::vector<std::size_t> seen;
  const auto parallel = run_jobs(jobs, 3, [&](std::size_t k, const RunRecord&) {
    seen.push_back(k);
  });
  ASSERT_EQ(parallel.size(), 4u);
  EXPECT_EQ(seen.size(), 4u);
  for (std::size_t k = 0; k < 4; ++k) {
    EXPECT_EQ(parallel[k].seed, k);
    EXPECT_EQ(parallel[k].epochs.back().train_loss, serial[k].epochs.back().train_loss);
  }
}

TEST(WriteRunCsv, HeaderAndRows) {
  RunRecord r = fake(1, 0.5);
  r.epochs[0].train_loss = 0.25;
  std::ostringstream os;
  write_run_csv(os, r);
  EXPECT_EQ(os.str(), "epoch,train_loss,train_metric,test_loss,test_metric\n"
                      "1,0.25,0,0,0.5\n");
}

// ------------------------------------------------------------------ presets

std::size_t run_count(const std::vector<ConfigGroup>& groups) {
  return jobs_of(groups).size();
}

TEST(Presets, GridCardinalities) {
  EXPECT_EQ(run_count(expand(attval_preset(), {})), 240u);
  EXPECT_EQ(run_count(expand(coordinates_preset(), {})), 20u);
  Overrides five;
  five.seeds = 5;
  const auto g = expand(attval_preset(), five);
  EXPECT_EQ(g.size(), 12u);
  EXPECT_EQ(run_count(g), 60u);
  Overrides gru_linear;
  gru_linear.cell = CellKind::kGru;
  gru_linear.task = TaskKind::kLinear;
  EXPECT_EQ(run_count(expand(attval_preset(), gru_linear)), 40u);
}

TEST(Presets, OverridesApplyToEveryGroup) {
  Overrides o;
  o.epochs = 7;
  o.lr = 0.5;
  o.end_marker = false;
  o.embedding_init = EmbeddingInit::kUniform;
  for (const auto& g : expand(attval_preset(), o)) {
    EXPECT_EQ(g.config.epochs, 7);
    EXPECT_DOUBLE_EQ(g.config.lr, 0.5);
    EXPECT_FALSE(g.config.receiver().end_marker);
    EXPECT_EQ(g.config.receiver().embedding_init, EmbeddingInit::kUniform);
  }
}

TEST(Presets, FiltersOutsideThePresetAreUsageErrors) {
  Overrides o;
  o.task = TaskKind::kIdentity;
  EXPECT_THROW(expand(coordinates_preset(), o), UsageError);
  EXPECT_THROW(find_preset("nope"), UsageError);
}

TEST(Presets, ParseLinearParams) {
  const auto p = parse_linear_params("2,3,1,4,5,6");
  EXPECT_EQ(p, (LinearTaskParams{{{{2, 3}, {1, 4}}}, {5, 6}}));
  EXPECT_THROW(parse_linear_params("1,2,3"), UsageError);
  EXPECT_THROW(parse_linear_params("1,2,3,4,5,x"), UsageError);
}

}  // namespace
}  // namespace sigbench
