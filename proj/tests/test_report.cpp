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

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "sigbench/report.hpp"

namespace sigbench {
namespace {

std::size_t count(const std::string& text, const std::string& needle) {
  std::size_t n = 0;
  for (auto p = text.find(needle); p != std::string::npos; p = text.find(needle, p + 1)) ++n;
  return n;
}

TEST(FormatSummary, MeanAndSem) {
  EXPECT_EQ(format_summary(summarize(std::vector<double>{5, 6, 7}), 2), "6.00 ± 0.58");
  EXPECT_EQ(format_summary(summarize(std::vector<double>{5}), 1), "5.0");
  EXPECT_EQ(format_summary(Summary{}, 1), "n/a");
}

RunRecord coord_record(LanguageKind lang, std::uint64_t seed, std::vector<double> mse) {
  RunRecord r;
  r.config = RunConfig::coordinates();
  r.config.language = lang;
  r.seed = seed;
  for (std::size_t e = 0; e < mse.size(); ++e) {
    EpochMetrics m;
    m.epoch = static_cast<int>(e) + 1;
    m.train_metric = m.train_loss = mse[e];
    m.test_metric = m.test_loss = 2 * mse[e];
    r.epochs.push_back(m);
  }
  return r;
}

TEST(MeanLogCurves, FourCurvesOneRowPerEpoch) {
  const std::vector<RunRecord> rs{
      coord_record(LanguageKind::kCoordinate, 0, {0.1, 0.01, 0.001}),
      coord_record(LanguageKind::kCoordinate, 1, {0.1, 0.01, 0.001}),
      coord_record(LanguageKind::kRotated, 0, {0.2, 0.2, 0.2})};
  const CurveSet set = mean_log_curves(rs);
  ASSERT_EQ(set.curves.size(), 4u);
  EXPECT_EQ(set.epochs.size(), 3u);
  EXPECT_NEAR(set.curves[0].values[1], std::log(0.01), 1e-12);
  EXPECT_NEAR(set.curves[1].values[1], std::log(0.02), 1e-12);
  // Constant MSE gives a flat line.
  EXPECT_EQ(set.curves[2].values[0], set.curves[2].values[2]);
  EXPECT_TRUE(set.warnings.empty());

  std::ostringstream os;
  write_curves(os, set);
  EXPECT_EQ(count(os.str(), "\n"), 4u);  // header + 3 epochs
  EXPECT_EQ(os.str().rfind("epoch\tlang-coordinate train", 0), 0u);

  const std::string svg = render_svg(set);
  EXPECT_EQ(count(svg, "<polyline"), 4u);
  EXPECT_EQ(svg.rfind("<?xml", 0), 0u);
  EXPECT_NE(svg.find("lang-rotated test"), std::string::npos);
}

TEST(MeanLogCurves, NonPositiveMseIsSkippedWithWarning) {
  const std::vector<RunRecord> rs{coord_record(LanguageKind::kCoordinate, 0, {0.1, 0.0}),
                                  coord_record(LanguageKind::kCoordinate, 1, {0.1, 0.4})};
  const CurveSet set = mean_log_curves(rs);
  EXPECT_FALSE(set.warnings.empty());
  EXPECT_NEAR(set.curves[0].values[1], std::log(0.4), 1e-12);
  const CurveSet none = mean_log_curves(
      std::vector<RunRecord>{coord_record(LanguageKind::kCoordinate, 0, {0.0})});
  EXPECT_TRUE(std::isnan(none.curves[0].values[0]));
  EXPECT_NO_THROW(render_svg(none));
}

GroupResult group(CellKind cell, LanguageKind lang, TaskKind task, std::vector<int> acq) {
  std::vector<RunRecord> rs;
  for (std::size_t k = 0; k < acq.size(); ++k) {
    RunRecord r;
    r.config = RunConfig::attval();
    r.config.cell = cell;
    r.config.language = lang;
    r.config.task = task;
    r.seed = k;
    if (acq[k] > 0) r.acquisition_epoch = acq[k];
    EpochMetrics e;
    e.epoch = 1;
    e.test_metric = 0.5;
    r.epochs.push_back(e);
    rs.push_back(r);
  }
  return {rs.front().config, aggregate(rs)};
}

TEST(SummaryText, TableShape) {
  const ExperimentPreset preset = attval_preset();
  std::vector<GroupResult> results;
  for (auto cell : preset.cells) {
    for (auto lang : preset.languages) {
      for (auto task : preset.tasks) results.push_back(group(cell, lang, task, {5, 6, 7}));
    }
  }
  results[0] = group(CellKind::kLstm, LanguageKind::kIdentity, TaskKind::kIdentity,
                     {5, 6, 7, -1});
  std::ostringstream os;
  write_summary_text(os, preset, results);
  const std::string text = os.str();
  EXPECT_NE(text.find("lang-identity"), std::string::npos);
  EXPECT_NE(text.find("task-linear"), std::string::npos);
  EXPECT_NE(text.find("6.0 ± 0.6"), std::string::npos);
  EXPECT_NE(text.find("(1 nr)"), std::string::npos);

  const auto j = summary_json(preset, results);
  EXPECT_EQ(j["groups"].size(), 12u);
  EXPECT_DOUBLE_EQ(j["groups"][1]["acquisition"]["mean"].get<double>(), 6.0);
}

TEST(Json, RunMetadataCarriesConfigAndLinearParams) {
  RunRecord r;
  r.config = RunConfig::attval();
  r.config.task = TaskKind::kLinear;
  r.seed = 4;
  r.linear = LinearTaskParams{{{{2, 3}, {1, 4}}}, {5, 6}};
  r.acquisition_epoch = 12;
  const auto j = run_metadata(r);
  EXPECT_EQ(j["seed"], 4);
  EXPECT_EQ(j["config"]["task"], "linear");
  EXPECT_EQ(j["linear"]["A"][1][1], 4);
  EXPECT_EQ(j["acquisition_epoch"], 12);
}

}  // namespace
}  // namespace sigbench
