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

#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "sigbench/errors.hpp"
#include "sigbench/harness.hpp"

namespace sigbench {

// A named grid of run configurations: languages x tasks x cells, each run
// with every seed.
struct ExperimentPreset {
  std::string name;
  RunConfig base;
  std::vector<LanguageKind> languages;
  std::vector<TaskKind> tasks;
  std::vector<CellKind> cells;
  int seeds = 1;
};

inline ExperimentPreset attval_preset() {
  return {"attval",
          RunConfig::attval(),
          {LanguageKind::kIdentity, LanguageKind::kEntangled},
          {TaskKind::kIdentity, TaskKind::kLinear, TaskKind::kEntangled},
          {CellKind::kLstm, CellKind::kGru},
          20};
}

inline ExperimentPreset coordinates_preset() {
  return {"coordinates",
          RunConfig::coordinates(),
          {LanguageKind::kCoordinate, LanguageKind::kRotated},
          {TaskKind::kCoordinates},
          {CellKind::kLstm},
          10};
}

inline ExperimentPreset find_preset(std::string_view name) {
  if (name == "attval") return attval_preset();
  if (name == "coordinates") return coordinates_preset();
  throw UsageError("unknown preset '" + std::string(name) +
                   "' (expected attval or coordinates)");
}

// Parses "a11,a12,a21,a22,b1,b2".
inline LinearTaskParams parse_linear_params(std::string_view text) {
  std::vector<int> v;
  std::stringstream ss{std::string(text)};
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      v.push_back(std::stoi(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw UsageError("--pin-linear-params: '" + item + "' is not an integer");
    }
  }
  if (v.size() != 6) {
    throw UsageError("--pin-linear-params expects six comma-separated "
                     "integers a11,a12,a21,a22,b1,b2");
  }
  LinearTaskParams p;
  p.a = {{{v[0], v[1]}, {v[2], v[3]}}};
  p.b = {v[4], v[5]};
  return p;
}

// Command-line overrides; unset fields keep the preset's value. Language,
// task and cell act as filters on the grid.
struct Overrides {
  std::optional<LanguageKind> language;
  std::optional<TaskKind> task;
  std::optional<CellKind> cell;
  std::optional<int> n_values;
  std::optional<int> seeds;
  std::optional<int> epochs;
  std::optional<double> lr;
  std::optional<int> batch_size;
  std::optional<int> hidden;
  std::optional<int> embedding;
  std::optional<bool> end_marker;
  std::optional<EmbeddingInit> embedding_init;
  std::optional<double> test_fraction;
  std::optional<LinearTaskParams> pinned_linear;
};

// One configuration of the grid and the seeds it runs with.
struct ConfigGroup {
  RunConfig config;
  std::vector<std::uint64_t> seeds;
};

namespace detail {
template <typename Kind>
std::vector<Kind> filter(const std::vector<Kind>& all,
                         const std::optional<Kind>& only, const char* what) {
  if (!only) return all;
  if (std::find(all.begin(), all.end(), *only) == all.end()) {
    throw UsageError(std::string(what) + " '" + std::string(to_string(*only)) +
                     "' is not part of this preset");
  }
  return {*only};
}
}  // namespace detail

// Groups in grid order: cell, then language, then task.
inline std::vector<ConfigGroup> expand(const ExperimentPreset& preset,
                                       const Overrides& o = {}) {
  RunConfig base = preset.base;
  if (o.n_values) base.n_values = *o.n_values;
  if (o.epochs) base.epochs = *o.epochs;
  if (o.lr) base.lr = *o.lr;
  if (o.batch_size) base.batch_size = *o.batch_size;
  if (o.hidden) base.hidden_dim = *o.hidden;
  if (o.end_marker) base.end_marker = *o.end_marker;
  if (o.embedding_init) base.embedding_init = *o.embedding_init;
  if (o.embedding) base.embed_dim = *o.embedding;
  if (o.test_fraction) base.test_fraction = *o.test_fraction;
  if (o.pinned_linear) base.pinned_linear = o.pinned_linear;
  const int seeds = o.seeds.value_or(preset.seeds);
  if (seeds < 1) throw UsageError("--seeds must be at least 1");

  std::vector<std::uint64_t> seed_list(static_cast<std::size_t>(seeds));
  for (int s = 0; s < seeds; ++s) seed_list[static_cast<std::size_t>(s)] = s;

  std::vector<ConfigGroup> groups;
  for (CellKind cell : detail::filter(preset.cells, o.cell, "cell")) {
    for (LanguageKind lang :
         detail::filter(preset.languages, o.language, "language")) {
      for (TaskKind task : detail::filter(preset.tasks, o.task, "task")) {
        RunConfig c = base;
        c.cell = cell;
        c.language = lang;
        c.task = task;
        c.validate();
        groups.push_back({c, seed_list});
      }
    }
  }
  return groups;
}

inline std::vector<Job> jobs_of(const std::vector<ConfigGroup>& groups) {
  std::vector<Job> jobs;
  for (const auto& g : groups) {
    for (std::uint64_t s : g.seeds) jobs.push_back({g.config, s});
  }
  return jobs;
}

}  // namespace sigbench
