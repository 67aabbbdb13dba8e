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

// sigbench: run signaling-game receiver experiments and analyse the
// hard-coded languages.
//
//   sigbench run attval --seeds 5 --out results/attval
//   sigbench run coordinates
//   sigbench analyze entangled --n-values 31
//   sigbench dump attval --n-values 31 --seed 0

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sigbench/errors.hpp"
#include "sigbench/harness.hpp"
#include "sigbench/languages.hpp"
#include "sigbench/presets.hpp"
#include "sigbench/report.hpp"
#include "sigbench/worlds.hpp"

namespace fs = std::filesystem;
using namespace sigbench;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitRunFailure = 2;

struct RunArgs {
  std::string preset;
  std::string experiment;
  std::string language;
  std::string task;
  std::string cell;
  std::optional<int> n_values;
  std::optional<int> seeds;
  std::optional<int> epochs;
  std::optional<double> lr;
  std::optional<int> batch_size;
  std::optional<int> hidden;
  std::optional<int> embedding;
  bool no_end_marker = false;
  std::string embedding_init;
  std::optional<double> test_fraction;
  std::string pin_linear;
  std::string out;
  unsigned workers = default_workers();
  bool quiet = false;
};

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << text;
}

int run_command(const RunArgs& a) {
  if (!a.preset.empty() && !a.experiment.empty() && a.preset != a.experiment) {
    throw UsageError("preset '" + a.preset + "' conflicts with --experiment '" +
                     a.experiment + "'");
  }
  const std::string name = a.preset.empty() ? a.experiment : a.preset;
  if (name.empty()) throw UsageError("run: name a preset (attval or coordinates)");
  const ExperimentPreset preset = find_preset(name);

  Overrides o;
  try {
    if (!a.language.empty()) o.language = parse_language_kind(a.language);
    if (!a.task.empty()) o.task = parse_task_kind(a.task);
    if (!a.cell.empty()) o.cell = numeric::parse_cell_kind(a.cell);
    if (!a.embedding_init.empty()) {
      o.embedding_init = parse_embedding_init(a.embedding_init);
    }
  } catch (const ConfigError& e) {
    throw UsageError(e.what());
  }
  o.n_values = a.n_values;
  o.seeds = a.seeds;
  o.epochs = a.epochs;
  o.lr = a.lr;
  o.batch_size = a.batch_size;
  o.hidden = a.hidden;
  o.embedding = a.embedding;
  if (a.no_end_marker) o.end_marker = false;
  o.test_fraction = a.test_fraction;
  if (!a.pin_linear.empty()) o.pinned_linear = parse_linear_params(a.pin_linear);

  std::vector<ConfigGroup> groups;
  try {
    groups = expand(preset, o);
  } catch (const ConfigError& e) {
    throw UsageError(e.what());
  }
  const std::vector<Job> jobs = jobs_of(groups);

  const fs::path out = a.out.empty() ? fs::path("results") / preset.name : fs::path(a.out);
  fs::create_directories(out / "runs");

  if (!a.quiet) {
    std::cerr << "running " << jobs.size() << " run(s) in " << groups.size()
              << " configuration(s) on " << a.workers << " worker(s)\n";
  }
  std::size_t finished = 0;
  const auto records = run_jobs(jobs, a.workers, [&](std::size_t, const RunRecord& r) {
    ++finished;
    if (a.quiet) return;
    std::cerr << "[" << finished << "/" << jobs.size() << "] " << r.config.label()
              << " seed " << r.seed;
    if (r.failed) {
      std::cerr << " FAILED: " << r.failure;
    } else if (r.config.experiment == Experiment::kAttval) {
      std::cerr << " acquisition="
                << (r.acquisition_epoch ? std::to_string(*r.acquisition_epoch) : "nr")
                << " test_acc=" << format_number(r.final_epoch().test_metric);
    } else {
      std::cerr << " test_mse=" << format_number(r.final_epoch().test_metric);
    }
    std::cerr << '\n';
  });

  bool any_failed = false;
  std::vector<GroupResult> results;
  std::size_t k = 0;
  for (const auto& g : groups) {
    std::vector<RunRecord> group_records(records.begin() + static_cast<std::ptrdiff_t>(k),
                                         records.begin() + static_cast<std::ptrdiff_t>(k + g.seeds.size()));
    k += g.seeds.size();
    for (const auto& r : group_records) {
      const std::string stem = r.config.label() + "-seed" + std::to_string(r.seed);
      std::ostringstream csv;
      write_run_csv(csv, r);
      write_file(out / "runs" / (stem + ".csv"), csv.str());
      write_file(out / "runs" / (stem + ".json"), run_metadata(r).dump(2) + "\n");
      any_failed |= r.failed;
    }
    results.push_back({g.config, aggregate(group_records)});
  }

  std::ostringstream summary;
  write_summary_text(summary, preset, results);
  write_file(out / "summary.txt", summary.str());
  write_file(out / "summary.json", summary_json(preset, results).dump(2) + "\n");
  std::cout << summary.str();

  if (preset.base.experiment == Experiment::kCoordinates) {
    const CurveSet curves = mean_log_curves(records);
    for (const auto& w : curves.warnings) std::cerr << "warning: " << w << '\n';
    std::ostringstream tsv;
    write_curves(tsv, curves);
    write_file(out / "curves.tsv", tsv.str());
    write_file(out / "curves.svg", render_svg(curves));
  }
  if (!a.quiet) std::cerr << "artifacts written to " << out.string() << '\n';
  return any_failed ? kExitRunFailure : kExitOk;
}

int analyze_command(const std::string& language, int n_values, double angle) {
  LanguageSpec spec;
  try {
    spec.kind = parse_language_kind(language);
  } catch (const ConfigError& e) {
    throw UsageError(e.what());
  }
  spec.n_values = n_values;
  spec.rotation_angle = angle;
  try {
    spec.validate();
  } catch (const ConfigError& e) {
    throw UsageError(e.what());
  }
  write_report(std::cout, analyze_language(spec));
  return kExitOk;
}

int dump_command(const std::string& world, int n_values, std::uint64_t seed,
                 int count, double test_fraction) {
  if (world == "attval") {
    const auto items = enumerate_attval(n_values);
    const auto split = split_train_test(items, test_fraction, seed);
    std::cout << "# train\n";
    write_dataset(std::cout, std::span<const AttValInput>(split.train));
    std::cout << "# test\n";
    write_dataset(std::cout, std::span<const AttValInput>(split.test));
  } else if (world == "disk") {
    const auto points = sample_unit_disk(count, seed);
    write_dataset(std::cout, std::span<const DiskPoint>(points));
  } else {
    throw UsageError("dump: unknown world '" + world + "' (attval or disk)");
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Signaling-game benchmark: hard-coded senders, trainable receivers"};
  app.require_subcommand(1);

  RunArgs run;
  auto* run_cmd = app.add_subcommand("run", "Run an experiment preset");
  run_cmd->add_option("preset", run.preset, "attval or coordinates");
  run_cmd->add_option("--experiment", run.experiment, "Same as the positional preset");
  run_cmd->add_option("--language", run.language, "Only this language");
  run_cmd->add_option("--task", run.task, "Only this task");
  run_cmd->add_option("--cell", run.cell, "Only this cell (lstm or gru)");
  run_cmd->add_option("--n-values", run.n_values, "Attribute values / vocabulary size");
  run_cmd->add_option("--seeds", run.seeds, "Number of seeds per configuration");
  run_cmd->add_option("--epochs", run.epochs, "Training epochs");
  run_cmd->add_option("--lr", run.lr, "Adam learning rate");
  run_cmd->add_option("--batch-size", run.batch_size, "Mini-batch size");
  run_cmd->add_option("--hidden", run.hidden, "Recurrent hidden size");
  run_cmd->add_option("--embedding", run.embedding, "Symbol embedding size");
  run_cmd->add_flag("--no-end-marker", run.no_end_marker,
                    "Read exactly the two message symbols, no third step");
  run_cmd->add_option("--embedding-init", run.embedding_init, "normal (default) or uniform");
  run_cmd->add_option("--test-fraction", run.test_fraction, "Held-out fraction (attval)");
  run_cmd->add_option("--pin-linear-params", run.pin_linear,
                      "Fixed task-linear parameters a11,a12,a21,a22,b1,b2");
  run_cmd->add_option("--out", run.out, "Output directory (default results/<preset>)");
  run_cmd->add_option("--workers", run.workers, "Parallel runs")->check(CLI::PositiveNumber);
  run_cmd->add_flag("--quiet", run.quiet, "No progress output");

  std::string language;
  int n_values = 31;
  double angle = std::numbers::pi / 4;
  auto* analyze_cmd = app.add_subcommand("analyze", "Compositionality report for a language");
  analyze_cmd->add_option("language", language, "identity, entangled, coordinate or rotated")
      ->required();
  analyze_cmd->add_option("--n-values", n_values, "Vocabulary size");
  analyze_cmd->add_option("--angle", angle, "Rotation angle for the rotated language");

  std::string world;
  int dump_values = 31;
  std::uint64_t dump_seed = 0;
  int dump_count = 1000;
  double dump_fraction = 0.2;
  auto* dump_cmd = app.add_subcommand("dump", "Print a generated dataset");
  dump_cmd->add_option("world", world, "attval or disk")->required();
  dump_cmd->add_option("--n-values", dump_values, "Attribute values (attval)");
  dump_cmd->add_option("--seed", dump_seed, "Split / sampling seed");
  dump_cmd->add_option("--count", dump_count, "Number of points (disk)");
  dump_cmd->add_option("--test-fraction", dump_fraction, "Held-out fraction (attval)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*run_cmd) return run_command(run);
    if (*analyze_cmd) return analyze_command(language, n_values, angle);
    if (*dump_cmd) {
      return dump_command(world, dump_values, dump_seed, dump_count, dump_fraction);
    }
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRunFailure;
  }
  return kExitOk;
}
