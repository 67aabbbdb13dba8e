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
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <mutex>
#include <numeric>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "sigbench/errors.hpp"
#include "sigbench/languages.hpp"
#include "sigbench/random.hpp"
#include "sigbench/receiver.hpp"
#include "sigbench/tasks.hpp"
#include "sigbench/worlds.hpp"

namespace sigbench {

enum class Experiment { kAttval, kCoordinates };

inline std::string_view to_string(Experiment e) {
  return e == Experiment::kAttval ? "attval" : "coordinates";
}

inline Experiment parse_experiment(std::string_view name) {
  if (name == "attval") return Experiment::kAttval;
  if (name == "coordinates") return Experiment::kCoordinates;
  throw ConfigError("unknown experiment '" + std::string(name) + "'");
}

struct RunConfig {
  Experiment experiment = Experiment::kAttval;
  LanguageKind language = LanguageKind::kIdentity;
  TaskKind task = TaskKind::kIdentity;
  CellKind cell = CellKind::kLstm;
  int n_values = 31;
  int epochs = 500;
  int batch_size = 32;
  double lr = 1e-2;
  int embed_dim = 50;
  int hidden_dim = 100;
  // Receiver input conventions; see ReceiverConfig.
  bool end_marker = true;
  EmbeddingInit embedding_init = EmbeddingInit::kNormal;
  // attval: fraction of the n_v^2 grid held out.
  double test_fraction = 0.2;
  // coordinates: one dataset shared by every model seed.
  int n_train = 1000;
  int n_test = 1000;
  std::uint64_t data_seed = 0;
  double acquisition_threshold = 1.0;
  // Use these (A, b) for task-linear instead of drawing them per seed.
  std::optional<LinearTaskParams> pinned_linear;

  static RunConfig attval() { return {}; }

  static RunConfig coordinates() {
    RunConfig c;
    c.experiment = Experiment::kCoordinates;
    c.language = LanguageKind::kCoordinate;
    c.task = TaskKind::kCoordinates;
    c.n_values = 100;
    c.epochs = 250;
    c.lr = 1e-3;
    return c;
  }

  HeadKind head() const {
    return experiment == Experiment::kAttval ? HeadKind::kClassify
                                             : HeadKind::kRegress;
  }

  ReceiverConfig receiver() const {
    return {cell,       n_values,   embed_dim,     hidden_dim,
            head(),     end_marker, embedding_init};
  }

  std::string label() const {
    return std::string(to_string(experiment)) + "-" +
           std::string(to_string(language)) + "-" +
           std::string(to_string(task)) + "-" +
           std::string(numeric::to_string(cell));
  }

  void validate() const {
    if (n_values < 2) throw ConfigError("n_values must be >= 2");
    if (epochs < 1) throw ConfigError("epochs must be positive");
    if (batch_size < 1) throw ConfigError("batch_size must be positive");
    if (!(lr > 0.0)) throw ConfigError("lr must be positive");
    if (embed_dim < 1 || hidden_dim < 1) {
      throw ConfigError("embedding and hidden sizes must be positive");
    }
    if (experiment == Experiment::kAttval) {
      if (!is_discrete(language)) {
        throw ConfigError("attval runs need the identity or entangled language");
      }
      if (task == TaskKind::kCoordinates) {
        throw ConfigError("attval runs need a discrete task");
      }
      if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
        throw ConfigError("test_fraction must lie in (0, 1)");
      }
      if (task == TaskKind::kLinear && pinned_linear &&
          !pinned_linear->acceptable(n_values)) {
        throw ConfigError("pinned linear parameters are not invertible or "
                          "coincide with another task");
      }
    } else {
      if (is_discrete(language)) {
        throw ConfigError("coordinates runs need the coordinate or rotated "
                          "language");
      }
      if (task != TaskKind::kCoordinates) {
        throw ConfigError("coordinates runs need the coordinates task");
      }
      if (n_train < 1 || n_test < 1) {
        throw ConfigError("n_train and n_test must be positive");
      }
    }
  }
};

// Metrics recorded after each epoch. For attval the metric is strict
// accuracy; for coordinates loss and metric are both the MSE.
struct EpochMetrics {
  int epoch = 0;
  double train_loss = 0.0;
  double train_metric = 0.0;
  double test_loss = 0.0;
  double test_metric = 0.0;
  // attval only: accuracy averaged over the two outputs.
  double train_per_output = 0.0;
  double test_per_output = 0.0;
};

struct RunRecord {
  RunConfig config;
  std::uint64_t seed = 0;
  std::optional<LinearTaskParams> linear;
  std::vector<EpochMetrics> epochs;
  std::optional<int> acquisition_epoch;
  bool failed = false;
  std::string failure;

  const EpochMetrics& final_epoch() const {
    if (epochs.empty()) throw UsageError("run recorded no epochs");
    return epochs.back();
  }
};

// First 1-based epoch whose train metric reaches the threshold.
inline std::optional<int> acquisition_epochs(std::span<const double> train_metric,
                                             double threshold) {
  for (std::size_t k = 0; k < train_metric.size(); ++k) {
    if (train_metric[k] >= threshold) return static_cast<int>(k) + 1;
  }
  return std::nullopt;
}

inline std::optional<int> acquisition_epochs(const RunRecord& record,
                                             double threshold) {
  std::vector<double> series;
  series.reserve(record.epochs.size());
  for (const auto& e : record.epochs) series.push_back(e.train_metric);
  return acquisition_epochs(series, threshold);
}

namespace detail {

template <typename Target>
struct Dataset {
  std::vector<Message> messages;
  std::vector<Target> targets;
};

template <typename Target>
struct Datasets {
  Dataset<Target> train;
  Dataset<Target> test;
};

inline Datasets<DiscreteTarget> attval_data(const RunConfig& cfg,
                                            std::uint64_t seed,
                                            std::optional<LinearTaskParams>& linear) {
  const auto world = enumerate_attval(cfg.n_values);
  const auto split =
      split_train_test(world, cfg.test_fraction, derive_seed(seed, Stream::kSplit));
  AttvalTask task{cfg.task, cfg.n_values, {}};
  if (cfg.task == TaskKind::kLinear) {
    task.linear = cfg.pinned_linear
                      ? *cfg.pinned_linear
                      : gen_linear_params(cfg.n_values,
                                          derive_seed(seed, Stream::kLinearTask));
    linear = task.linear;
  }
  const LanguageSpec lang{cfg.language, cfg.n_values};
  auto build = [&](const std::vector<AttValInput>& items) {
    Dataset<DiscreteTarget> d;
    for (const auto& i : items) {
      d.messages.push_back(encode(lang, i));
      d.targets.push_back(task(i));
    }
    return d;
  };
  return {build(split.train), build(split.test)};
}

inline Datasets<ContinuousTarget> coordinates_data(const RunConfig& cfg) {
  const LanguageSpec lang{cfg.language, cfg.n_values};
  auto build = [&](int n, std::uint64_t index) {
    Dataset<ContinuousTarget> d;
    for (const auto& p :
         sample_unit_disk(n, derive_seed(cfg.data_seed, Stream::kDisk, index))) {
      d.messages.push_back(encode(lang, p));
      d.targets.push_back(target_coordinates(p));
    }
    return d;
  };
  return {build(cfg.n_train, 0), build(cfg.n_test, 1)};
}

template <typename Target, typename LossFn, typename EvalFn>
void train_epochs(const RunConfig& cfg, std::uint64_t seed, Receiver& model,
                  const Datasets<Target>& data, RunRecord& record,
                  LossFn&& batch_loss, EvalFn&& evaluate) {
  const numeric::AdamConfig adam{.lr = cfg.lr};
  const std::size_t n = data.train.messages.size();
  std::vector<std::size_t> order(n);
  std::vector<Message> batch_messages;
  std::vector<Target> batch_targets;
  batch_messages.reserve(static_cast<std::size_t>(cfg.batch_size));
  batch_targets.reserve(static_cast<std::size_t>(cfg.batch_size));

  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(derive_seed(seed, Stream::kShuffle, static_cast<std::uint64_t>(epoch)));
    rng.shuffle(std::span(order));

    for (std::size_t start = 0; start < n;
         start += static_cast<std::size_t>(cfg.batch_size)) {
      const std::size_t stop =
          std::min(n, start + static_cast<std::size_t>(cfg.batch_size));
      batch_messages.clear();
      batch_targets.clear();
      for (std::size_t k = start; k < stop; ++k) {
        batch_messages.push_back(data.train.messages[order[k]]);
        batch_targets.push_back(data.train.targets[order[k]]);
      }
      model.zero_grad();
      Tape tape;
      const Var loss = batch_loss(tape, batch_messages, batch_targets);
      if (!std::isfinite(tape.scalar(loss))) {
        record.failed = true;
        record.failure = "non-finite training loss at epoch " +
                         std::to_string(epoch);
        return;
      }
      tape.backward(loss);
      model.adam_step(adam);
    }

    EpochMetrics m = evaluate(epoch);
    record.epochs.push_back(m);
    if (!std::isfinite(m.train_loss) || !std::isfinite(m.test_loss)) {
      record.failed = true;
      record.failure = "non-finite evaluation loss at epoch " +
                       std::to_string(epoch);
      return;
    }
  }
}

}  // namespace detail

// Trains one receiver from scratch. Each epoch reshuffles the training set
// with an RNG derived from (seed, epoch), takes one Adam step per
// mini-batch (the last batch may be short) and then evaluates both sets.
// The test set is only ever evaluated. A non-finite loss stops the run and
// marks the record failed.
inline RunRecord train_run(const RunConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  RunRecord record;
  record.config = cfg;
  record.seed = seed;
  record.epochs.reserve(static_cast<std::size_t>(cfg.epochs));

  Receiver model = Receiver::init(cfg.receiver(), derive_seed(seed, Stream::kInit));

  if (cfg.experiment == Experiment::kAttval) {
    const auto data = detail::attval_data(cfg, seed, record.linear);
    detail::train_epochs(
        cfg, seed, model, data, record,
        [&model](Tape& tape, std::span<const Message> m,
                 std::span<const DiscreteTarget> t) {
          return model.loss_classify(tape, m, t);
        },
        [&model, &data](int epoch) {
          const auto train = model.evaluate_classify(data.train.messages,
                                                     data.train.targets);
          const auto test = model.evaluate_classify(data.test.messages,
                                                    data.test.targets);
          EpochMetrics e;
          e.epoch = epoch;
          e.train_loss = train.loss;
          e.train_metric = train.accuracy.strict;
          e.train_per_output = train.accuracy.per_output;
          e.test_loss = test.loss;
          e.test_metric = test.accuracy.strict;
          e.test_per_output = test.accuracy.per_output;
          return e;
        });
    record.acquisition_epoch = acquisition_epochs(record, cfg.acquisition_threshold);
  } else {
    const auto data = detail::coordinates_data(cfg);
    detail::train_epochs(
        cfg, seed, model, data, record,
        [&model](Tape& tape, std::span<const Message> m,
                 std::span<const ContinuousTarget> t) {
          return model.loss_regress(tape, m, t);
        },
        [&model, &data](int epoch) {
          EpochMetrics e;
          e.epoch = epoch;
          e.train_loss = model.evaluate_regress(data.train.messages,
                                                data.train.targets);
          e.train_metric = e.train_loss;
          e.test_loss = model.evaluate_regress(data.test.messages,
                                               data.test.targets);
          e.test_metric = e.test_loss;
          return e;
        });
  }
  return record;
}

// ---------------------------------------------------------------------------
// Aggregation

struct Summary {
  std::size_t count = 0;
  double mean = 0.0;
  // Sample standard deviation (n - 1) over sqrt(n); absent for n < 2.
  std::optional<double> sem;
};

inline Summary summarize(std::span<const double> values) {
  Summary s;
  s.count = values.size();
  if (values.empty()) return s;
  const double n = static_cast<double>(values.size());
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  if (values.size() >= 2) {
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.sem = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
  }
  return s;
}

struct Aggregate {
  std::string label;
  std::size_t runs = 0;
  std::size_t failed = 0;
  // Over runs that reached the acquisition threshold.
  Summary acquisition;
  std::size_t not_reached = 0;
  Summary final_test_metric;
  Summary final_train_metric;
  Summary final_test_per_output;
  std::vector<LinearTaskParams> linear;
};

// Folds the records of one configuration. Failed runs are counted but
// contribute no metrics.
inline Aggregate aggregate(std::span<const RunRecord> records) {
  Aggregate agg;
  if (!records.empty()) agg.label = records.front().config.label();
  agg.runs = records.size();
  std::vector<double> acq;
  std::vector<double> test;
  std::vector<double> train;
  std::vector<double> per_output;
  for (const auto& r : records) {
    if (r.linear) agg.linear.push_back(*r.linear);
    if (r.failed || r.epochs.empty()) {
      ++agg.failed;
      continue;
    }
    if (r.config.experiment == Experiment::kAttval) {
      if (r.acquisition_epoch) {
        acq.push_back(*r.acquisition_epoch);
      } else {
        ++agg.not_reached;
      }
      per_output.push_back(r.final_epoch().test_per_output);
    }
    test.push_back(r.final_epoch().test_metric);
    train.push_back(r.final_epoch().train_metric);
  }
  agg.acquisition = summarize(acq);
  agg.final_test_metric = summarize(test);
  agg.final_train_metric = summarize(train);
  agg.final_test_per_output = summarize(per_output);
  return agg;
}

// ---------------------------------------------------------------------------
// Serialisation

inline std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

inline constexpr std::string_view kRunCsvHeader =
    "epoch,train_loss,train_metric,test_loss,test_metric";

inline void write_run_csv(std::ostream& os, const RunRecord& record) {
  os << kRunCsvHeader << '\n';
  for (const auto& e : record.epochs) {
    os << e.epoch << ',' << format_number(e.train_loss) << ','
       << format_number(e.train_metric) << ',' << format_number(e.test_loss)
       << ',' << format_number(e.test_metric) << '\n';
  }
}

// ---------------------------------------------------------------------------
// Scheduling

struct Job {
  RunConfig config;
  std::uint64_t seed = 0;
};

inline unsigned default_workers() {
  return std::max(1u, std::thread::hardware_concurrency());
}

// Runs every job on a pool of `workers` threads. Results come back in job
// order regardless of scheduling; `on_done` is called under a lock.
inline std::vector<RunRecord> run_jobs(
    std::span<const Job> jobs, unsigned workers,
    const std::function<void(std::size_t, const RunRecord&)>& on_done = {}) {
  std::vector<RunRecord> out(jobs.size());
  std::atomic<std::size_t> next{0};
  std::mutex done_mutex;
  auto work = [&] {
    for (std::size_t k = next++; k < jobs.size(); k = next++) {
      out[k] = train_run(jobs[k].config, jobs[k].seed);
      if (on_done) {
        std::lock_guard lock(done_mutex);
        on_done(k, out[k]);
      }
    }
  };
  workers = std::max(1u, std::min<unsigned>(workers,
                                            static_cast<unsigned>(jobs.size())));
  if (workers == 1) {
    work();
    return out;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
  for (auto& t : pool) t.join();
  return out;
}

}  // namespace sigbench
