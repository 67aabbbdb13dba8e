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

#include <cmath>
#include <cstdint>
#include <istream>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sigbench/errors.hpp"
#include "sigbench/languages.hpp"
#include "sigbench/numeric/adam.hpp"
#include "sigbench/numeric/cells.hpp"
#include "sigbench/numeric/parameter.hpp"
#include "sigbench/numeric/tape.hpp"
#include "sigbench/random.hpp"
#include "sigbench/tasks.hpp"

namespace sigbench {

using numeric::CellKind;
using Param = numeric::Parameter<double>;
using Tape = numeric::Tape<double>;
using numeric::Var;

enum class HeadKind { kClassify, kRegress };

inline std::string_view to_string(HeadKind kind) {
  return kind == HeadKind::kClassify ? "classify" : "regress";
}

enum class EmbeddingInit {
  kUniform,  // U(-1/sqrt(n_v), 1/sqrt(n_v))
  kNormal,   // N(0, 1)
};

inline std::string_view to_string(EmbeddingInit init) {
  return init == EmbeddingInit::kUniform ? "uniform" : "normal";
}

inline EmbeddingInit parse_embedding_init(std::string_view name) {
  if (name == "uniform") return EmbeddingInit::kUniform;
  if (name == "normal") return EmbeddingInit::kNormal;
  throw ConfigError("unknown embedding init '" + std::string(name) + "'");
}

struct ReceiverConfig {
  CellKind cell = CellKind::kLstm;
  int n_values = 31;
  int embed_dim = 50;
  int hidden_dim = 100;
  HeadKind head = HeadKind::kClassify;
  // When set, the cell takes a third step on a learned end-of-message
  // vector before the head reads the state. The vector is not a message
  // symbol: the embedding table keeps n_v rows.
  bool end_marker = false;
  EmbeddingInit embedding_init = EmbeddingInit::kUniform;

  int output_dim() const {
    return head == HeadKind::kClassify ? 2 * n_values : 2;
  }

  void validate() const {
    if (n_values < 2) throw ConfigError("receiver: n_values must be >= 2");
    if (embed_dim < 1 || hidden_dim < 1) {
      throw ConfigError("receiver: embed_dim and hidden_dim must be positive");
    }
  }

  friend bool operator==(const ReceiverConfig&, const ReceiverConfig&) = default;
};

struct Accuracy {
  double strict = 0.0;      // both outputs right
  double per_output = 0.0;  // mean over the two outputs
};

// The listener: embeds both symbols, runs the recurrent cell over them from a
// zero state and reads the final hidden state through a linear head.
// A classification head emits 2 * n_v logits (first n_v for the first
// output); a regression head emits (x, y).
class Receiver {
 public:
  static Receiver init(const ReceiverConfig& config, std::uint64_t seed) {
    config.validate();
    Rng rng(seed);
    Receiver r(config);
    const auto embed = [&](Eigen::Index rows) {
      if (config.embedding_init == EmbeddingInit::kUniform) {
        return numeric::uniform_fan_in<double>(rows, config.embed_dim,
                                               config.n_values, rng);
      }
      numeric::Matrix<double> m(rows, config.embed_dim);
      for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = rng.normal();
      return m;
    };
    r.embedding_.values = embed(config.n_values);
    if (config.end_marker) r.end_marker_.values = embed(1);
    r.cell_ = numeric::CellParams<double>::random(
        config.cell, config.embed_dim, config.hidden_dim, rng);
    r.head_weights_.values = numeric::uniform_fan_in<double>(
        config.hidden_dim, config.output_dim(), config.hidden_dim, rng);
    r.head_bias_.values = numeric::uniform_fan_in<double>(
        1, config.output_dim(), config.hidden_dim, rng);
    return r;
  }

  // All parameters zero.
  static Receiver zeros(const ReceiverConfig& config) {
    config.validate();
    return Receiver(config);
  }

  const ReceiverConfig& config() const { return config_; }

  Param& embedding() { return embedding_; }
  Param& end_marker() { return end_marker_; }
  numeric::CellParams<double>& cell() { return cell_; }
  Param& head_weights() { return head_weights_; }
  Param& head_bias() { return head_bias_; }

  void zero_head() {
    head_weights_.values.setZero();
    head_bias_.values.setZero();
  }

  template <typename F>
  void for_each_parameter(F&& f) {
    f(embedding_);
    if (config_.end_marker) f(end_marker_);
    cell_.for_each_parameter(f);
    f(head_weights_);
    f(head_bias_);
  }

  std::vector<Param*> parameters() {
    std::vector<Param*> out;
    for_each_parameter([&out](Param& p) { out.push_back(&p); });
    return out;
  }

  void zero_grad() {
    for_each_parameter([](Param& p) { p.zero_grad(); });
  }

  void adam_step(const numeric::AdamConfig& cfg) {
    for_each_parameter([&cfg](Param& p) { numeric::adam_step(p, cfg); });
  }

  // Head output for a batch, one row per message.
  Var forward(Tape& tape, std::span<const Message> batch) {
    std::vector<int> first(batch.size());
    std::vector<int> second(batch.size());
    for (std::size_t k = 0; k < batch.size(); ++k) {
      first[k] = checked_symbol(batch[k].s1);
      second[k] = checked_symbol(batch[k].s2);
    }
    const auto rows = static_cast<Eigen::Index>(batch.size());
    const Var table = tape.leaf(embedding_);
    const numeric::CellVars w = numeric::bind(tape, cell_);
    const Var x1 = tape.gather_rows(table, first);
    const Var x2 = tape.gather_rows(table, second);
    const Var zero =
        tape.constant(numeric::Matrix<double>::Zero(rows, config_.hidden_dim));

    std::vector<Var> steps{x1, x2};
    if (config_.end_marker) {
      const std::vector<int> row0(batch.size(), 0);
      steps.push_back(tape.gather_rows(tape.leaf(end_marker_), row0));
    }

    Var h = zero;
    if (config_.cell == CellKind::kLstm) {
      numeric::LstmState s{zero, zero};
      for (const Var& x : steps) {
        s = numeric::lstm_cell_step(tape, cell_, w, x, s.h, s.c);
      }
      h = s.h;
    } else {
      for (const Var& x : steps) h = numeric::gru_cell_step(tape, cell_, w, x, h);
    }
    return tape.add(tape.matmul(h, tape.leaf(head_weights_)),
                    tape.leaf(head_bias_));
  }

  // Mean over the batch of NLL(first output) + NLL(second output).
  Var loss_classify(Tape& tape, std::span<const Message> batch,
                    std::span<const DiscreteTarget> targets) {
    require_head(HeadKind::kClassify);
    if (batch.size() != targets.size()) {
      throw InputError("loss_classify: one target per message required");
    }
    const Var out = forward(tape, batch);
    std::vector<int> t1(targets.size());
    std::vector<int> t2(targets.size());
    for (std::size_t k = 0; k < targets.size(); ++k) {
      t1[k] = targets[k].o1;
      t2[k] = targets[k].o2;
    }
    const Eigen::Index n = config_.n_values;
    const Var nll = tape.add(tape.softmax_nll(tape.cols(out, 0, n), t1),
                             tape.softmax_nll(tape.cols(out, n, n), t2));
    return tape.mean(nll);
  }

  // Mean squared error over both coordinates and the batch.
  Var loss_regress(Tape& tape, std::span<const Message> batch,
                   std::span<const ContinuousTarget> targets) {
    require_head(HeadKind::kRegress);
    if (batch.size() != targets.size()) {
      throw InputError("loss_regress: one target per message required");
    }
    const Var out = forward(tape, batch);
    numeric::Matrix<double> want(static_cast<Eigen::Index>(targets.size()), 2);
    for (std::size_t k = 0; k < targets.size(); ++k) {
      want(static_cast<Eigen::Index>(k), 0) = targets[k].x;
      want(static_cast<Eigen::Index>(k), 1) = targets[k].y;
    }
    return tape.mse(out, tape.constant(std::move(want)));
  }

  std::pair<numeric::Vector<double>, numeric::Vector<double>> forward_classify(
      const Message& m) {
    require_head(HeadKind::kClassify);
    Tape tape;
    const auto& out = tape.value(forward(tape, std::span(&m, 1)));
    const Eigen::Index n = config_.n_values;
    return {out.row(0).head(n).transpose(), out.row(0).tail(n).transpose()};
  }

  std::pair<double, double> forward_regress(const Message& m) {
    require_head(HeadKind::kRegress);
    Tape tape;
    const auto& out = tape.value(forward(tape, std::span(&m, 1)));
    return {out(0, 0), out(0, 1)};
  }

  double loss_classify(const Message& m, const DiscreteTarget& target) {
    check_target(target);
    Tape tape;
    return tape.scalar(loss_classify(tape, std::span(&m, 1),
                                     std::span(&target, 1)));
  }

  // Argmax of each head; ties go to the lowest class id.
  std::vector<DiscreteTarget> predict(std::span<const Message> batch) {
    require_head(HeadKind::kClassify);
    Tape tape;
    const auto& out = tape.value(forward(tape, batch));
    const Eigen::Index n = config_.n_values;
    std::vector<DiscreteTarget> pred(batch.size());
    for (Eigen::Index r = 0; r < out.rows(); ++r) {
      Eigen::Index a = 0;
      Eigen::Index b = 0;
      out.row(r).head(n).maxCoeff(&a);
      out.row(r).tail(n).maxCoeff(&b);
      pred[static_cast<std::size_t>(r)] = {static_cast<int>(a),
                                           static_cast<int>(b)};
    }
    return pred;
  }

  std::vector<ContinuousTarget> predict_regress(std::span<const Message> batch) {
    require_head(HeadKind::kRegress);
    Tape tape;
    const auto& out = tape.value(forward(tape, batch));
    std::vector<ContinuousTarget> pred(batch.size());
    for (Eigen::Index r = 0; r < out.rows(); ++r) {
      pred[static_cast<std::size_t>(r)] = {out(r, 0), out(r, 1)};
    }
    return pred;
  }

  Accuracy predict_and_score(std::span<const Message> batch,
                             std::span<const DiscreteTarget> targets) {
    if (batch.size() != targets.size()) {
      throw InputError("predict_and_score: one target per message required");
    }
    if (batch.empty()) return {};
    const auto pred = predict(batch);
    std::size_t both = 0;
    std::size_t single = 0;
    for (std::size_t k = 0; k < pred.size(); ++k) {
      const bool first = pred[k].o1 == targets[k].o1;
      const bool second = pred[k].o2 == targets[k].o2;
      both += first && second;
      single += static_cast<std::size_t>(first) + second;
    }
    const auto n = static_cast<double>(pred.size());
    return {static_cast<double>(both) / n, static_cast<double>(single) / (2 * n)};
  }

  struct ClassifyEval {
    double loss = 0.0;  // mean per-sample sum of the two NLLs
    Accuracy accuracy;
  };

  // Loss and accuracy from one forward pass over the whole set.
  ClassifyEval evaluate_classify(std::span<const Message> batch,
                                 std::span<const DiscreteTarget> targets) {
    require_head(HeadKind::kClassify);
    if (batch.size() != targets.size()) {
      throw InputError("evaluate_classify: one target per message required");
    }
    if (batch.empty()) return {};
    Tape tape;
    const auto& out = tape.value(forward(tape, batch));
    const Eigen::Index n = config_.n_values;
    double loss = 0.0;
    std::size_t both = 0;
    std::size_t single = 0;
    for (Eigen::Index r = 0; r < out.rows(); ++r) {
      const auto& t = targets[static_cast<std::size_t>(r)];
      check_target(t);
      const auto row = out.row(r);
      Eigen::Index a = 0;
      Eigen::Index b = 0;
      row.head(n).maxCoeff(&a);
      row.tail(n).maxCoeff(&b);
      const bool first = a == t.o1;
      const bool second = b == t.o2;
      both += first && second;
      single += static_cast<std::size_t>(first) + second;
      loss += log_sum_exp(row.head(n)) - row(t.o1) +
              log_sum_exp(row.tail(n)) - row(n + t.o2);
    }
    const auto count = static_cast<double>(out.rows());
    return {loss / count,
            {static_cast<double>(both) / count,
             static_cast<double>(single) / (2 * count)}};
  }

  // Mean squared error over the whole set.
  double evaluate_regress(std::span<const Message> batch,
                          std::span<const ContinuousTarget> targets) {
    if (batch.empty()) return 0.0;
    Tape tape;
    return tape.scalar(loss_regress(tape, batch, targets));
  }

  // Text checkpoint:
  //   sigbench-receiver 1
  //   cell <lstm|gru> n_values <n> embed <e> hidden <h> head <classify|regress>
  //     end_marker <0|1>
  //   param <name> <rows> <cols>
  //   <row-major values, %.17g>
  void save(std::ostream& os) {
    const auto prec = os.precision(17);
    os << kMagic << ' ' << kVersion << '\n';
    os << "cell " << numeric::to_string(config_.cell) << " n_values "
       << config_.n_values << " embed " << config_.embed_dim << " hidden "
       << config_.hidden_dim << " head " << to_string(config_.head)
       << " end_marker " << (config_.end_marker ? 1 : 0) << '\n';
    for_each_parameter([&os](Param& p) {
      os << "param " << p.name << ' ' << p.rows() << ' ' << p.cols() << '\n';
      for (Eigen::Index i = 0; i < p.rows(); ++i) {
        for (Eigen::Index j = 0; j < p.cols(); ++j) {
          os << (j == 0 ? "" : " ") << p.values(i, j);
        }
        os << '\n';
      }
    });
    os.precision(prec);
  }

  static Receiver load(std::istream& is) {
    std::string magic;
    int version = 0;
    is >> magic >> version;
    if (!is || magic != kMagic) throw InputError("not a receiver checkpoint");
    if (version != kVersion) {
      throw InputError("unsupported checkpoint version " +
                       std::to_string(version));
    }
    std::string key;
    std::string cell;
    std::string head;
    ReceiverConfig cfg;
    int end_marker = 0;
    is >> key >> cell >> key >> cfg.n_values >> key >> cfg.embed_dim >> key >>
        cfg.hidden_dim >> key >> head >> key >> end_marker;
    cfg.end_marker = end_marker != 0;
    if (!is) throw InputError("truncated checkpoint header");
    cfg.cell = numeric::parse_cell_kind(cell);
    if (head == "classify") {
      cfg.head = HeadKind::kClassify;
    } else if (head == "regress") {
      cfg.head = HeadKind::kRegress;
    } else {
      throw InputError("unknown head kind '" + head + "'");
    }
    Receiver r = zeros(cfg);
    r.for_each_parameter([&is](Param& p) {
      std::string tag;
      std::string name;
      Eigen::Index rows = 0;
      Eigen::Index cols = 0;
      is >> tag >> name >> rows >> cols;
      if (!is || tag != "param" || name != p.name || rows != p.rows() ||
          cols != p.cols()) {
        throw InputError("checkpoint parameter mismatch at '" + p.name + "'");
      }
      for (Eigen::Index i = 0; i < rows; ++i) {
        for (Eigen::Index j = 0; j < cols; ++j) is >> p.values(i, j);
      }
      if (!is) throw InputError("truncated values for '" + p.name + "'");
    });
    return r;
  }

 private:
  static constexpr std::string_view kMagic = "sigbench-receiver";
  static constexpr int kVersion = 1;

  explicit Receiver(const ReceiverConfig& config)
      : config_(config),
        embedding_("embedding", numeric::Matrix<double>::Zero(
                                    config.n_values, config.embed_dim)),
        end_marker_("end_marker", numeric::Matrix<double>::Zero(
                                      config.end_marker ? 1 : 0,
                                      config.embed_dim)),
        cell_(numeric::CellParams<double>::zeros(config.cell, config.embed_dim,
                                                 config.hidden_dim)),
        head_weights_("head.weights",
                      numeric::Matrix<double>::Zero(config.hidden_dim,
                                                    config.output_dim())),
        head_bias_("head.bias",
                   numeric::Matrix<double>::Zero(1, config.output_dim())) {}

  template <typename Row>
  static double log_sum_exp(const Row& row) {
    const double shift = row.maxCoeff();
    return shift + std::log((row.array() - shift).exp().sum());
  }

  int checked_symbol(int s) const {
    if (s < 0 || s >= config_.n_values) {
      throw InputError("symbol " + std::to_string(s) + " outside [0, " +
                       std::to_string(config_.n_values) + ")");
    }
    return s;
  }

  void check_target(const DiscreteTarget& t) const {
    if (t.o1 < 0 || t.o1 >= config_.n_values || t.o2 < 0 ||
        t.o2 >= config_.n_values) {
      throw InputError("target outside [0, n_values)");
    }
  }

  void require_head(HeadKind kind) const {
    if (config_.head != kind) {
      throw UsageError(std::string("operation needs a ") +
                       std::string(to_string(kind)) + " head");
    }
  }

  ReceiverConfig config_;
  Param embedding_;
  Param end_marker_;
  numeric::CellParams<double> cell_;
  Param head_weights_;
  Param head_bias_;
};

}  // namespace sigbench
