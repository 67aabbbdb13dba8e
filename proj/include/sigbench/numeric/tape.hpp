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
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "sigbench/errors.hpp"
#include "sigbench/numeric/parameter.hpp"

namespace sigbench::numeric {

// Handle to a node recorded on a Tape. Only meaningful for the tape that
// created it.
struct Var {
  std::size_t id = 0;
};

// Reverse-mode differentiation trace over dense row-major-by-convention
// matrices: rows index the batch, columns index features.
//
// Every operation evaluates eagerly and records a closure that pushes the
// node's gradient into its inputs. backward() replays the closures in
// reverse creation order and finally adds the gradients of Parameter
// leaves into Parameter::gradient (accumulating; callers zero explicitly).
template <typename T>
class Tape {
 public:
  using Mat = Matrix<T>;

  Tape() { nodes_.reserve(64); }
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  std::size_t size() const { return nodes_.size(); }

  const Mat& value(Var v) const {
    const Node& n = nodes_[v.id];
    return n.ref != nullptr ? *n.ref : n.value;
  }

  T scalar(Var v) const {
    const Mat& m = value(v);
    if (m.size() != 1) throw UsageError("scalar() on a non-scalar node");
    return m(0, 0);
  }

  // Gradient of the last backward() target w.r.t. this node; empty when the
  // node was unreachable.
  const Mat& grad(Var v) const { return nodes_[v.id].grad; }

  // Reads the parameter's values in place; they must outlive the tape.
  Var leaf(Parameter<T>& p) {
    Node n;
    n.ref = &p.values;
    n.param = &p;
    return push(std::move(n));
  }

  Var constant(Mat m) {
    Node n;
    n.value = std::move(m);
    return push(std::move(n));
  }

  // A non-parameter input whose gradient is wanted (read it with grad()).
  Var variable(Mat m) {
    Node n;
    n.value = std::move(m);
    n.requires_grad = true;
    return push(std::move(n));
  }

  Var matmul(Var a, Var b) {
    check(value(a).cols() == value(b).rows(), "matmul: inner dimensions");
    Node n;
    n.value.noalias() = value(a) * value(b);
    n.backward = [a, b](Tape& t, const Mat& g) {
      if (t.wants(a)) t.accumulate(a, g * t.value(b).transpose());
      if (t.wants(b)) t.accumulate(b, t.value(a).transpose() * g);
    };
    return push(std::move(n), {a, b});
  }

  // Elementwise sum; `b` may also be a 1 x cols row broadcast over rows.
  Var add(Var a, Var b) {
    const Mat& va = value(a);
    const Mat& vb = value(b);
    if (va.rows() == vb.rows() && va.cols() == vb.cols()) {
      Node n;
      n.value = va + vb;
      n.backward = [a, b](Tape& t, const Mat& g) {
        if (t.wants(a)) t.accumulate(a, g);
        if (t.wants(b)) t.accumulate(b, g);
      };
      return push(std::move(n), {a, b});
    }
    check(vb.rows() == 1 && vb.cols() == va.cols(), "add: shape mismatch");
    Node n;
    n.value = va.rowwise() + vb.row(0);
    n.backward = [a, b](Tape& t, const Mat& g) {
      if (t.wants(a)) t.accumulate(a, g);
      if (t.wants(b)) t.accumulate(b, g.colwise().sum());
    };
    return push(std::move(n), {a, b});
  }

  Var sub(Var a, Var b) {
    check_same(a, b, "sub");
    Node n;
    n.value = value(a) - value(b);
    n.backward = [a, b](Tape& t, const Mat& g) {
      if (t.wants(a)) t.accumulate(a, g);
      if (t.wants(b)) t.accumulate(b, -g);
    };
    return push(std::move(n), {a, b});
  }

  // Hadamard product.
  Var mul(Var a, Var b) {
    check_same(a, b, "mul");
    Node n;
    n.value = value(a).cwiseProduct(value(b));
    n.backward = [a, b](Tape& t, const Mat& g) {
      if (t.wants(a)) t.accumulate(a, g.cwiseProduct(t.value(b)));
      if (t.wants(b)) t.accumulate(b, g.cwiseProduct(t.value(a)));
    };
    return push(std::move(n), {a, b});
  }

  Var scale(Var a, T s) {
    Node n;
    n.value = value(a) * s;
    n.backward = [a, s](Tape& t, const Mat& g) { t.accumulate(a, g * s); };
    return push(std::move(n), {a});
  }

  // 1 - a
  Var one_minus(Var a) {
    Node n;
    n.value = (T(1) - value(a).array()).matrix();
    n.backward = [a](Tape& t, const Mat& g) { t.accumulate(a, -g); };
    return push(std::move(n), {a});
  }

  Var sigmoid(Var a) {
    Node n;
    n.value = value(a).unaryExpr([](T x) { return logistic(x); });
    const std::size_t self = nodes_.size();
    n.backward = [a, self](Tape& t, const Mat& g) {
      const auto y = t.value(Var{self}).array();
      t.accumulate(a, (g.array() * y * (T(1) - y)).matrix());
    };
    return push(std::move(n), {a});
  }

  Var tanh(Var a) {
    Node n;
    n.value = value(a).array().tanh().matrix();
    const std::size_t self = nodes_.size();
    n.backward = [a, self](Tape& t, const Mat& g) {
      const auto y = t.value(Var{self}).array();
      t.accumulate(a, (g.array() * (T(1) - y * y)).matrix());
    };
    return push(std::move(n), {a});
  }

  // Column block [start, start + count).
  Var cols(Var a, Eigen::Index start, Eigen::Index count) {
    const Mat& va = value(a);
    check(start >= 0 && count >= 0 && start + count <= va.cols(),
          "cols: block out of range");
    Node n;
    n.value = va.middleCols(start, count);
    n.backward = [a, start, count](Tape& t, const Mat& g) {
      if (!t.wants(a)) return;
      Mat& pg = t.grad_slot(a);
      pg.middleCols(start, count) += g;
    };
    return push(std::move(n), {a});
  }

  // Row lookup: result row r is table row indices[r] (embedding gather).
  Var gather_rows(Var table, std::span<const int> indices) {
    const Mat& vt = value(table);
    Node n;
    n.value.resize(static_cast<Eigen::Index>(indices.size()), vt.cols());
    for (std::size_t r = 0; r < indices.size(); ++r) {
      const int idx = indices[r];
      if (idx < 0 || idx >= vt.rows()) {
        throw InputError("gather_rows: index " + std::to_string(idx) +
                         " outside table of " + std::to_string(vt.rows()) +
                         " rows");
      }
      n.value.row(static_cast<Eigen::Index>(r)) = vt.row(idx);
    }
    std::vector<int> idx(indices.begin(), indices.end());
    n.backward = [table, idx = std::move(idx)](Tape& t, const Mat& g) {
      if (!t.wants(table)) return;
      Mat& pg = t.grad_slot(table);
      for (std::size_t r = 0; r < idx.size(); ++r) {
        pg.row(idx[r]) += g.row(static_cast<Eigen::Index>(r));
      }
    };
    return push(std::move(n), {table});
  }

  // 1 x 1 sum of all entries.
  Var sum(Var a) {
    Node n;
    n.value = Mat::Constant(1, 1, value(a).sum());
    n.backward = [a](Tape& t, const Mat& g) {
      const Mat& va = t.value(a);
      t.accumulate(a, Mat::Constant(va.rows(), va.cols(), g(0, 0)));
    };
    return push(std::move(n), {a});
  }

  // 1 x 1 mean of all entries.
  Var mean(Var a) {
    const auto count = static_cast<T>(value(a).size());
    check(count > 0, "mean: empty input");
    return scale(sum(a), T(1) / count);
  }

  // Per-row negative log-likelihood -log softmax(row)[target[row]] as an
  // n x 1 column.
  Var softmax_nll(Var logits, std::span<const int> targets) {
    const Mat& z = value(logits);
    check(static_cast<Eigen::Index>(targets.size()) == z.rows(),
          "softmax_nll: one target per row required");
    Mat probs(z.rows(), z.cols());
    Node n;
    n.value.resize(z.rows(), 1);
    for (Eigen::Index r = 0; r < z.rows(); ++r) {
      const int target = targets[static_cast<std::size_t>(r)];
      if (target < 0 || target >= z.cols()) {
        throw InputError("softmax_nll: target " + std::to_string(target) +
                         " outside [0, " + std::to_string(z.cols()) + ")");
      }
      const T shift = z.row(r).maxCoeff();
      probs.row(r) = (z.row(r).array() - shift).exp().matrix();
      const T total = probs.row(r).sum();
      probs.row(r) /= total;
      n.value(r, 0) = std::log(total) + shift - z(r, target);
    }
    std::vector<int> tgt(targets.begin(), targets.end());
    n.backward = [logits, probs = std::move(probs), tgt = std::move(tgt)](
                     Tape& t, const Mat& g) {
      Mat d = probs;
      for (Eigen::Index r = 0; r < d.rows(); ++r) {
        d(r, tgt[static_cast<std::size_t>(r)]) -= T(1);
        d.row(r) *= g(r, 0);
      }
      t.accumulate(logits, d);
    };
    return push(std::move(n), {logits});
  }

  // 1 x 1 mean over all entries of (pred - target)^2.
  Var mse(Var pred, Var target) {
    check_same(pred, target, "mse");
    const Var diff = sub(pred, target);
    return mean(mul(diff, diff));
  }

  // Reverse sweep from a 1 x 1 node. Tape-local gradients are reset first;
  // Parameter gradients accumulate.
  void backward(Var loss) {
    if (value(loss).size() != 1) {
      throw UsageError("backward requires a scalar (1 x 1) loss node");
    }
    for (Node& n : nodes_) n.grad.resize(0, 0);
    mark_reachable(loss);
    nodes_[loss.id].grad = Mat::Constant(1, 1, T(1));
    for (std::size_t i = loss.id + 1; i-- > 0;) {
      Node& n = nodes_[i];
      if (n.grad.size() == 0) continue;
      if (n.backward) n.backward(*this, n.grad);
      if (n.param != nullptr) n.param->gradient += n.grad;
    }
  }

 private:
  struct Node {
    Mat value;
    Mat grad;
    const Mat* ref = nullptr;
    Parameter<T>* param = nullptr;
    std::vector<std::size_t> parents;
    bool requires_grad = false;
    bool reachable = false;
    std::function<void(Tape&, const Mat&)> backward;
  };

  static T logistic(T x) {
    if (x >= T(0)) return T(1) / (T(1) + std::exp(-x));
    const T e = std::exp(x);
    return e / (T(1) + e);
  }

  static void check(bool ok, const char* what) {
    if (!ok) throw ConfigError(std::string("dimension mismatch in ") + what);
  }

  void check_same(Var a, Var b, const char* what) const {
    check(value(a).rows() == value(b).rows() &&
              value(a).cols() == value(b).cols(),
          what);
  }

  Var push(Node n, std::initializer_list<Var> parents = {}) {
    for (Var p : parents) n.parents.push_back(p.id);
    nodes_.push_back(std::move(n));
    return Var{nodes_.size() - 1};
  }

  // Nodes that do not lead to a Parameter or variable need no gradient.
  void mark_reachable(Var loss) {
    for (std::size_t i = 0; i <= loss.id; ++i) {
      Node& n = nodes_[i];
      n.reachable = n.param != nullptr || n.requires_grad;
      for (std::size_t p : n.parents) n.reachable |= nodes_[p].reachable;
    }
  }

  bool wants(Var v) const { return nodes_[v.id].reachable; }

  Mat& grad_slot(Var v) {
    Node& n = nodes_[v.id];
    if (n.grad.size() == 0) {
      const Mat& shape = value(v);
      n.grad = Mat::Zero(shape.rows(), shape.cols());
    }
    return n.grad;
  }

  template <typename Derived>
  void accumulate(Var v, const Eigen::MatrixBase<Derived>& g) {
    if (!wants(v)) return;
    Node& n = nodes_[v.id];
    if (n.grad.size() == 0) {
      n.grad = g;
    } else {
      n.grad += g;
    }
  }

  std::vector<Node> nodes_;
};

}  // namespace sigbench::numeric
