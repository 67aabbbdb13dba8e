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
#include <string>
#include <string_view>
#include <type_traits>
#include <utility>

#include "sigbench/errors.hpp"
#include "sigbench/numeric/parameter.hpp"
#include "sigbench/numeric/tape.hpp"
#include "sigbench/random.hpp"

namespace sigbench::numeric {

enum class CellKind { kLstm, kGru };

inline std::string_view to_string(CellKind kind) {
  return kind == CellKind::kLstm ? "lstm" : "gru";
}

inline CellKind parse_cell_kind(std::string_view name) {
  if (name == "lstm") return CellKind::kLstm;
  if (name == "gru") return CellKind::kGru;
  throw ConfigError("unknown cell kind '" + std::string(name) + "'");
}

inline int gate_count(CellKind kind) { return kind == CellKind::kLstm ? 4 : 3; }

// Matrix of the given shape with entries uniform in [-1/sqrt(fan_in),
// 1/sqrt(fan_in)].
template <typename T>
Matrix<T> uniform_fan_in(Eigen::Index rows, Eigen::Index cols,
                         Eigen::Index fan_in, Rng& rng) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
  Matrix<T> m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) {
      m(i, j) = static_cast<T>(rng.uniform(-bound, bound));
    }
  }
  return m;
}

// Weights of one recurrent cell. The gates are fused column-wise, each block
// `hidden_dim` wide:
//
//   LSTM  [ input i | forget f | candidate g | output o ]
//   GRU   [ update z | reset r | candidate n ]
//
// input_weights is input_dim x (gates * hidden_dim), recurrent_weights is
// hidden_dim x (gates * hidden_dim), biases is 1 x (gates * hidden_dim).
template <typename T>
struct CellParams {
  CellKind kind = CellKind::kLstm;
  int input_dim = 0;
  int hidden_dim = 0;
  Parameter<T> input_weights;
  Parameter<T> recurrent_weights;
  Parameter<T> biases;

  int gates() const { return gate_count(kind); }

  static CellParams zeros(CellKind kind, int input_dim, int hidden_dim) {
    if (input_dim <= 0 || hidden_dim <= 0) {
      throw ConfigError("cell dimensions must be positive");
    }
    const Eigen::Index width = gate_count(kind) * hidden_dim;
    CellParams p;
    p.kind = kind;
    p.input_dim = input_dim;
    p.hidden_dim = hidden_dim;
    p.input_weights = {"cell.input_weights", Matrix<T>::Zero(input_dim, width)};
    p.recurrent_weights = {"cell.recurrent_weights",
                           Matrix<T>::Zero(hidden_dim, width)};
    p.biases = {"cell.biases", Matrix<T>::Zero(1, width)};
    return p;
  }

  // Every entry uniform in +-1/sqrt(fan_in), fan_in = input_dim + hidden_dim
  // (the width of the concatenated [x, h] a gate reads).
  static CellParams random(CellKind kind, int input_dim, int hidden_dim,
                           Rng& rng) {
    CellParams p = zeros(kind, input_dim, hidden_dim);
    const Eigen::Index fan_in = input_dim + hidden_dim;
    const Eigen::Index width = p.biases.cols();
    p.input_weights.values = uniform_fan_in<T>(input_dim, width, fan_in, rng);
    p.recurrent_weights.values =
        uniform_fan_in<T>(hidden_dim, width, fan_in, rng);
    p.biases.values = uniform_fan_in<T>(1, width, fan_in, rng);
    return p;
  }

  template <typename F>
  void for_each_parameter(F&& f) {
    f(input_weights);
    f(recurrent_weights);
    f(biases);
  }
};

// CellParams registered as leaves on one tape.
struct CellVars {
  Var input_weights;
  Var recurrent_weights;
  Var biases;
};

template <typename T>
CellVars bind(Tape<T>& tape, CellParams<T>& params) {
  return {tape.leaf(params.input_weights), tape.leaf(params.recurrent_weights),
          tape.leaf(params.biases)};
}

struct LstmState {
  Var h;
  Var c;
};

namespace detail {
template <typename T>
void check_step_dims(const CellParams<T>& p, const Tape<T>& tape, Var x,
                     Var h_prev) {
  const auto& vx = tape.value(x);
  const auto& vh = tape.value(h_prev);
  if (vx.cols() != p.input_dim || vh.cols() != p.hidden_dim ||
      vx.rows() != vh.rows()) {
    throw ConfigError("cell step: expected x of width " +
                      std::to_string(p.input_dim) + " and state of width " +
                      std::to_string(p.hidden_dim));
  }
}
}  // namespace detail

// Canonical LSTM with forget gate and no peepholes, on a batch (one row per
// sample):
//   i = s(x Wi + h Ui + bi)   f = s(x Wf + h Uf + bf)
//   g = tanh(x Wg + h Ug + bg)   o = s(x Wo + h Uo + bo)
//   c' = f * c + i * g        h' = o * tanh(c')
template <typename T>
LstmState lstm_cell_step(Tape<T>& tape, const CellParams<T>& p,
                         const CellVars& w, Var x, Var h_prev, Var c_prev) {
  if (p.kind != CellKind::kLstm) throw ConfigError("lstm step on a GRU cell");
  detail::check_step_dims(p, tape, x, h_prev);
  if (tape.value(c_prev).rows() != tape.value(h_prev).rows() ||
      tape.value(c_prev).cols() != p.hidden_dim) {
    throw ConfigError("lstm step: cell state shape mismatch");
  }
  const Eigen::Index hd = p.hidden_dim;
  const Var pre = tape.add(tape.add(tape.matmul(x, w.input_weights),
                                    tape.matmul(h_prev, w.recurrent_weights)),
                           w.biases);
  const Var i = tape.sigmoid(tape.cols(pre, 0, hd));
  const Var f = tape.sigmoid(tape.cols(pre, hd, hd));
  const Var g = tape.tanh(tape.cols(pre, 2 * hd, hd));
  const Var o = tape.sigmoid(tape.cols(pre, 3 * hd, hd));
  const Var c = tape.add(tape.mul(f, c_prev), tape.mul(i, g));
  const Var h = tape.mul(o, tape.tanh(c));
  return {h, c};
}

// GRU with the reset gate applied to h_prev inside the candidate:
//   z = s(x Wz + h Uz + bz)   r = s(x Wr + h Ur + br)
//   n = tanh(x Wn + (r * h) Un + bn)
//   h' = z * h + (1 - z) * n
// so a saturated update gate (z -> 1) carries h_prev through unchanged.
template <typename T>
Var gru_cell_step(Tape<T>& tape, const CellParams<T>& p, const CellVars& w,
                  Var x, Var h_prev) {
  if (p.kind != CellKind::kGru) throw ConfigError("gru step on an LSTM cell");
  detail::check_step_dims(p, tape, x, h_prev);
  const Eigen::Index hd = p.hidden_dim;
  const Var px = tape.add(tape.matmul(x, w.input_weights), w.biases);
  const Var ph = tape.matmul(h_prev, tape.cols(w.recurrent_weights, 0, 2 * hd));
  const Var z = tape.sigmoid(tape.add(tape.cols(px, 0, hd), tape.cols(ph, 0, hd)));
  const Var r =
      tape.sigmoid(tape.add(tape.cols(px, hd, hd), tape.cols(ph, hd, hd)));
  const Var n = tape.tanh(tape.add(
      tape.cols(px, 2 * hd, hd),
      tape.matmul(tape.mul(r, h_prev),
                  tape.cols(w.recurrent_weights, 2 * hd, hd))));
  return tape.add(tape.mul(z, h_prev), tape.mul(tape.one_minus(z), n));
}

// Single-sample conveniences on plain vectors.
template <typename T>
std::pair<Vector<T>, Vector<T>> lstm_cell_step(
    CellParams<T>& p, const std::type_identity_t<Vector<T>>& x,
    const std::type_identity_t<Vector<T>>& h_prev,
    const std::type_identity_t<Vector<T>>& c_prev) {
  if (x.size() != p.input_dim || h_prev.size() != p.hidden_dim ||
      c_prev.size() != p.hidden_dim) {
    throw ConfigError("lstm step: vector dimensions do not match the cell");
  }
  Tape<T> tape;
  const CellVars w = bind(tape, p);
  const LstmState s = lstm_cell_step(
      tape, p, w, tape.constant(x.transpose()), tape.constant(h_prev.transpose()),
      tape.constant(c_prev.transpose()));
  return {tape.value(s.h).row(0).transpose(), tape.value(s.c).row(0).transpose()};
}

template <typename T>
Vector<T> gru_cell_step(CellParams<T>& p,
                        const std::type_identity_t<Vector<T>>& x,
                        const std::type_identity_t<Vector<T>>& h_prev) {
  if (x.size() != p.input_dim || h_prev.size() != p.hidden_dim) {
    throw ConfigError("gru step: vector dimensions do not match the cell");
  }
  Tape<T> tape;
  const CellVars w = bind(tape, p);
  const Var h = gru_cell_step(tape, p, w, tape.constant(x.transpose()),
                              tape.constant(h_prev.transpose()));
  return tape.value(h).row(0).transpose();
}

}  // namespace sigbench::numeric
