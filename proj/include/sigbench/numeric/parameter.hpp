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

#include <cstdint>
#include <string>
#include <utility>

#include <Eigen/Core>

namespace sigbench::numeric {

template <typename T>
using Matrix = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;

template <typename T>
using Vector = Eigen::Matrix<T, Eigen::Dynamic, 1>;

// A trainable array (rank <= 2; vectors are stored as 1 x n rows) together
// with its gradient and Adam moment accumulators, which always share its
// shape.
template <typename T>
struct Parameter {
  std::string name;
  Matrix<T> values;
  Matrix<T> gradient;
  Matrix<T> adam_m;
  Matrix<T> adam_v;
  std::int64_t step_count = 0;

  Parameter() = default;
  Parameter(std::string param_name, Matrix<T> init)
      : name(std::move(param_name)), values(std::move(init)) {
    gradient = Matrix<T>::Zero(values.rows(), values.cols());
    adam_m = gradient;
    adam_v = gradient;
  }

  Eigen::Index rows() const { return values.rows(); }
  Eigen::Index cols() const { return values.cols(); }
  Eigen::Index size() const { return values.size(); }

  void zero_grad() { gradient.setZero(); }
};

}  // namespace sigbench::numeric
