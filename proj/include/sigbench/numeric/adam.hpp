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

#include "sigbench/numeric/parameter.hpp"

namespace sigbench::numeric {

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// One bias-corrected Adam update:
//   m <- b1 m + (1 - b1) g,   v <- b2 v + (1 - b2) g^2
//   w <- w - lr * (m / (1 - b1^t)) / (sqrt(v / (1 - b2^t)) + eps)
template <typename T>
void adam_step(Parameter<T>& p, const AdamConfig& cfg) {
  p.step_count += 1;
  const T b1 = static_cast<T>(cfg.beta1);
  const T b2 = static_cast<T>(cfg.beta2);
  const T t = static_cast<T>(p.step_count);
  const T correction1 = T(1) - std::pow(b1, t);
  const T correction2 = T(1) - std::pow(b2, t);
  const T lr = static_cast<T>(cfg.lr);
  const T eps = static_cast<T>(cfg.eps);

  auto g = p.gradient.array();
  p.adam_m.array() = b1 * p.adam_m.array() + (T(1) - b1) * g;
  p.adam_v.array() = b2 * p.adam_v.array() + (T(1) - b2) * g.square();
  p.values.array() -= lr * (p.adam_m.array() / correction1) /
                      ((p.adam_v.array() / correction2).sqrt() + eps);
}

template <typename T>
void adam_step(Parameter<T>& p, double lr) {
  adam_step(p, AdamConfig{.lr = lr});
}

}  // namespace sigbench::numeric
