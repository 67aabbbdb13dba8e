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
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "sigbench/numeric/parameter.hpp"
#include "sigbench/numeric/tape.hpp"
#include "sigbench/random.hpp"

namespace sigbench::numeric {

struct GradCheckOptions {
  double eps = 1e-5;
  // Number of (parameter, entry) coordinates probed; 0 probes every entry.
  std::size_t coordinates = 0;
  std::uint64_t seed = 0;
};

// Compares reverse-mode gradients of a scalar forward closure against
// central differences. For each parameter, over its probed entries a and n,
//   |a - n|_2 / max(|a|_2, |n|_2, 1e-12)
// and the worst parameter is returned. Measuring per tensor rather than per
// entry keeps components far below the difference quotient's round-off
// (~1e-16 * loss / eps) from dominating. The closure must be deterministic
// and record its graph on the tape it is given. Parameter gradients are left
// zeroed.
template <typename T>
T finite_difference_check(const std::function<Var(Tape<T>&)>& forward,
                          std::span<Parameter<T>* const> params,
                          const GradCheckOptions& options = {}) {
  for (Parameter<T>* p : params) p->zero_grad();
  {
    Tape<T> tape;
    tape.backward(forward(tape));
  }
  std::vector<Matrix<T>> analytic;
  analytic.reserve(params.size());
  for (Parameter<T>* p : params) {
    analytic.push_back(p->gradient);
    p->zero_grad();
  }

  std::vector<std::pair<std::size_t, Eigen::Index>> coords;
  for (std::size_t k = 0; k < params.size(); ++k) {
    for (Eigen::Index i = 0; i < params[k]->size(); ++i) coords.emplace_back(k, i);
  }
  if (options.coordinates != 0 && options.coordinates < coords.size()) {
    Rng rng(options.seed);
    rng.shuffle(std::span(coords));
    coords.resize(options.coordinates);
  }

  auto evaluate = [&forward]() {
    Tape<T> tape;
    return tape.scalar(forward(tape));
  };

  // Per parameter: sum of squared differences, |a|^2, |n|^2.
  std::vector<std::array<T, 3>> sums(params.size(), {T(0), T(0), T(0)});
  const T eps = static_cast<T>(options.eps);
  for (const auto& [k, i] : coords) {
    T& entry = params[k]->values.data()[i];
    const T saved = entry;
    entry = saved + eps;
    const T up = evaluate();
    entry = saved - eps;
    const T down = evaluate();
    entry = saved;
    const T numeric = (up - down) / (T(2) * eps);
    const T exact = analytic[k].data()[i];
    sums[k][0] += (exact - numeric) * (exact - numeric);
    sums[k][1] += exact * exact;
    sums[k][2] += numeric * numeric;
  }
  T worst = 0;
  for (const auto& [diff, a, n] : sums) {
    const T denom = std::max({std::sqrt(a), std::sqrt(n), T(1e-12)});
    worst = std::max(worst, std::sqrt(diff) / denom);
  }
  return worst;
}

}  // namespace sigbench::numeric
