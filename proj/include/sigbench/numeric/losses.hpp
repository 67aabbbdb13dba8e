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
#include <cmath>
#include <span>
#include <string>

#include "sigbench/errors.hpp"

namespace sigbench::numeric {

// -log softmax(logits)[target], evaluated with a max shift.
template <typename T>
T softmax_nll(std::span<const T> logits, int target) {
  if (logits.empty()) throw InputError("softmax_nll: empty logits");
  if (target < 0 || static_cast<std::size_t>(target) >= logits.size()) {
    throw InputError("softmax_nll: target " + std::to_string(target) +
                     " outside [0, " + std::to_string(logits.size()) + ")");
  }
  const T shift = *std::max_element(logits.begin(), logits.end());
  T total = 0;
  for (T z : logits) total += std::exp(z - shift);
  return std::log(total) + shift - logits[static_cast<std::size_t>(target)];
}

// Mean of squared componentwise differences.
template <typename T>
T mse(std::span<const T> pred, std::span<const T> target) {
  if (pred.size() != target.size()) {
    throw InputError("mse: length mismatch (" + std::to_string(pred.size()) +
                     " vs " + std::to_string(target.size()) + ")");
  }
  if (pred.empty()) return T(0);
  T acc = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const T d = pred[i] - target[i];
    acc += d * d;
  }
  return acc / static_cast<T>(pred.size());
}

}  // namespace sigbench::numeric
