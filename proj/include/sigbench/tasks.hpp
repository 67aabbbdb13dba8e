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

#include <array>
#include <cstdint>
#include <string>
#include <string_view>

#include "sigbench/errors.hpp"
#include "sigbench/languages.hpp"
#include "sigbench/random.hpp"
#include "sigbench/worlds.hpp"

namespace sigbench {

// Two class ids in [0, n_v).
struct DiscreteTarget {
  int o1 = 0;
  int o2 = 0;
  friend bool operator==(const DiscreteTarget&, const DiscreteTarget&) = default;
};

struct ContinuousTarget {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const ContinuousTarget&,
                         const ContinuousTarget&) = default;
};

enum class TaskKind { kIdentity, kLinear, kEntangled, kCoordinates };

inline std::string_view to_string(TaskKind kind) {
  switch (kind) {
    case TaskKind::kIdentity: return "identity";
    case TaskKind::kLinear: return "linear";
    case TaskKind::kEntangled: return "entangled";
    case TaskKind::kCoordinates: return "coordinates";
  }
  return "?";
}

inline TaskKind parse_task_kind(std::string_view name) {
  if (name == "identity") return TaskKind::kIdentity;
  if (name == "linear") return TaskKind::kLinear;
  if (name == "entangled") return TaskKind::kEntangled;
  if (name == "coordinates") return TaskKind::kCoordinates;
  throw ConfigError("unknown task '" + std::string(name) + "'");
}

constexpr bool is_prime(int n) {
  if (n < 2) return false;
  for (int d = 2; d * d <= n; ++d) {
    if (n % d == 0) return false;
  }
  return true;
}

// o = A i + b (mod n_v).
struct LinearTaskParams {
  std::array<std::array<int, 2>, 2> a{};
  std::array<int, 2> b{};

  friend bool operator==(const LinearTaskParams&,
                         const LinearTaskParams&) = default;

  int determinant(int n_values) const {
    return modulo(static_cast<long long>(a[0][0]) * a[1][1] -
                      static_cast<long long>(a[0][1]) * a[1][0],
                  n_values);
  }

  // Invertible mod n_v, and distinct from both the identity map and the
  // entangled map [[1, -1], [1, 1]] so the task differs from the other two.
  bool acceptable(int n_values) const {
    if (determinant(n_values) == 0) return false;
    const auto m = [n_values](int v) { return modulo(v, n_values); };
    const bool identity = m(a[0][0]) == 1 && m(a[0][1]) == 0 &&
                          m(a[1][0]) == 0 && m(a[1][1]) == 1;
    const bool entangled = m(a[0][0]) == 1 && m(a[0][1]) == m(-1) &&
                           m(a[1][0]) == 1 && m(a[1][1]) == 1;
    return !identity && !entangled;
  }

  std::string to_string() const {
    return "A=[[" + std::to_string(a[0][0]) + "," + std::to_string(a[0][1]) +
           "],[" + std::to_string(a[1][0]) + "," + std::to_string(a[1][1]) +
           "]] b=[" + std::to_string(b[0]) + "," + std::to_string(b[1]) + "]";
  }
};

// Rejection-samples A and b uniformly over [0, n_v) until A is acceptable.
// n_v must be prime so that a non-zero determinant means invertible.
inline LinearTaskParams gen_linear_params(int n_values, std::uint64_t seed) {
  if (!is_prime(n_values)) {
    throw ConfigError("task-linear requires a prime n_values, got " +
                      std::to_string(n_values));
  }
  Rng rng(seed);
  const auto draw = [&rng, n_values] {
    return static_cast<int>(rng.below(static_cast<std::uint64_t>(n_values)));
  };
  LinearTaskParams p;
  do {
    p.a = {{{draw(), draw()}, {draw(), draw()}}};
    p.b = {draw(), draw()};
  } while (!p.acceptable(n_values));
  return p;
}

inline DiscreteTarget target_identity(const AttValInput& i) {
  return {i.a1, i.a2};
}

inline DiscreteTarget target_linear(const AttValInput& i,
                                    const LinearTaskParams& p, int n_values) {
  const auto row = [&](int r) {
    const auto& ar = p.a[static_cast<std::size_t>(r)];
    return modulo(static_cast<long long>(ar[0]) * i.a1 +
                      static_cast<long long>(ar[1]) * i.a2 +
                      p.b[static_cast<std::size_t>(r)],
                  n_values);
  };
  return {row(0), row(1)};
}

// Same transform as the entangled language.
inline DiscreteTarget target_entangled(const AttValInput& i, int n_values) {
  const Message m = encode_entangled(i, n_values);
  return {m.s1, m.s2};
}

// Always the original, unrotated point.
inline ContinuousTarget target_coordinates(const DiskPoint& p) {
  return {p.x, p.y};
}

// A discrete task bound to its parameters.
struct AttvalTask {
  TaskKind kind = TaskKind::kIdentity;
  int n_values = 31;
  LinearTaskParams linear;

  DiscreteTarget operator()(const AttValInput& i) const {
    switch (kind) {
      case TaskKind::kIdentity: return target_identity(i);
      case TaskKind::kLinear: return target_linear(i, linear, n_values);
      case TaskKind::kEntangled: return target_entangled(i, n_values);
      case TaskKind::kCoordinates: break;
    }
    throw UsageError("coordinates task has no discrete targets");
  }
};

}  // namespace sigbench
