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
#include <cstdint>
#include <numbers>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sigbench/errors.hpp"
#include "sigbench/random.hpp"

namespace sigbench {

// One point of the attribute-value world; both attributes in [0, n_v).
struct AttValInput {
  int a1 = 0;
  int a2 = 0;
  friend bool operator==(const AttValInput&, const AttValInput&) = default;
};

// A point of the closed unit disk, x^2 + y^2 <= 1.
struct DiskPoint {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const DiskPoint&, const DiskPoint&) = default;
};

struct WorldConfig {
  int n_values = 31;
  double test_fraction = 0.2;
  int n_train = 1000;
  int n_test = 1000;
  std::uint64_t seed = 0;

  void validate() const {
    if (n_values < 2) throw ConfigError("n_values must be at least 2");
    if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
      throw ConfigError("test_fraction must lie strictly between 0 and 1");
    }
    if (n_train < 1 || n_test < 1) {
      throw ConfigError("n_train and n_test must be positive");
    }
  }
};

// All n_v^2 attribute pairs in lexicographic order.
inline std::vector<AttValInput> enumerate_attval(int n_values) {
  if (n_values < 2) {
    throw ConfigError("enumerate_attval: n_values must be at least 2, got " +
                      std::to_string(n_values));
  }
  std::vector<AttValInput> out;
  out.reserve(static_cast<std::size_t>(n_values) * n_values);
  for (int a1 = 0; a1 < n_values; ++a1) {
    for (int a2 = 0; a2 < n_values; ++a2) out.push_back({a1, a2});
  }
  return out;
}

template <typename Item>
struct Split {
  std::vector<Item> train;
  std::vector<Item> test;
};

// Seeded random partition with |test| = round(test_fraction * |items|),
// kept inside [1, |items| - 1] so neither side is empty. Both halves keep
// the permuted order.
template <typename Item>
Split<Item> split_train_test(std::span<const Item> items, double test_fraction,
                             std::uint64_t seed) {
  if (items.empty()) throw InputError("split_train_test: empty input");
  if (items.size() < 2) {
    throw InputError("split_train_test: need at least 2 items");
  }
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw ConfigError("split_train_test: test_fraction must be in (0, 1)");
  }
  const auto n = items.size();
  auto n_test = static_cast<std::size_t>(
      std::llround(test_fraction * static_cast<double>(n)));
  n_test = std::clamp<std::size_t>(n_test, 1, n - 1);

  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  Rng rng(seed);
  rng.shuffle(std::span(order));

  Split<Item> split;
  split.test.reserve(n_test);
  split.train.reserve(n - n_test);
  for (std::size_t k = 0; k < n; ++k) {
    (k < n_test ? split.test : split.train).push_back(items[order[k]]);
  }
  return split;
}

template <typename Item>
Split<Item> split_train_test(const std::vector<Item>& items,
                             double test_fraction, std::uint64_t seed) {
  return split_train_test(std::span<const Item>(items), test_fraction, seed);
}

// Uniform over the disk area: angle ~ U[0, 2pi), radius = sqrt(U[0, 1)).
inline std::vector<DiskPoint> sample_unit_disk(int n, std::uint64_t seed) {
  if (n < 1) throw ConfigError("sample_unit_disk: n must be positive");
  Rng rng(seed);
  std::vector<DiskPoint> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    const double angle = 2.0 * std::numbers::pi * rng.uniform();
    const double radius = std::sqrt(rng.uniform());
    DiskPoint p{radius * std::cos(angle), radius * std::sin(angle)};
    // Rounding in cos/sin can push |p| a few ulps past 1.
    while (p.x * p.x + p.y * p.y > 1.0) {
      p.x = std::nextafter(p.x, 0.0);
      p.y = std::nextafter(p.y, 0.0);
    }
    out.push_back(p);
  }
  return out;
}

inline void write_dataset(std::ostream& os, std::span<const AttValInput> items) {
  for (const auto& i : items) os << i.a1 << ',' << i.a2 << '\n';
}

inline void write_dataset(std::ostream& os, std::span<const DiskPoint> items) {
  const auto old = os.precision(17);
  for (const auto& p : items) os << p.x << ',' << p.y << '\n';
  os.precision(old);
}

}  // namespace sigbench
