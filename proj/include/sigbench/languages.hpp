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
#include <iomanip>
#include <map>
#include <numbers>
#include <optional>
#include <ostream>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sigbench/errors.hpp"
#include "sigbench/worlds.hpp"

namespace sigbench {

// Two-symbol utterance; both symbols in [0, n_v).
struct Message {
  int s1 = 0;
  int s2 = 0;
  friend bool operator==(const Message&, const Message&) = default;
  friend auto operator<=>(const Message&, const Message&) = default;
};

enum class LanguageKind { kIdentity, kEntangled, kCoordinate, kRotated };

inline std::string_view to_string(LanguageKind kind) {
  switch (kind) {
    case LanguageKind::kIdentity: return "identity";
    case LanguageKind::kEntangled: return "entangled";
    case LanguageKind::kCoordinate: return "coordinate";
    case LanguageKind::kRotated: return "rotated";
  }
  return "?";
}

inline LanguageKind parse_language_kind(std::string_view name) {
  if (name == "identity") return LanguageKind::kIdentity;
  if (name == "entangled") return LanguageKind::kEntangled;
  if (name == "coordinate") return LanguageKind::kCoordinate;
  if (name == "rotated") return LanguageKind::kRotated;
  throw ConfigError("unknown language '" + std::string(name) + "'");
}

inline bool is_discrete(LanguageKind kind) {
  return kind == LanguageKind::kIdentity || kind == LanguageKind::kEntangled;
}

struct LanguageSpec {
  LanguageKind kind = LanguageKind::kIdentity;
  int n_values = 31;
  double rotation_angle = std::numbers::pi / 4;

  void validate() const {
    if (n_values < 2) throw ConfigError("language n_values must be >= 2");
    if (kind == LanguageKind::kRotated &&
        !(rotation_angle > 0.0 && rotation_angle < std::numbers::pi / 2)) {
      throw ConfigError("rotation angle must lie in (0, pi/2)");
    }
  }
};

// Least non-negative residue.
constexpr int modulo(long long a, int n) {
  const long long r = a % n;
  return static_cast<int>(r < 0 ? r + n : r);
}

inline Message encode_identity(const AttValInput& i) { return {i.a1, i.a2}; }

// m_j = (i_1 + (-1)^j i_2) mod n_v with j = 1, 2: the first symbol carries
// the difference, the second the sum.
inline Message encode_entangled(const AttValInput& i, int n_values) {
  return {modulo(static_cast<long long>(i.a1) - i.a2, n_values),
          modulo(static_cast<long long>(i.a1) + i.a2, n_values)};
}

// Bucket of v on an n_v-cell grid over [-1, 1]; buckets are half-open and
// v = 1 is clamped into the top one.
inline int discretize(double v, int n_values) {
  if (!(v >= -1.0 && v <= 1.0)) {
    throw InputError("discretize: " + std::to_string(v) +
                     " outside [-1, 1]");
  }
  const int bucket = static_cast<int>(std::floor((v + 1.0) / 2.0 * n_values));
  return std::min(bucket, n_values - 1);
}

inline Message encode_coordinate(const DiskPoint& p, int n_values) {
  return {discretize(p.x, n_values), discretize(p.y, n_values)};
}

// Counterclockwise: (x, y) -> (x cos t - y sin t, x sin t + y cos t).
inline DiskPoint rotate(const DiskPoint& p, double angle) {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  return {p.x * c - p.y * s, p.x * s + p.y * c};
}

inline Message encode_rotated(const DiskPoint& p, int n_values,
                              double angle = std::numbers::pi / 4) {
  DiskPoint q = rotate(p, angle);
  // Rotation preserves the norm up to rounding; keep q inside [-1, 1]^2.
  q.x = std::clamp(q.x, -1.0, 1.0);
  q.y = std::clamp(q.y, -1.0, 1.0);
  return encode_coordinate(q, n_values);
}

inline Message encode(const LanguageSpec& lang, const AttValInput& i) {
  switch (lang.kind) {
    case LanguageKind::kIdentity: return encode_identity(i);
    case LanguageKind::kEntangled: return encode_entangled(i, lang.n_values);
    default: throw UsageError("continuous language applied to an attval input");
  }
}

inline Message encode(const LanguageSpec& lang, const DiskPoint& p) {
  switch (lang.kind) {
    case LanguageKind::kCoordinate: return encode_coordinate(p, lang.n_values);
    case LanguageKind::kRotated:
      return encode_rotated(p, lang.n_values, lang.rotation_angle);
    default: throw UsageError("attval language applied to a disk point");
  }
}

// ---------------------------------------------------------------------------
// Compositionality analysis. Atoms are (position, symbol) pairs; a world is
// analysed as a table of (attribute pair, message) rows with every row
// equally likely.

struct EncodedInput {
  std::array<int, 2> attributes{};
  Message message;
};

using EncodingTable = std::vector<EncodedInput>;

inline EncodingTable tabulate(const LanguageSpec& lang,
                              std::span<const AttValInput> world) {
  EncodingTable table;
  table.reserve(world.size());
  for (const auto& i : world) table.push_back({{i.a1, i.a2}, encode(lang, i)});
  return table;
}

// Cells of the n_v x n_v grid over [-1, 1]^2 whose centres lie in the unit
// disk; the attributes are the cell's column and row, the input its centre.
inline EncodingTable tabulate_grid(const LanguageSpec& lang, bool disk_only) {
  const int n = lang.n_values;
  EncodingTable table;
  for (int ix = 0; ix < n; ++ix) {
    for (int iy = 0; iy < n; ++iy) {
      const DiskPoint centre{-1.0 + (ix + 0.5) * 2.0 / n,
                             -1.0 + (iy + 0.5) * 2.0 / n};
      const bool inside = centre.x * centre.x + centre.y * centre.y <= 1.0;
      if (disk_only && !inside) continue;
      table.push_back({{ix, iy}, encode(lang, centre)});
    }
  }
  return table;
}

inline int symbol_at(const Message& m, int position) {
  return position == 0 ? m.s1 : m.s2;
}

using MiMatrix = std::array<std::array<double, 2>, 2>;

// mi[j][a] = I(m_j ; i_a) in bits under the uniform distribution over rows.
inline MiMatrix mi_matrix(const EncodingTable& table) {
  if (table.empty()) throw UsageError("mi_matrix: world is empty");
  const double n = static_cast<double>(table.size());
  MiMatrix mi{};
  for (int j = 0; j < 2; ++j) {
    for (int a = 0; a < 2; ++a) {
      std::map<std::pair<int, int>, int> joint;
      std::map<int, int> sym;
      std::map<int, int> attr;
      for (const auto& row : table) {
        const int s = symbol_at(row.message, j);
        const int v = row.attributes[static_cast<std::size_t>(a)];
        ++joint[{s, v}];
        ++sym[s];
        ++attr[v];
      }
      double bits = 0.0;
      for (const auto& [key, count] : joint) {
        const double p = count / n;
        const double ps = sym[key.first] / n;
        const double pa = attr[key.second] / n;
        bits += p * std::log2(p / (ps * pa));
      }
      // Exact independence can still leave -1e-16 of rounding.
      mi[static_cast<std::size_t>(j)][static_cast<std::size_t>(a)] =
          std::max(0.0, bits);
    }
  }
  return mi;
}

// witness[j] is the attribute that message position j refers to.
using Witness = std::array<int, 2>;

struct CompositionalityVerdict {
  bool compositional = false;
  std::optional<Witness> witness;
};

// True iff some assignment position -> attribute (a bijection on {1, 2})
// makes every m_j a function of i_a(j) alone that also determines i_a(j)
// uniquely. Checked by brute force over both assignments.
inline CompositionalityVerdict is_naively_compositional(
    const EncodingTable& table) {
  if (table.empty()) throw UsageError("compositionality check: empty world");
  auto one_to_one = [&table](int position, int attribute) {
    std::map<int, int> symbol_of_value;
    std::map<int, int> value_of_symbol;
    for (const auto& row : table) {
      const int s = symbol_at(row.message, position);
      const int v = row.attributes[static_cast<std::size_t>(attribute)];
      auto [it, fresh] = symbol_of_value.emplace(v, s);
      if (!fresh && it->second != s) return false;
      auto [jt, fresh2] = value_of_symbol.emplace(s, v);
      if (!fresh2 && jt->second != v) return false;
    }
    return true;
  };
  for (const Witness& w : {Witness{0, 1}, Witness{1, 0}}) {
    if (one_to_one(0, w[0]) && one_to_one(1, w[1])) return {true, w};
  }
  return {false, std::nullopt};
}

// Whether the language gives every input of the table its own message.
inline bool is_injective(const EncodingTable& table) {
  std::set<Message> seen;
  for (const auto& row : table) {
    if (!seen.insert(row.message).second) return false;
  }
  return true;
}

struct LanguageReport {
  LanguageSpec language;
  std::size_t world_size = 0;
  MiMatrix mi{};
  CompositionalityVerdict verdict;
  bool injective = true;
};

// Attval languages are analysed over the full n_v x n_v world, continuous
// ones over the grid cells inside the disk.
inline LanguageReport analyze_language(const LanguageSpec& lang) {
  lang.validate();
  EncodingTable table;
  if (is_discrete(lang.kind)) {
    const auto world = enumerate_attval(lang.n_values);
    table = tabulate(lang, world);
  } else {
    table = tabulate_grid(lang, /*disk_only=*/true);
  }
  LanguageReport r;
  r.language = lang;
  r.world_size = table.size();
  r.mi = mi_matrix(table);
  r.verdict = is_naively_compositional(table);
  r.injective = is_injective(table);
  return r;
}

inline void write_report(std::ostream& os, const LanguageReport& r) {
  const auto flags = os.flags();
  const auto prec = os.precision();
  os << "language: " << to_string(r.language.kind)
     << "  n_values: " << r.language.n_values
     << "  inputs: " << r.world_size << '\n';
  os << "mutual information (bits), rows = message position, "
        "cols = attribute\n";
  os << std::fixed << std::setprecision(4);
  os << "          attr1     attr2\n";
  for (std::size_t j = 0; j < 2; ++j) {
    os << "  pos" << j + 1 << "  " << std::setw(8) << r.mi[j][0] << "  "
       << std::setw(8) << r.mi[j][1] << '\n';
  }
  os << "verdict: "
     << (r.verdict.compositional ? "compositional" : "not compositional")
     << '\n';
  if (r.verdict.witness) {
    const Witness& w = *r.verdict.witness;
    os << "witness: pos1->attr" << w[0] + 1 << ", pos2->attr" << w[1] + 1
       << '\n';
  } else {
    os << "witness: none\n";
  }
  if (!r.injective) {
    os << "warning: language is not a bijection; distinct inputs share "
          "messages\n";
  }
  os.flags(flags);
  os.precision(prec);
}

}  // namespace sigbench
