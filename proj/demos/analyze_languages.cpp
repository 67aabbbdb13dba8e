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

// Prints the compositionality report of every built-in language.

#include <iostream>

#include "sigbench/languages.hpp"

int main() {
  using sigbench::LanguageKind;
  const sigbench::LanguageSpec specs[] = {
      {LanguageKind::kIdentity, 31},
      {LanguageKind::kEntangled, 31},
      {LanguageKind::kCoordinate, 100},
      {LanguageKind::kRotated, 100},
  };
  for (const auto& spec : specs) {
    sigbench::write_report(std::cout, sigbench::analyze_language(spec));
    std::cout << '\n';
  }
}
