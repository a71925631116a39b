// Copyright 2026 The clawsat Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef CLAWSAT_SITE_HPP
#define CLAWSAT_SITE_HPP

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace clawsat {

enum class SiteKind {
  ReplaceLocalVar,
  ReplaceParam,
  ReplaceBoolLiteral,
  InsertPrint,
  InsertDeadCode,
};

std::string_view to_string(SiteKind kind);
/// Throws Error for an unknown name.
SiteKind site_kind_from_string(std::string_view name);

inline bool is_replace(SiteKind k) {
  return k == SiteKind::ReplaceLocalVar || k == SiteKind::ReplaceParam ||
         k == SiteKind::ReplaceBoolLiteral;
}
inline bool is_insert(SiteKind k) { return !is_replace(k); }

/// One transformable location of a program.
///
/// Replace kinds list every occurrence of the bound identifier in its scope
/// (a boolean literal site has exactly one). Insert kinds hold a single
/// boundary offset: the index a new statement is spliced in front of, or
/// tokens.size() for the end of the program.
struct Site {
  SiteKind kind = SiteKind::ReplaceLocalVar;
  std::vector<std::size_t> positions;
  std::string original;  // replace kinds only

  friend bool operator==(const Site&, const Site&) = default;
};

/// Orders by kind, then first position.
bool site_less(const Site& a, const Site& b);

}  // namespace clawsat

#endif  // CLAWSAT_SITE_HPP
