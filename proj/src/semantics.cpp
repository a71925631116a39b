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

#include "clawsat/semantics.hpp"

#include <string>
#include <utility>

#include "clawsat/error.hpp"

namespace clawsat {

namespace {

std::vector<std::string> visible_prints(const Outcome& o,
                                        const std::vector<std::pair<std::size_t, std::size_t>>& hidden) {
  std::vector<std::string> out;
  for (const auto& [pos, line] : o.prints) {
    bool inserted = false;
    for (const auto& [b, e] : hidden) inserted = inserted || (pos >= b && pos < e);
    if (!inserted) out.push_back(line);
  }
  return out;
}

}  // namespace

bool check_semantics(const Program& p, const View& v, const std::vector<Inputs>& inputs,
                     const ExecLimits& limits) {
  for (const auto& args : inputs) {
    const Outcome a = run_program(p.tokens, args, limits);
    Outcome b;
    try {
      b = run_program(v.tokens, args, limits);
    } catch (const MalformedSource&) {
      return false;
    }
    if (a.ok != b.ok || a.error != b.error || a.result != b.result) return false;
    if (visible_prints(a, {}) != visible_prints(b, v.inserted)) return false;
  }
  return true;
}

}  // namespace clawsat
