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

#ifndef CLAWSAT_SEMANTICS_HPP
#define CLAWSAT_SEMANTICS_HPP

#include <vector>

#include "clawsat/corpus.hpp"
#include "clawsat/interpreter.hpp"
#include "clawsat/transform.hpp"

namespace clawsat {

using Inputs = std::vector<Value>;

/// A program with fixed inputs for its first function.
struct Fixture {
  Program program;
  std::vector<Inputs> inputs;
};

/// True iff `p` and `v` agree on every input: same return value or error
/// kind, and the same printed lines once prints inside `v.inserted` are
/// dropped. Throws ExecutionTimeout when a run exceeds `limits`.
bool check_semantics(const Program& p, const View& v, const std::vector<Inputs>& inputs,
                     const ExecLimits& limits = {});

}  // namespace clawsat

#endif  // CLAWSAT_SEMANTICS_HPP
