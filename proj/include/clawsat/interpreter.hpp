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

#ifndef CLAWSAT_INTERPRETER_HPP
#define CLAWSAT_INTERPRETER_HPP

#include <chrono>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace clawsat {

struct Value;
using List = std::vector<Value>;

struct Callable {
  std::string name;
  bool builtin = false;
  friend bool operator==(const Callable&, const Callable&) = default;
};

struct NoneType {
  friend bool operator==(NoneType, NoneType) { return true; }
};

/// A runtime value of the code subset. Lists have reference semantics.
struct Value {
  std::variant<NoneType, bool, std::int64_t, std::string, std::shared_ptr<List>, Callable> v;

  Value() = default;
  Value(NoneType n) : v(n) {}
  Value(bool b) : v(b) {}
  Value(std::int64_t i) : v(i) {}
  Value(int i) : v(static_cast<std::int64_t>(i)) {}
  Value(std::string s) : v(std::move(s)) {}
  Value(const char* s) : v(std::string(s)) {}
  Value(List l) : v(std::make_shared<List>(std::move(l))) {}
  Value(Callable c) : v(std::move(c)) {}
};

/// Python-style repr.
std::string repr(const Value& value);

struct ExecLimits {
  std::uint64_t max_steps = 2'000'000;
  std::chrono::milliseconds wall{1000};
  int max_depth = 200;
};

/// Observable behaviour of one call.
struct Outcome {
  bool ok = true;
  std::string error;   // exception kind when !ok
  std::string result;  // repr of the return value when ok
  /// (token offset of the `print` call, printed line)
  std::vector<std::pair<std::size_t, std::string>> prints;
};

/// Executes the module given by `tokens` (top-level statements run first),
/// then calls its first function with `args`. Throws MalformedSource when the
/// tokens do not parse and ExecutionTimeout when the limits are exceeded.
Outcome run_program(std::span<const std::string> tokens, const std::vector<Value>& args,
                    const ExecLimits& limits = {});

}  // namespace clawsat

#endif  // CLAWSAT_INTERPRETER_HPP
