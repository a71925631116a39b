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

#ifndef CLAWSAT_TOY_HPP
#define CLAWSAT_TOY_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "clawsat/corpus.hpp"
#include "clawsat/semantics.hpp"

namespace clawsat {

/// Names of the toy templates, in generator order.
const std::vector<std::string>& toy_template_names();

/// n single-function programs drawn from the toy templates. Program i depends
/// only on (seed, i), so a longer corpus extends a shorter one.
std::vector<Program> generate_toy_corpus(std::size_t n, std::uint64_t seed);

/// The same programs as generate_toy_corpus, each with fixed inputs for its
/// function.
std::vector<Fixture> toy_fixtures(std::size_t n, std::uint64_t seed);

}  // namespace clawsat

#endif  // CLAWSAT_TOY_HPP
