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

#ifndef CLAWSAT_TOKENIZER_HPP
#define CLAWSAT_TOKENIZER_HPP

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace clawsat {

/// Splits source in the supported Python-like subset into tokens. Whitespace
/// and comments are dropped; indentation is kept as layout tokens
/// (<newline>, <indent>, <dedent>) between lines, never after the last line.
/// Identifiers, literals, keywords and operators are single tokens.
///
/// Throws MalformedSource on empty input, an unterminated string, a string
/// containing whitespace, an illegal character, or inconsistent dedent.
std::vector<std::string> tokenize(std::string_view source);

/// Renders tokens back to source with 4-space indentation. For every token
/// stream produced by tokenize(), tokenize(detokenize(t)) == t.
std::string detokenize(std::span<const std::string> tokens);

/// Whitespace split, used for natural-language summaries.
std::vector<std::string> split_words(std::string_view text);

}  // namespace clawsat

#endif  // CLAWSAT_TOKENIZER_HPP
