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

#ifndef CLAWSAT_TOKEN_HPP
#define CLAWSAT_TOKEN_HPP

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace clawsat {

using TokenId = std::int32_t;

/// A token's text together with its id in some Vocabulary.
struct Token {
  std::string text;
  TokenId id = 0;
  friend bool operator==(const Token&, const Token&) = default;
};

namespace tok {
inline constexpr std::string_view kPad = "<pad>";
inline constexpr std::string_view kUnk = "<unk>";
inline constexpr std::string_view kBos = "<bos>";
inline constexpr std::string_view kEos = "<eos>";

// Layout tokens produced by the tokenizer. A line break at unchanged depth is
// kNewline, a deeper line is kIndent, and each closed block is one kDedent.
inline constexpr std::string_view kNewline = "<newline>";
inline constexpr std::string_view kIndent = "<indent>";
inline constexpr std::string_view kDedent = "<dedent>";

bool is_special(std::string_view text);
bool is_layout(std::string_view text);
bool is_keyword(std::string_view text);
bool is_builtin(std::string_view text);
/// [A-Za-z_][A-Za-z0-9_]*
bool is_identifier_shaped(std::string_view text);
/// Identifier-shaped, not a keyword, not a builtin name.
bool is_name(std::string_view text);
bool is_string_literal(std::string_view text);
bool is_int_literal(std::string_view text);
}  // namespace tok

/// Bidirectional token <-> id map. Ids 0-3 are PAD, UNK, BOS, EOS.
class Vocabulary {
 public:
  static constexpr TokenId kPad = 0;
  static constexpr TokenId kUnk = 1;
  static constexpr TokenId kBos = 2;
  static constexpr TokenId kEos = 3;
  static constexpr std::size_t kNumSpecials = 4;

  /// Specials only.
  Vocabulary();

  /// `tokens` must start with the four specials in order; entries must be
  /// unique.
  explicit Vocabulary(std::vector<std::string> tokens);

  std::size_t size() const { return tokens_.size(); }
  bool contains(std::string_view text) const;
  /// Unknown text maps to kUnk.
  TokenId id(std::string_view text) const;
  const std::string& text(TokenId id) const;
  Token token(TokenId id) const { return {text(id), id}; }
  const std::vector<std::string>& tokens() const { return tokens_; }

  std::vector<TokenId> encode(std::span<const std::string> texts) const;
  std::vector<std::string> decode(std::span<const TokenId> ids) const;

  /// Hex FNV-1a digest over the ordered token list.
  std::string digest() const;

  /// One token per line, line number (0-based) == id.
  void save(const std::filesystem::path& path) const;
  static Vocabulary load(const std::filesystem::path& path);

  friend bool operator==(const Vocabulary& a, const Vocabulary& b) {
    return a.tokens_ == b.tokens_;
  }

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, TokenId> index_;
};

/// Specials plus the `max_size - 4` most frequent tokens over all streams;
/// frequency ties go to the lexicographically smaller token. Throws
/// EmptyCorpus when `streams` is empty.
Vocabulary build_vocabulary_from_streams(
    std::span<const std::vector<std::string>> streams, std::size_t max_size);

}  // namespace clawsat

#endif  // CLAWSAT_TOKEN_HPP
