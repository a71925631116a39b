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

#include "clawsat/token.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <fstream>
#include <map>

#include "clawsat/error.hpp"
#include "clawsat/rng.hpp"

namespace clawsat {

namespace tok {

namespace {
constexpr std::array<std::string_view, 35> kKeywords = {
    "False", "None",   "True",    "and",      "as",     "assert", "async",
    "await", "break",  "class",   "continue", "def",    "del",    "elif",
    "else",  "except", "finally", "for",      "from",   "global", "if",
    "import", "in",    "is",      "lambda",   "nonlocal", "not",  "or",
    "pass",  "raise",  "return",  "try",      "while",  "with",   "yield"};

constexpr std::array<std::string_view, 22> kBuiltins = {
    "print", "len",  "range", "abs",   "min",      "max",    "sum",  "int",
    "str",   "bool", "list",  "dict",  "set",      "tuple",  "sorted",
    "reversed", "enumerate", "zip", "map", "filter", "isinstance", "type"};
}  // namespace

bool is_special(std::string_view text) {
  return text == kPad || text == kUnk || text == kBos || text == kEos;
}

bool is_layout(std::string_view text) {
  return text == kNewline || text == kIndent || text == kDedent;
}

bool is_keyword(std::string_view text) {
  return std::find(kKeywords.begin(), kKeywords.end(), text) != kKeywords.end();
}

bool is_builtin(std::string_view text) {
  return std::find(kBuiltins.begin(), kBuiltins.end(), text) != kBuiltins.end();
}

bool is_identifier_shaped(std::string_view text) {
  if (text.empty()) return false;
  auto alpha = [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
  };
  if (!alpha(text[0])) return false;
  return std::all_of(text.begin() + 1, text.end(), [&](char c) {
    return alpha(c) || (c >= '0' && c <= '9');
  });
}

bool is_name(std::string_view text) {
  return is_identifier_shaped(text) && !is_keyword(text) && !is_builtin(text);
}

bool is_string_literal(std::string_view text) {
  return text.size() >= 2 && (text.front() == '"' || text.front() == '\'') &&
         text.back() == text.front();
}

bool is_int_literal(std::string_view text) {
  return !text.empty() &&
         std::all_of(text.begin(), text.end(), [](char c) { return c >= '0' && c <= '9'; });
}

}  // namespace tok

Vocabulary::Vocabulary()
    : Vocabulary(std::vector<std::string>{std::string(tok::kPad), std::string(tok::kUnk),
                                          std::string(tok::kBos), std::string(tok::kEos)}) {}

Vocabulary::Vocabulary(std::vector<std::string> tokens) : tokens_(std::move(tokens)) {
  if (tokens_.size() < kNumSpecials || tokens_[0] != tok::kPad || tokens_[1] != tok::kUnk ||
      tokens_[2] != tok::kBos || tokens_[3] != tok::kEos) {
    throw Error("vocabulary must start with <pad> <unk> <bos> <eos>");
  }
  index_.reserve(tokens_.size());
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    if (tokens_[i].empty()) throw Error("vocabulary contains an empty token");
    if (!index_.emplace(tokens_[i], static_cast<TokenId>(i)).second) {
      throw Error("duplicate vocabulary token: " + tokens_[i]);
    }
  }
}

bool Vocabulary::contains(std::string_view text) const {
  return index_.find(std::string(text)) != index_.end();
}

TokenId Vocabulary::id(std::string_view text) const {
  auto it = index_.find(std::string(text));
  return it == index_.end() ? kUnk : it->second;
}

const std::string& Vocabulary::text(TokenId id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= tokens_.size()) {
    throw IdOutOfRange("token id " + std::to_string(id) + " outside vocabulary of size " +
                       std::to_string(tokens_.size()));
  }
  return tokens_[static_cast<std::size_t>(id)];
}

std::vector<TokenId> Vocabulary::encode(std::span<const std::string> texts) const {
  std::vector<TokenId> ids;
  ids.reserve(texts.size());
  for (const auto& t : texts) ids.push_back(id(t));
  return ids;
}

std::vector<std::string> Vocabulary::decode(std::span<const TokenId> ids) const {
  std::vector<std::string> out;
  out.reserve(ids.size());
  for (auto i : ids) out.push_back(text(i));
  return out;
}

std::string Vocabulary::digest() const {
  std::uint64_t h = fnv1a("vocab");
  for (const auto& t : tokens_) {
    h = fnv1a(t, h);
    h = fnv1a(std::string_view("\n", 1), h);
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void Vocabulary::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  for (const auto& t : tokens_) out << t << '\n';
}

Vocabulary Vocabulary::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  std::vector<std::string> tokens;
  std::string line;
  while (std::getline(in, line)) tokens.push_back(line);
  return Vocabulary(std::move(tokens));
}

Vocabulary build_vocabulary_from_streams(std::span<const std::vector<std::string>> streams,
                                         std::size_t max_size) {
  if (streams.empty()) throw EmptyCorpus("cannot build a vocabulary from an empty corpus");
  if (max_size < Vocabulary::kNumSpecials) {
    throw Error("max_size must leave room for the 4 special tokens");
  }
  std::map<std::string, std::size_t> counts;
  for (const auto& s : streams) {
    for (const auto& t : s) {
      if (!tok::is_special(t)) ++counts[t];
    }
  }
  std::vector<std::pair<std::string, std::size_t>> ranked(counts.begin(), counts.end());
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  std::vector<std::string> tokens = Vocabulary().tokens();
  for (const auto& [text, n] : ranked) {
    if (tokens.size() >= max_size) break;
    tokens.push_back(text);
  }
  return Vocabulary(std::move(tokens));
}

}  // namespace clawsat
