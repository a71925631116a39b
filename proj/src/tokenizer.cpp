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

#include "clawsat/tokenizer.hpp"

#include <array>

#include "clawsat/error.hpp"
#include "clawsat/token.hpp"

namespace clawsat {

namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\f' || c == '\v'; }
bool ident_start(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
}
bool ident_char(char c) { return ident_start(c) || (c >= '0' && c <= '9'); }
bool digit(char c) { return c >= '0' && c <= '9'; }

constexpr std::array<std::string_view, 13> kMultiOps = {
    "//=", "**", "==", "!=", "<=", ">=", "+=", "-=", "*=", "//", "%=", "->", "/="};
constexpr std::string_view kSingleOps = "+-*/%<>=()[]{},:.";

// Splits one physical line (already stripped of indentation) into tokens,
// tracking bracket depth across lines.
void lex_line(std::string_view line, std::size_t lineno, int& bracket_depth,
              std::vector<std::string>& out) {
  std::size_t i = 0;
  auto fail = [&](const std::string& what) {
    throw MalformedSource("line " + std::to_string(lineno) + ": " + what);
  };
  while (i < line.size()) {
    const char c = line[i];
    if (is_space(c)) {
      ++i;
      continue;
    }
    if (c == '#') break;
    if (ident_start(c)) {
      std::size_t j = i + 1;
      while (j < line.size() && ident_char(line[j])) ++j;
      out.emplace_back(line.substr(i, j - i));
      i = j;
      continue;
    }
    if (digit(c)) {
      std::size_t j = i + 1;
      while (j < line.size() && digit(line[j])) ++j;
      if (j < line.size() && ident_start(line[j])) fail("malformed number");
      out.emplace_back(line.substr(i, j - i));
      i = j;
      continue;
    }
    if (c == '"' || c == '\'') {
      std::size_t j = i + 1;
      while (j < line.size() && line[j] != c) {
        if (is_space(line[j])) fail("whitespace inside a string literal");
        if (line[j] == '\\') ++j;
        ++j;
      }
      if (j >= line.size()) fail("unterminated string literal");
      out.emplace_back(line.substr(i, j - i + 1));
      i = j + 1;
      continue;
    }
    bool matched = false;
    for (auto op : kMultiOps) {
      if (line.substr(i, op.size()) == op) {
        out.emplace_back(op);
        i += op.size();
        matched = true;
        break;
      }
    }
    if (matched) continue;
    if (kSingleOps.find(c) != std::string_view::npos) {
      if (c == '(' || c == '[' || c == '{') ++bracket_depth;
      if (c == ')' || c == ']' || c == '}') {
        if (--bracket_depth < 0) fail("unbalanced closing bracket");
      }
      out.emplace_back(1, c);
      ++i;
      continue;
    }
    fail(std::string("illegal character '") + c + "'");
  }
}

}  // namespace

std::vector<std::string> tokenize(std::string_view source) {
  std::vector<std::string> out;
  std::vector<std::size_t> indents{0};
  int bracket_depth = 0;
  bool first_line = true;
  std::size_t lineno = 0;
  std::size_t pos = 0;
  while (pos <= source.size()) {
    std::size_t end = source.find('\n', pos);
    if (end == std::string_view::npos) end = source.size();
    std::string_view line = source.substr(pos, end - pos);
    pos = end + 1;
    ++lineno;

    std::size_t col = 0;
    std::size_t k = 0;
    while (k < line.size() && is_space(line[k])) {
      col += line[k] == '\t' ? 8 - (col % 8) : 1;
      ++k;
    }
    std::string_view body = line.substr(k);
    if (body.empty() || body.front() == '#') {
      if (end == source.size()) break;
      continue;
    }

    if (bracket_depth > 0) {
      // Continuation of an open bracket: indentation is insignificant.
      lex_line(body, lineno, bracket_depth, out);
    } else {
      if (!first_line) {
        if (col > indents.back()) {
          indents.push_back(col);
          out.emplace_back(tok::kIndent);
        } else if (col == indents.back()) {
          out.emplace_back(tok::kNewline);
        } else {
          while (col < indents.back()) {
            indents.pop_back();
            out.emplace_back(tok::kDedent);
          }
          if (col != indents.back()) {
            throw MalformedSource("line " + std::to_string(lineno) +
                                  ": dedent does not match any outer indentation level");
          }
        }
      } else if (col != 0) {
        throw MalformedSource("line " + std::to_string(lineno) + ": unexpected indent");
      }
      first_line = false;
      lex_line(body, lineno, bracket_depth, out);
    }
    if (end == source.size()) break;
  }
  if (out.empty()) throw MalformedSource("empty source");
  if (bracket_depth != 0) throw MalformedSource("unbalanced brackets at end of source");
  return out;
}

std::string detokenize(std::span<const std::string> tokens) {
  std::string out;
  std::size_t depth = 0;
  bool line_start = true;
  auto newline = [&] {
    out += '\n';
    out.append(depth * 4, ' ');
    line_start = true;
  };
  for (const auto& t : tokens) {
    if (t == tok::kNewline) {
      newline();
    } else if (t == tok::kIndent) {
      ++depth;
      newline();
    } else if (t == tok::kDedent) {
      if (depth > 0) --depth;
      newline();
    } else {
      if (!line_start) out += ' ';
      out += t;
      line_start = false;
    }
  }
  out += '\n';
  return out;
}

std::vector<std::string> split_words(std::string_view text) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && (is_space(text[i]) || text[i] == '\n')) ++i;
    std::size_t j = i;
    while (j < text.size() && !is_space(text[j]) && text[j] != '\n') ++j;
    if (j > i) out.emplace_back(text.substr(i, j - i));
    i = j;
  }
  return out;
}

}  // namespace clawsat
