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

#ifndef CLAWSAT_CORPUS_HPP
#define CLAWSAT_CORPUS_HPP

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "clawsat/site.hpp"
#include "clawsat/token.hpp"

namespace clawsat {

/// A tokenized function with its gold summary and transformation sites.
struct Program {
  std::string id;
  std::string source;
  std::vector<std::string> tokens;
  std::vector<std::string> summary;
  std::vector<Site> sites;
};

/// Tokenizes `code`, splits `summary` on whitespace and annotates sites.
Program make_program(std::string id, std::string code, std::string_view summary);

/// Builds a program straight from a token stream (e.g. a transformed view);
/// the source is the detokenized stream.
Program make_program_from_tokens(std::string id, std::vector<std::string> tokens,
                                 std::vector<std::string> summary);

struct CorpusSplit {
  std::vector<Program> train;
  std::vector<Program> valid;
  std::vector<Program> test;
  std::uint64_t seed = 0;
};

/// Vocabulary over code tokens (see build_vocabulary_from_streams).
Vocabulary build_vocabulary(const std::vector<Program>& programs, std::size_t max_size);
/// Vocabulary over summary words.
Vocabulary build_summary_vocabulary(const std::vector<Program>& programs,
                                    std::size_t max_size);

/// One JSON object per line with string fields "id", "code", "summary".
/// Throws ParseError (with line number) or DuplicateId.
std::vector<Program> load_jsonl(const std::filesystem::path& path);
std::vector<Program> parse_jsonl(std::string_view text);
std::string to_jsonl(const std::vector<Program>& programs);
void save_jsonl(const std::filesystem::path& path, const std::vector<Program>& programs);

/// Seeded 80/10/10 split.
CorpusSplit split_corpus(const std::vector<Program>& programs, std::uint64_t seed);

/// Writes dir/{train,valid,test}.jsonl.
void save_split(const std::filesystem::path& dir, const CorpusSplit& split);
CorpusSplit load_split(const std::filesystem::path& dir);

/// Completion examples: each program is cut at half its length (at least one
/// token) and the summary becomes the next six code tokens. Programs shorter
/// than seven tokens are dropped.
std::vector<Program> completion_programs(const std::vector<Program>& programs);

/// Hex digest of the canonical JSONL serialization.
std::string corpus_digest(const std::vector<Program>& programs);

}  // namespace clawsat

#endif  // CLAWSAT_CORPUS_HPP
