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

#include "clawsat/corpus.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "clawsat/error.hpp"
#include "clawsat/rng.hpp"
#include "clawsat/tokenizer.hpp"
#include "clawsat/transform.hpp"
#include "json.hpp"

namespace clawsat {

using json = nlohmann::json;

Program make_program(std::string id, std::string code, std::string_view summary) {
  Program p;
  p.id = std::move(id);
  p.tokens = tokenize(code);
  p.source = std::move(code);
  p.summary = split_words(summary);
  p.sites = identify_sites(p.tokens);
  return p;
}

Program make_program_from_tokens(std::string id, std::vector<std::string> tokens,
                                 std::vector<std::string> summary) {
  Program p;
  p.id = std::move(id);
  p.source = detokenize(tokens);
  p.tokens = std::move(tokens);
  p.summary = std::move(summary);
  p.sites = identify_sites(p.tokens);
  return p;
}

Vocabulary build_vocabulary(const std::vector<Program>& programs, std::size_t max_size) {
  std::vector<std::vector<std::string>> streams;
  streams.reserve(programs.size());
  for (const auto& p : programs) streams.push_back(p.tokens);
  return build_vocabulary_from_streams(streams, max_size);
}

Vocabulary build_summary_vocabulary(const std::vector<Program>& programs,
                                    std::size_t max_size) {
  std::vector<std::vector<std::string>> streams;
  streams.reserve(programs.size());
  for (const auto& p : programs) streams.push_back(p.summary);
  return build_vocabulary_from_streams(streams, max_size);
}

std::vector<Program> parse_jsonl(std::string_view text) {
  std::vector<Program> out;
  std::set<std::string> seen;
  std::size_t lineno = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;

    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ParseError(lineno, e.what());
    }
    for (const char* field : {"id", "code", "summary"}) {
      if (!obj.is_object() || !obj.contains(field) || !obj[field].is_string()) {
        throw ParseError(lineno, std::string("missing string field \"") + field + "\"");
      }
    }
    std::string id = obj["id"].get<std::string>();
    if (!seen.insert(id).second) {
      throw DuplicateId("line " + std::to_string(lineno) + ": duplicate id \"" + id + "\"");
    }
    try {
      out.push_back(make_program(std::move(id), obj["code"].get<std::string>(),
                                 obj["summary"].get<std::string>()));
    } catch (const MalformedSource& e) {
      throw ParseError(lineno, e.what());
    }
  }
  return out;
}

std::vector<Program> load_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_jsonl(ss.str());
}

std::string to_jsonl(const std::vector<Program>& programs) {
  std::string out;
  for (const auto& p : programs) {
    std::string summary;
    for (std::size_t i = 0; i < p.summary.size(); ++i) {
      if (i) summary += ' ';
      summary += p.summary[i];
    }
    json obj;
    obj["id"] = p.id;
    obj["code"] = p.source;
    obj["summary"] = summary;
    out += obj.dump();
    out += '\n';
  }
  return out;
}

void save_jsonl(const std::filesystem::path& path, const std::vector<Program>& programs) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << to_jsonl(programs);
}

CorpusSplit split_corpus(const std::vector<Program>& programs, std::uint64_t seed) {
  std::set<std::string> ids;
  for (const auto& p : programs) {
    if (!ids.insert(p.id).second) throw DuplicateId("duplicate id \"" + p.id + "\"");
  }
  std::vector<std::size_t> order(programs.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng rng(derive_seed(seed, "split"));
  shuffle(order, rng);

  const std::size_t n = programs.size();
  const std::size_t n_train = n * 8 / 10;
  const std::size_t n_valid = n / 10;
  CorpusSplit split;
  split.seed = seed;
  for (std::size_t i = 0; i < n; ++i) {
    const Program& p = programs[order[i]];
    if (i < n_train) {
      split.train.push_back(p);
    } else if (i < n_train + n_valid) {
      split.valid.push_back(p);
    } else {
      split.test.push_back(p);
    }
  }
  return split;
}

void save_split(const std::filesystem::path& dir, const CorpusSplit& split) {
  std::filesystem::create_directories(dir);
  save_jsonl(dir / "train.jsonl", split.train);
  save_jsonl(dir / "valid.jsonl", split.valid);
  save_jsonl(dir / "test.jsonl", split.test);
}

CorpusSplit load_split(const std::filesystem::path& dir) {
  CorpusSplit split;
  split.train = load_jsonl(dir / "train.jsonl");
  split.valid = load_jsonl(dir / "valid.jsonl");
  split.test = load_jsonl(dir / "test.jsonl");
  return split;
}

std::string corpus_digest(const std::vector<Program>& programs) {
  const std::uint64_t h = fnv1a(to_jsonl(programs));
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::vector<Program> completion_programs(const std::vector<Program>& programs) {
  constexpr std::size_t kNext = 6;
  std::vector<Program> out;
  for (const Program& p : programs) {
    const std::size_t n = p.tokens.size();
    if (n < kNext + 1) continue;
    const std::size_t cut = std::min(std::max<std::size_t>(1, n / 2), n - kNext);
    std::vector<std::string> prefix(p.tokens.begin(), p.tokens.begin() + static_cast<std::ptrdiff_t>(cut));
    std::vector<std::string> next(p.tokens.begin() + static_cast<std::ptrdiff_t>(cut),
                                  p.tokens.begin() + static_cast<std::ptrdiff_t>(cut + kNext));
    out.push_back(make_program_from_tokens(p.id, std::move(prefix), std::move(next)));
  }
  return out;
}

}  // namespace clawsat
