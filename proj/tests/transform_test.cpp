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

#include <algorithm>
#include <cmath>
#include <map>
#include <regex>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "clawsat/corpus.hpp"
#include "clawsat/error.hpp"
#include "clawsat/rng.hpp"
#include "clawsat/token.hpp"
#include "clawsat/tokenizer.hpp"
#include "clawsat/toy.hpp"
#include "clawsat/transform.hpp"

namespace clawsat {
namespace {

const char* kSumSource =
    "def add(lst):\n"
    "    sum = 0\n"
    "    for i in lst:\n"
    "        sum += i\n"
    "    return sum\n";

Program sum_program() { return make_program("fig", kSumSource, "add the numbers"); }

Vocabulary vocab_for(const std::vector<Program>& programs) {
  std::vector<Program> all = programs;
  all.push_back(make_program("extra", "def g(test, total, acc, value):\n    return \"Network\"\n",
                             "x"));
  return build_vocabulary(all, 2000);
}

const Site& find_site(const Program& p, SiteKind kind, const std::string& original = "") {
  for (const Site& s : p.sites) {
    if (s.kind == kind && (original.empty() || s.original == original)) return s;
  }
  throw Error("site not found");
}

// Line-based reference scanner over the rendered source.
struct SiteCounts {
  std::size_t names = 0;
  std::size_t bools = 0;
  std::size_t boundaries = 0;
};

SiteCounts reference_scan(const Program& p) {
  const std::string src = detokenize(p.tokens);
  std::istringstream in(src);
  std::string line;
  std::set<std::string> bound;
  std::string fname;
  SiteCounts c;
  const std::regex def_re(R"(^def\s+(\w+)\s*\((.*)\)\s*:)");
  const std::regex assign_re(R"(^\s*(\w+(?:\s*,\s*\w+)*)\s*(=|\+=|-=|\*=|//=|%=|/=|\*\*=)[^=])");
  const std::regex for_re(R"(^\s*for\s+(.*?)\s+in\s)");
  const std::regex word_re(R"(\w+)");
  const std::regex bool_re(R"(\b(True|False)\b)");
  bool first = true;
  while (std::getline(in, line)) {
    std::smatch m;
    if (first) {
      first = false;
      if (std::regex_search(line, m, def_re)) {
        fname = m[1];
        const std::string params = m[2];
        for (std::sregex_iterator it(params.begin(), params.end(), word_re), end; it != end; ++it) {
          bound.insert(it->str());
        }
      }
      continue;
    }
    const std::size_t start = line.find_first_not_of(' ');
    if (start == std::string::npos) continue;
    const std::string trimmed = line.substr(start);
    if (trimmed.rfind("elif", 0) != 0 && trimmed.rfind("else", 0) != 0) ++c.boundaries;
    if (std::regex_search(line, m, assign_re)) {
      const std::string targets = m[1];
      for (std::sregex_iterator it(targets.begin(), targets.end(), word_re), end; it != end; ++it) {
        bound.insert(it->str());
      }
    }
    if (std::regex_search(line, m, for_re)) {
      const std::string targets = m[1];
      for (std::sregex_iterator it(targets.begin(), targets.end(), word_re), end; it != end; ++it) {
        bound.insert(it->str());
      }
    }
    c.bools += static_cast<std::size_t>(
        std::distance(std::sregex_iterator(line.begin(), line.end(), bool_re), std::sregex_iterator()));
  }
  bound.erase(fname);
  c.names = bound.size();
  return c;
}

TEST(IdentifySites, SumProgram) {
  const Program p = sum_program();
  const Site& s = find_site(p, SiteKind::ReplaceLocalVar, "sum");
  EXPECT_EQ(s.positions.size(), 3u);
  for (std::size_t pos : s.positions) EXPECT_EQ(p.tokens[pos], "sum");
  // An insert site right after "sum = 0".
  const auto after_assign = static_cast<std::size_t>(
      std::find(p.tokens.begin(), p.tokens.end(), "for") - p.tokens.begin());
  bool found = false;
  for (const Site& t : p.sites) {
    found |= t.kind == SiteKind::InsertPrint && t.positions[0] == after_assign;
  }
  EXPECT_TRUE(found);
  EXPECT_EQ(find_site(p, SiteKind::ReplaceParam).original, "lst");
}

TEST(IdentifySites, NoIdentifiers) {
  const Program p = make_program("c", "def f(): return 1", "one");
  std::size_t replace = 0, insert = 0;
  for (const Site& s : p.sites) (is_replace(s.kind) ? replace : insert) += 1;
  EXPECT_EQ(replace, 0u);
  EXPECT_GE(insert, 1u);
}

TEST(IdentifySites, SortedByKindThenPosition) {
  for (const Program& p : generate_toy_corpus(100, 4)) {
    for (std::size_t i = 1; i < p.sites.size(); ++i) {
      EXPECT_FALSE(site_less(p.sites[i], p.sites[i - 1])) << p.id;
    }
  }
}

TEST(IdentifySites, MatchesReferenceScanner) {
  for (const Program& p : generate_toy_corpus(400, 21)) {
    std::size_t names = 0, bools = 0, prints = 0, dead = 0;
    for (const Site& s : p.sites) {
      switch (s.kind) {
        case SiteKind::ReplaceLocalVar:
        case SiteKind::ReplaceParam: ++names; break;
        case SiteKind::ReplaceBoolLiteral: ++bools; break;
        case SiteKind::InsertPrint: ++prints; break;
        case SiteKind::InsertDeadCode: ++dead; break;
      }
    }
    const SiteCounts ref = reference_scan(p);
    EXPECT_EQ(names, ref.names) << p.source;
    EXPECT_EQ(bools, ref.bools) << p.source;
    EXPECT_EQ(prints, ref.boundaries + 1) << p.source;
    EXPECT_EQ(dead, ref.boundaries + 1) << p.source;
  }
}

TEST(Apply, RenameAllOccurrences) {
  const Program p = sum_program();
  const View v = apply_transformation(p, {find_site(p, SiteKind::ReplaceLocalVar, "sum"), "test"});
  EXPECT_EQ(std::count(v.tokens.begin(), v.tokens.end(), "test"), 3);
  EXPECT_EQ(std::count(v.tokens.begin(), v.tokens.end(), "sum"), 0);
  EXPECT_EQ(v.tokens.size(), p.tokens.size());
}

TEST(Apply, InsertPrintAtEnd) {
  const Program p = sum_program();
  Site end;
  for (const Site& s : p.sites) {
    if (s.kind == SiteKind::InsertPrint && s.positions[0] == p.tokens.size()) end = s;
  }
  const View v = apply_transformation(p, {end, "\"Network\""});
  ASSERT_GE(v.tokens.size(), 4u);
  const std::vector<std::string> suffix(v.tokens.end() - 4, v.tokens.end());
  EXPECT_EQ(suffix, (std::vector<std::string>{"print", "(", "\"Network\"", ")"}));
  ASSERT_EQ(v.inserted.size(), 1u);
}

TEST(Apply, IdentityRename) {
  const Program p = sum_program();
  const View v = apply_transformation(p, {find_site(p, SiteKind::ReplaceLocalVar, "sum"), "sum"});
  EXPECT_EQ(v.tokens, p.tokens);
}

TEST(Apply, BoolRewrite) {
  const Program p = make_program("b", "def f(x):\n    y = True\n    return y\n", "s");
  const Site& s = find_site(p, SiteKind::ReplaceBoolLiteral);
  EXPECT_EQ(bool_rewrite("True"), "(1==1)");
  EXPECT_EQ(bool_rewrite("False"), "(0==1)");
  const View v = apply_transformation(p, {s, bool_rewrite("True")});
  EXPECT_EQ(std::count(v.tokens.begin(), v.tokens.end(), "True"), 0);
  EXPECT_EQ(tokenize(detokenize(v.tokens)), v.tokens);
}

TEST(Apply, IllegalPayloads) {
  const Program p = sum_program();
  const Site& s = find_site(p, SiteKind::ReplaceLocalVar, "sum");
  EXPECT_THROW(apply_transformation(p, {s, "lst"}), IllegalPayload);  // bound in scope
  EXPECT_THROW(apply_transformation(p, {s, "<unk>"}), IllegalPayload);
  EXPECT_THROW(apply_transformation(p, {s, "for"}), IllegalPayload);
  EXPECT_THROW(apply_transformation(p, {s, "1abc"}), IllegalPayload);
}

TEST(Apply, StaleSite) {
  const Program p = sum_program();
  Site s = find_site(p, SiteKind::ReplaceLocalVar, "sum");
  s.original = "nothere";
  EXPECT_THROW(apply_transformation(p, {s, "test"}), StaleSite);
  Site far{SiteKind::InsertPrint, {p.tokens.size() + 5}, ""};
  EXPECT_THROW(apply_transformation(p, {far, "\"x\""}), StaleSite);
}

TEST(Apply, ConsistencyOverToyCorpus) {
  const auto programs = generate_toy_corpus(200, 9);
  const Vocabulary vocab = build_vocabulary(programs, 2000);
  const CandidatePool pool = make_candidate_pool(vocab);
  Rng rng(5);
  for (const Program& p : programs) {
    for (const Site& s : p.sites) {
      if (s.kind != SiteKind::ReplaceLocalVar && s.kind != SiteKind::ReplaceParam) continue;
      const auto cands = payload_candidates(p, s, pool, vocab, {});
      if (cands.empty()) continue;
      const std::string payload = vocab.text(cands[uniform_index(rng, cands.size())]);
      const View v = apply_transformation(p, {s, payload});
      EXPECT_EQ(std::count(v.tokens.begin(), v.tokens.end(), s.original), 0) << p.id;
      EXPECT_EQ(static_cast<std::size_t>(std::count(v.tokens.begin(), v.tokens.end(), payload)),
                s.positions.size())
          << p.id;
    }
  }
}

TEST(Apply, InsertKeepsOrderOfExistingTokens) {
  const auto programs = generate_toy_corpus(100, 10);
  const Vocabulary vocab = build_vocabulary(programs, 2000);
  const CandidatePool pool = make_candidate_pool(vocab);
  Rng rng(6);
  for (const Program& p : programs) {
    const View v = random_view(p, 3, pool, vocab, rng, SiteFilter::InsertOnly);
    std::vector<std::string> kept;
    for (std::size_t i = 0; i < v.tokens.size(); ++i) {
      bool inside = false;
      for (const auto& [b, e] : v.inserted) inside |= i >= b && i < e;
      if (!inside) kept.push_back(v.tokens[i]);
    }
    EXPECT_EQ(kept, p.tokens) << p.id;
  }
}

TEST(Apply, CompositionOrderIndependentMultiset) {
  const auto programs = generate_toy_corpus(60, 12);
  const Vocabulary vocab = build_vocabulary(programs, 2000);
  const CandidatePool pool = make_candidate_pool(vocab);
  Rng rng(7);
  for (const Program& p : programs) {
    const View v = random_view(p, 3, pool, vocab, rng);
    std::vector<Transformation> ts = v.applied;
    std::reverse(ts.begin(), ts.end());
    const View w = apply_transformations(p, ts);
    auto a = v.tokens;
    auto b = w.tokens;
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    EXPECT_EQ(a, b) << p.id;
  }
}

TEST(RandomView, DeterministicUnderSeed) {
  const auto programs = generate_toy_corpus(30, 13);
  const Vocabulary vocab = build_vocabulary(programs, 2000);
  const CandidatePool pool = make_candidate_pool(vocab);
  for (const Program& p : programs) {
    Rng a(99), b(99);
    EXPECT_EQ(random_view(p, 2, pool, vocab, a).tokens, random_view(p, 2, pool, vocab, b).tokens);
  }
}

TEST(RandomView, AppliesKTransformations) {
  const auto programs = generate_toy_corpus(100, 14);
  const Vocabulary vocab = build_vocabulary(programs, 2000);
  const CandidatePool pool = make_candidate_pool(vocab);
  Rng rng(3);
  for (const Program& p : programs) {
    EXPECT_EQ(random_view(p, 1, pool, vocab, rng).applied.size(), 1u);
    EXPECT_EQ(random_view(p, 3, pool, vocab, rng).applied.size(), std::min<std::size_t>(3, p.sites.size()));
    const View all = random_view(p, 1000, pool, vocab, rng);
    EXPECT_EQ(all.applied.size(), p.sites.size());
    for (const Transformation& t : all.applied) {
      EXPECT_FALSE(tok::is_special(t.payload));
    }
  }
}

TEST(RandomView, FilterRestrictsKinds) {
  const auto programs = generate_toy_corpus(50, 15);
  const Vocabulary vocab = build_vocabulary(programs, 2000);
  const CandidatePool pool = make_candidate_pool(vocab);
  Rng rng(4);
  for (const Program& p : programs) {
    for (const Transformation& t : random_view(p, 5, pool, vocab, rng, SiteFilter::ReplaceOnly).applied) {
      EXPECT_TRUE(is_replace(t.site.kind));
    }
    for (const Transformation& t : random_view(p, 5, pool, vocab, rng, SiteFilter::InsertOnly).applied) {
      EXPECT_TRUE(is_insert(t.site.kind));
    }
  }
}

TEST(RandomView, NoSites) {
  const Program p = make_program("n", "def f(): return 1", "one");
  const Vocabulary vocab = build_vocabulary({p}, 100);
  const CandidatePool pool = make_candidate_pool(vocab);
  Rng rng(1);
  EXPECT_THROW(random_view(p, 1, pool, vocab, rng, SiteFilter::ReplaceOnly), NoSites);
  EXPECT_EQ(random_view_or_identity(p, 1, pool, vocab, rng, SiteFilter::ReplaceOnly).tokens, p.tokens);
}

TEST(RandomView, SiteSelectionIsUniform) {
  const Program p = sum_program();
  const Vocabulary vocab = vocab_for({p});
  const CandidatePool pool = make_candidate_pool(vocab);
  Rng rng(2024);
  const std::size_t draws = 10000;
  std::map<std::pair<int, std::size_t>, std::size_t> counts;
  for (std::size_t i = 0; i < draws; ++i) {
    const View v = random_view(p, 1, pool, vocab, rng);
    const Site& s = v.applied.at(0).site;
    ++counts[{static_cast<int>(s.kind), s.positions[0]}];
  }
  const double n_sites = static_cast<double>(p.sites.size());
  ASSERT_EQ(counts.size(), p.sites.size());
  const double expected = static_cast<double>(draws) / n_sites;
  const double sigma = std::sqrt(static_cast<double>(draws) * (1.0 / n_sites) * (1.0 - 1.0 / n_sites));
  double chi2 = 0.0;
  for (const auto& [key, c] : counts) {
    EXPECT_LT(std::abs(static_cast<double>(c) - expected), 3.0 * sigma);
    chi2 += (c - expected) * (c - expected) / expected;
  }
  // 99.9% quantile of chi-square with 12 degrees of freedom.
  EXPECT_LT(chi2, 32.91);
}

TEST(CandidatePool, ExcludesSpecialsAndKeywords) {
  const auto programs = generate_toy_corpus(200, 16);
  const Vocabulary vocab = build_vocabulary(programs, 2000);
  const CandidatePool pool = make_candidate_pool(vocab);
  EXPECT_FALSE(pool.identifiers.empty());
  EXPECT_FALSE(pool.strings.empty());
  for (TokenId id : pool.identifiers) {
    EXPECT_GE(id, 4);
    EXPECT_TRUE(tok::is_name(vocab.text(id))) << vocab.text(id);
  }
  for (TokenId id : pool.strings) EXPECT_TRUE(tok::is_string_literal(vocab.text(id)));
}

TEST(ViewJson, HasFields) {
  const Program p = sum_program();
  const View v = apply_transformation(p, {find_site(p, SiteKind::ReplaceLocalVar, "sum"), "test"});
  const std::string j = view_to_json(p, v);
  for (const char* key : {"\"id\"", "\"code\"", "\"summary\"", "\"applied\""}) {
    EXPECT_NE(j.find(key), std::string::npos) << key;
  }
  const Program q = view_as_program(p, v);
  EXPECT_EQ(q.tokens, v.tokens);
  EXPECT_EQ(q.summary, p.summary);
}

}  // namespace
}  // namespace clawsat
