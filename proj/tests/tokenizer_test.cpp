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
#include <map>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "clawsat/error.hpp"
#include "clawsat/token.hpp"
#include "clawsat/tokenizer.hpp"
#include "clawsat/toy.hpp"

namespace clawsat {
namespace {

using Tokens = std::vector<std::string>;

TEST(Tokenize, SplitsOnDelimiters) {
  EXPECT_EQ(tokenize("sum = 0"), (Tokens{"sum", "=", "0"}));
}

TEST(Tokenize, LoopBodyOnOneLine) {
  EXPECT_EQ(tokenize("for i in lst : sum += i"),
            (Tokens{"for", "i", "in", "lst", ":", "sum", "+=", "i"}));
}

TEST(Tokenize, EmptyInputIsMalformed) {
  EXPECT_THROW(tokenize(""), MalformedSource);
  EXPECT_THROW(tokenize("   \n  "), MalformedSource);
}

TEST(Tokenize, RejectsBadLexemes) {
  EXPECT_THROW(tokenize("x = \"abc"), MalformedSource);
  EXPECT_THROW(tokenize("x = 1 $ 2"), MalformedSource);
}

TEST(Tokenize, LayoutTokens) {
  const Tokens t = tokenize("def f(a):\n    if a:\n        return 1\n    return 2\n");
  EXPECT_EQ(t, (Tokens{"def", "f", "(", "a", ")", ":", "<indent>", "if", "a", ":", "<indent>",
                       "return", "1", "<dedent>", "return", "2"}));
}

TEST(Tokenize, CommentsDropped) {
  EXPECT_EQ(tokenize("x = 1  # note\ny = x"), (Tokens{"x", "=", "1", "<newline>", "y", "=", "x"}));
}

TEST(Tokenize, MultiCharOperatorsAreSingleTokens) {
  EXPECT_EQ(tokenize("a //= b ** 2 != c"), (Tokens{"a", "//=", "b", "**", "2", "!=", "c"}));
}

TEST(Tokenize, RoundTripOnToyCorpus) {
  for (const Program& p : generate_toy_corpus(300, 11)) {
    EXPECT_EQ(tokenize(detokenize(p.tokens)), p.tokens) << p.id;
  }
}

TEST(Tokenize, TokensHaveNoWhitespace) {
  for (const Program& p : generate_toy_corpus(100, 5)) {
    for (const std::string& t : p.tokens) {
      EXPECT_EQ(t.find_first_of(" \t\n"), std::string::npos) << p.id << " '" << t << "'";
    }
  }
}

TEST(Vocabulary, SpecialsOccupyFirstIds) {
  const Vocabulary v;
  ASSERT_EQ(v.size(), 4u);
  EXPECT_EQ(v.text(Vocabulary::kPad), "<pad>");
  EXPECT_EQ(v.text(Vocabulary::kUnk), "<unk>");
  EXPECT_EQ(v.text(Vocabulary::kBos), "<bos>");
  EXPECT_EQ(v.text(Vocabulary::kEos), "<eos>");
}

TEST(Vocabulary, FrequencyRuleSingleProgram) {
  const std::vector<Tokens> streams = {tokenize("a = a")};
  const Vocabulary v = build_vocabulary_from_streams(streams, 6);
  // "a" occurs twice, "=" once.
  EXPECT_EQ(v.tokens(), (Tokens{"<pad>", "<unk>", "<bos>", "<eos>", "a", "="}));
}

TEST(Vocabulary, LexicographicTieBreak) {
  const std::vector<Tokens> streams = {{"b", "a"}};
  const Vocabulary v = build_vocabulary_from_streams(streams, 5);
  ASSERT_EQ(v.size(), 5u);
  EXPECT_EQ(v.text(4), "a");
  EXPECT_FALSE(v.contains("b"));
}

TEST(Vocabulary, EmptyCorpusThrows) {
  const std::vector<Tokens> none;
  EXPECT_THROW(build_vocabulary_from_streams(none, 10), EmptyCorpus);
}

TEST(Vocabulary, SizeMatchesIndependentCount) {
  const auto programs = generate_toy_corpus(2000, 3);
  std::vector<Tokens> streams;
  std::map<std::string, std::size_t> freq;
  for (const Program& p : programs) {
    streams.push_back(p.tokens);
    for (const auto& t : p.tokens) ++freq[t];
  }
  for (std::size_t max_size : {50u, 100u, 5000u}) {
    const Vocabulary v = build_vocabulary_from_streams(streams, max_size);
    EXPECT_EQ(v.size(), std::min(max_size, freq.size() + 4));
  }
  // The admitted set is exactly the top of the (frequency desc, text asc) order.
  std::vector<std::pair<std::string, std::size_t>> order(freq.begin(), freq.end());
  std::stable_sort(order.begin(), order.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  const Vocabulary v = build_vocabulary_from_streams(streams, 40);
  for (std::size_t i = 0; i < 36; ++i) EXPECT_EQ(v.text(static_cast<TokenId>(i + 4)), order[i].first);
}

TEST(Vocabulary, EncodeDecode) {
  const Vocabulary v(Tokens{"<pad>", "<unk>", "<bos>", "<eos>", "x", "="});
  const Tokens in = {"x", "=", "y"};
  const auto ids = v.encode(in);
  EXPECT_EQ(ids, (std::vector<TokenId>{4, 5, Vocabulary::kUnk}));
  for (TokenId id : ids) EXPECT_LT(static_cast<std::size_t>(id), v.size());
  const std::vector<TokenId> known = {4, 5, 4};
  EXPECT_EQ(v.decode(known), (Tokens{"x", "=", "x"}));
}

TEST(Vocabulary, IndexInvertsTokens) {
  const auto programs = generate_toy_corpus(200, 2);
  std::vector<Tokens> streams;
  for (const Program& p : programs) streams.push_back(p.tokens);
  const Vocabulary v = build_vocabulary_from_streams(streams, 2000);
  for (std::size_t i = 0; i < v.size(); ++i) {
    EXPECT_EQ(v.id(v.text(static_cast<TokenId>(i))), static_cast<TokenId>(i));
  }
}

TEST(Vocabulary, DigestDependsOnOrder) {
  const Vocabulary a(Tokens{"<pad>", "<unk>", "<bos>", "<eos>", "x", "y"});
  const Vocabulary b(Tokens{"<pad>", "<unk>", "<bos>", "<eos>", "y", "x"});
  EXPECT_NE(a.digest(), b.digest());
  EXPECT_EQ(a.digest(), Vocabulary(a.tokens()).digest());
}

TEST(Vocabulary, RejectsMissingSpecials) {
  EXPECT_THROW(Vocabulary(Tokens{"x", "y"}), Error);
}

}  // namespace
}  // namespace clawsat
