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
#include <limits>
#include <vector>

#include <gtest/gtest.h>

#include "clawsat/attack.hpp"
#include "clawsat/contrastive.hpp"
#include "clawsat/corpus.hpp"
#include "clawsat/semantics.hpp"
#include "clawsat/toy.hpp"
#include "testing.hpp"

namespace clawsat {
namespace {

struct Fixture20 {
  std::vector<Program> programs;
  Vocabulary vocab;
  Vocabulary out;
  CandidatePool pool;
  ModelParams params;
};

Fixture20 make_fixture(std::size_t n, std::uint64_t seed, std::size_t d = 8) {
  Fixture20 f;
  f.programs = generate_toy_corpus(n, seed);
  f.vocab = build_vocabulary(f.programs, 2000);
  f.out = build_summary_vocabulary(f.programs, 2000);
  f.pool = make_candidate_pool(f.vocab);
  ModelDims base;
  base.embed = base.hidden = base.proj = base.dec_hidden = d;
  f.params = ModelParams::init(dims_for(f.vocab, f.out, base), seed);
  return f;
}

TEST(ScoreCandidates, ExactForLinearEncoder) {
  // Objective f(x) = Σ_p w_p · e(x_p); the first-order score is exact.
  Rng rng(1);
  for (int probe = 0; probe < 20; ++probe) {
    Matrix emb(20, 3);
    for (Eigen::Index i = 0; i < emb.size(); ++i) emb.data()[i] = standard_normal(rng);
    const std::size_t occurrences = 1 + uniform_index(rng, 3);
    Matrix w(static_cast<Eigen::Index>(occurrences), 3);
    for (Eigen::Index i = 0; i < w.size(); ++i) w.data()[i] = standard_normal(rng);
    const TokenId current = 4 + static_cast<TokenId>(uniform_index(rng, 16));
    std::vector<TokenId> cands;
    for (TokenId t = 4; t < 20; ++t) {
      if (t != current) cands.push_back(t);
    }
    const auto scores = score_candidates(emb, cands, current, w);
    auto value = [&](TokenId t) { return w.colwise().sum().dot(emb.row(t)); };
    TokenId best = -1;
    double best_value = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < cands.size(); ++i) {
      EXPECT_NEAR(scores[i], value(cands[i]) - value(current), 1e-12);
      if (value(cands[i]) > best_value) {
        best_value = value(cands[i]);
        best = cands[i];
      }
    }
    EXPECT_EQ(cands[best_candidate(scores, cands)], best);
  }
}

TEST(ScoreCandidates, TiesGoToLowestId) {
  const std::vector<double> scores{1.0, 2.0, 2.0, 0.5};
  const std::vector<TokenId> cands{9, 8, 7, 6};
  EXPECT_EQ(best_candidate(scores, cands), 2u);
}

TEST(Attack, NeverDecreasesObjective) {
  Fixture20 f = make_fixture(60, 3);
  for (AttackObjective obj : {AttackObjective::TaskLossMax, AttackObjective::ContrastiveMax}) {
    for (std::size_t i = 0; i < 30; ++i) {
      const Program& p = f.programs[i];
      AttackConfig cfg;
      cfg.k_sites = 2;
      cfg.objective = obj;
      cfg.rng_seed = i;
      Anchor a{encode(f.params, f.vocab.encode(p.tokens)), f.out.encode(p.summary)};
      const AttackResult r = attack_program(f.params, p, cfg, a, f.vocab, f.pool);
      EXPECT_GE(r.objective_after, r.objective_before - 1e-6);
      EXPECT_GE(r.linear_gain, 0.0);
      for (std::size_t t = 1; t < r.trace.size(); ++t) EXPECT_GE(r.trace[t], r.trace[t - 1] - 1e-6);
      EXPECT_NEAR(attack_objective(f.params, f.vocab.encode(r.view.tokens), obj, a), r.objective_after, 1e-9);
    }
  }
}

TEST(Attack, ZeroBudgetIsIdentity) {
  Fixture20 f = make_fixture(10, 4);
  const Program& p = f.programs[0];
  AttackConfig cfg;
  cfg.k_sites = 0;
  Anchor a{encode(f.params, f.vocab.encode(p.tokens)), f.out.encode(p.summary)};
  const AttackResult r = attack_program(f.params, p, cfg, a, f.vocab, f.pool);
  EXPECT_EQ(r.view.tokens, p.tokens);
  EXPECT_EQ(r.objective_before, r.objective_after);
}

TEST(Attack, DeterministicPerSeed) {
  Fixture20 f = make_fixture(20, 5);
  for (const Program& p : f.programs) {
    Rng a(7), b(7);
    EXPECT_EQ(adversarial_view(f.params, p, 2, a, f.vocab, f.pool).tokens,
              adversarial_view(f.params, p, 2, b, f.vocab, f.pool).tokens);
  }
}

TEST(Attack, FilterRespected) {
  Fixture20 f = make_fixture(30, 6);
  for (const Program& p : f.programs) {
    AttackConfig cfg;
    cfg.k_sites = 3;
    cfg.filter = SiteFilter::ReplaceOnly;
    Anchor a{encode(f.params, f.vocab.encode(p.tokens)), f.out.encode(p.summary)};
    const AttackResult r = attack_program(f.params, p, cfg, a, f.vocab, f.pool);
    EXPECT_TRUE(r.view.inserted.empty());
    for (const auto& t : r.chosen) EXPECT_TRUE(is_replace(t.site.kind));
  }
}

TEST(Attack, AdversarialViewsPreserveSemantics) {
  const auto fixtures = toy_fixtures(60, 8);
  std::vector<Program> programs;
  for (const auto& fx : fixtures) programs.push_back(fx.program);
  const Vocabulary vocab = build_vocabulary(programs, 2000);
  const Vocabulary out = build_summary_vocabulary(programs, 2000);
  ModelDims base;
  base.embed = base.hidden = base.proj = base.dec_hidden = 8;
  const ModelParams params = ModelParams::init(dims_for(vocab, out, base), 1);
  const CandidatePool pool = make_candidate_pool(vocab);
  Rng rng(2);
  for (const auto& fx : fixtures) {
    const View v = adversarial_view(params, fx.program, 3, rng, vocab, pool);
    EXPECT_TRUE(check_semantics(fx.program, v, fx.inputs)) << fx.program.source;
  }
}

TEST(Attack, AdversarialViewsAreHarderPositives) {
  Fixture20 f = make_fixture(640, 9, 32);
  std::size_t wins = 0;
  const std::size_t batches = 20;
  for (std::size_t b = 0; b < batches; ++b) {
    Rng rng(derive_seed(9, "hard", {b}));
    std::vector<Vector> clean, rand, adv;
    for (std::size_t i = 0; i < 32; ++i) {
      const Program& p = f.programs[b * 32 + i];
      clean.push_back(encode(f.params, f.vocab.encode(p.tokens)));
      rand.push_back(encode(f.params, f.vocab.encode(random_view_or_identity(p, 1, f.pool, f.vocab, rng).tokens)));
      adv.push_back(encode(f.params, f.vocab.encode(adversarial_view(f.params, p, 1, rng, f.vocab, f.pool).tokens)));
    }
    wins += nt_xent({clean, adv, 0.07}) > nt_xent({clean, rand, 0.07});
  }
  EXPECT_GE(wins, 14u);
}

}  // namespace
}  // namespace clawsat
