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

#ifndef CLAWSAT_ATTACK_HPP
#define CLAWSAT_ATTACK_HPP

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "clawsat/corpus.hpp"
#include "clawsat/model.hpp"
#include "clawsat/rng.hpp"
#include "clawsat/transform.hpp"

namespace clawsat {

enum class AttackObjective {
  /// Cosine distance 1 - cos(z(P'), z(P)) from the clean representation.
  /// Its gradient vanishes at P' = P, so it is normally run with
  /// random_start.
  ContrastiveMax,
  /// Task loss of P' against the gold target.
  TaskLossMax,
};
std::string_view to_string(AttackObjective o);
AttackObjective attack_objective_from_string(std::string_view name);

struct AttackConfig {
  std::size_t k_sites = 1;  // 0 disables the attack
  AttackObjective objective = AttackObjective::TaskLossMax;
  std::size_t iterations = 3;
  std::uint64_t rng_seed = 0;
  SiteFilter filter = SiteFilter::Both;
  /// Start from a random view instead of P itself.
  bool random_start = false;
};

/// What the attack moves away from: the clean representation for
/// ContrastiveMax, the gold target for TaskLossMax.
struct Anchor {
  Vector z;
  std::vector<TokenId> target;
};

struct AttackResult {
  View view;
  double objective_before = 0.0;
  double objective_after = 0.0;
  /// Sum of the first-order scores of every accepted substitution.
  double linear_gain = 0.0;
  std::vector<Transformation> chosen;
  /// Objective after each pass (index 0: starting point).
  std::vector<double> trace;
};

/// score(w) = Σ_p (e_w - e_current) · g_p for every candidate w, where g_p
/// are the rows of `grads` (one per site position) and e are rows of
/// `embedding`.
std::vector<double> score_candidates(const Matrix& embedding, std::span<const TokenId> candidates,
                                     TokenId current, const Matrix& grads);
std::vector<double> score_candidates(const ModelParams& params,
                                     std::span<const TokenId> candidates, TokenId current,
                                     const Matrix& grads);
/// Index of the highest score; ties go to the lowest token id. Requires a
/// non-empty candidate list.
std::size_t best_candidate(std::span<const double> scores, std::span<const TokenId> candidates);

/// Objective value of a token sequence.
double attack_objective(const ModelParams& params, std::span<const TokenId> ids,
                        AttackObjective objective, const Anchor& anchor);
/// The objective as a function of z (for grad_inputs).
ZLoss attack_zloss(const ModelParams& params, AttackObjective objective, const Anchor& anchor);

/// First-order greedy token-substitution attack on min(k, #sites) randomly
/// chosen sites. Each pass recomputes input gradients, then for every chosen
/// site substitutes the top-scoring legal candidate when its score is
/// positive and the true objective does not decrease. Boolean sites are
/// decided by evaluating both forms. Without sites (or with k = 0) the
/// identity view is returned.
AttackResult attack_program(const ModelParams& params, const Program& p, const AttackConfig& cfg,
                            const Anchor& anchor, const Vocabulary& vocab,
                            const CandidatePool& pool);

/// t_adv(P) for pre-training: ContrastiveMax against encode(P), seeded from
/// `rng`.
View adversarial_view(const ModelParams& params, const Program& p, std::size_t k, Rng& rng,
                      const Vocabulary& vocab, const CandidatePool& pool,
                      std::size_t iterations = 3, bool random_start = true);

}  // namespace clawsat

#endif  // CLAWSAT_ATTACK_HPP
