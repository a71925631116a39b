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

#include "clawsat/attack.hpp"

#include <algorithm>
#include <cmath>

#include "clawsat/contrastive.hpp"
#include "clawsat/error.hpp"

namespace clawsat {

std::string_view to_string(AttackObjective o) {
  return o == AttackObjective::ContrastiveMax ? "contrastive" : "task";
}

AttackObjective attack_objective_from_string(std::string_view name) {
  if (name == "contrastive") return AttackObjective::ContrastiveMax;
  if (name == "task") return AttackObjective::TaskLossMax;
  throw ConfigError("attack objective must be contrastive or task, got " + std::string(name));
}

std::vector<double> score_candidates(const Matrix& embedding, std::span<const TokenId> candidates,
                                     TokenId current, const Matrix& grads) {
  const Vector g = grads.colwise().sum().transpose();
  const double base = embedding.row(current).dot(g);
  std::vector<double> scores;
  scores.reserve(candidates.size());
  for (TokenId w : candidates) scores.push_back(embedding.row(w).dot(g) - base);
  return scores;
}

std::vector<double> score_candidates(const ModelParams& params,
                                     std::span<const TokenId> candidates, TokenId current,
                                     const Matrix& grads) {
  return score_candidates(params.embedding, candidates, current, grads);
}

std::size_t best_candidate(std::span<const double> scores, std::span<const TokenId> candidates) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < scores.size(); ++i) {
    if (scores[i] > scores[best] || (scores[i] == scores[best] && candidates[i] < candidates[best])) {
      best = i;
    }
  }
  return best;
}

ZLoss attack_zloss(const ModelParams& params, AttackObjective objective, const Anchor& anchor) {
  if (objective == AttackObjective::TaskLossMax) {
    return [&params, &anchor](const Vector& z, Vector* dz) {
      return decoder_loss(params, z, anchor.target, dz, nullptr);
    };
  }
  return [&anchor](const Vector& z, Vector* dz) {
    const double nz = z.norm();
    const double na = anchor.z.norm();
    if (nz == 0.0 || na == 0.0) throw ZeroVector("attack on a zero representation");
    const double c = z.dot(anchor.z) / (nz * na);
    if (dz) *dz = -(anchor.z / (nz * na) - c * z / (nz * nz));
    return 1.0 - c;
  };
}

double attack_objective(const ModelParams& params, std::span<const TokenId> ids,
                        AttackObjective objective, const Anchor& anchor) {
  return attack_zloss(params, objective, anchor)(encode(params, ids), nullptr);
}

namespace {

std::vector<std::string> taken_except(const std::vector<Transformation>& ts, std::size_t skip) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    if (i == skip || ts[i].site.kind == SiteKind::InsertPrint ||
        ts[i].site.kind == SiteKind::ReplaceBoolLiteral) {
      continue;
    }
    out.push_back(ts[i].payload);
  }
  return out;
}

std::string random_payload(const Program& p, const Site& site, const CandidatePool& pool,
                           const Vocabulary& vocab, const std::vector<std::string>& taken,
                           Rng& rng) {
  if (site.kind == SiteKind::ReplaceBoolLiteral) return bool_rewrite(site.original);
  const auto cands = payload_candidates(p, site, pool, vocab, taken);
  if (!cands.empty()) return vocab.text(cands[uniform_index(rng, cands.size())]);
  if (site.kind == SiteKind::InsertPrint) return "\"debug\"";
  if (site.kind == SiteKind::InsertDeadCode) return "unused_" + std::to_string(taken.size());
  return site.original;
}

}  // namespace

AttackResult attack_program(const ModelParams& params, const Program& p, const AttackConfig& cfg,
                            const Anchor& anchor, const Vocabulary& vocab,
                            const CandidatePool& pool) {
  std::vector<const Site*> eligible;
  for (const auto& s : p.sites) {
    if (site_allowed(cfg.filter, s.kind)) eligible.push_back(&s);
  }
  AttackResult res;
  const ZLoss zloss = attack_zloss(params, cfg.objective, anchor);
  auto objective = [&](const View& v) {
    return zloss(encode(params, vocab.encode(v.tokens)), nullptr);
  };
  if (cfg.k_sites == 0 || eligible.empty()) {
    res.view = identity_view(p);
    res.objective_before = res.objective_after = objective(res.view);
    res.trace = {res.objective_before};
    return res;
  }

  Rng rng(cfg.rng_seed);
  const auto picked = sample_distinct(rng, eligible.size(), cfg.k_sites);
  std::vector<Transformation> ts;
  for (std::size_t idx : picked) {
    const Site& site = *eligible[idx];
    Transformation t{site, site.original};
    if (is_insert(site.kind) || cfg.random_start) {
      t.payload = random_payload(p, site, pool, vocab, taken_except(ts, ts.size()), rng);
    }
    ts.push_back(std::move(t));
  }

  View view = apply_transformations(p, ts);
  std::vector<TokenId> ids = vocab.encode(view.tokens);
  double current = zloss(encode(params, ids), nullptr);
  res.objective_before = current;
  res.trace.push_back(current);

  auto try_payload = [&](std::size_t j, const std::string& payload) {
    std::string previous = ts[j].payload;
    ts[j].payload = payload;
    View candidate = apply_transformations(p, ts);
    std::vector<TokenId> cand_ids = vocab.encode(candidate.tokens);
    const double value = zloss(encode(params, cand_ids), nullptr);
    if (value >= current) {
      current = value;
      view = std::move(candidate);
      ids = std::move(cand_ids);
      return true;
    }
    ts[j].payload = std::move(previous);
    return false;
  };

  for (std::size_t pass = 0; pass < cfg.iterations; ++pass) {
    bool changed = false;
    bool stale_layout = true;
    Matrix grads;
    for (std::size_t j = 0; j < ts.size(); ++j) {
      const Site& site = ts[j].site;
      if (site.kind == SiteKind::ReplaceBoolLiteral) {
        const std::string alt = ts[j].payload == site.original ? bool_rewrite(site.original)
                                                                : site.original;
        if (try_payload(j, alt)) {
          changed = true;
          stale_layout = true;
        }
        continue;
      }
      if (stale_layout) {
        grads = grad_inputs(params, zloss, ids);
        stale_layout = false;
      }
      const auto cands = payload_candidates(p, site, pool, vocab, taken_except(ts, j));
      if (cands.empty()) continue;
      Matrix g(static_cast<Eigen::Index>(view.payload_positions[j].size()), grads.cols());
      for (std::size_t r = 0; r < view.payload_positions[j].size(); ++r) {
        g.row(static_cast<Eigen::Index>(r)) =
            grads.row(static_cast<Eigen::Index>(view.payload_positions[j][r]));
      }
      const TokenId cur_id = vocab.id(ts[j].payload);
      const auto scores = score_candidates(params, cands, cur_id, g);
      const std::size_t best = best_candidate(scores, cands);
      if (!(scores[best] > 0.0) || vocab.text(cands[best]) == ts[j].payload) continue;
      if (try_payload(j, vocab.text(cands[best]))) {
        res.linear_gain += scores[best];
        changed = true;
      }
    }
    res.trace.push_back(current);
    if (!changed) break;
  }
  res.view = std::move(view);
  res.objective_after = current;
  res.chosen = std::move(ts);
  return res;
}

View adversarial_view(const ModelParams& params, const Program& p, std::size_t k, Rng& rng,
                      const Vocabulary& vocab, const CandidatePool& pool, std::size_t iterations,
                      bool random_start) {
  AttackConfig cfg;
  cfg.k_sites = k;
  cfg.objective = AttackObjective::ContrastiveMax;
  cfg.iterations = iterations;
  cfg.rng_seed = rng();
  cfg.random_start = random_start;
  Anchor anchor;
  anchor.z = encode(params, vocab.encode(p.tokens));
  return attack_program(params, p, cfg, anchor, vocab, pool).view;
}

}  // namespace clawsat
