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

#ifndef CLAWSAT_ANALYZE_HPP
#define CLAWSAT_ANALYZE_HPP

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "clawsat/attack.hpp"
#include "clawsat/checkpoint.hpp"
#include "clawsat/config.hpp"
#include "clawsat/corpus.hpp"
#include "clawsat/model.hpp"

namespace clawsat {

/// Bag-of-tokens F1 in [0, 100] (multiset overlap). Throws EmptyGold.
double f1(std::span<const std::string> pred, std::span<const std::string> gold);

/// Decoded prediction for one program under the given task.
std::vector<std::string> predict_words(const ModelParams& params, const Vocabulary& vocab,
                                       const Vocabulary& out_vocab,
                                       std::span<const std::string> code_tokens, Task task,
                                       std::size_t max_len);

/// Mean F1 of clean predictions.
double gen_f1(const ModelParams& params, const Vocabulary& vocab, const Vocabulary& out_vocab,
              const std::vector<Program>& programs, Task task, std::size_t max_len,
              std::size_t jobs = 1);

struct ExampleResult {
  std::string id;
  std::vector<std::string> pred;
  std::vector<std::string> gold;
  std::vector<std::string> attacked_pred;
  double f1 = 0.0;
  double attacked_f1 = 0.0;
};

struct EvalReport {
  double gen_f1 = 0.0;
  double rob_f1 = 0.0;
  std::vector<ExampleResult> per_example;
  AttackConfig attack_cfg;
};

struct EvalOptions {
  Task task = Task::Summarize;
  std::size_t max_len = 12;
  std::size_t jobs = 1;
};

/// Gen-F1 on clean inputs and Rob-F1 on TaskLossMax-attacked inputs (the
/// objective in `attack_cfg` is ignored). Attack streams derive from
/// (attack_cfg.rng_seed, program id). Throws EmptyGold for an empty test set
/// entry's summary.
EvalReport evaluate(const ModelParams& params, const Vocabulary& vocab,
                    const Vocabulary& out_vocab, const std::vector<Program>& test,
                    const AttackConfig& attack_cfg, const EvalOptions& opts = {});

struct SweepCell {
  SiteFilter filter;
  std::size_t k_sites;
  double gen_f1;
  double rob_f1;
};

/// {replace, insert, both} x k in {1, 3, 5}, row-major in that order.
std::vector<SweepCell> sensitivity_sweep(const ModelParams& params, const Vocabulary& vocab,
                                         const Vocabulary& out_vocab,
                                         const std::vector<Program>& test,
                                         const AttackConfig& base, const EvalOptions& opts = {});

/// Mean task loss over programs (targets are their summaries).
double mean_task_loss(const ModelParams& params, const Vocabulary& vocab,
                      const Vocabulary& out_vocab, const std::vector<Program>& programs);

struct GridSpec {
  double min = -1.0;
  double max = 1.0;
  std::size_t steps = 21;
};

struct LandscapeGrid {
  std::vector<double> alphas;
  std::vector<double> betas;
  Matrix values;  // values(i, j) = f(alphas[i], betas[j])
  ModelParams delta;
  ModelParams eta;
  std::vector<std::string> sample_ids;
};

/// f(α, β) = mean task loss at θ* + αδ + βη over a seeded `fraction` sample
/// of `test`, with δ, η Gaussian directions rescaled per tensor to the norm
/// of the matching θ* tensor. Requires bounds symmetric about 0.
LandscapeGrid loss_landscape(const Checkpoint& ckpt, const std::vector<Program>& test,
                             const GridSpec& grid, std::uint64_t seed, double fraction = 0.064,
                             std::size_t jobs = 1);
/// "alpha,beta,loss" rows.
std::string landscape_csv(const LandscapeGrid& grid);

/// Frobenius norm of the difference over the encoder tensors θ (embedding,
/// encoder, projection). Throws ShapeMismatch.
double weight_deviation(const ModelParams& before, const ModelParams& after);

/// Cached representations of a training set.
struct EbeIndex {
  std::vector<Vector> reps;
  std::vector<std::string> ids;
};
/// Throws EmptyTrainSet.
EbeIndex build_ebe_index(const ModelParams& params, const Vocabulary& vocab,
                         const std::vector<Program>& train, std::size_t jobs = 1);

struct EbeMatch {
  std::size_t index = 0;
  std::string id;
  double similarity = 0.0;
};
/// Nearest training program by cosine similarity; ties go to the lowest id.
EbeMatch ebe_nearest(const ModelParams& params, const EbeIndex& index,
                     std::span<const TokenId> query);
EbeMatch ebe_nearest(const EbeIndex& index, const Vector& z);

/// Fraction of up to `sample` seeded test programs whose nearest training
/// neighbour is unchanged after attacking them with `attack_cfg`.
double ebe_match_rate(const ModelParams& params, const Vocabulary& vocab,
                      const Vocabulary& out_vocab, const EbeIndex& index,
                      const std::vector<Program>& test, const AttackConfig& attack_cfg,
                      std::size_t sample = 100, std::size_t jobs = 1);

}  // namespace clawsat

#endif  // CLAWSAT_ANALYZE_HPP
