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

#ifndef CLAWSAT_TRAIN_HPP
#define CLAWSAT_TRAIN_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "clawsat/checkpoint.hpp"
#include "clawsat/config.hpp"
#include "clawsat/corpus.hpp"
#include "clawsat/model.hpp"
#include "clawsat/transform.hpp"

namespace clawsat {

/// Adam with bias correction. Tensors outside the enabled groups are left
/// untouched, moments included.
class Adam {
 public:
  explicit Adam(const ModelParams& shape, double beta1 = 0.9, double beta2 = 0.999,
                double eps = 1e-8);
  void step(ModelParams& params, const ModelParams& grad, double lr, bool encoder, bool head);
  std::size_t steps() const { return t_; }

 private:
  ModelParams m_, v_;
  double beta1_, beta2_, eps_;
  std::size_t t_ = 0;
};

/// Linear warm-up to the base rate over warmup_steps, times lr_decay^epoch.
double learning_rate(const TrainConfig& cfg, std::size_t step, std::size_t epoch);

/// Scales the enabled tensor groups of `grad` so their joint norm is at most
/// max_norm; returns the norm before clipping.
double clip_global_norm(ModelParams& grad, double max_norm, bool encoder, bool head);

/// Sets every encoder tensor (embedding, encoder, projection) of `grad` to 0.
void zero_encoder(ModelParams& grad);

/// Contrastive loss components of one pre-training step.
struct StepLog {
  std::size_t step = 0;
  std::size_t epoch = 0;
  std::size_t batch = 0;
  double loss_rand_pair = 0.0;
  double loss_adv_pair = 0.0;
  double total = 0.0;
};

struct PretrainResult {
  Checkpoint checkpoint;
  std::vector<StepLog> log;
  std::size_t attack_rounds = 0;  // batches whose adversarial views were generated
  std::size_t steps = 0;
};

using EpochCallback = std::function<void(const Checkpoint&, std::size_t epoch)>;

/// A freshly initialized checkpoint for the given vocabularies.
Checkpoint fresh_checkpoint(const Vocabulary& vocab, const Vocabulary& out_vocab,
                            const TrainConfig& cfg);

/// Contrastive pre-training of θ. Per batch: (1) adversarial views against
/// the current θ (pretrain_claw only), (2) random views, (3) one optimizer
/// step on the upper-level loss. The decoder is not trained. Throws
/// NonFiniteLoss naming the batch.
PretrainResult pretrain(const std::vector<Program>& train, const Vocabulary& vocab,
                        const Vocabulary& out_vocab, const TrainConfig& cfg,
                        const EpochCallback& on_epoch = {});

/// One attack issued while building adversarial companions.
struct AttackCall {
  std::size_t epoch = 0;
  std::optional<std::size_t> batch;  // empty for full-split regeneration
  std::size_t program = 0;           // index into the training split
  std::uint64_t seed = 0;
  friend bool operator==(const AttackCall&, const AttackCall&) = default;
};

struct EpochRecord {
  std::size_t epoch = 0;
  double train_loss = 0.0;
  double valid_gen_f1 = 0.0;
};

struct FinetuneResult {
  Checkpoint best;                       // select_best over the history
  std::vector<Checkpoint> epochs;        // one per epoch
  std::vector<EpochRecord> history;
  std::vector<AttackCall> attack_trace;
  std::size_t regenerations = 0;         // regeneration events
  std::size_t max_companion_age = 0;     // epochs between generation and use
  std::size_t steps = 0;
};

/// Fine-tunes `init` on `train` in the mode of `cfg` (ST, AT or SAT), with
/// θ frozen when cfg.freeze_encoder. Throws VocabMismatch when `vocab` is not
/// the checkpoint's vocabulary.
FinetuneResult finetune(const Checkpoint& init, const std::vector<Program>& train,
                        const std::vector<Program>& valid, const Vocabulary& vocab,
                        const TrainConfig& cfg, const EpochCallback& on_epoch = {});

/// Index of the epoch with the highest validation Gen-F1, earliest on ties.
/// Throws EmptyHistory.
std::size_t select_best(const std::vector<EpochRecord>& history);

}  // namespace clawsat

#endif  // CLAWSAT_TRAIN_HPP
