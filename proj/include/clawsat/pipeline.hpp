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

#ifndef CLAWSAT_PIPELINE_HPP
#define CLAWSAT_PIPELINE_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "clawsat/analyze.hpp"
#include "clawsat/config.hpp"
#include "clawsat/corpus.hpp"
#include "clawsat/manifest.hpp"
#include "clawsat/train.hpp"

namespace clawsat {

/// A corpus split prepared for one task. `pretrain` always holds whole
/// training programs; train/valid/test carry task targets (completion
/// examples for Task::Complete).
struct TaskData {
  std::vector<Program> pretrain;
  std::vector<Program> train;
  std::vector<Program> valid;
  std::vector<Program> test;
  Vocabulary vocab;
  Vocabulary out_vocab;
  std::string digest;  // corpus digest of the source split
};

TaskData make_task_data(const CorpusSplit& split, const TrainConfig& cfg);

/// Rows of {"epoch", ...} per pre-training epoch (batch-mean losses).
std::string pretrain_log_jsonl(const PretrainResult& r);
/// Rows of {"epoch", "train_loss", "valid_gen_f1"}.
std::string finetune_log_jsonl(const FinetuneResult& r);
std::string eval_report_json(const EvalReport& r, const std::string& manifest);

/// Pre-trains and writes dir/{checkpoint.ckpt, epoch-NNN.ckpt, train_log.jsonl,
/// manifest.json}.
PretrainResult run_pretrain(const TaskData& data, const TrainConfig& cfg,
                            const std::filesystem::path& dir, RunManifest manifest);

/// Fine-tunes and writes dir/{checkpoint.ckpt (selected epoch),
/// train_log.jsonl, manifest.json}.
FinetuneResult run_finetune(const TaskData& data, const Checkpoint& init, const TrainConfig& cfg,
                            const std::filesystem::path& dir, RunManifest manifest);

/// Settings of the desk-scale experiment matrix.
struct DeskOptions {
  std::uint64_t seed = 1;
  std::size_t seeds = 3;
  std::size_t corpus_size = 2000;
  TrainConfig pretrain;
  TrainConfig finetune;       // partial fine-tuning (frozen θ)
  TrainConfig full_finetune;  // full fine-tuning
};

/// Desk defaults: 32-wide model, 5 pre-training epochs at 1e-3, 30 partial
/// fine-tuning epochs at 1e-2, 15 full fine-tuning epochs at 3e-3.
DeskOptions default_desk_options();

struct DeskCell {
  std::uint64_t seed = 0;
  std::string pretrain;  // random-views | claw | none
  std::string finetune;  // st | at | sat
  bool partial = false;
  double gen_f1 = 0.0;
  double rob_f1 = 0.0;
};

struct DeskSummary {
  std::vector<DeskCell> cells;
};

/// Runs {random-views, claw, none} x {st, at, sat (tau 1)} x {partial, full}
/// for seeds seed, seed+1, ... and writes every checkpoint, evaluation and a
/// summary table under `out`. Progress lines go to `log` when given.
DeskSummary reproduce_desk(const std::filesystem::path& out, const DeskOptions& opts,
                           std::ostream* log = nullptr);

/// Gen-F1 / Rob-F1 of `params` on data.test with the evaluation attack of
/// `cfg` (eval_k_sites sites) seeded from `seed`.
EvalReport desk_evaluate(const TaskData& data, const ModelParams& params, const TrainConfig& cfg,
                         std::uint64_t seed);

/// Markdown table of per-cell means (and per-seed values) over seeds.
std::string desk_table(const DeskSummary& s);

}  // namespace clawsat

#endif  // CLAWSAT_PIPELINE_HPP
