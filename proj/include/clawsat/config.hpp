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

#ifndef CLAWSAT_CONFIG_HPP
#define CLAWSAT_CONFIG_HPP

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>

#include "clawsat/attack.hpp"
#include "clawsat/model.hpp"
#include "clawsat/transform.hpp"

namespace clawsat {

enum class TrainMode { PretrainClaw, PretrainRandomViews, FinetuneST, FinetuneAT, FinetuneSAT };
std::string_view to_string(TrainMode m);
TrainMode train_mode_from_string(std::string_view name);
inline bool is_pretrain(TrainMode m) {
  return m == TrainMode::PretrainClaw || m == TrainMode::PretrainRandomViews;
}

enum class Task { Summarize, Complete };
std::string_view to_string(Task t);
Task task_from_string(std::string_view name);

/// Every hyperparameter of a run. Keys of the flat config format are the
/// field names; `config_keys()` lists them with their defaults.
struct TrainConfig {
  TrainMode mode = TrainMode::FinetuneST;
  Task task = Task::Summarize;
  double tau = 1.0;                  // SAT regeneration period in epochs; < 1 = every batch
  std::size_t k_sites = 1;           // sites per view / companion; 0 disables attacks
  std::size_t attack_iterations = 3;
  SiteFilter site_filter = SiteFilter::Both;
  bool adv_random_start = true;      // pre-training attack starts from random payloads
  double temperature = 0.07;
  double adv_weight = 1.0;
  double pretrain_lr = 1e-4;
  double finetune_lr = 1e-3;
  std::size_t warmup_steps = 100;
  double lr_decay = 1.0;             // multiplied into the rate once per epoch
  double clip_norm = 5.0;
  std::size_t epochs = 10;
  std::size_t batch_size = 32;
  bool freeze_encoder = false;
  bool from_scratch = false;
  std::uint64_t seed = 1;
  std::size_t vocab_size = 2000;
  std::size_t summary_vocab_size = 2000;
  std::size_t max_summary_len = 12;
  std::size_t eval_k_sites = 1;
  std::size_t embed = 64;
  std::size_t hidden = 128;
  std::size_t proj = 64;
  std::size_t dec_hidden = 128;
  Pooling pooling = Pooling::Mean;
  std::size_t jobs = 1;

  ModelDims dims() const;
  double base_lr() const { return is_pretrain(mode) ? pretrain_lr : finetune_lr; }
};

/// Sets one key. Throws ConfigError naming the key for unknown keys and
/// invalid values.
void set_config_value(TrainConfig& cfg, std::string_view key, std::string_view value);
/// Throws ConfigError when the combination is invalid.
void validate(const TrainConfig& cfg);
/// Flat key=value lines; '#' starts a comment; blank lines ignored.
TrainConfig parse_config(std::string_view text, TrainConfig base = {});
TrainConfig load_config(const std::filesystem::path& path, TrainConfig base = {});
/// Canonical key -> value snapshot.
std::map<std::string, std::string> config_snapshot(const TrainConfig& cfg);
std::string to_config_text(const TrainConfig& cfg);
/// (key, default, description) for every key.
struct ConfigKey {
  std::string key;
  std::string default_value;
  std::string help;
};
const std::vector<ConfigKey>& config_keys();

}  // namespace clawsat

#endif  // CLAWSAT_CONFIG_HPP
