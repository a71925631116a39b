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

#include "clawsat/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>

#include "clawsat/error.hpp"

namespace clawsat {

std::string_view to_string(TrainMode m) {
  switch (m) {
    case TrainMode::PretrainClaw: return "pretrain_claw";
    case TrainMode::PretrainRandomViews: return "pretrain_random_views";
    case TrainMode::FinetuneST: return "finetune_st";
    case TrainMode::FinetuneAT: return "finetune_at";
    case TrainMode::FinetuneSAT: return "finetune_sat";
  }
  return "?";
}

TrainMode train_mode_from_string(std::string_view name) {
  for (auto m : {TrainMode::PretrainClaw, TrainMode::PretrainRandomViews, TrainMode::FinetuneST,
                 TrainMode::FinetuneAT, TrainMode::FinetuneSAT}) {
    if (to_string(m) == name) return m;
  }
  throw ConfigError("unknown mode: " + std::string(name));
}

std::string_view to_string(Task t) { return t == Task::Summarize ? "summarize" : "complete"; }

Task task_from_string(std::string_view name) {
  if (name == "summarize") return Task::Summarize;
  if (name == "complete") return Task::Complete;
  throw ConfigError("task must be summarize or complete, got " + std::string(name));
}

ModelDims TrainConfig::dims() const {
  ModelDims d;
  d.embed = embed;
  d.hidden = hidden;
  d.proj = proj;
  d.dec_hidden = dec_hidden;
  d.pooling = pooling;
  return d;
}

namespace {

[[noreturn]] void bad(std::string_view key, std::string_view value, std::string_view why) {
  throw ConfigError(std::string(key) + "=" + std::string(value) + ": " + std::string(why));
}

std::size_t parse_size(std::string_view key, std::string_view v) {
  std::size_t out = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size()) bad(key, v, "expected a non-negative integer");
  return out;
}

std::uint64_t parse_u64(std::string_view key, std::string_view v) {
  std::uint64_t out = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size()) bad(key, v, "expected a non-negative integer");
  return out;
}

double parse_double(std::string_view key, std::string_view v) {
  double out = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size()) bad(key, v, "expected a number");
  return out;
}

bool parse_bool(std::string_view key, std::string_view v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  bad(key, v, "expected true or false");
}

std::string fmt(double x) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, p);
}
std::string fmt(std::size_t x) { return std::to_string(x); }
std::string fmt(bool x) { return x ? "true" : "false"; }

struct Entry {
  std::string key;
  std::string help;
  std::function<void(TrainConfig&, std::string_view)> set;
  std::function<std::string(const TrainConfig&)> get;
};

#define SIZE_ENTRY(name, help)                                                         \
  Entry {                                                                              \
    #name, help, [](TrainConfig& c, std::string_view v) { c.name = parse_size(#name, v); }, \
        [](const TrainConfig& c) { return fmt(c.name); }                               \
  }
#define DOUBLE_ENTRY(name, help)                                                         \
  Entry {                                                                                \
    #name, help, [](TrainConfig& c, std::string_view v) { c.name = parse_double(#name, v); }, \
        [](const TrainConfig& c) { return fmt(c.name); }                                 \
  }
#define BOOL_ENTRY(name, help)                                                         \
  Entry {                                                                              \
    #name, help, [](TrainConfig& c, std::string_view v) { c.name = parse_bool(#name, v); }, \
        [](const TrainConfig& c) { return fmt(c.name); }                               \
  }

const std::vector<Entry>& entries() {
  static const std::vector<Entry> all = {
      Entry{"mode", "pretrain_claw | pretrain_random_views | finetune_st | finetune_at | finetune_sat",
            [](TrainConfig& c, std::string_view v) { c.mode = train_mode_from_string(v); },
            [](const TrainConfig& c) { return std::string(to_string(c.mode)); }},
      Entry{"task", "summarize | complete",
            [](TrainConfig& c, std::string_view v) { c.task = task_from_string(v); },
            [](const TrainConfig& c) { return std::string(to_string(c.task)); }},
      DOUBLE_ENTRY(tau, "SAT regeneration period in epochs; values below 1 regenerate every batch"),
      SIZE_ENTRY(k_sites, "sites per view or adversarial companion; 0 disables attacks"),
      SIZE_ENTRY(attack_iterations, "greedy passes per attack"),
      Entry{"site_filter", "both | replace | insert",
            [](TrainConfig& c, std::string_view v) {
              try {
                c.site_filter = site_filter_from_string(v);
              } catch (const ConfigError&) {
                throw;
              } catch (const Error&) {
                bad("site_filter", v, "expected both, replace or insert");
              }
            },
            [](const TrainConfig& c) { return std::string(to_string(c.site_filter)); }},
      BOOL_ENTRY(adv_random_start, "pre-training attack starts from random payloads at its sites instead of P"),
      DOUBLE_ENTRY(temperature, "NT-Xent temperature"),
      DOUBLE_ENTRY(adv_weight, "weight of the adversarial pair term"),
      DOUBLE_ENTRY(pretrain_lr, "peak learning rate for pre-training"),
      DOUBLE_ENTRY(finetune_lr, "peak learning rate for fine-tuning"),
      SIZE_ENTRY(warmup_steps, "linear warm-up steps"),
      DOUBLE_ENTRY(lr_decay, "per-epoch multiplicative learning-rate decay"),
      DOUBLE_ENTRY(clip_norm, "global gradient-norm clip"),
      SIZE_ENTRY(epochs, "training epochs"),
      SIZE_ENTRY(batch_size, "programs per batch"),
      BOOL_ENTRY(freeze_encoder, "partial fine-tuning: train the decoder only"),
      BOOL_ENTRY(from_scratch, "fine-tune a freshly initialized model"),
      Entry{"seed", "base seed of every random stream",
            [](TrainConfig& c, std::string_view v) { c.seed = parse_u64("seed", v); },
            [](const TrainConfig& c) { return std::to_string(c.seed); }},
      SIZE_ENTRY(vocab_size, "code vocabulary size including 4 specials"),
      SIZE_ENTRY(summary_vocab_size, "output vocabulary size including 4 specials"),
      SIZE_ENTRY(max_summary_len, "greedy decoding length limit"),
      SIZE_ENTRY(eval_k_sites, "sites attacked when measuring Rob-F1"),
      SIZE_ENTRY(embed, "embedding width"),
      SIZE_ENTRY(hidden, "encoder hidden width per direction"),
      SIZE_ENTRY(proj, "representation width"),
      SIZE_ENTRY(dec_hidden, "decoder hidden width"),
      Entry{"pooling", "mean | final",
            [](TrainConfig& c, std::string_view v) { c.pooling = pooling_from_string(v); },
            [](const TrainConfig& c) { return std::string(to_string(c.pooling)); }},
      SIZE_ENTRY(jobs, "worker threads for attacks and evaluation"),
  };
  return all;
}

}  // namespace

void set_config_value(TrainConfig& cfg, std::string_view key, std::string_view value) {
  for (const auto& e : entries()) {
    if (e.key == key) {
      e.set(cfg, value);
      return;
    }
  }
  throw ConfigError("unknown config key: " + std::string(key));
}

void validate(const TrainConfig& c) {
  if (!(c.tau > 0.0)) throw ConfigError("tau must be > 0");
  if (!(c.temperature > 0.0)) throw ConfigError("temperature must be > 0");
  if (c.adv_weight < 0.0) throw ConfigError("adv_weight must be >= 0");
  if (!(c.pretrain_lr > 0.0) || !(c.finetune_lr > 0.0)) throw ConfigError("learning rates must be > 0");
  if (!(c.lr_decay > 0.0)) throw ConfigError("lr_decay must be > 0");
  if (!(c.clip_norm > 0.0)) throw ConfigError("clip_norm must be > 0");
  if (c.attack_iterations == 0) throw ConfigError("attack_iterations must be >= 1");
  if (c.epochs == 0) throw ConfigError("epochs must be >= 1");
  if (c.batch_size == 0) throw ConfigError("batch_size must be >= 1");
  if (is_pretrain(c.mode) && c.batch_size < 2) throw ConfigError("pre-training needs batch_size >= 2");
  if (c.vocab_size < 8 || c.summary_vocab_size < 5) throw ConfigError("vocabulary size too small");
  if (c.embed == 0 || c.hidden == 0 || c.proj == 0 || c.dec_hidden == 0) {
    throw ConfigError("model widths must be >= 1");
  }
  if (c.max_summary_len == 0) throw ConfigError("max_summary_len must be >= 1");
  if (c.jobs == 0) throw ConfigError("jobs must be >= 1");
}

TrainConfig parse_config(std::string_view text, TrainConfig cfg) {
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(lineno) + ": expected key=value");
    }
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    set_config_value(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  validate(cfg);
  return cfg;
}

TrainConfig load_config(const std::filesystem::path& path, TrainConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), base);
}

std::map<std::string, std::string> config_snapshot(const TrainConfig& cfg) {
  std::map<std::string, std::string> out;
  for (const auto& e : entries()) out[e.key] = e.get(cfg);
  return out;
}

std::string to_config_text(const TrainConfig& cfg) {
  std::string out;
  for (const auto& [k, v] : config_snapshot(cfg)) out += k + "=" + v + "\n";
  return out;
}

const std::vector<ConfigKey>& config_keys() {
  static const std::vector<ConfigKey> keys = [] {
    std::vector<ConfigKey> out;
    const TrainConfig defaults;
    for (const auto& e : entries()) out.push_back({e.key, e.get(defaults), e.help});
    return out;
  }();
  return keys;
}

}  // namespace clawsat
