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

#include "clawsat/pipeline.hpp"

#include <array>
#include <cstdio>
#include <map>
#include <sstream>

#include "clawsat/checkpoint.hpp"
#include "clawsat/rng.hpp"
#include "clawsat/toy.hpp"
#include "json.hpp"

namespace clawsat {

using nlohmann::ordered_json;

TaskData make_task_data(const CorpusSplit& split, const TrainConfig& cfg) {
  TaskData d;
  d.pretrain = split.train;
  if (cfg.task == Task::Complete) {
    d.train = completion_programs(split.train);
    d.valid = completion_programs(split.valid);
    d.test = completion_programs(split.test);
  } else {
    d.train = split.train;
    d.valid = split.valid;
    d.test = split.test;
  }
  d.vocab = build_vocabulary(split.train, cfg.vocab_size);
  d.out_vocab = build_summary_vocabulary(d.train, cfg.summary_vocab_size);
  std::vector<Program> all = split.train;
  all.insert(all.end(), split.valid.begin(), split.valid.end());
  all.insert(all.end(), split.test.begin(), split.test.end());
  d.digest = corpus_digest(all);
  return d;
}

std::string pretrain_log_jsonl(const PretrainResult& r) {
  std::map<std::size_t, std::array<double, 4>> sums;  // rand, adv, total, count
  for (const StepLog& s : r.log) {
    auto& a = sums[s.epoch];
    a[0] += s.loss_rand_pair;
    a[1] += s.loss_adv_pair;
    a[2] += s.total;
    a[3] += 1.0;
  }
  std::string out;
  for (const auto& [epoch, a] : sums) {
    ordered_json j;
    j["epoch"] = epoch + 1;
    j["loss_rand_pair"] = a[0] / a[3];
    j["loss_adv_pair"] = a[1] / a[3];
    j["loss"] = a[2] / a[3];
    out += j.dump() + "\n";
  }
  return out;
}

std::string finetune_log_jsonl(const FinetuneResult& r) {
  std::string out;
  for (const EpochRecord& e : r.history) {
    ordered_json j;
    j["epoch"] = e.epoch + 1;
    j["train_loss"] = e.train_loss;
    j["valid_gen_f1"] = e.valid_gen_f1;
    out += j.dump() + "\n";
  }
  return out;
}

std::string eval_report_json(const EvalReport& r, const std::string& manifest) {
  ordered_json j;
  j["manifest"] = manifest;
  j["gen_f1"] = r.gen_f1;
  j["rob_f1"] = r.rob_f1;
  j["attack"] = {{"k_sites", r.attack_cfg.k_sites},
                 {"iterations", r.attack_cfg.iterations},
                 {"filter", std::string(to_string(r.attack_cfg.filter))},
                 {"seed", r.attack_cfg.rng_seed}};
  ordered_json rows = ordered_json::array();
  for (const ExampleResult& e : r.per_example) {
    rows.push_back({{"id", e.id},
                    {"pred", e.pred},
                    {"attacked_pred", e.attacked_pred},
                    {"gold", e.gold},
                    {"f1", e.f1},
                    {"attacked_f1", e.attacked_f1}});
  }
  j["per_example"] = std::move(rows);
  return j.dump(2) + "\n";
}

PretrainResult run_pretrain(const TaskData& data, const TrainConfig& cfg,
                            const std::filesystem::path& dir, RunManifest manifest) {
  std::filesystem::create_directories(dir);
  manifest.config = config_snapshot(cfg);
  manifest.corpus_digest = data.digest;
  manifest.seeds["seed"] = cfg.seed;
  auto on_epoch = [&](const Checkpoint& ck, std::size_t epoch) {
    char name[32];
    std::snprintf(name, sizeof name, "epoch-%03zu.ckpt", epoch + 1);
    Checkpoint tagged = ck;
    tagged.config["manifest"] = "manifest.json";
    save_checkpoint(dir / name, tagged);
    manifest.artifacts.emplace_back(name);
  };
  PretrainResult r = pretrain(data.pretrain, data.vocab, data.out_vocab, cfg, on_epoch);
  r.checkpoint.config["manifest"] = "manifest.json";
  save_checkpoint(dir / "checkpoint.ckpt", r.checkpoint);
  write_text(dir / "train_log.jsonl", pretrain_log_jsonl(r));
  manifest.artifacts.emplace_back("checkpoint.ckpt");
  manifest.artifacts.emplace_back("train_log.jsonl");
  manifest.lineage.push_back((dir / "checkpoint.ckpt").filename().string() + "@" +
                             file_digest(dir / "checkpoint.ckpt"));
  write_manifest(dir, manifest);
  return r;
}

FinetuneResult run_finetune(const TaskData& data, const Checkpoint& init, const TrainConfig& cfg,
                            const std::filesystem::path& dir, RunManifest manifest) {
  std::filesystem::create_directories(dir);
  manifest.config = config_snapshot(cfg);
  manifest.corpus_digest = data.digest;
  manifest.seeds["seed"] = cfg.seed;
  FinetuneResult r = finetune(init, data.train, data.valid, data.vocab, cfg);
  r.best.config["manifest"] = "manifest.json";
  save_checkpoint(dir / "checkpoint.ckpt", r.best);
  write_text(dir / "train_log.jsonl", finetune_log_jsonl(r));
  manifest.artifacts.emplace_back("checkpoint.ckpt");
  manifest.artifacts.emplace_back("train_log.jsonl");
  manifest.lineage.push_back("checkpoint.ckpt@" + file_digest(dir / "checkpoint.ckpt"));
  write_manifest(dir, manifest);
  return r;
}

DeskOptions default_desk_options() {
  DeskOptions o;
  for (TrainConfig* c : {&o.pretrain, &o.finetune, &o.full_finetune}) {
    c->embed = 32;
    c->hidden = 32;
    c->proj = 32;
    c->dec_hidden = 32;
    c->batch_size = 32;
  }
  o.pretrain.mode = TrainMode::PretrainClaw;
  o.pretrain.epochs = 5;
  o.pretrain.pretrain_lr = 1e-3;
  o.pretrain.warmup_steps = 20;
  o.finetune.mode = TrainMode::FinetuneST;
  o.finetune.epochs = 30;
  o.finetune.finetune_lr = 1e-2;
  o.finetune.warmup_steps = 0;
  o.full_finetune = o.finetune;
  o.full_finetune.epochs = 15;
  o.full_finetune.finetune_lr = 3e-3;
  return o;
}

namespace {

std::string seed_dir(std::uint64_t seed) { return "seed-" + std::to_string(seed); }

}  // namespace

DeskSummary reproduce_desk(const std::filesystem::path& out, const DeskOptions& opts,
                           std::ostream* log) {
  DeskSummary summary;
  RunManifest top;
  top.command = "reproduce-desk";
  top.config = config_snapshot(opts.full_finetune);
  top.seeds["seed"] = opts.seed;
  for (std::size_t s = 0; s < opts.seeds; ++s) {
    const std::uint64_t seed = opts.seed + s;
    const auto root = out / seed_dir(seed);
    TrainConfig pre = opts.pretrain;
    TrainConfig ft = opts.finetune;
    TrainConfig full = opts.full_finetune;
    pre.seed = ft.seed = full.seed = seed;
    top.seeds[seed_dir(seed)] = seed;

    const CorpusSplit split = split_corpus(generate_toy_corpus(opts.corpus_size, seed), seed);
    save_split(root / "corpus", split);
    const TaskData data = make_task_data(split, ft);
    RunManifest cm;
    cm.command = "gen-corpus";
    cm.corpus_digest = data.digest;
    cm.seeds["seed"] = seed;
    cm.artifacts = {"train.jsonl", "valid.jsonl", "test.jsonl"};
    write_manifest(root / "corpus", cm);

    std::map<std::string, Checkpoint> inits;
    for (const auto& [name, mode] : {std::pair{"random-views", TrainMode::PretrainRandomViews},
                                     std::pair{"claw", TrainMode::PretrainClaw}}) {
      TrainConfig c = pre;
      c.mode = mode;
      if (log) *log << "[seed " << seed << "] pretrain " << name << std::endl;
      RunManifest m;
      m.command = std::string("pretrain --mode ") + name;
      inits[name] = run_pretrain(data, c, root / ("pretrain-" + std::string(name)), m).checkpoint;
    }
    inits["none"] = fresh_checkpoint(data.vocab, data.out_vocab, ft);

    for (const char* pname : {"random-views", "claw", "none"}) {
      for (const auto& [fname, mode] : {std::pair{"st", TrainMode::FinetuneST},
                                        std::pair{"at", TrainMode::FinetuneAT},
                                        std::pair{"sat", TrainMode::FinetuneSAT}}) {
        for (bool partial : {true, false}) {
          TrainConfig c = partial ? ft : full;
          c.mode = mode;
          c.tau = 1.0;
          c.freeze_encoder = partial;
          const std::string cell =
              std::string(pname) + "-" + fname + "-" + (partial ? "partial" : "full");
          if (log) *log << "[seed " << seed << "] finetune " << cell << std::endl;
          RunManifest m;
          m.command = std::string("finetune --mode ") + fname + (partial ? " --freeze-encoder" : "");
          if (std::string(pname) != "none") {
            const auto parent = root / ("pretrain-" + std::string(pname)) / "checkpoint.ckpt";
            m.lineage.push_back("../pretrain-" + std::string(pname) + "/checkpoint.ckpt@" +
                                file_digest(parent));
          }
          const auto dir = root / cell;
          const FinetuneResult r = run_finetune(data, inits[pname], c, dir, m);

          const EvalReport rep = desk_evaluate(data, r.best.params, c, seed);
          write_text(dir / "eval.json", eval_report_json(rep, "manifest.json"));
          summary.cells.push_back({seed, pname, fname, partial, rep.gen_f1, rep.rob_f1});
          top.artifacts.push_back(seed_dir(seed) + "/" + cell + "/checkpoint.ckpt");
          top.artifacts.push_back(seed_dir(seed) + "/" + cell + "/eval.json");
        }
      }
    }
  }

  const std::string table = desk_table(summary);
  write_text(out / "summary.md", table);
  ordered_json cells = ordered_json::array();
  for (const DeskCell& c : summary.cells) {
    cells.push_back({{"seed", c.seed},
                     {"pretrain", c.pretrain},
                     {"finetune", c.finetune},
                     {"partial", c.partial},
                     {"gen_f1", c.gen_f1},
                     {"rob_f1", c.rob_f1}});
  }
  ordered_json sj;
  sj["manifest"] = "manifest.json";
  sj["cells"] = std::move(cells);
  write_text(out / "summary.json", sj.dump(2) + "\n");
  top.artifacts.emplace_back("summary.md");
  top.artifacts.emplace_back("summary.json");
  write_manifest(out, top);
  return summary;
}

EvalReport desk_evaluate(const TaskData& data, const ModelParams& params, const TrainConfig& cfg,
                         std::uint64_t seed) {
  AttackConfig ac;
  ac.k_sites = cfg.eval_k_sites;
  ac.iterations = cfg.attack_iterations;
  ac.filter = cfg.site_filter;
  ac.rng_seed = derive_seed(seed, "eval");
  EvalOptions eo;
  eo.task = cfg.task;
  eo.max_len = cfg.max_summary_len;
  eo.jobs = cfg.jobs;
  return evaluate(params, data.vocab, data.out_vocab, data.test, ac, eo);
}

std::string desk_table(const DeskSummary& s) {
  struct Acc {
    double gen = 0.0, rob = 0.0;
    std::size_t n = 0;
    std::string per_seed;
  };
  std::vector<std::string> order;
  std::map<std::string, Acc> acc;
  for (const DeskCell& c : s.cells) {
    const std::string key = c.pretrain + " | " + (c.partial ? "partial" : "full") + " | " + c.finetune;
    if (!acc.count(key)) order.push_back(key);
    Acc& a = acc[key];
    a.gen += c.gen_f1;
    a.rob += c.rob_f1;
    ++a.n;
    char buf[64];
    std::snprintf(buf, sizeof buf, "%s%.2f/%.2f", a.per_seed.empty() ? "" : " ", c.gen_f1, c.rob_f1);
    a.per_seed += buf;
  }
  std::ostringstream os;
  os << "| pretrain | fine-tuning | regime | Gen-F1 | Rob-F1 | per seed (Gen/Rob) |\n";
  os << "|---|---|---|---|---|---|\n";
  for (const std::string& key : order) {
    const Acc& a = acc[key];
    char buf[64];
    std::snprintf(buf, sizeof buf, " | %.2f | %.2f | ", a.gen / a.n, a.rob / a.n);
    os << "| " << key << buf << a.per_seed << " |\n";
  }
  return os.str();
}

}  // namespace clawsat
