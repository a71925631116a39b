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

#include "clawsat/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>

#include "CLI11.hpp"
#include "clawsat/analyze.hpp"
#include "clawsat/attack.hpp"
#include "clawsat/checkpoint.hpp"
#include "clawsat/config.hpp"
#include "clawsat/corpus.hpp"
#include "clawsat/error.hpp"
#include "clawsat/manifest.hpp"
#include "clawsat/parallel.hpp"
#include "clawsat/pipeline.hpp"
#include "clawsat/rng.hpp"
#include "clawsat/toy.hpp"
#include "clawsat/train.hpp"
#include "json.hpp"

namespace clawsat {
namespace {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

/// Raised for bad flag combinations found after parsing; maps to exit 2.
struct UsageError : Error {
  using Error::Error;
};

std::string flag_name(const std::string& key) {
  std::string f = key;
  std::replace(f.begin(), f.end(), '_', '-');
  return "--" + f;
}

/// One command-line flag per config key; given flags override the config
/// file, which overrides the defaults.
struct ConfigFlags {
  std::string file;
  std::map<std::string, std::string> values;
  std::map<std::string, bool> bools;
  std::map<std::string, CLI::Option*> options;

  void attach(CLI::App* sub, const std::set<std::string>& skip) {
    sub->add_option("--config", file, "flat key=value config file");
    for (const ConfigKey& k : config_keys()) {
      if (skip.count(k.key)) continue;
      const std::string help = k.help + " (default " + k.default_value + ")";
      if (k.default_value == "true" || k.default_value == "false") {
        options[k.key] = sub->add_flag(flag_name(k.key), bools[k.key], help);
      } else {
        options[k.key] = sub->add_option(flag_name(k.key), values[k.key], help);
      }
    }
  }

  TrainConfig resolve(TrainConfig cfg) const {
    try {
      if (!file.empty()) cfg = load_config(file, cfg);
      for (const auto& [key, opt] : options) {
        if (opt->count() == 0) continue;
        if (bools.count(key)) {
          set_config_value(cfg, key, bools.at(key) ? "true" : "false");
        } else {
          set_config_value(cfg, key, values.at(key));
        }
      }
      validate(cfg);
    } catch (const ConfigError& e) {
      throw UsageError(e.what());
    }
    return cfg;
  }
};

/// The configuration recorded in a checkpoint (unknown entries ignored).
TrainConfig checkpoint_config(const Checkpoint& ck) {
  TrainConfig cfg;
  for (const ConfigKey& k : config_keys()) {
    const auto it = ck.config.find(k.key);
    if (it != ck.config.end()) set_config_value(cfg, k.key, it->second);
  }
  const ModelDims& d = ck.params.dims;
  cfg.embed = d.embed;
  cfg.hidden = d.hidden;
  cfg.proj = d.proj;
  cfg.dec_hidden = d.dec_hidden;
  cfg.pooling = d.pooling;
  return cfg;
}

/// Corpus prepared with a checkpoint's vocabularies. Throws VocabMismatch
/// when the corpus does not reproduce the checkpoint's code vocabulary.
TaskData data_for_checkpoint(const fs::path& corpus, const Checkpoint& ck, const TrainConfig& cfg) {
  TaskData data = make_task_data(load_split(corpus), cfg);
  if (data.vocab.digest() != ck.vocab_hash()) {
    throw VocabMismatch("corpus vocabulary " + data.vocab.digest() +
                        " does not match checkpoint vocabulary " + ck.vocab_hash());
  }
  data.vocab = ck.vocab;
  data.out_vocab = ck.out_vocab;
  return data;
}

const std::vector<Program>& pick_split(const TaskData& d, const std::string& name) {
  if (name == "train") return d.train;
  if (name == "valid") return d.valid;
  return d.test;
}

std::string lineage_entry(const fs::path& p) { return p.string() + "@" + file_digest(p); }

void write_beside(const fs::path& artifact, RunManifest m) {
  m.artifacts.push_back(artifact.filename().string());
  write_text(fs::path(artifact.string() + ".manifest.json"), manifest_json(m));
}

std::string manifest_name(const fs::path& artifact) {
  return artifact.filename().string() + ".manifest.json";
}

std::string command_line(int argc, const char* const* argv) {
  std::string s;
  for (int i = 1; i < argc; ++i) {
    if (i > 1) s += ' ';
    s += argv[i];
  }
  return s;
}

struct AttackArgs {
  std::size_t k_sites = 1;
  std::size_t iterations = 3;
  std::string filter = "both";
  AttackConfig config(std::uint64_t seed) const {
    AttackConfig ac;
    ac.k_sites = k_sites;
    ac.iterations = iterations;
    ac.rng_seed = seed;
    try {
      ac.filter = site_filter_from_string(filter);
    } catch (const Error&) {
      throw UsageError("--filter: expected both, replace or insert, got '" + filter + "'");
    }
    if (iterations == 0) throw UsageError("--iterations must be >= 1");
    return ac;
  }
  void attach(CLI::App* sub) {
    sub->add_option("--k", k_sites, "sites attacked per program (0 = no attack)")->capture_default_str();
    sub->add_option("--iterations", iterations, "greedy attack passes")->capture_default_str();
    sub->add_option("--filter", filter, "site kinds: both | replace | insert")->capture_default_str();
  }
};

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"clawsat: contrastive pre-training with adversarial views and staggered "
               "adversarial fine-tuning for code models"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "help for every subcommand");

  std::uint64_t seed = 1;
  std::size_t jobs = 1;
  std::string corpus, out_path, ckpt_path, split_name = "test";

  // gen-corpus
  auto* gen = app.add_subcommand("gen-corpus", "write a seeded toy corpus (or split a JSONL file)");
  std::size_t size = 2000;
  std::string input;
  gen->add_option("--out", out_path, "output directory")->required();
  gen->add_option("--size", size, "number of toy programs")->capture_default_str();
  gen->add_option("--input", input, "split this JSONL corpus instead of generating one");
  gen->add_option("--seed", seed, "random seed")->capture_default_str();

  // pretrain
  auto* pre = app.add_subcommand("pretrain", "contrastive pre-training of the encoder");
  ConfigFlags pre_flags;
  std::string pre_mode;
  pre->add_option("--corpus", corpus, "corpus directory (train/valid/test.jsonl)")->required();
  pre->add_option("--out", out_path, "output directory")->required();
  pre->add_option("--mode", pre_mode, "claw | random-views (default claw)");
  pre_flags.attach(pre, {"mode"});

  // finetune
  auto* fin = app.add_subcommand("finetune", "fine-tune a checkpoint with ST, AT or SAT");
  ConfigFlags fin_flags;
  std::string fin_mode;
  fin->add_option("--corpus", corpus, "corpus directory")->required();
  fin->add_option("--out", out_path, "output directory")->required();
  fin->add_option("--from", ckpt_path, "pre-trained checkpoint");
  fin->add_option("--mode", fin_mode, "st | at | sat (default st)");
  fin_flags.attach(fin, {"mode"});

  // attack
  auto* att = app.add_subcommand("attack", "attack every program of a split, one JSONL row each");
  AttackArgs att_args;
  std::string objective = "task";
  att->add_option("--ckpt", ckpt_path, "checkpoint")->required();
  att->add_option("--corpus", corpus, "corpus directory")->required();
  att->add_option("--split", split_name, "train | valid | test")->capture_default_str();
  att->add_option("--objective", objective, "task | contrastive")->capture_default_str();
  att->add_option("--out", out_path, "output JSONL file")->required();
  att->add_option("--seed", seed, "random seed")->capture_default_str();
  att->add_option("--jobs", jobs, "worker threads")->capture_default_str();
  att_args.attach(att);

  // eval
  auto* ev = app.add_subcommand("eval", "Gen-F1 and Rob-F1 of a checkpoint");
  AttackArgs ev_args;
  ev->add_option("--ckpt", ckpt_path, "checkpoint")->required();
  ev->add_option("--corpus", corpus, "corpus directory")->required();
  ev->add_option("--split", split_name, "train | valid | test")->capture_default_str();
  ev->add_option("--out", out_path, "output JSON report")->required();
  ev->add_option("--seed", seed, "random seed")->capture_default_str();
  ev->add_option("--jobs", jobs, "worker threads")->capture_default_str();
  ev_args.attach(ev);

  // sweep
  auto* sw = app.add_subcommand("sweep", "Rob-F1 over site kinds x attack strengths 1, 3, 5");
  AttackArgs sw_args;
  sw->add_option("--ckpt", ckpt_path, "checkpoint")->required();
  sw->add_option("--corpus", corpus, "corpus directory")->required();
  sw->add_option("--split", split_name, "train | valid | test")->capture_default_str();
  sw->add_option("--out", out_path, "output JSON grid")->required();
  sw->add_option("--seed", seed, "random seed")->capture_default_str();
  sw->add_option("--jobs", jobs, "worker threads")->capture_default_str();
  sw->add_option("--iterations", sw_args.iterations, "greedy attack passes")->capture_default_str();

  // landscape
  auto* land = app.add_subcommand("landscape", "task-loss surface around a checkpoint (CSV)");
  GridSpec grid;
  double fraction = 0.064;
  land->add_option("--ckpt", ckpt_path, "checkpoint")->required();
  land->add_option("--corpus", corpus, "corpus directory")->required();
  land->add_option("--out", out_path, "output CSV (alpha,beta,loss)")->required();
  land->add_option("--min", grid.min, "lowest coordinate")->capture_default_str();
  land->add_option("--max", grid.max, "highest coordinate")->capture_default_str();
  land->add_option("--steps", grid.steps, "grid points per axis")->capture_default_str();
  land->add_option("--fraction", fraction, "share of the test split evaluated")->capture_default_str();
  land->add_option("--seed", seed, "random seed")->capture_default_str();
  land->add_option("--jobs", jobs, "worker threads")->capture_default_str();

  // ebe
  auto* ebe = app.add_subcommand("ebe", "explanation-by-example neighbour stability under attack");
  AttackArgs ebe_args;
  std::size_t sample = 100;
  ebe->add_option("--ckpt", ckpt_path, "checkpoint")->required();
  ebe->add_option("--corpus", corpus, "corpus directory")->required();
  ebe->add_option("--out", out_path, "output JSON")->required();
  ebe->add_option("--sample", sample, "test programs sampled")->capture_default_str();
  ebe->add_option("--seed", seed, "random seed")->capture_default_str();
  ebe->add_option("--jobs", jobs, "worker threads")->capture_default_str();
  ebe_args.attach(ebe);

  // reproduce-desk
  auto* desk = app.add_subcommand("reproduce-desk", "run the desk-scale experiment matrix");
  DeskOptions desk_opts = default_desk_options();
  std::size_t dim = desk_opts.finetune.embed;
  std::size_t pre_epochs = desk_opts.pretrain.epochs;
  std::size_t fin_epochs = desk_opts.finetune.epochs;
  desk->add_option("--out", out_path, "output directory")->required();
  desk->add_option("--seed", seed, "first seed")->capture_default_str();
  desk->add_option("--seeds", desk_opts.seeds, "number of seeds")->capture_default_str();
  desk->add_option("--size", desk_opts.corpus_size, "toy programs per seed")->capture_default_str();
  desk->add_option("--dim", dim, "model width")->capture_default_str();
  desk->add_option("--pretrain-epochs", pre_epochs, "pre-training epochs")->capture_default_str();
  std::optional<std::size_t> full_epochs;
  desk->add_option("--finetune-epochs", fin_epochs, "partial fine-tuning epochs")->capture_default_str();
  desk->add_option("--full-finetune-epochs", full_epochs, "full fine-tuning epochs (default 15)");
  desk->add_option("--jobs", jobs, "worker threads")->capture_default_str();

  if (argc > 1 && argv[1][0] != '-') {
    const auto subs = app.get_subcommands([](CLI::App*) { return true; });
    const bool known = std::any_of(subs.begin(), subs.end(),
                                   [&](CLI::App* s) { return s->get_name() == argv[1]; });
    if (!known) {
      err << "unknown subcommand '" << argv[1] << "'\nRun with --help for more information.\n";
      return 2;
    }
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  RunManifest manifest;
  manifest.command = command_line(argc, argv);
  try {
    if (gen->parsed()) {
      const std::vector<Program> programs =
          input.empty() ? generate_toy_corpus(size, seed) : load_jsonl(input);
      const CorpusSplit split = split_corpus(programs, seed);
      save_split(out_path, split);
      manifest.corpus_digest = corpus_digest(programs);
      manifest.seeds["seed"] = seed;
      manifest.artifacts = {"train.jsonl", "valid.jsonl", "test.jsonl"};
      write_manifest(out_path, manifest);
      out << "wrote " << split.train.size() << "/" << split.valid.size() << "/"
          << split.test.size() << " programs to " << out_path << "\n";
      return 0;
    }

    if (pre->parsed()) {
      TrainConfig base;
      base.mode = TrainMode::PretrainClaw;
      if (!pre_mode.empty()) {
        if (pre_mode == "claw") {
          base.mode = TrainMode::PretrainClaw;
        } else if (pre_mode == "random-views") {
          base.mode = TrainMode::PretrainRandomViews;
        } else {
          throw UsageError("--mode: expected claw or random-views, got '" + pre_mode + "'");
        }
      }
      TrainConfig cfg = pre_flags.resolve(base);
      if (!pre_mode.empty()) cfg.mode = base.mode;
      if (!is_pretrain(cfg.mode)) throw UsageError("pretrain needs a pretrain_* mode");
      const TaskData data = make_task_data(load_split(corpus), cfg);
      const PretrainResult r = run_pretrain(data, cfg, out_path, manifest);
      out << "pre-trained " << r.steps << " steps; final loss " << r.log.back().total << "\n";
      return 0;
    }

    if (fin->parsed()) {
      TrainConfig base;
      base.mode = TrainMode::FinetuneST;
      if (!fin_mode.empty()) {
        if (fin_mode == "st") base.mode = TrainMode::FinetuneST;
        else if (fin_mode == "at") base.mode = TrainMode::FinetuneAT;
        else if (fin_mode == "sat") base.mode = TrainMode::FinetuneSAT;
        else throw UsageError("--mode: expected st, at or sat, got '" + fin_mode + "'");
      }
      TrainConfig cfg = fin_flags.resolve(base);
      if (!fin_mode.empty()) cfg.mode = base.mode;
      if (is_pretrain(cfg.mode)) throw UsageError("finetune needs a finetune_* mode");
      if (ckpt_path.empty() && !cfg.from_scratch) {
        throw UsageError("--from: a checkpoint is required unless --from-scratch is given");
      }
      if (!ckpt_path.empty() && cfg.from_scratch) {
        throw UsageError("--from and --from-scratch are mutually exclusive");
      }
      Checkpoint init;
      TaskData data;
      if (cfg.from_scratch) {
        data = make_task_data(load_split(corpus), cfg);
        init = fresh_checkpoint(data.vocab, data.out_vocab, cfg);
      } else {
        init = load_checkpoint(ckpt_path);
        const TrainConfig pre_cfg = checkpoint_config(init);
        cfg.task = pre_cfg.task;
        cfg.vocab_size = pre_cfg.vocab_size;
        cfg.summary_vocab_size = pre_cfg.summary_vocab_size;
        cfg.embed = pre_cfg.embed;
        cfg.hidden = pre_cfg.hidden;
        cfg.proj = pre_cfg.proj;
        cfg.dec_hidden = pre_cfg.dec_hidden;
        cfg.pooling = pre_cfg.pooling;
        data = data_for_checkpoint(corpus, init, cfg);
        manifest.lineage.push_back(lineage_entry(ckpt_path));
      }
      const FinetuneResult r = run_finetune(data, init, cfg, out_path, manifest);
      out << "selected epoch " << r.best.epoch << " (valid Gen-F1 "
          << r.history[static_cast<std::size_t>(r.best.epoch - 1)].valid_gen_f1 << ")\n";
      return 0;
    }

    if (desk->parsed()) {
      desk_opts.seed = seed;
      for (TrainConfig* c : {&desk_opts.pretrain, &desk_opts.finetune, &desk_opts.full_finetune}) {
        c->embed = c->hidden = c->proj = c->dec_hidden = dim;
        c->jobs = jobs;
      }
      desk_opts.pretrain.epochs = pre_epochs;
      desk_opts.finetune.epochs = fin_epochs;
      if (full_epochs) desk_opts.full_finetune.epochs = *full_epochs;
      try {
        validate(desk_opts.pretrain);
        validate(desk_opts.finetune);
        validate(desk_opts.full_finetune);
      } catch (const ConfigError& e) {
        throw UsageError(e.what());
      }
      if (desk_opts.seeds == 0) throw UsageError("--seeds must be >= 1");
      const DeskSummary s = reproduce_desk(out_path, desk_opts, &err);
      out << desk_table(s);
      return 0;
    }

    // Analysis commands share checkpoint + corpus loading.
    const AttackConfig ac = (att->parsed()   ? att_args
                             : ev->parsed()  ? ev_args
                             : ebe->parsed() ? ebe_args
                                             : sw_args)
                                .config(seed);
    if (jobs == 0) throw UsageError("--jobs must be >= 1");
    if (land->parsed() && (grid.steps < 2 || !(grid.max > grid.min))) {
      throw UsageError("--steps must be >= 2 and --max > --min");
    }
    const Checkpoint ck = load_checkpoint(ckpt_path);
    const TrainConfig cfg = checkpoint_config(ck);
    const TaskData data = data_for_checkpoint(corpus, ck, cfg);
    manifest.corpus_digest = data.digest;
    manifest.seeds["seed"] = seed;
    manifest.lineage.push_back(lineage_entry(ckpt_path));
    manifest.config = ck.config;
    EvalOptions eo;
    eo.task = cfg.task;
    eo.max_len = cfg.max_summary_len;
    eo.jobs = jobs;
    const fs::path dest = out_path;

    if (att->parsed()) {
      AttackObjective obj;
      try {
        obj = attack_objective_from_string(objective);
      } catch (const Error&) {
        throw UsageError("--objective: expected task or contrastive, got '" + objective + "'");
      }
      const CandidatePool pool = make_candidate_pool(data.vocab);
      const auto& programs = pick_split(data, split_name);
      std::vector<std::string> rows(programs.size());
      parallel_for(programs.size(), jobs, [&](std::size_t i) {
        const Program& p = programs[i];
        AttackConfig c = ac;
        c.objective = obj;
        c.random_start = obj == AttackObjective::ContrastiveMax;
        c.rng_seed = derive_seed(seed, "attack", p.id);
        Anchor anchor;
        if (obj == AttackObjective::ContrastiveMax) {
          anchor.z = encode(ck.params, data.vocab.encode(p.tokens));
        } else {
          anchor.target = data.out_vocab.encode(p.summary);
        }
        const AttackResult r = attack_program(ck.params, p, c, anchor, data.vocab, pool);
        ordered_json sites = ordered_json::array();
        ordered_json payloads = ordered_json::array();
        for (const Transformation& t : r.chosen) {
          sites.push_back({{"kind", std::string(to_string(t.site.kind))},
                           {"positions", t.site.positions},
                           {"original", t.site.original}});
          payloads.push_back(t.payload);
        }
        ordered_json j;
        j["id"] = p.id;
        j["sites"] = std::move(sites);
        j["chosen_payloads"] = std::move(payloads);
        j["objective_before"] = r.objective_before;
        j["objective_after"] = r.objective_after;
        rows[i] = j.dump() + "\n";
      });
      std::string text;
      for (const auto& r : rows) text += r;
      write_text(dest, text);
      write_beside(dest, manifest);
      out << "attacked " << programs.size() << " programs\n";
      return 0;
    }

    if (ev->parsed()) {
      const EvalReport rep =
          evaluate(ck.params, data.vocab, data.out_vocab, pick_split(data, split_name), ac, eo);
      write_text(dest, eval_report_json(rep, manifest_name(dest)));
      write_beside(dest, manifest);
      out << "Gen-F1 " << rep.gen_f1 << "  Rob-F1 " << rep.rob_f1 << "\n";
      return 0;
    }

    if (sw->parsed()) {
      const auto cells = sensitivity_sweep(ck.params, data.vocab, data.out_vocab,
                                           pick_split(data, split_name), ac, eo);
      ordered_json j;
      j["manifest"] = manifest_name(dest);
      ordered_json rows = ordered_json::array();
      for (const SweepCell& c : cells) {
        rows.push_back({{"filter", std::string(to_string(c.filter))},
                        {"k_sites", c.k_sites},
                        {"gen_f1", c.gen_f1},
                        {"rob_f1", c.rob_f1}});
        out << to_string(c.filter) << " k=" << c.k_sites << " Rob-F1 " << c.rob_f1 << "\n";
      }
      j["cells"] = std::move(rows);
      write_text(dest, j.dump(2) + "\n");
      write_beside(dest, manifest);
      return 0;
    }

    if (land->parsed()) {
      const LandscapeGrid g = loss_landscape(ck, data.test, grid, seed, fraction, jobs);
      write_text(dest, landscape_csv(g));
      write_beside(dest, manifest);
      out << "wrote " << g.alphas.size() << "x" << g.betas.size() << " grid\n";
      return 0;
    }

    if (ebe->parsed()) {
      const EbeIndex index = build_ebe_index(ck.params, data.vocab, data.train, jobs);
      const double rate =
          ebe_match_rate(ck.params, data.vocab, data.out_vocab, index, data.test, ac, sample, jobs);
      ordered_json j;
      j["manifest"] = manifest_name(dest);
      j["match_rate"] = rate;
      j["sample"] = std::min(sample, data.test.size());
      j["k_sites"] = ac.k_sites;
      write_text(dest, j.dump(2) + "\n");
      write_beside(dest, manifest);
      out << "EBE match rate " << rate << "\n";
      return 0;
    }
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace clawsat
