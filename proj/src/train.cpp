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

#include "clawsat/train.hpp"

#include <cmath>

#include "clawsat/analyze.hpp"
#include "clawsat/attack.hpp"
#include "clawsat/contrastive.hpp"
#include "clawsat/error.hpp"
#include "clawsat/parallel.hpp"
#include "clawsat/rng.hpp"

namespace clawsat {

Adam::Adam(const ModelParams& shape, double beta1, double beta2, double eps)
    : m_(ModelParams::zeros(shape.dims)),
      v_(ModelParams::zeros(shape.dims)),
      beta1_(beta1),
      beta2_(beta2),
      eps_(eps) {}

void Adam::step(ModelParams& params, const ModelParams& grad, double lr, bool encoder, bool head) {
  ++t_;
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  std::vector<const Matrix*> gs;
  std::vector<Matrix*> ms, vs;
  grad.for_each_tensor([&](const std::string&, const Matrix& g, bool) { gs.push_back(&g); });
  m_.for_each_tensor([&](const std::string&, Matrix& m, bool) { ms.push_back(&m); });
  v_.for_each_tensor([&](const std::string&, Matrix& v, bool) { vs.push_back(&v); });
  std::size_t k = 0;
  params.for_each_tensor([&](const std::string&, Matrix& p, bool enc) {
    const std::size_t i = k++;
    if (enc ? !encoder : !head) return;
    const Matrix& g = *gs[i];
    Matrix& m = *ms[i];
    Matrix& v = *vs[i];
    m = beta1_ * m + (1.0 - beta1_) * g;
    v = beta2_ * v + (1.0 - beta2_) * g.cwiseProduct(g);
    p.array() -= lr * (m.array() / c1) / ((v.array() / c2).sqrt() + eps_);
  });
}

double learning_rate(const TrainConfig& cfg, std::size_t step, std::size_t epoch) {
  double warm = 1.0;
  if (cfg.warmup_steps > 0) {
    warm = std::min(1.0, static_cast<double>(step + 1) / static_cast<double>(cfg.warmup_steps));
  }
  return cfg.base_lr() * warm * std::pow(cfg.lr_decay, static_cast<double>(epoch));
}

double clip_global_norm(ModelParams& grad, double max_norm, bool encoder, bool head) {
  double sq = 0.0;
  grad.for_each_tensor([&](const std::string&, const Matrix& g, bool enc) {
    if (enc ? encoder : head) sq += g.squaredNorm();
  });
  const double norm = std::sqrt(sq);
  if (norm > max_norm) {
    const double s = max_norm / norm;
    grad.for_each_tensor([&](const std::string&, Matrix& g, bool enc) {
      if (enc ? encoder : head) g *= s;
    });
  }
  return norm;
}

void zero_encoder(ModelParams& grad) {
  grad.for_each_tensor([](const std::string&, Matrix& g, bool enc) {
    if (enc) g.setZero();
  });
}

Checkpoint fresh_checkpoint(const Vocabulary& vocab, const Vocabulary& out_vocab,
                            const TrainConfig& cfg) {
  Checkpoint ck;
  ck.vocab = vocab;
  ck.out_vocab = out_vocab;
  ck.params = ModelParams::init(dims_for(vocab, out_vocab, cfg.dims()), derive_seed(cfg.seed, "model"));
  ck.config = config_snapshot(cfg);
  ck.epoch = 0;
  return ck;
}

namespace {

std::vector<std::vector<std::size_t>> make_batches(std::size_t n, std::size_t batch_size,
                                                   std::uint64_t seed, std::size_t epoch,
                                                   bool merge_singleton) {
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  Rng rng(derive_seed(seed, "order", {epoch}));
  shuffle(order, rng);
  std::vector<std::vector<std::size_t>> out;
  for (std::size_t at = 0; at < n; at += batch_size) {
    out.emplace_back(order.begin() + static_cast<std::ptrdiff_t>(at),
                     order.begin() + static_cast<std::ptrdiff_t>(std::min(n, at + batch_size)));
  }
  if (merge_singleton && out.size() > 1 && out.back().size() == 1) {
    out[out.size() - 2].push_back(out.back().front());
    out.pop_back();
  }
  return out;
}

void scale(ModelParams& g, double s) {
  g.for_each_tensor([&](const std::string&, Matrix& m, bool) { m *= s; });
}

}  // namespace

PretrainResult pretrain(const std::vector<Program>& train, const Vocabulary& vocab,
                        const Vocabulary& out_vocab, const TrainConfig& cfg,
                        const EpochCallback& on_epoch) {
  validate(cfg);
  if (!is_pretrain(cfg.mode)) throw ConfigError("pretrain needs a pretrain_* mode");
  if (train.size() < 2) throw DegenerateBatch("pre-training needs at least 2 programs");
  const bool claw = cfg.mode == TrainMode::PretrainClaw;
  const double adv_weight = claw ? cfg.adv_weight : 0.0;
  const bool attack = claw && cfg.k_sites > 0 && adv_weight != 0.0;
  const CandidatePool pool = make_candidate_pool(vocab);

  PretrainResult res;
  res.checkpoint = fresh_checkpoint(vocab, out_vocab, cfg);
  ModelParams& params = res.checkpoint.params;
  Adam adam(params);
  std::vector<std::vector<TokenId>> ids(train.size());
  for (std::size_t i = 0; i < train.size(); ++i) ids[i] = vocab.encode(train[i].tokens);

  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    const auto batches = make_batches(train.size(), cfg.batch_size, cfg.seed, epoch, true);
    for (std::size_t b = 0; b < batches.size(); ++b) {
      const auto& batch = batches[b];
      std::vector<std::vector<TokenId>> clean, rand, adv;
      for (std::size_t i : batch) clean.push_back(ids[i]);

      if (attack) {
        adv.resize(batch.size());
        parallel_for(batch.size(), cfg.jobs, [&](std::size_t j) {
          Rng rng(derive_seed(cfg.seed, "adv", {epoch, b, j}));
          const View v = adversarial_view(params, train[batch[j]], cfg.k_sites, rng, vocab, pool,
                                          cfg.attack_iterations, cfg.adv_random_start);
          adv[j] = vocab.encode(v.tokens);
        });
        ++res.attack_rounds;
      } else if (adv_weight != 0.0) {
        adv = clean;
      }

      Rng rng(derive_seed(cfg.seed, "rand", {epoch, b}));
      for (std::size_t i : batch) {
        const View v = random_view_or_identity(train[i], cfg.k_sites, pool, vocab, rng, cfg.site_filter);
        rand.push_back(vocab.encode(v.tokens));
      }

      ModelParams grad = ModelParams::zeros(params.dims);
      ClawLoss loss;
      try {
        loss = claw_upper_loss(params, clean, rand, adv, cfg.temperature, adv_weight, &grad);
      } catch (const NonFiniteLoss&) {
        throw NonFiniteLoss("non-finite loss in epoch " + std::to_string(epoch) + " batch " +
                            std::to_string(b));
      }
      if (!grad.all_finite()) {
        throw NonFiniteLoss("non-finite gradient in epoch " + std::to_string(epoch) + " batch " +
                            std::to_string(b));
      }
      clip_global_norm(grad, cfg.clip_norm, true, false);
      adam.step(params, grad, learning_rate(cfg, res.steps, epoch), true, false);
      res.log.push_back({res.steps, epoch, b, loss.rand_pair, loss.adv_pair, loss.total});
      ++res.steps;
    }
    res.checkpoint.epoch = static_cast<int>(epoch + 1);
    if (on_epoch) on_epoch(res.checkpoint, epoch);
  }
  return res;
}

std::size_t select_best(const std::vector<EpochRecord>& history) {
  if (history.empty()) throw EmptyHistory("no epochs recorded");
  std::size_t best = 0;
  for (std::size_t i = 1; i < history.size(); ++i) {
    if (history[i].valid_gen_f1 > history[best].valid_gen_f1) best = i;
  }
  return best;
}

namespace {

struct Companion {
  std::vector<TokenId> ids;
  Vector z;  // cached representation when θ is frozen
  std::size_t epoch = 0;
};

}  // namespace

FinetuneResult finetune(const Checkpoint& init, const std::vector<Program>& train,
                        const std::vector<Program>& valid, const Vocabulary& vocab,
                        const TrainConfig& cfg, const EpochCallback& on_epoch) {
  validate(cfg);
  if (is_pretrain(cfg.mode)) throw ConfigError("finetune needs a finetune_* mode");
  if (train.empty()) throw EmptyTrainSet("fine-tuning needs training programs");
  if (init.vocab.digest() != vocab.digest()) {
    throw VocabMismatch("checkpoint vocabulary " + init.vocab.digest() +
                        " does not match corpus vocabulary " + vocab.digest());
  }
  const Vocabulary& out_vocab = init.out_vocab;
  const bool frozen = cfg.freeze_encoder;
  const bool adversarial = cfg.mode != TrainMode::FinetuneST && cfg.k_sites > 0;
  const bool per_batch =
      cfg.mode == TrainMode::FinetuneAT || (cfg.mode == TrainMode::FinetuneSAT && cfg.tau < 1.0);
  const auto period = static_cast<std::size_t>(std::ceil(cfg.tau));
  const CandidatePool pool = make_candidate_pool(vocab);

  FinetuneResult res;
  ModelParams params = init.params;
  Adam adam(params);
  const std::size_t n = train.size();
  std::vector<std::vector<TokenId>> ids(n), targets(n);
  for (std::size_t i = 0; i < n; ++i) {
    ids[i] = vocab.encode(train[i].tokens);
    targets[i] = out_vocab.encode(train[i].summary);
  }
  std::vector<Vector> clean_z;
  if (frozen) {
    clean_z.resize(n);
    parallel_for(n, cfg.jobs, [&](std::size_t i) { clean_z[i] = encode(params, ids[i]); });
  }

  std::vector<std::optional<Companion>> cache(n);
  auto regenerate = [&](std::span<const std::size_t> which, std::size_t epoch,
                        std::optional<std::size_t> batch) {
    std::vector<std::uint64_t> seeds(which.size());
    for (std::size_t j = 0; j < which.size(); ++j) {
      seeds[j] = derive_seed(cfg.seed, "companion", {epoch, batch ? *batch + 1 : 0, which[j]});
      res.attack_trace.push_back({epoch, batch, which[j], seeds[j]});
    }
    parallel_for(which.size(), cfg.jobs, [&](std::size_t j) {
      const std::size_t i = which[j];
      AttackConfig ac;
      ac.k_sites = cfg.k_sites;
      ac.objective = AttackObjective::TaskLossMax;
      ac.iterations = cfg.attack_iterations;
      ac.rng_seed = seeds[j];
      ac.filter = cfg.site_filter;
      Anchor anchor;
      anchor.target = targets[i];
      const AttackResult r = attack_program(params, train[i], ac, anchor, vocab, pool);
      Companion c;
      c.ids = vocab.encode(r.view.tokens);
      if (frozen) c.z = encode(params, c.ids);
      c.epoch = epoch;
      cache[i] = std::move(c);
    });
    ++res.regenerations;
  };

  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    const auto batches = make_batches(n, cfg.batch_size, cfg.seed, epoch, false);
    if (adversarial && !per_batch && epoch % period == 0) {
      std::vector<std::size_t> all(n);
      for (std::size_t i = 0; i < n; ++i) all[i] = i;
      regenerate(all, epoch, std::nullopt);
    }
    double epoch_loss = 0.0;
    for (std::size_t b = 0; b < batches.size(); ++b) {
      const auto& batch = batches[b];
      if (adversarial && per_batch) regenerate(batch, epoch, b);

      ModelParams grad = ModelParams::zeros(params.dims);
      double loss = 0.0;
      std::size_t count = 0;
      auto add = [&](const std::vector<TokenId>& x, const Vector* z, const std::vector<TokenId>& y) {
        loss += frozen ? decoder_loss(params, *z, y, nullptr, &grad)
                       : task_loss_backward(params, x, y, &grad, nullptr);
        ++count;
      };
      for (std::size_t i : batch) add(ids[i], frozen ? &clean_z[i] : nullptr, targets[i]);
      if (adversarial) {
        for (std::size_t i : batch) {
          const Companion& c = *cache[i];
          res.max_companion_age = std::max(res.max_companion_age, epoch - c.epoch);
          add(c.ids, frozen ? &c.z : nullptr, targets[i]);
        }
      }
      loss /= static_cast<double>(count);
      scale(grad, 1.0 / static_cast<double>(count));
      if (!std::isfinite(loss) || !grad.all_finite()) {
        throw NonFiniteLoss("non-finite loss in epoch " + std::to_string(epoch) + " batch " +
                            std::to_string(b));
      }
      if (frozen) zero_encoder(grad);
      clip_global_norm(grad, cfg.clip_norm, !frozen, true);
      adam.step(params, grad, learning_rate(cfg, res.steps, epoch), !frozen, true);
      ++res.steps;
      epoch_loss += loss;
    }
    EpochRecord rec;
    rec.epoch = epoch;
    rec.train_loss = epoch_loss / static_cast<double>(batches.size());
    rec.valid_gen_f1 = valid.empty() ? 0.0
                                     : gen_f1(params, vocab, out_vocab, valid, cfg.task,
                                              cfg.max_summary_len, cfg.jobs);
    res.history.push_back(rec);
    Checkpoint ck;
    ck.params = params;
    ck.vocab = vocab;
    ck.out_vocab = out_vocab;
    ck.config = config_snapshot(cfg);
    ck.epoch = static_cast<int>(epoch + 1);
    if (on_epoch) on_epoch(ck, epoch);
    res.epochs.push_back(std::move(ck));
  }
  res.best = res.epochs[select_best(res.history)];
  return res;
}

}  // namespace clawsat
