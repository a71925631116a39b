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

#include "clawsat/analyze.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>

#include "clawsat/contrastive.hpp"
#include "clawsat/error.hpp"
#include "clawsat/parallel.hpp"
#include "clawsat/rng.hpp"

namespace clawsat {

double f1(std::span<const std::string> pred, std::span<const std::string> gold) {
  if (gold.empty()) throw EmptyGold("F1 against an empty gold sequence");
  if (pred.empty()) return 0.0;
  std::map<std::string_view, long> counts;
  for (const auto& g : gold) ++counts[g];
  long common = 0;
  for (const auto& p : pred) {
    auto it = counts.find(p);
    if (it != counts.end() && it->second > 0) {
      --it->second;
      ++common;
    }
  }
  if (common == 0) return 0.0;
  const double precision = static_cast<double>(common) / static_cast<double>(pred.size());
  const double recall = static_cast<double>(common) / static_cast<double>(gold.size());
  return 100.0 * 2.0 * precision * recall / (precision + recall);
}

std::vector<std::string> predict_words(const ModelParams& params, const Vocabulary& vocab,
                                       const Vocabulary& out_vocab,
                                       std::span<const std::string> code_tokens, Task task,
                                       std::size_t max_len) {
  const auto ids = vocab.encode(code_tokens);
  std::vector<TokenId> out = task == Task::Complete ? predict_completion(params, ids)
                                                    : predict_summary(params, ids, max_len);
  std::erase(out, Vocabulary::kEos);
  return out_vocab.decode(out);
}

double gen_f1(const ModelParams& params, const Vocabulary& vocab, const Vocabulary& out_vocab,
              const std::vector<Program>& programs, Task task, std::size_t max_len,
              std::size_t jobs) {
  if (programs.empty()) return 0.0;
  std::vector<double> scores(programs.size());
  parallel_for(programs.size(), jobs, [&](std::size_t i) {
    scores[i] = f1(predict_words(params, vocab, out_vocab, programs[i].tokens, task, max_len),
                   programs[i].summary);
  });
  double sum = 0.0;
  for (double s : scores) sum += s;
  return sum / static_cast<double>(scores.size());
}

EvalReport evaluate(const ModelParams& params, const Vocabulary& vocab,
                    const Vocabulary& out_vocab, const std::vector<Program>& test,
                    const AttackConfig& attack_cfg, const EvalOptions& opts) {
  if (test.empty()) throw Error("evaluation needs a non-empty test set");
  const CandidatePool pool = make_candidate_pool(vocab);
  EvalReport report;
  report.attack_cfg = attack_cfg;
  report.attack_cfg.objective = AttackObjective::TaskLossMax;
  report.per_example.resize(test.size());
  parallel_for(test.size(), opts.jobs, [&](std::size_t i) {
    const Program& p = test[i];
    ExampleResult& r = report.per_example[i];
    r.id = p.id;
    r.gold = p.summary;
    r.pred = predict_words(params, vocab, out_vocab, p.tokens, opts.task, opts.max_len);
    r.f1 = f1(r.pred, r.gold);
    if (attack_cfg.k_sites == 0) {
      r.attacked_pred = r.pred;
      r.attacked_f1 = r.f1;
      return;
    }
    AttackConfig cfg = report.attack_cfg;
    cfg.rng_seed = derive_seed(attack_cfg.rng_seed, "eval", p.id);
    Anchor anchor;
    anchor.target = out_vocab.encode(p.summary);
    const AttackResult adv = attack_program(params, p, cfg, anchor, vocab, pool);
    r.attacked_pred = predict_words(params, vocab, out_vocab, adv.view.tokens, opts.task, opts.max_len);
    r.attacked_f1 = f1(r.attacked_pred, r.gold);
  });
  for (const auto& r : report.per_example) {
    report.gen_f1 += r.f1;
    report.rob_f1 += r.attacked_f1;
  }
  report.gen_f1 /= static_cast<double>(test.size());
  report.rob_f1 /= static_cast<double>(test.size());
  return report;
}

std::vector<SweepCell> sensitivity_sweep(const ModelParams& params, const Vocabulary& vocab,
                                         const Vocabulary& out_vocab,
                                         const std::vector<Program>& test,
                                         const AttackConfig& base, const EvalOptions& opts) {
  std::vector<SweepCell> out;
  for (SiteFilter f : {SiteFilter::ReplaceOnly, SiteFilter::InsertOnly, SiteFilter::Both}) {
    for (std::size_t k : {1, 3, 5}) {
      AttackConfig cfg = base;
      cfg.filter = f;
      cfg.k_sites = k;
      const EvalReport r = evaluate(params, vocab, out_vocab, test, cfg, opts);
      out.push_back({f, k, r.gen_f1, r.rob_f1});
    }
  }
  return out;
}

double mean_task_loss(const ModelParams& params, const Vocabulary& vocab,
                      const Vocabulary& out_vocab, const std::vector<Program>& programs) {
  if (programs.empty()) throw Error("mean task loss over an empty set");
  double sum = 0.0;
  for (const auto& p : programs) {
    sum += task_loss(params, vocab.encode(p.tokens), out_vocab.encode(p.summary));
  }
  return sum / static_cast<double>(programs.size());
}

namespace {

ModelParams filter_normalized_direction(const ModelParams& theta, Rng& rng) {
  ModelParams d = ModelParams::zeros(theta.dims);
  ModelParams::zip(d, theta, [&](const std::string&, Matrix& m, const Matrix& ref, bool) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      for (Eigen::Index i = 0; i < m.rows(); ++i) m(i, j) = standard_normal(rng);
    }
    const double n = m.norm();
    const double target = ref.norm();
    if (n > 0.0) m *= target / n;
  });
  return d;
}

}  // namespace

LandscapeGrid loss_landscape(const Checkpoint& ckpt, const std::vector<Program>& test,
                             const GridSpec& grid, std::uint64_t seed, double fraction,
                             std::size_t jobs) {
  if (grid.min != -grid.max || grid.max <= 0.0) {
    throw ConfigError("landscape bounds must be symmetric about 0");
  }
  if (grid.steps < 2) throw ConfigError("landscape needs at least 2 steps per axis");
  if (test.empty()) throw Error("landscape needs a non-empty test set");
  LandscapeGrid out;
  Rng rng(derive_seed(seed, "landscape"));
  const auto want = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::llround(fraction * static_cast<double>(test.size()))));
  auto idx = sample_distinct(rng, test.size(), want);
  std::sort(idx.begin(), idx.end());
  std::vector<Program> sample;
  for (auto i : idx) {
    sample.push_back(test[i]);
    out.sample_ids.push_back(test[i].id);
  }
  out.delta = filter_normalized_direction(ckpt.params, rng);
  out.eta = filter_normalized_direction(ckpt.params, rng);

  const auto steps = static_cast<long>(grid.steps);
  for (long i = 0; i < steps; ++i) {
    const double c = grid.max * static_cast<double>(2 * i - (steps - 1)) / static_cast<double>(steps - 1);
    out.alphas.push_back(c);
    out.betas.push_back(c);
  }
  out.values.resize(steps, steps);
  parallel_for(grid.steps * grid.steps, jobs, [&](std::size_t cell) {
    const std::size_t i = cell / grid.steps;
    const std::size_t j = cell % grid.steps;
    const double a = out.alphas[i];
    const double b = out.betas[j];
    ModelParams moved = ckpt.params;
    if (a != 0.0 || b != 0.0) {
      std::vector<const Matrix*> ds, es;
      out.delta.for_each_tensor([&](const std::string&, const Matrix& m, bool) { ds.push_back(&m); });
      out.eta.for_each_tensor([&](const std::string&, const Matrix& m, bool) { es.push_back(&m); });
      std::size_t k = 0;
      moved.for_each_tensor([&](const std::string&, Matrix& m, bool) {
        m += a * *ds[k] + b * *es[k];
        ++k;
      });
    }
    out.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
        mean_task_loss(moved, ckpt.vocab, ckpt.out_vocab, sample);
  });
  return out;
}

std::string landscape_csv(const LandscapeGrid& grid) {
  auto num = [](double x) {
    char buf[64];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, p);
  };
  std::string out = "alpha,beta,loss\n";
  for (std::size_t i = 0; i < grid.alphas.size(); ++i) {
    for (std::size_t j = 0; j < grid.betas.size(); ++j) {
      out += num(grid.alphas[i]) + "," + num(grid.betas[j]) + "," +
             num(grid.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))) + "\n";
    }
  }
  return out;
}

double weight_deviation(const ModelParams& before, const ModelParams& after) {
  if (!(before.dims == after.dims)) throw ShapeMismatch("parameter shapes differ");
  std::vector<const Matrix*> bs;
  before.for_each_tensor([&](const std::string&, const Matrix& m, bool) { bs.push_back(&m); });
  double sum = 0.0;
  std::size_t k = 0;
  after.for_each_tensor([&](const std::string& name, const Matrix& m, bool enc) {
    const Matrix& b = *bs[k++];
    if (b.rows() != m.rows() || b.cols() != m.cols()) throw ShapeMismatch("tensor " + name);
    if (enc) sum += (m - b).squaredNorm();
  });
  return std::sqrt(sum);
}

EbeIndex build_ebe_index(const ModelParams& params, const Vocabulary& vocab,
                         const std::vector<Program>& train, std::size_t jobs) {
  if (train.empty()) throw EmptyTrainSet("explanation-by-example needs training programs");
  EbeIndex index;
  index.reps.resize(train.size());
  parallel_for(train.size(), jobs, [&](std::size_t i) {
    index.reps[i] = encode(params, vocab.encode(train[i].tokens));
  });
  for (const auto& p : train) index.ids.push_back(p.id);
  return index;
}

EbeMatch ebe_nearest(const EbeIndex& index, const Vector& z) {
  if (index.reps.empty()) throw EmptyTrainSet("explanation-by-example needs training programs");
  EbeMatch best;
  bool have = false;
  for (std::size_t i = 0; i < index.reps.size(); ++i) {
    const double s = cosine_sim(z, index.reps[i]);
    if (!have || s > best.similarity || (s == best.similarity && index.ids[i] < best.id)) {
      best = {i, index.ids[i], s};
      have = true;
    }
  }
  return best;
}

EbeMatch ebe_nearest(const ModelParams& params, const EbeIndex& index,
                     std::span<const TokenId> query) {
  return ebe_nearest(index, encode(params, query));
}

double ebe_match_rate(const ModelParams& params, const Vocabulary& vocab,
                      const Vocabulary& out_vocab, const EbeIndex& index,
                      const std::vector<Program>& test, const AttackConfig& attack_cfg,
                      std::size_t sample, std::size_t jobs) {
  if (test.empty()) throw Error("match rate needs test programs");
  Rng rng(derive_seed(attack_cfg.rng_seed, "ebe-sample"));
  auto idx = sample_distinct(rng, test.size(), sample);
  std::sort(idx.begin(), idx.end());
  const CandidatePool pool = make_candidate_pool(vocab);
  std::vector<char> same(idx.size());
  parallel_for(idx.size(), jobs, [&](std::size_t k) {
    const Program& p = test[idx[k]];
    const auto ids = vocab.encode(p.tokens);
    Anchor anchor;
    anchor.z = encode(params, ids);
    anchor.target = out_vocab.encode(p.summary);
    const EbeMatch clean = ebe_nearest(index, anchor.z);
    AttackConfig cfg = attack_cfg;
    cfg.rng_seed = derive_seed(attack_cfg.rng_seed, "ebe", p.id);
    const AttackResult adv = attack_program(params, p, cfg, anchor, vocab, pool);
    const EbeMatch attacked = ebe_nearest(params, index, vocab.encode(adv.view.tokens));
    same[k] = clean.index == attacked.index;
  });
  double hits = 0.0;
  for (char s : same) hits += s ? 1.0 : 0.0;
  return hits / static_cast<double>(idx.size());
}

}  // namespace clawsat
