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

#include "clawsat/contrastive.hpp"

#include <cmath>
#include <string>

#include "clawsat/error.hpp"

namespace clawsat {

double cosine_sim(const Vector& a, const Vector& b) {
  if (a.size() != b.size()) throw ShapeMismatch("cosine similarity of vectors of different sizes");
  double dot = 0.0, aa = 0.0, bb = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    dot += a(i) * b(i);
    aa += a(i) * a(i);
    bb += b(i) * b(i);
  }
  if (aa == 0.0 || bb == 0.0) throw ZeroVector("cosine similarity of a zero vector");
  // cos(a, a) == 1 exactly.
  return dot / std::sqrt(aa * bb);
}

double nt_xent(const ContrastiveBatch& batch) { return nt_xent_grad(batch, nullptr, nullptr); }

double nt_xent_grad(const ContrastiveBatch& batch, std::vector<Vector>* d_anchors,
                    std::vector<Vector>* d_positives) {
  const std::size_t n = batch.anchors.size();
  if (n != batch.positives.size()) throw DegenerateBatch("anchors and positives differ in length");
  if (n < 2) throw DegenerateBatch("NT-Xent needs at least 2 pairs, got " + std::to_string(n));
  if (!(batch.temperature > 0.0)) throw ConfigError("temperature must be > 0");
  const double t = batch.temperature;
  const std::size_t m = 2 * n;

  std::vector<const Vector*> z(m);
  for (std::size_t i = 0; i < n; ++i) {
    z[i] = &batch.anchors[i];
    z[n + i] = &batch.positives[i];
  }
  std::vector<Vector> u(m);
  std::vector<double> norm(m);
  for (std::size_t i = 0; i < m; ++i) {
    norm[i] = z[i]->norm();
    if (norm[i] == 0.0) throw ZeroVector("zero representation in contrastive batch");
    u[i] = *z[i] / norm[i];
  }
  Matrix s(m, m);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t k = i; k < m; ++k) s(i, k) = s(k, i) = u[i].dot(u[k]) / t;
  }

  double loss = 0.0;
  Matrix g = Matrix::Zero(m, m);  // dL/ds (already divided by t)
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t pos = i < n ? i + n : i - n;
    double mx = -INFINITY;
    for (std::size_t k = 0; k < m; ++k) {
      if (k != i) mx = std::max(mx, s(i, k));
    }
    double sum = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
      if (k != i) sum += std::exp(s(i, k) - mx);
    }
    loss += mx + std::log(sum) - s(i, pos);
    for (std::size_t k = 0; k < m; ++k) {
      if (k != i) g(i, k) = std::exp(s(i, k) - mx) / sum;
    }
    g(i, pos) -= 1.0;
  }
  loss /= static_cast<double>(m);
  if (!d_anchors && !d_positives) return loss;

  g /= static_cast<double>(m) * t;
  const std::size_t dim = static_cast<std::size_t>(u[0].size());
  std::vector<Vector> dz(m);
  for (std::size_t i = 0; i < m; ++i) {
    Vector du = Vector::Zero(static_cast<Eigen::Index>(dim));
    for (std::size_t k = 0; k < m; ++k) {
      if (k != i) du += (g(i, k) + g(k, i)) * u[k];
    }
    dz[i] = (du - u[i] * u[i].dot(du)) / norm[i];
  }
  if (d_anchors) d_anchors->assign(dz.begin(), dz.begin() + static_cast<std::ptrdiff_t>(n));
  if (d_positives) d_positives->assign(dz.begin() + static_cast<std::ptrdiff_t>(n), dz.end());
  return loss;
}

ClawLoss claw_upper_loss(const ModelParams& params,
                         std::span<const std::vector<TokenId>> programs,
                         std::span<const std::vector<TokenId>> rand_views,
                         std::span<const std::vector<TokenId>> adv_views, double temperature,
                         double adv_weight, ModelParams* grad) {
  const std::size_t n = programs.size();
  const bool use_adv = adv_weight != 0.0;
  if (rand_views.size() != n || (use_adv && adv_views.size() != n)) {
    throw DegenerateBatch("program and view lists are not index-aligned");
  }
  auto run = [&](std::span<const std::vector<TokenId>> seqs) {
    std::vector<EncoderPass> out;
    out.reserve(seqs.size());
    for (const auto& ids : seqs) out.emplace_back(params, ids);
    return out;
  };
  auto zs = [](const std::vector<EncoderPass>& passes) {
    std::vector<Vector> out;
    for (const auto& p : passes) out.push_back(p.z());
    return out;
  };
  const auto p_pass = run(programs);
  const auto r_pass = run(rand_views);
  std::vector<EncoderPass> a_pass;
  if (use_adv) a_pass = run(adv_views);

  ClawLoss out;
  std::vector<Vector> dp, dr1, dr2, da;
  ContrastiveBatch first{zs(p_pass), zs(r_pass), temperature};
  out.rand_pair = nt_xent_grad(first, grad ? &dp : nullptr, grad ? &dr1 : nullptr);
  if (use_adv) {
    ContrastiveBatch second{first.positives, zs(a_pass), temperature};
    out.adv_pair = nt_xent_grad(second, grad ? &dr2 : nullptr, grad ? &da : nullptr);
  }
  out.total = out.rand_pair + adv_weight * out.adv_pair;
  if (!std::isfinite(out.total)) throw NonFiniteLoss("contrastive loss is not finite");
  if (grad) {
    for (std::size_t i = 0; i < n; ++i) {
      p_pass[i].backward(dp[i], grad);
      Vector dr = dr1[i];
      if (use_adv) {
        dr += adv_weight * dr2[i];
        a_pass[i].backward(adv_weight * da[i], grad);
      }
      r_pass[i].backward(dr, grad);
    }
  }
  return out;
}

}  // namespace clawsat
