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

#ifndef CLAWSAT_CONTRASTIVE_HPP
#define CLAWSAT_CONTRASTIVE_HPP

#include <span>
#include <vector>

#include "clawsat/model.hpp"

namespace clawsat {

/// a·b / (|a| |b|). Throws ZeroVector.
double cosine_sim(const Vector& a, const Vector& b);

/// Index-aligned positive pairs with in-batch negatives.
struct ContrastiveBatch {
  std::vector<Vector> anchors;
  std::vector<Vector> positives;
  double temperature = 0.07;
};

/// Symmetric NT-Xent over the pooled 2N representations: each of the 2N
/// entries is scored against its own positive with the other 2N-1 entries as
/// the denominator, and the 2N terms are averaged. Throws DegenerateBatch
/// when N < 2 or the lists differ in length, ConfigError when t <= 0.
double nt_xent(const ContrastiveBatch& batch);

/// nt_xent plus dL/d(anchor_i) and dL/d(positive_i).
double nt_xent_grad(const ContrastiveBatch& batch, std::vector<Vector>* d_anchors,
                    std::vector<Vector>* d_positives);

struct ClawLoss {
  double rand_pair = 0.0;  // NT-Xent(P, t_rand(P))
  double adv_pair = 0.0;   // NT-Xent(t_rand(P), t_adv(P)); 0 when its weight is 0
  double total = 0.0;      // rand_pair + adv_weight * adv_pair
};

/// Upper-level objective of the bi-level pre-training. When `grad` is given,
/// gradients of `total` are accumulated into it. With adv_weight == 0 the
/// adversarial views are neither encoded nor scored.
ClawLoss claw_upper_loss(const ModelParams& params,
                         std::span<const std::vector<TokenId>> programs,
                         std::span<const std::vector<TokenId>> rand_views,
                         std::span<const std::vector<TokenId>> adv_views, double temperature,
                         double adv_weight = 1.0, ModelParams* grad = nullptr);

}  // namespace clawsat

#endif  // CLAWSAT_CONTRASTIVE_HPP
