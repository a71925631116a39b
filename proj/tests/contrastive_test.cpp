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

#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "clawsat/contrastive.hpp"
#include "clawsat/error.hpp"
#include "clawsat/model.hpp"
#include "testing.hpp"

namespace clawsat {
namespace {

// Direct double loop over the 2N pooled entries.
double nt_xent_oracle(const ContrastiveBatch& b) {
  std::vector<Vector> all = b.anchors;
  all.insert(all.end(), b.positives.begin(), b.positives.end());
  const std::size_t n = b.anchors.size();
  double total = 0.0;
  for (std::size_t i = 0; i < 2 * n; ++i) {
    const std::size_t pos = i < n ? i + n : i - n;
    double denom = 0.0;
    for (std::size_t k = 0; k < 2 * n; ++k) {
      if (k == i) continue;
      denom += std::exp(cosine_sim(all[i], all[k]) / b.temperature);
    }
    total += -std::log(std::exp(cosine_sim(all[i], all[pos]) / b.temperature) / denom);
  }
  return total / static_cast<double>(2 * n);
}

ContrastiveBatch random_batch(Rng& rng, std::size_t n, std::size_t d, double t) {
  ContrastiveBatch b;
  b.temperature = t;
  for (std::size_t i = 0; i < n; ++i) {
    b.anchors.push_back(testing::gaussian_vector(rng, d));
    b.positives.push_back(testing::gaussian_vector(rng, d));
  }
  return b;
}

TEST(Cosine, Basics) {
  Vector a(2), b(2), zero = Vector::Zero(2);
  a << 1, 0;
  b << 0, 2;
  EXPECT_DOUBLE_EQ(cosine_sim(a, a), 1.0);
  EXPECT_DOUBLE_EQ(cosine_sim(a, b), 0.0);
  EXPECT_DOUBLE_EQ(cosine_sim(a, -a), -1.0);
  EXPECT_THROW(cosine_sim(a, zero), ZeroVector);
}

TEST(NtXent, MatchesOracle) {
  Rng rng(1);
  for (std::size_t n : {2, 4, 8}) {
    for (double t : {0.07, 0.5, 1.0}) {
      const ContrastiveBatch b = random_batch(rng, n, 5, t);
      EXPECT_NEAR(nt_xent(b), nt_xent_oracle(b), 1e-9);
    }
  }
}

TEST(NtXent, AllEqualIsLogTwoNMinusOne) {
  Rng rng(2);
  const Vector v = testing::gaussian_vector(rng, 6);
  for (std::size_t n : {2, 4, 8}) {
    ContrastiveBatch b;
    b.temperature = 0.07;
    b.anchors.assign(n, v);
    b.positives.assign(n, v);
    EXPECT_NEAR(nt_xent(b), std::log(2.0 * static_cast<double>(n) - 1.0), 1e-9);
  }
}

TEST(NtXent, RejectsDegenerate) {
  Rng rng(3);
  ContrastiveBatch one = random_batch(rng, 1, 3, 0.5);
  EXPECT_THROW(nt_xent(one), DegenerateBatch);
  ContrastiveBatch uneven = random_batch(rng, 3, 3, 0.5);
  uneven.positives.pop_back();
  EXPECT_THROW(nt_xent(uneven), DegenerateBatch);
  ContrastiveBatch cold = random_batch(rng, 3, 3, 0.0);
  EXPECT_THROW(nt_xent(cold), ConfigError);
}

TEST(NtXent, PositivesCloserLowerLoss) {
  Rng rng(4);
  ContrastiveBatch b = random_batch(rng, 4, 6, 0.5);
  const double before = nt_xent(b);
  for (std::size_t i = 0; i < 4; ++i) b.positives[i] = b.anchors[i] + 0.01 * b.positives[i];
  EXPECT_LT(nt_xent(b), before);
}

TEST(NtXent, GradientMatchesFiniteDifferences) {
  Rng rng(5);
  for (double t : {0.07, 0.5}) {
    const ContrastiveBatch b = random_batch(rng, 4, 5, t);
    std::vector<Vector> da, dp;
    EXPECT_NEAR(nt_xent_grad(b, &da, &dp), nt_xent(b), 1e-12);
    const double h = 1e-6;
    for (std::size_t i = 0; i < 4; ++i) {
      for (int j = 0; j < 5; ++j) {
        ContrastiveBatch up = b, down = b;
        up.anchors[i](j) += h;
        down.anchors[i](j) -= h;
        EXPECT_NEAR(da[i](j), (nt_xent(up) - nt_xent(down)) / (2 * h), 1e-5);
        up = b;
        down = b;
        up.positives[i](j) += h;
        down.positives[i](j) -= h;
        EXPECT_NEAR(dp[i](j), (nt_xent(up) - nt_xent(down)) / (2 * h), 1e-5);
      }
    }
  }
}

TEST(ClawLoss, ComponentsAndGradient) {
  const ModelParams p = ModelParams::init(testing::tiny_dims(15, 6, 4), 3);
  Rng rng(6);
  std::vector<std::vector<TokenId>> programs, rand, adv;
  for (int i = 0; i < 3; ++i) {
    programs.push_back(testing::random_ids(rng, 4, 15));
    rand.push_back(testing::random_ids(rng, 5, 15));
    adv.push_back(testing::random_ids(rng, 4, 15));
  }
  auto zs = [&](const std::vector<std::vector<TokenId>>& xs) {
    std::vector<Vector> out;
    for (const auto& x : xs) out.push_back(encode(p, x));
    return out;
  };
  const ContrastiveBatch first{zs(programs), zs(rand), 0.5};
  const ContrastiveBatch second{zs(rand), zs(adv), 0.5};
  const ClawLoss l = claw_upper_loss(p, programs, rand, adv, 0.5, 0.7);
  EXPECT_NEAR(l.rand_pair, nt_xent(first), 1e-12);
  EXPECT_NEAR(l.adv_pair, nt_xent(second), 1e-12);
  EXPECT_NEAR(l.total, l.rand_pair + 0.7 * l.adv_pair, 1e-12);

  const ClawLoss off = claw_upper_loss(p, programs, rand, {}, 0.5, 0.0);
  EXPECT_NEAR(off.total, nt_xent(first), 1e-12);
  EXPECT_EQ(off.adv_pair, 0.0);

  ModelParams grad = ModelParams::zeros(p.dims);
  claw_upper_loss(p, programs, rand, adv, 0.5, 0.7, &grad);
  const ModelParams d = testing::gaussian_direction(p, rng);
  const double h = 1e-5;
  const double fd = (claw_upper_loss(testing::axpy(p, h, d), programs, rand, adv, 0.5, 0.7).total -
                     claw_upper_loss(testing::axpy(p, -h, d), programs, rand, adv, 0.5, 0.7).total) /
                    (2 * h);
  EXPECT_LT(testing::relative_error(testing::dot(grad, d), fd), 1e-6);
  EXPECT_EQ(grad.out_W.norm(), 0.0);
}

}  // namespace
}  // namespace clawsat
