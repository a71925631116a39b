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

#include "clawsat/corpus.hpp"
#include "clawsat/error.hpp"
#include "clawsat/model.hpp"
#include "clawsat/toy.hpp"
#include "clawsat/train.hpp"
#include "testing.hpp"

namespace clawsat {
namespace {

using testing::tiny_dims;

TEST(ModelParams, ShapesAndCount) {
  const ModelDims dims = tiny_dims(20, 9, 4);
  const ModelParams p = ModelParams::init(dims, 1);
  EXPECT_EQ(p.embedding.rows(), 20);
  EXPECT_EQ(p.enc[0][0].W_i.rows(), 12);
  EXPECT_EQ(p.enc[0][0].W_i.cols(), 4);
  EXPECT_EQ(p.enc[1][1].W_i.cols(), 8);
  EXPECT_EQ(p.proj_W.cols(), 8);
  EXPECT_EQ(p.dec[0].W_i.cols(), 8);
  EXPECT_EQ(p.out_W.rows(), 9);
  std::size_t total = 0;
  p.for_each_tensor([&](const std::string&, const Matrix& m, bool) { total += m.size(); });
  EXPECT_EQ(p.num_parameters(), total);
  EXPECT_TRUE(p.all_finite());
}

TEST(ModelParams, InitDeterministic) {
  const ModelDims dims = tiny_dims(20, 9, 4);
  const ModelParams a = ModelParams::init(dims, 7);
  const ModelParams b = ModelParams::init(dims, 7);
  const ModelParams c = ModelParams::init(dims, 8);
  EXPECT_TRUE(a.embedding == b.embedding);
  EXPECT_TRUE(a.out_W == b.out_W);
  EXPECT_FALSE(a.embedding == c.embedding);
}

TEST(Encoder, RepresentationShapeAndPassAgreement) {
  const ModelParams p = ModelParams::init(tiny_dims(20, 9, 5), 2);
  Rng rng(1);
  const auto ids = testing::random_ids(rng, 7, 20);
  const Vector z = encode(p, ids);
  EXPECT_EQ(z.size(), 5);
  EncoderPass pass(p, ids);
  EXPECT_LT((pass.z() - z).norm(), 1e-14);
  EXPECT_LT((encode_embedded(p, [&] {
               Matrix x(7, 5);
               for (int i = 0; i < 7; ++i) x.row(i) = p.embedding.row(ids[i]);
               return x;
             }()) - z).norm(), 1e-14);
}

TEST(Encoder, OrderSensitive) {
  const ModelParams p = ModelParams::init(tiny_dims(20, 9, 6), 3);
  const std::vector<TokenId> ids{4, 5, 6, 7, 8};
  const std::vector<TokenId> perm{8, 7, 6, 5, 4};
  EXPECT_GT((encode(p, ids) - encode(p, perm)).norm(), 1e-6);
}

TEST(Encoder, PoolingsDiffer) {
  const ModelParams mean = ModelParams::init(tiny_dims(20, 9, 6, Pooling::Mean), 3);
  ModelParams last = mean;
  last.dims.pooling = Pooling::Final;
  const std::vector<TokenId> ids{4, 5, 6, 7, 8};
  EXPECT_GT((encode(mean, ids) - encode(last, ids)).norm(), 1e-6);
}

TEST(Encoder, RejectsBadIds) {
  const ModelParams p = ModelParams::init(tiny_dims(20, 9, 4), 1);
  const std::vector<TokenId> bad{4, 20};
  EXPECT_THROW(encode(p, bad), IdOutOfRange);
  const std::vector<TokenId> neg{-1};
  EXPECT_THROW(encode(p, neg), IdOutOfRange);
}

TEST(Decoder, UniformLogitsGiveLogVocab) {
  ModelParams p = ModelParams::init(tiny_dims(20, 11, 4), 4);
  p.out_W.setZero();
  p.out_b.setZero();
  const std::vector<TokenId> target{4, 5, 6};
  const Vector z = encode(p, std::vector<TokenId>{4, 5});
  EXPECT_NEAR(decoder_loss(p, z, target, nullptr, nullptr), std::log(11.0), 1e-12);
}

TEST(Decoder, CrossEntropyMatchesOracle) {
  ModelParams p = ModelParams::init(tiny_dims(20, 8, 4), 5);
  p.out_W.setZero();
  Rng rng(3);
  p.out_b = testing::gaussian_vector(rng, 8);
  const std::vector<TokenId> target{4, 6, 4, 7};
  // Logits equal out_b at every step: average -log softmax over target + EOS.
  double lse = 0.0;
  for (int i = 0; i < 8; ++i) lse += std::exp(p.out_b(i, 0));
  lse = std::log(lse);
  double expected = 0.0;
  std::vector<TokenId> gold = target;
  gold.push_back(Vocabulary::kEos);
  for (TokenId y : gold) expected += lse - p.out_b(y, 0);
  expected /= static_cast<double>(gold.size());
  const Vector z = encode(p, std::vector<TokenId>{5});
  EXPECT_NEAR(decoder_loss(p, z, target, nullptr, nullptr), expected, 1e-12);
  EXPECT_NEAR(task_loss(p, std::vector<TokenId>{5}, target), expected, 1e-12);
}

TEST(Decoder, EmptyGoldRejected) {
  const ModelParams p = ModelParams::init(tiny_dims(20, 8, 4), 5);
  const Vector z = encode(p, std::vector<TokenId>{5});
  EXPECT_THROW(decoder_loss(p, z, std::vector<TokenId>{}, nullptr, nullptr), EmptyGold);
}

class GradientCheck : public ::testing::TestWithParam<Pooling> {};

TEST_P(GradientCheck, ParametersDirectional) {
  const ModelParams p = ModelParams::init(tiny_dims(12, 9, 4, GetParam()), 11);
  Rng rng(5);
  for (int probe = 0; probe < 5; ++probe) {
    const auto ids = testing::random_ids(rng, 2 + uniform_index(rng, 5), 12);
    const auto target = testing::random_ids(rng, 1 + uniform_index(rng, 4), 9);
    const ModelParams g = grad_params(p, [&](const ModelParams& q, ModelParams* grad) {
      return grad ? task_loss_backward(q, ids, target, grad, nullptr) : task_loss(q, ids, target);
    });
    const ModelParams d = testing::gaussian_direction(p, rng);
    const double h = 1e-5;
    const double fd = (task_loss(testing::axpy(p, h, d), ids, target) -
                       task_loss(testing::axpy(p, -h, d), ids, target)) /
                      (2 * h);
    EXPECT_LT(testing::relative_error(testing::dot(g, d), fd), 1e-6);
  }
}

TEST_P(GradientCheck, InputsDirectional) {
  const ModelParams p = ModelParams::init(tiny_dims(12, 9, 4, GetParam()), 12);
  Rng rng(6);
  const auto ids = testing::random_ids(rng, 5, 12);
  const Vector w = testing::gaussian_vector(rng, 4);
  const ZLoss loss = [&](const Vector& z, Vector* dz) {
    if (dz) *dz = w;
    return w.dot(z);
  };
  const Matrix g = grad_inputs(p, loss, ids);
  Matrix x(5, 4);
  for (int i = 0; i < 5; ++i) x.row(i) = p.embedding.row(ids[i]);
  Matrix d(5, 4);
  for (Eigen::Index i = 0; i < d.size(); ++i) d.data()[i] = standard_normal(rng);
  const double h = 1e-5;
  const double fd = (w.dot(encode_embedded(p, x + h * d)) - w.dot(encode_embedded(p, x - h * d))) / (2 * h);
  EXPECT_LT(testing::relative_error((g.array() * d.array()).sum(), fd), 1e-6);
}

INSTANTIATE_TEST_SUITE_P(Poolings, GradientCheck, ::testing::Values(Pooling::Mean, Pooling::Final));

TEST(Decoding, TiesResolveToLowestId) {
  ModelParams p = ModelParams::init(tiny_dims(12, 9, 4), 13);
  p.out_W.setZero();
  p.out_b.setZero();
  p.out_b(6, 0) = 1.0;
  p.out_b(5, 0) = 1.0;
  const auto pred = predict_summary(p, std::vector<TokenId>{4, 5}, 4);
  EXPECT_EQ(pred, (std::vector<TokenId>{5, 5, 5, 5}));
  p.out_b(Vocabulary::kEos, 0) = 2.0;
  EXPECT_TRUE(predict_summary(p, std::vector<TokenId>{4, 5}, 4).empty());
  EXPECT_EQ(predict_completion(p, std::vector<TokenId>{4, 5}),
            std::vector<TokenId>(kCompletionLength, Vocabulary::kEos));
}

TEST(Decoding, CompletionLength) {
  const ModelParams p = ModelParams::init(tiny_dims(12, 9, 4), 14);
  EXPECT_EQ(predict_completion(p, std::vector<TokenId>{4, 5, 6}).size(), kCompletionLength);
}

TEST(Training, OverfitsFivePrograms) {
  const auto programs = generate_toy_corpus(5, 2);
  const Vocabulary vocab = build_vocabulary(programs, 500);
  const Vocabulary out = build_summary_vocabulary(programs, 500);
  ModelDims base;
  base.embed = base.hidden = base.proj = base.dec_hidden = 16;
  ModelParams p = ModelParams::init(dims_for(vocab, out, base), 3);
  std::vector<std::vector<TokenId>> xs, ys;
  for (const Program& prog : programs) {
    xs.push_back(vocab.encode(prog.tokens));
    ys.push_back(out.encode(prog.summary));
  }
  Adam adam(p);
  double first = 0.0, last = 0.0;
  for (int step = 0; step < 300; ++step) {
    ModelParams grad = ModelParams::zeros(p.dims);
    double loss = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) loss += task_loss_backward(p, xs[i], ys[i], &grad, nullptr);
    if (step == 0) first = loss;
    last = loss;
    adam.step(p, grad, 1e-2, true, true);
  }
  EXPECT_LT(last, 0.05 * first);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    EXPECT_EQ(predict_summary(p, xs[i], 12), ys[i]) << programs[i].id;
  }
}

}  // namespace
}  // namespace clawsat
