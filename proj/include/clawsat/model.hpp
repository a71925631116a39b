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

#ifndef CLAWSAT_MODEL_HPP
#define CLAWSAT_MODEL_HPP

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "clawsat/token.hpp"

namespace clawsat {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

enum class Pooling { Mean, Final };
std::string_view to_string(Pooling p);
Pooling pooling_from_string(std::string_view name);

struct ModelDims {
  std::size_t vocab = 0;      // |Ω|, code tokens
  std::size_t out_vocab = 0;  // |Ω_out|, decoder tokens
  std::size_t embed = 64;
  std::size_t hidden = 128;   // per direction
  std::size_t proj = 64;
  std::size_t dec_hidden = 128;
  Pooling pooling = Pooling::Mean;
  friend bool operator==(const ModelDims&, const ModelDims&) = default;
};

/// Weights of one GRU layer (PyTorch layout: gates r, z, n stacked by rows).
struct GruWeights {
  Matrix W_i;  // 3H x in
  Matrix W_h;  // 3H x H
  Matrix b_i;  // 3H x 1
  Matrix b_h;  // 3H x 1
};

/// Embedding, 2-layer bidirectional GRU encoder and linear projection of the
/// pooled states (together θ), followed by the 2-layer GRU summary decoder
/// (the task head). The decoder sees z through its initial states and through its first-layer input,
/// which is [token embedding; z] at every step.
///
/// The same type holds gradients.
struct ModelParams {
  ModelDims dims;
  Matrix embedding;        // |Ω| x embed
  GruWeights enc[2][2];    // [layer][direction: 0 forward, 1 backward]
  Matrix proj_W;           // proj x 2H
  Matrix proj_b;           // proj x 1
  Matrix dec_embedding;    // |Ω_out| x embed
  Matrix init_W[2];        // dec_hidden x proj, per decoder layer
  Matrix init_b[2];
  GruWeights dec[2];       // layer 0 input width embed + proj
  Matrix out_W;            // |Ω_out| x dec_hidden
  Matrix out_b;            // |Ω_out| x 1

  /// All tensors zero.
  static ModelParams zeros(const ModelDims& dims);
  /// Embeddings ~ N(0, 1); every other tensor ~ U(-1/sqrt(fan), 1/sqrt(fan))
  /// with fan the input width of its layer (the hidden width for recurrent
  /// cells).
  static ModelParams init(const ModelDims& dims, std::uint64_t seed);

  /// Visits every tensor in a fixed order as f(name, tensor, in_encoder).
  template <typename F>
  void for_each_tensor(F&& f);
  template <typename F>
  void for_each_tensor(F&& f) const;
  /// Pairs tensors of two same-shaped parameter sets: f(name, a, b, in_encoder).
  template <typename F>
  static void zip(ModelParams& a, const ModelParams& b, F&& f);

  std::size_t num_parameters() const;
  bool all_finite() const;
  void set_zero();
};

/// dims.vocab/out_vocab set from the two vocabularies.
ModelDims dims_for(const Vocabulary& code, const Vocabulary& out, ModelDims base);

/// Scalar function of a representation z; writes dL/dz when `dz` is non-null.
using ZLoss = std::function<double(const Vector& z, Vector* dz)>;
/// Scalar function of the parameters; accumulates dL/dθ when `grad` is
/// non-null.
using LossFn = std::function<double(const ModelParams& params, ModelParams* grad)>;

struct EncoderCache;

/// One encoder forward pass whose intermediate values are kept so several
/// representations can be combined into a loss before backpropagating.
class EncoderPass {
 public:
  EncoderPass(const ModelParams& params, std::span<const TokenId> ids);
  EncoderPass(EncoderPass&&) noexcept;
  EncoderPass& operator=(EncoderPass&&) noexcept;
  ~EncoderPass();

  const Vector& z() const;
  /// Accumulates parameter gradients (embedding rows included) for dL/dz into
  /// `grad` and returns ∂L/∂(embedded input) as (length x embed).
  Matrix backward(const Vector& dz, ModelParams* grad) const;

 private:
  const ModelParams* params_;
  std::vector<TokenId> ids_;
  std::unique_ptr<EncoderCache> cache_;
};

/// Representation z of `ids` (length >= 1). Throws IdOutOfRange.
Vector encode(const ModelParams& params, std::span<const TokenId> ids);

/// Runs the encoder on `ids`, evaluates `loss(z)`, and backpropagates:
/// parameter gradients are accumulated into `grad`, and `d_inputs` (if given)
/// receives ∂loss/∂(embedded input) as a (length x embed) matrix.
double zloss_backward(const ModelParams& params, std::span<const TokenId> ids,
                      const ZLoss& loss, ModelParams* grad, Matrix* d_inputs);

/// Same as zloss_backward, but starting from caller-supplied embedded inputs
/// (rows = positions) instead of ids.
double zloss_backward_embedded(const ModelParams& params, const Matrix& inputs,
                               const ZLoss& loss, ModelParams* grad, Matrix* d_inputs);
Vector encode_embedded(const ModelParams& params, const Matrix& inputs);

/// Mean teacher-forced cross-entropy of the decoder conditioned on z over
/// target + EOS, with input BOS + target. Accumulates decoder gradients into
/// `grad` and writes dL/dz into `dz` when given. Throws EmptyGold or
/// IdOutOfRange.
double decoder_loss(const ModelParams& params, const Vector& z,
                    std::span<const TokenId> target, Vector* dz, ModelParams* grad);

/// Task loss ℓ_ft(program, target).
double task_loss(const ModelParams& params, std::span<const TokenId> ids,
                 std::span<const TokenId> target);
/// Task loss with gradients w.r.t. all parameters and optionally the inputs.
double task_loss_backward(const ModelParams& params, std::span<const TokenId> ids,
                          std::span<const TokenId> target, ModelParams* grad,
                          Matrix* d_inputs);

/// Exact gradient of `fn` w.r.t. every parameter. Throws NonFiniteLoss.
ModelParams grad_params(const ModelParams& params, const LossFn& fn);
/// Per-position gradient (length x embed) of `loss(encode(ids))` w.r.t. the
/// embedded inputs. Throws NonFiniteLoss.
Matrix grad_inputs(const ModelParams& params, const ZLoss& loss, std::span<const TokenId> ids);

/// Greedy decoding; stops at EOS (not emitted) or after max_len tokens.
/// Argmax ties resolve to the lowest id.
std::vector<TokenId> predict_summary(const ModelParams& params, std::span<const TokenId> ids,
                                     std::size_t max_len);
/// Exactly six greedy tokens, EOS-padded after an early EOS.
std::vector<TokenId> predict_completion(const ModelParams& params,
                                        std::span<const TokenId> ids);
inline constexpr std::size_t kCompletionLength = 6;

// ---------------------------------------------------------------- templates

template <typename F>
void ModelParams::for_each_tensor(F&& f) {
  static const char* kDir[2] = {"fwd", "bwd"};
  auto gru = [&](const std::string& prefix, GruWeights& g, bool enc) {
    f(prefix + ".W_i", g.W_i, enc);
    f(prefix + ".W_h", g.W_h, enc);
    f(prefix + ".b_i", g.b_i, enc);
    f(prefix + ".b_h", g.b_h, enc);
  };
  f(std::string("embedding"), embedding, true);
  for (int l = 0; l < 2; ++l) {
    for (int d = 0; d < 2; ++d) {
      gru("enc.l" + std::to_string(l) + "." + kDir[d], enc[l][d], true);
    }
  }
  f(std::string("proj.W"), proj_W, true);
  f(std::string("proj.b"), proj_b, true);
  f(std::string("dec.embedding"), dec_embedding, false);
  for (int l = 0; l < 2; ++l) {
    f("dec.init.l" + std::to_string(l) + ".W", init_W[l], false);
    f("dec.init.l" + std::to_string(l) + ".b", init_b[l], false);
  }
  for (int l = 0; l < 2; ++l) gru("dec.l" + std::to_string(l), dec[l], false);
  f(std::string("dec.out.W"), out_W, false);
  f(std::string("dec.out.b"), out_b, false);
}

template <typename F>
void ModelParams::for_each_tensor(F&& f) const {
  const_cast<ModelParams*>(this)->for_each_tensor(
      [&](const std::string& name, Matrix& m, bool enc) { f(name, static_cast<const Matrix&>(m), enc); });
}

template <typename F>
void ModelParams::zip(ModelParams& a, const ModelParams& b, F&& f) {
  std::vector<const Matrix*> others;
  b.for_each_tensor([&](const std::string&, const Matrix& m, bool) { others.push_back(&m); });
  std::size_t k = 0;
  a.for_each_tensor([&](const std::string& name, Matrix& m, bool enc) { f(name, m, *others[k++], enc); });
}

}  // namespace clawsat

#endif  // CLAWSAT_MODEL_HPP
