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

#include "clawsat/model.hpp"

#include <cmath>

#include "clawsat/error.hpp"
#include "clawsat/rng.hpp"

namespace clawsat {

std::string_view to_string(Pooling p) { return p == Pooling::Mean ? "mean" : "final"; }

Pooling pooling_from_string(std::string_view name) {
  if (name == "mean") return Pooling::Mean;
  if (name == "final") return Pooling::Final;
  throw ConfigError("pooling must be mean or final, got " + std::string(name));
}

namespace {

void shape_gru(GruWeights& g, std::size_t in, std::size_t h) {
  g.W_i = Matrix::Zero(3 * h, in);
  g.W_h = Matrix::Zero(3 * h, h);
  g.b_i = Matrix::Zero(3 * h, 1);
  g.b_h = Matrix::Zero(3 * h, 1);
}

}  // namespace

ModelParams ModelParams::zeros(const ModelDims& d) {
  ModelParams p;
  p.dims = d;
  p.embedding = Matrix::Zero(d.vocab, d.embed);
  for (int dir = 0; dir < 2; ++dir) {
    shape_gru(p.enc[0][dir], d.embed, d.hidden);
    shape_gru(p.enc[1][dir], 2 * d.hidden, d.hidden);
  }
  p.proj_W = Matrix::Zero(d.proj, 2 * d.hidden);
  p.proj_b = Matrix::Zero(d.proj, 1);
  p.dec_embedding = Matrix::Zero(d.out_vocab, d.embed);
  for (int l = 0; l < 2; ++l) {
    p.init_W[l] = Matrix::Zero(d.dec_hidden, d.proj);
    p.init_b[l] = Matrix::Zero(d.dec_hidden, 1);
  }
  shape_gru(p.dec[0], d.embed + d.proj, d.dec_hidden);
  shape_gru(p.dec[1], d.dec_hidden, d.dec_hidden);
  p.out_W = Matrix::Zero(d.out_vocab, d.dec_hidden);
  p.out_b = Matrix::Zero(d.out_vocab, 1);
  return p;
}

ModelParams ModelParams::init(const ModelDims& dims, std::uint64_t seed) {
  ModelParams p = zeros(dims);
  Rng rng(derive_seed(seed, "init"));
  auto fan = [&](const std::string& name) -> double {
    if (name.rfind("enc.", 0) == 0) return static_cast<double>(dims.hidden);
    if (name.rfind("proj.", 0) == 0) return 2.0 * static_cast<double>(dims.hidden);
    if (name.rfind("dec.init.", 0) == 0) return static_cast<double>(dims.proj);
    return static_cast<double>(dims.dec_hidden);
  };
  p.for_each_tensor([&](const std::string& name, Matrix& m, bool) {
    const bool embedding = name == "embedding" || name == "dec.embedding";
    const double bound = embedding ? 0.0 : 1.0 / std::sqrt(fan(name));
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      for (Eigen::Index i = 0; i < m.rows(); ++i) {
        m(i, j) = embedding ? standard_normal(rng) : uniform_real(rng, -bound, bound);
      }
    }
  });
  return p;
}

std::size_t ModelParams::num_parameters() const {
  std::size_t n = 0;
  for_each_tensor([&](const std::string&, const Matrix& m, bool) { n += m.size(); });
  return n;
}

bool ModelParams::all_finite() const {
  bool ok = true;
  for_each_tensor([&](const std::string&, const Matrix& m, bool) { ok = ok && m.allFinite(); });
  return ok;
}

void ModelParams::set_zero() {
  for_each_tensor([](const std::string&, Matrix& m, bool) { m.setZero(); });
}

ModelDims dims_for(const Vocabulary& code, const Vocabulary& out, ModelDims base) {
  base.vocab = code.size();
  base.out_vocab = out.size();
  return base;
}

namespace {

Eigen::ArrayXd sigmoid(const Eigen::ArrayXd& x) { return 1.0 / (1.0 + (-x).exp()); }

struct GruTrace {
  Matrix X;                // in x T, time order
  Matrix H;                // H x (T+1), step order, column 0 is h0
  Matrix R, U, N, Ghn;     // H x T, step order
  bool reverse = false;

  Eigen::Index time_of(Eigen::Index s) const {
    return reverse ? X.cols() - 1 - s : s;
  }
  /// Outputs in time order (H x T).
  Matrix outputs() const {
    const Eigen::Index T = X.cols();
    Matrix out(H.rows(), T);
    for (Eigen::Index s = 0; s < T; ++s) out.col(time_of(s)) = H.col(s + 1);
    return out;
  }
};

void gru_forward(const GruWeights& w, Matrix X, const Vector& h0, bool reverse, GruTrace& tr) {
  const Eigen::Index T = X.cols();
  const Eigen::Index n = w.W_h.cols();
  Matrix Gi = w.W_i * X;
  Gi.colwise() += w.b_i.col(0);
  tr.X = std::move(X);
  tr.reverse = reverse;
  tr.H.resize(n, T + 1);
  tr.R.resize(n, T);
  tr.U.resize(n, T);
  tr.N.resize(n, T);
  tr.Ghn.resize(n, T);
  tr.H.col(0) = h0;
  Vector gh(3 * n);
  for (Eigen::Index s = 0; s < T; ++s) {
    const Eigen::Index t = tr.time_of(s);
    gh.noalias() = w.W_h * tr.H.col(s);
    gh += w.b_h.col(0);
    const Eigen::ArrayXd r = sigmoid(Gi.col(t).segment(0, n).array() + gh.segment(0, n).array());
    const Eigen::ArrayXd u = sigmoid(Gi.col(t).segment(n, n).array() + gh.segment(n, n).array());
    const Eigen::ArrayXd nn = (Gi.col(t).segment(2 * n, n).array() + r * gh.segment(2 * n, n).array()).tanh();
    tr.R.col(s) = r.matrix();
    tr.U.col(s) = u.matrix();
    tr.N.col(s) = nn.matrix();
    tr.Ghn.col(s) = gh.segment(2 * n, n);
    tr.H.col(s + 1) = ((1.0 - u) * nn + u * tr.H.col(s).array()).matrix();
  }
}

Vector gru_step(const GruWeights& w, const Vector& x, const Vector& h) {
  const Eigen::Index n = w.W_h.cols();
  const Vector gi = w.W_i * x + w.b_i.col(0);
  const Vector gh = w.W_h * h + w.b_h.col(0);
  const Eigen::ArrayXd r = sigmoid(gi.segment(0, n).array() + gh.segment(0, n).array());
  const Eigen::ArrayXd u = sigmoid(gi.segment(n, n).array() + gh.segment(n, n).array());
  const Eigen::ArrayXd nn = (gi.segment(2 * n, n).array() + r * gh.segment(2 * n, n).array()).tanh();
  return ((1.0 - u) * nn + u * h.array()).matrix();
}

// dOut is H x T in time order. Weight gradients are accumulated into `g`
// when non-null; dX (in x T, time order) and dh0 are overwritten when
// non-null.
void gru_backward(const GruWeights& w, const GruTrace& tr, const Matrix& dOut, GruWeights* g,
                  Matrix* dX, Vector* dh0) {
  const Eigen::Index T = tr.X.cols();
  const Eigen::Index n = w.W_h.cols();
  Matrix dGi(3 * n, T);
  Matrix dGh(3 * n, T);
  Vector dh = Vector::Zero(n);
  for (Eigen::Index s = T - 1; s >= 0; --s) {
    const Eigen::Index t = tr.time_of(s);
    dh += dOut.col(t);
    const auto u = tr.U.col(s).array();
    const auto r = tr.R.col(s).array();
    const auto nn = tr.N.col(s).array();
    const auto hp = tr.H.col(s).array();
    const Eigen::ArrayXd dn = dh.array() * (1.0 - u);
    const Eigen::ArrayXd du = dh.array() * (hp - nn);
    const Eigen::ArrayXd dnp = dn * (1.0 - nn * nn);
    const Eigen::ArrayXd drp = dnp * tr.Ghn.col(s).array() * r * (1.0 - r);
    const Eigen::ArrayXd dup = du * u * (1.0 - u);
    dGi.col(t).segment(0, n) = drp.matrix();
    dGi.col(t).segment(n, n) = dup.matrix();
    dGi.col(t).segment(2 * n, n) = dnp.matrix();
    dGh.col(s).segment(0, n) = drp.matrix();
    dGh.col(s).segment(n, n) = dup.matrix();
    dGh.col(s).segment(2 * n, n) = (dnp * r).matrix();
    Vector next = (dh.array() * u).matrix();
    next.noalias() += w.W_h.transpose() * dGh.col(s);
    dh = std::move(next);
  }
  if (g) {
    g->W_i.noalias() += dGi * tr.X.transpose();
    g->b_i += dGi.rowwise().sum();
    g->W_h.noalias() += dGh * tr.H.leftCols(T).transpose();
    g->b_h += dGh.rowwise().sum();
  }
  if (dX) *dX = w.W_i.transpose() * dGi;
  if (dh0) *dh0 = dh;
}

}  // namespace

struct EncoderCache {
  GruTrace tr[2][2];
  Matrix out1;  // 2H x T
  Vector pooled;
  Vector z;
};

namespace {

Vector encoder_forward(const ModelParams& p, Matrix X0, EncoderCache& c) {
  if (X0.cols() == 0) throw Error("cannot encode an empty sequence");
  const auto H = static_cast<Eigen::Index>(p.dims.hidden);
  const Eigen::Index T = X0.cols();
  const Vector zero = Vector::Zero(H);
  Matrix in = std::move(X0);
  for (int l = 0; l < 2; ++l) {
    gru_forward(p.enc[l][0], in, zero, false, c.tr[l][0]);
    gru_forward(p.enc[l][1], in, zero, true, c.tr[l][1]);
    Matrix out(2 * H, T);
    out.topRows(H) = c.tr[l][0].outputs();
    out.bottomRows(H) = c.tr[l][1].outputs();
    in = std::move(out);
  }
  c.out1 = std::move(in);
  if (p.dims.pooling == Pooling::Mean) {
    c.pooled = c.out1.rowwise().mean();
  } else {
    c.pooled.resize(2 * H);
    c.pooled.head(H) = c.out1.col(T - 1).head(H);
    c.pooled.tail(H) = c.out1.col(0).tail(H);
  }
  c.z = p.proj_W * c.pooled + p.proj_b.col(0);
  return c.z;
}

// Returns dX0 (embed x T).
Matrix encoder_backward(const ModelParams& p, const EncoderCache& c, const Vector& dz,
                        ModelParams* grad) {
  const auto H = static_cast<Eigen::Index>(p.dims.hidden);
  const Eigen::Index T = c.out1.cols();
  if (grad) {
    grad->proj_W.noalias() += dz * c.pooled.transpose();
    grad->proj_b.col(0) += dz;
  }
  const Vector dpooled = p.proj_W.transpose() * dz;
  Matrix dOut = Matrix::Zero(2 * H, T);
  if (p.dims.pooling == Pooling::Mean) {
    dOut.colwise() += dpooled / static_cast<double>(T);
  } else {
    dOut.col(T - 1).head(H) = dpooled.head(H);
    dOut.col(0).tail(H) = dpooled.tail(H);
  }
  for (int l = 1; l >= 0; --l) {
    Matrix dXf, dXb;
    gru_backward(p.enc[l][0], c.tr[l][0], dOut.topRows(H), grad ? &grad->enc[l][0] : nullptr,
                 &dXf, nullptr);
    gru_backward(p.enc[l][1], c.tr[l][1], dOut.bottomRows(H), grad ? &grad->enc[l][1] : nullptr,
                 &dXb, nullptr);
    dOut = dXf + dXb;
  }
  return dOut;
}

void check_ids(std::span<const TokenId> ids, std::size_t bound) {
  for (TokenId id : ids) {
    if (id < 0 || static_cast<std::size_t>(id) >= bound) {
      throw IdOutOfRange("token id " + std::to_string(id) + " outside vocabulary of size " +
                         std::to_string(bound));
    }
  }
}

Matrix embed(const ModelParams& p, std::span<const TokenId> ids) {
  check_ids(ids, p.dims.vocab);
  if (ids.empty()) throw Error("cannot encode an empty sequence");
  Matrix X(p.dims.embed, static_cast<Eigen::Index>(ids.size()));
  for (std::size_t t = 0; t < ids.size(); ++t) {
    X.col(static_cast<Eigen::Index>(t)) = p.embedding.row(ids[t]).transpose();
  }
  return X;
}

}  // namespace

EncoderPass::EncoderPass(const ModelParams& params, std::span<const TokenId> ids)
    : params_(&params), ids_(ids.begin(), ids.end()), cache_(std::make_unique<EncoderCache>()) {
  encoder_forward(params, embed(params, ids), *cache_);
}
EncoderPass::EncoderPass(EncoderPass&&) noexcept = default;
EncoderPass& EncoderPass::operator=(EncoderPass&&) noexcept = default;
EncoderPass::~EncoderPass() = default;

const Vector& EncoderPass::z() const { return cache_->z; }

Matrix EncoderPass::backward(const Vector& dz, ModelParams* grad) const {
  const Matrix dX = encoder_backward(*params_, *cache_, dz, grad);
  if (grad) {
    for (std::size_t t = 0; t < ids_.size(); ++t) {
      grad->embedding.row(ids_[t]) += dX.col(static_cast<Eigen::Index>(t)).transpose();
    }
  }
  return dX.transpose();
}

Vector encode(const ModelParams& params, std::span<const TokenId> ids) {
  EncoderCache c;
  return encoder_forward(params, embed(params, ids), c);
}

Vector encode_embedded(const ModelParams& params, const Matrix& inputs) {
  EncoderCache c;
  return encoder_forward(params, inputs.transpose(), c);
}

double zloss_backward_embedded(const ModelParams& params, const Matrix& inputs,
                               const ZLoss& loss, ModelParams* grad, Matrix* d_inputs) {
  EncoderCache c;
  const Vector z = encoder_forward(params, inputs.transpose(), c);
  Vector dz = Vector::Zero(z.size());
  const double value = loss(z, &dz);
  const Matrix dX = encoder_backward(params, c, dz, grad);
  if (d_inputs) *d_inputs = dX.transpose();
  return value;
}

double zloss_backward(const ModelParams& params, std::span<const TokenId> ids,
                      const ZLoss& loss, ModelParams* grad, Matrix* d_inputs) {
  EncoderCache c;
  const Vector z = encoder_forward(params, embed(params, ids), c);
  Vector dz = Vector::Zero(z.size());
  const double value = loss(z, &dz);
  const Matrix dX = encoder_backward(params, c, dz, grad);
  if (grad) {
    for (std::size_t t = 0; t < ids.size(); ++t) {
      grad->embedding.row(ids[t]) += dX.col(static_cast<Eigen::Index>(t)).transpose();
    }
  }
  if (d_inputs) *d_inputs = dX.transpose();
  return value;
}

double decoder_loss(const ModelParams& p, const Vector& z, std::span<const TokenId> target,
                    Vector* dz, ModelParams* grad) {
  if (target.empty()) throw EmptyGold("decoder target is empty");
  check_ids(target, p.dims.out_vocab);
  const auto L = static_cast<Eigen::Index>(target.size() + 1);
  std::vector<TokenId> inputs(1, Vocabulary::kBos);
  inputs.insert(inputs.end(), target.begin(), target.end());
  std::vector<TokenId> labels(target.begin(), target.end());
  labels.push_back(Vocabulary::kEos);

  const auto E = static_cast<Eigen::Index>(p.dims.embed);
  Matrix X(E + z.size(), L);
  for (Eigen::Index t = 0; t < L; ++t) {
    X.col(t).head(E) = p.dec_embedding.row(inputs[t]).transpose();
    X.col(t).tail(z.size()) = z;
  }
  Vector h0[2];
  for (int l = 0; l < 2; ++l) {
    h0[l] = (p.init_W[l] * z + p.init_b[l].col(0)).array().tanh().matrix();
  }
  GruTrace tr[2];
  gru_forward(p.dec[0], std::move(X), h0[0], false, tr[0]);
  gru_forward(p.dec[1], tr[0].outputs(), h0[1], false, tr[1]);
  const Matrix O1 = tr[1].outputs();
  Matrix logits = p.out_W * O1;
  logits.colwise() += p.out_b.col(0);

  double loss = 0.0;
  Matrix dlogits(logits.rows(), L);
  for (Eigen::Index t = 0; t < L; ++t) {
    const double mx = logits.col(t).maxCoeff();
    const Eigen::ArrayXd e = (logits.col(t).array() - mx).exp();
    const double sum = e.sum();
    loss += mx + std::log(sum) - logits(labels[t], t);
    dlogits.col(t) = (e / sum).matrix();
    dlogits(labels[t], t) -= 1.0;
  }
  loss /= static_cast<double>(L);
  if (!dz && !grad) return loss;

  dlogits /= static_cast<double>(L);
  if (grad) {
    grad->out_W.noalias() += dlogits * O1.transpose();
    grad->out_b += dlogits.rowwise().sum();
  }
  const Matrix dO1 = p.out_W.transpose() * dlogits;
  Matrix dO0, dX;
  Vector dh0[2];
  gru_backward(p.dec[1], tr[1], dO1, grad ? &grad->dec[1] : nullptr, &dO0, &dh0[1]);
  gru_backward(p.dec[0], tr[0], dO0, grad ? &grad->dec[0] : nullptr, &dX, &dh0[0]);
  if (grad) {
    for (Eigen::Index t = 0; t < L; ++t) {
      grad->dec_embedding.row(inputs[t]) += dX.col(t).head(E).transpose();
    }
  }
  if (dz) dz->noalias() += dX.bottomRows(z.size()).rowwise().sum();
  for (int l = 0; l < 2; ++l) {
    const Vector dpre = (dh0[l].array() * (1.0 - h0[l].array().square())).matrix();
    if (grad) {
      grad->init_W[l].noalias() += dpre * z.transpose();
      grad->init_b[l].col(0) += dpre;
    }
    if (dz) dz->noalias() += p.init_W[l].transpose() * dpre;
  }
  return loss;
}

double task_loss(const ModelParams& params, std::span<const TokenId> ids,
                 std::span<const TokenId> target) {
  return decoder_loss(params, encode(params, ids), target, nullptr, nullptr);
}

double task_loss_backward(const ModelParams& params, std::span<const TokenId> ids,
                          std::span<const TokenId> target, ModelParams* grad,
                          Matrix* d_inputs) {
  return zloss_backward(
      params, ids,
      [&](const Vector& z, Vector* dz) { return decoder_loss(params, z, target, dz, grad); },
      grad, d_inputs);
}

ModelParams grad_params(const ModelParams& params, const LossFn& fn) {
  ModelParams g = ModelParams::zeros(params.dims);
  const double loss = fn(params, &g);
  if (!std::isfinite(loss) || !g.all_finite()) throw NonFiniteLoss("loss or gradient is not finite");
  return g;
}

Matrix grad_inputs(const ModelParams& params, const ZLoss& loss, std::span<const TokenId> ids) {
  Matrix d;
  const double value = zloss_backward(params, ids, loss, nullptr, &d);
  if (!std::isfinite(value) || !d.allFinite()) throw NonFiniteLoss("loss or gradient is not finite");
  return d;
}

namespace {

TokenId argmax_lowest(const Vector& v) {
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < v.size(); ++i) {
    if (v(i) > v(best)) best = i;
  }
  return static_cast<TokenId>(best);
}

std::vector<TokenId> greedy(const ModelParams& p, std::span<const TokenId> ids,
                            std::size_t max_len, bool pad) {
  const Vector z = encode(p, ids);
  Vector h[2];
  for (int l = 0; l < 2; ++l) h[l] = (p.init_W[l] * z + p.init_b[l].col(0)).array().tanh().matrix();
  std::vector<TokenId> out;
  TokenId y = Vocabulary::kBos;
  Vector x(p.dims.embed + z.size());
  x.tail(z.size()) = z;
  while (out.size() < max_len) {
    x.head(p.dims.embed) = p.dec_embedding.row(y).transpose();
    h[0] = gru_step(p.dec[0], x, h[0]);
    h[1] = gru_step(p.dec[1], h[0], h[1]);
    y = argmax_lowest(p.out_W * h[1] + p.out_b.col(0));
    if (y == Vocabulary::kEos) break;
    out.push_back(y);
  }
  if (pad) out.resize(max_len, Vocabulary::kEos);
  return out;
}

}  // namespace

std::vector<TokenId> predict_summary(const ModelParams& params, std::span<const TokenId> ids,
                                     std::size_t max_len) {
  return greedy(params, ids, max_len, false);
}

std::vector<TokenId> predict_completion(const ModelParams& params,
                                        std::span<const TokenId> ids) {
  return greedy(params, ids, kCompletionLength, true);
}

}  // namespace clawsat
