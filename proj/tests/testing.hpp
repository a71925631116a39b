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

#ifndef CLAWSAT_TESTS_TESTING_HPP
#define CLAWSAT_TESTS_TESTING_HPP

#include <cmath>
#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include "clawsat/model.hpp"
#include "clawsat/rng.hpp"

namespace clawsat::testing {

inline ModelDims tiny_dims(std::size_t vocab, std::size_t out_vocab, std::size_t d = 4,
                           Pooling pooling = Pooling::Mean) {
  ModelDims dims;
  dims.vocab = vocab;
  dims.out_vocab = out_vocab;
  dims.embed = dims.hidden = dims.proj = dims.dec_hidden = d;
  dims.pooling = pooling;
  return dims;
}

inline std::vector<TokenId> random_ids(Rng& rng, std::size_t n, std::size_t vocab,
                                       TokenId lowest = 4) {
  std::vector<TokenId> ids(n);
  for (auto& id : ids) {
    id = lowest + static_cast<TokenId>(uniform_index(rng, vocab - static_cast<std::size_t>(lowest)));
  }
  return ids;
}

inline Vector gaussian_vector(Rng& rng, std::size_t n) {
  Vector v(static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = standard_normal(rng);
  return v;
}

/// Same-shaped parameters filled with N(0, 1) entries.
inline ModelParams gaussian_direction(const ModelParams& like, Rng& rng) {
  ModelParams d = ModelParams::zeros(like.dims);
  d.for_each_tensor([&](const std::string&, Matrix& m, bool) {
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = standard_normal(rng);
  });
  return d;
}

inline double dot(const ModelParams& a, const ModelParams& b) {
  double s = 0.0;
  ModelParams& mutable_a = const_cast<ModelParams&>(a);
  ModelParams::zip(mutable_a, b, [&](const std::string&, Matrix& x, const Matrix& y, bool) {
    s += (x.array() * y.array()).sum();
  });
  return s;
}

inline ModelParams axpy(const ModelParams& x, double alpha, const ModelParams& d) {
  ModelParams out = x;
  ModelParams::zip(out, d, [&](const std::string&, Matrix& a, const Matrix& b, bool) { a += alpha * b; });
  return out;
}

inline double relative_error(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-8});
}

}  // namespace clawsat::testing

#endif  // CLAWSAT_TESTS_TESTING_HPP
