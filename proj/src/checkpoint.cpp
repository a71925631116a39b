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

#include "clawsat/checkpoint.hpp"

#include <cstring>
#include <fstream>
#include <sstream>

#include "clawsat/error.hpp"
#include "json.hpp"

namespace clawsat {

namespace {

constexpr std::string_view kMagic = "CLAWSAT-CHECKPOINT 1\n";

using nlohmann::json;

json dims_json(const ModelDims& d) {
  return {{"vocab", d.vocab},   {"out_vocab", d.out_vocab}, {"embed", d.embed},
          {"hidden", d.hidden}, {"proj", d.proj},           {"dec_hidden", d.dec_hidden},
          {"pooling", std::string(to_string(d.pooling))}};
}

ModelDims dims_from_json(const json& j) {
  ModelDims d;
  d.vocab = j.at("vocab").get<std::size_t>();
  d.out_vocab = j.at("out_vocab").get<std::size_t>();
  d.embed = j.at("embed").get<std::size_t>();
  d.hidden = j.at("hidden").get<std::size_t>();
  d.proj = j.at("proj").get<std::size_t>();
  d.dec_hidden = j.at("dec_hidden").get<std::size_t>();
  d.pooling = pooling_from_string(j.at("pooling").get<std::string>());
  return d;
}

}  // namespace

std::string serialize_checkpoint(const Checkpoint& ckpt) {
  json tensors = json::array();
  ckpt.params.for_each_tensor([&](const std::string& name, const Matrix& m, bool enc) {
    tensors.push_back({{"name", name}, {"rows", m.rows()}, {"cols", m.cols()}, {"encoder", enc}});
  });
  json meta = {{"dims", dims_json(ckpt.params.dims)},
               {"vocab_hash", ckpt.vocab.digest()},
               {"out_vocab_hash", ckpt.out_vocab.digest()},
               {"vocab", ckpt.vocab.tokens()},
               {"out_vocab", ckpt.out_vocab.tokens()},
               {"epoch", ckpt.epoch},
               {"config", ckpt.config},
               {"tensors", tensors}};
  const std::string text = meta.dump();
  std::string out(kMagic);
  std::uint64_t n = text.size();
  for (int b = 0; b < 8; ++b) out.push_back(static_cast<char>((n >> (8 * b)) & 0xff));
  out += text;
  ckpt.params.for_each_tensor([&](const std::string&, const Matrix& m, bool) {
    const auto bytes = static_cast<std::size_t>(m.size()) * sizeof(double);
    const std::size_t at = out.size();
    out.resize(at + bytes);
    std::memcpy(out.data() + at, m.data(), bytes);
  });
  return out;
}

Checkpoint deserialize_checkpoint(std::string_view bytes) {
  if (bytes.substr(0, kMagic.size()) != kMagic) throw CheckpointError("not a checkpoint");
  std::size_t at = kMagic.size();
  if (bytes.size() < at + 8) throw CheckpointError("truncated header");
  std::uint64_t n = 0;
  for (int b = 0; b < 8; ++b) {
    n |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes[at + b])) << (8 * b);
  }
  at += 8;
  if (bytes.size() < at + n) throw CheckpointError("truncated metadata");
  Checkpoint ck;
  try {
    const json meta = json::parse(bytes.substr(at, n));
    at += n;
    ck.params = ModelParams::zeros(dims_from_json(meta.at("dims")));
    ck.vocab = Vocabulary(meta.at("vocab").get<std::vector<std::string>>());
    ck.out_vocab = Vocabulary(meta.at("out_vocab").get<std::vector<std::string>>());
    if (ck.vocab.digest() != meta.at("vocab_hash").get<std::string>()) {
      throw CheckpointError("vocabulary does not match its recorded hash");
    }
    ck.epoch = meta.at("epoch").get<int>();
    ck.config = meta.at("config").get<std::map<std::string, std::string>>();
    const json& table = meta.at("tensors");
    std::size_t k = 0;
    ck.params.for_each_tensor([&](const std::string& name, Matrix& m, bool) {
      if (k >= table.size() || table[k].at("name").get<std::string>() != name ||
          table[k].at("rows").get<Eigen::Index>() != m.rows() ||
          table[k].at("cols").get<Eigen::Index>() != m.cols()) {
        throw CheckpointError("tensor table mismatch at " + name);
      }
      ++k;
      const auto size = static_cast<std::size_t>(m.size()) * sizeof(double);
      if (bytes.size() < at + size) throw CheckpointError("truncated tensor " + name);
      std::memcpy(m.data(), bytes.data() + at, size);
      at += size;
    });
  } catch (const json::exception& e) {
    throw CheckpointError(std::string("bad metadata: ") + e.what());
  }
  if (at != bytes.size()) throw CheckpointError("trailing bytes");
  return ck;
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw CheckpointError("cannot write " + path.string());
  const std::string bytes = serialize_checkpoint(ckpt);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

Checkpoint load_checkpoint(const std::filesystem::path& path,
                           const std::optional<std::string>& expected_vocab_hash) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  Checkpoint ck = deserialize_checkpoint(ss.str());
  if (expected_vocab_hash && *expected_vocab_hash != ck.vocab.digest()) {
    throw VocabMismatch("checkpoint vocabulary " + ck.vocab.digest() + " != expected " +
                        *expected_vocab_hash);
  }
  return ck;
}

}  // namespace clawsat
