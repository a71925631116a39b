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

#ifndef CLAWSAT_CHECKPOINT_HPP
#define CLAWSAT_CHECKPOINT_HPP

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "clawsat/model.hpp"
#include "clawsat/token.hpp"

namespace clawsat {

/// Parameters together with everything needed to interpret them.
struct Checkpoint {
  ModelParams params;
  Vocabulary vocab;
  Vocabulary out_vocab;
  std::map<std::string, std::string> config;
  int epoch = 0;

  std::string vocab_hash() const { return vocab.digest(); }
};

/// Container layout: the line "CLAWSAT-CHECKPOINT 1", an 8-byte little-endian
/// length, that many bytes of JSON metadata (dims, vocab_hash, vocabularies,
/// epoch, config, tensor table), then every tensor's doubles in column-major
/// order in the tensor-table order.
std::string serialize_checkpoint(const Checkpoint& ckpt);
/// Throws CheckpointError on a malformed stream.
Checkpoint deserialize_checkpoint(std::string_view bytes);

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
/// Throws VocabMismatch when `expected_vocab_hash` is given and differs.
Checkpoint load_checkpoint(const std::filesystem::path& path,
                           const std::optional<std::string>& expected_vocab_hash = {});

}  // namespace clawsat

#endif  // CLAWSAT_CHECKPOINT_HPP
