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

#ifndef CLAWSAT_MANIFEST_HPP
#define CLAWSAT_MANIFEST_HPP

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace clawsat {

inline constexpr std::string_view kVersion = "0.1.0";

/// Provenance of one command's outputs. Contains no timestamps, so re-runs
/// with identical inputs write identical manifests.
struct RunManifest {
  std::string command;
  std::map<std::string, std::string> config;
  std::string corpus_digest;
  std::vector<std::string> lineage;  // "path@digest", oldest first
  std::map<std::string, std::uint64_t> seeds;
  std::vector<std::string> artifacts;
  std::string version{kVersion};
};

std::string manifest_json(const RunManifest& m);
/// Writes `dir`/manifest.json and returns its path.
std::filesystem::path write_manifest(const std::filesystem::path& dir, const RunManifest& m);

/// Hex FNV-1a digest of a file's bytes. Throws IoError.
std::string file_digest(const std::filesystem::path& path);

/// Writes `text` to `path`, creating parent directories. Throws IoError.
void write_text(const std::filesystem::path& path, std::string_view text);

}  // namespace clawsat

#endif  // CLAWSAT_MANIFEST_HPP
