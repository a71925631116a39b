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

#include "clawsat/manifest.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "clawsat/error.hpp"
#include "clawsat/rng.hpp"
#include "json.hpp"

namespace clawsat {

std::string manifest_json(const RunManifest& m) {
  nlohmann::ordered_json j;
  j["tool"] = "clawsat";
  j["version"] = m.version;
  j["command"] = m.command;
  j["config"] = m.config;
  j["corpus_digest"] = m.corpus_digest;
  j["lineage"] = m.lineage;
  j["seeds"] = m.seeds;
  j["artifacts"] = m.artifacts;
  return j.dump(2) + "\n";
}

std::filesystem::path write_manifest(const std::filesystem::path& dir, const RunManifest& m) {
  const auto path = dir / "manifest.json";
  write_text(path, manifest_json(m));
  return path;
}

std::string file_digest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(ss.str())));
  return buf;
}

void write_text(const std::filesystem::path& path, std::string_view text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw IoError("cannot write " + path.string());
}

}  // namespace clawsat
