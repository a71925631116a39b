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

#ifndef CLAWSAT_TRANSFORM_HPP
#define CLAWSAT_TRANSFORM_HPP

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "clawsat/corpus.hpp"
#include "clawsat/rng.hpp"
#include "clawsat/site.hpp"
#include "clawsat/token.hpp"

namespace clawsat {

/// A site together with the token it is filled with.
///
/// Replace kinds: the new identifier (equal to the original for the identity
/// rename). ReplaceBoolLiteral: the original literal, or its rewrite
/// "(1==1)" / "(0==1)". InsertPrint: the string literal argument of
/// `print(...)`. InsertDeadCode: the identifier of `<payload> = 0`.
struct Transformation {
  Site site;
  std::string payload;
  friend bool operator==(const Transformation&, const Transformation&) = default;
};

/// A transformed program.
struct View {
  std::string base_id;
  std::vector<std::string> tokens;
  std::vector<Transformation> applied;
  /// For each applied transformation, the view positions holding its payload
  /// (the renamed occurrences, the print argument, the dead-code target, or
  /// the first token of a boolean rewrite).
  std::vector<std::vector<std::size_t>> payload_positions;
  /// Half-open [begin, end) view ranges of inserted statements.
  std::vector<std::pair<std::size_t, std::size_t>> inserted;
};

enum class SiteFilter { Both, ReplaceOnly, InsertOnly };
std::string_view to_string(SiteFilter f);
SiteFilter site_filter_from_string(std::string_view name);
bool site_allowed(SiteFilter f, SiteKind kind);

/// Every legal site of `tokens`, sorted by kind then first position.
std::vector<Site> identify_sites(std::span<const std::string> tokens);

/// The rewrite of a boolean literal ("True" -> "(1==1)", "False" -> "(0==1)").
std::string bool_rewrite(std::string_view literal);

/// Payload candidates drawn from a vocabulary.
struct CandidatePool {
  std::vector<TokenId> identifiers;  // identifier-shaped, non-keyword, non-builtin
  std::vector<TokenId> strings;      // string literals
};
CandidatePool make_candidate_pool(const Vocabulary& vocab);

/// Identifier-shaped tokens already present in `tokens`; payloads of rename
/// and dead-code transformations must avoid these.
std::vector<std::string> bound_names(std::span<const std::string> tokens);

/// Throws IllegalPayload or StaleSite.
View apply_transformation(const Program& p, const Transformation& t);
View apply_transformations(const Program& p, std::span<const Transformation> ts);

/// Legal payloads for `site` in `p` given payloads already taken by other
/// transformations of the same view. The site's own current filling is not
/// included.
std::vector<TokenId> payload_candidates(const Program& p, const Site& site,
                                        const CandidatePool& pool, const Vocabulary& vocab,
                                        std::span<const std::string> taken);

/// t_rand(P): min(k, #sites) distinct sites chosen uniformly, each filled with
/// a uniformly drawn legal payload. Throws NoSites when no eligible site
/// exists.
View random_view(const Program& p, std::size_t k, const CandidatePool& pool,
                 const Vocabulary& vocab, Rng& rng, SiteFilter filter = SiteFilter::Both);

/// The untransformed program as its own view.
View identity_view(const Program& p);

/// `random_view`, except programs without sites pass through unchanged.
View random_view_or_identity(const Program& p, std::size_t k, const CandidatePool& pool,
                             const Vocabulary& vocab, Rng& rng,
                             SiteFilter filter = SiteFilter::Both);

/// A Program whose code is the view (summary kept from the base).
Program view_as_program(const Program& base, const View& v);

/// JSONL line for a view: {"id","code","summary","applied":[...]}.
std::string view_to_json(const Program& base, const View& v);

}  // namespace clawsat

#endif  // CLAWSAT_TRANSFORM_HPP
