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

#include "clawsat/transform.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "clawsat/error.hpp"
#include "clawsat/tokenizer.hpp"
#include "json.hpp"

namespace clawsat {

std::string_view to_string(SiteKind kind) {
  switch (kind) {
    case SiteKind::ReplaceLocalVar: return "replace_local_var";
    case SiteKind::ReplaceParam: return "replace_param";
    case SiteKind::ReplaceBoolLiteral: return "replace_bool_literal";
    case SiteKind::InsertPrint: return "insert_print";
    case SiteKind::InsertDeadCode: return "insert_dead_code";
  }
  return "?";
}

SiteKind site_kind_from_string(std::string_view name) {
  for (auto k : {SiteKind::ReplaceLocalVar, SiteKind::ReplaceParam,
                 SiteKind::ReplaceBoolLiteral, SiteKind::InsertPrint,
                 SiteKind::InsertDeadCode}) {
    if (to_string(k) == name) return k;
  }
  throw Error("unknown site kind: " + std::string(name));
}

bool site_less(const Site& a, const Site& b) {
  if (a.kind != b.kind) return a.kind < b.kind;
  const std::size_t pa = a.positions.empty() ? 0 : a.positions.front();
  const std::size_t pb = b.positions.empty() ? 0 : b.positions.front();
  return pa < pb;
}

std::string_view to_string(SiteFilter f) {
  switch (f) {
    case SiteFilter::Both: return "both";
    case SiteFilter::ReplaceOnly: return "replace";
    case SiteFilter::InsertOnly: return "insert";
  }
  return "?";
}

SiteFilter site_filter_from_string(std::string_view name) {
  if (name == "both") return SiteFilter::Both;
  if (name == "replace") return SiteFilter::ReplaceOnly;
  if (name == "insert") return SiteFilter::InsertOnly;
  throw Error("unknown site filter: " + std::string(name));
}

bool site_allowed(SiteFilter f, SiteKind kind) {
  switch (f) {
    case SiteFilter::Both: return true;
    case SiteFilter::ReplaceOnly: return is_replace(kind);
    case SiteFilter::InsertOnly: return is_insert(kind);
  }
  return false;
}

namespace {

bool is_assign_op(std::string_view t) {
  return t == "=" || t == "+=" || t == "-=" || t == "*=" || t == "//=" || t == "%=" ||
         t == "/=";
}

bool is_name_occurrence(std::span<const std::string> tokens, std::size_t i) {
  const auto& t = tokens[i];
  if (!tok::is_identifier_shaped(t) || tok::is_keyword(t)) return false;
  return i == 0 || tokens[i - 1] != ".";
}

struct Region {
  std::size_t begin;  // the `def` token
  std::size_t body;   // first token after the header colon
  std::size_t end;    // one past the last token of the function
};

std::vector<Region> function_regions(std::span<const std::string> tokens) {
  std::vector<Region> regions;
  int depth = 0;
  int bracket = 0;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const auto& t = tokens[i];
    if (t == tok::kIndent) ++depth;
    if (t == tok::kDedent) --depth;
    if (t == "(" || t == "[" || t == "{") ++bracket;
    if (t == ")" || t == "]" || t == "}") --bracket;
    if (t != "def" || depth != 0) continue;
    bool at_stmt_start = i == 0 || tok::is_layout(tokens[i - 1]);
    if (!at_stmt_start) continue;

    Region r{i, tokens.size(), tokens.size()};
    // Header ends at the first ':' outside brackets.
    int b = 0;
    std::size_t j = i + 1;
    for (; j < tokens.size(); ++j) {
      if (tokens[j] == "(") ++b;
      if (tokens[j] == ")") --b;
      if (tokens[j] == ":" && b == 0) break;
    }
    r.body = std::min(j + 1, tokens.size());
    int d = 0;
    for (std::size_t k = r.body; k < tokens.size(); ++k) {
      if (tokens[k] == tok::kIndent) ++d;
      if (tokens[k] == tok::kDedent) {
        if (--d <= 0) {
          r.end = k;
          break;
        }
      }
      if (tokens[k] == tok::kNewline && d == 0) {
        r.end = k;
        break;
      }
    }
    regions.push_back(r);
  }
  return regions;
}

bool statement_start(std::span<const std::string> tokens, std::size_t i, std::size_t body) {
  if (i == body) return true;
  if (i == 0) return true;
  const auto& prev = tokens[i - 1];
  return tok::is_layout(prev);
}

}  // namespace

std::string bool_rewrite(std::string_view literal) {
  if (literal == "True") return "(1==1)";
  if (literal == "False") return "(0==1)";
  throw IllegalPayload("not a boolean literal: " + std::string(literal));
}

std::vector<Site> identify_sites(std::span<const std::string> tokens) {
  std::vector<Site> sites;
  for (const Region& r : function_regions(tokens)) {
    std::set<std::string> params;
    // def NAME ( a , b ) :
    for (std::size_t i = r.begin + 2; i < r.body; ++i) {
      if (!is_name_occurrence(tokens, i)) continue;
      const auto& prev = tokens[i - 1];
      if (prev == "(" || prev == ",") params.insert(tokens[i]);
    }
    const std::string fname = r.begin + 1 < tokens.size() ? tokens[r.begin + 1] : "";

    std::set<std::string> locals;
    for (std::size_t i = r.body; i < r.end; ++i) {
      if (tokens[i] == "for") {
        for (std::size_t j = i + 1; j < r.end && tokens[j] != "in"; ++j) {
          if (is_name_occurrence(tokens, j)) locals.insert(tokens[j]);
        }
        continue;
      }
      if (!statement_start(tokens, i, r.body)) continue;
      // NAME (, NAME)* followed by an assignment operator
      std::vector<std::string> targets;
      std::size_t j = i;
      while (j < r.end && is_name_occurrence(tokens, j)) {
        targets.push_back(tokens[j]);
        ++j;
        if (j < r.end && tokens[j] == ",") {
          ++j;
        } else {
          break;
        }
      }
      if (!targets.empty() && j < r.end && is_assign_op(tokens[j])) {
        locals.insert(targets.begin(), targets.end());
      }
    }

    std::map<std::string, std::vector<std::size_t>> occurrences;
    for (std::size_t i = r.begin + 1; i < r.end; ++i) {
      if (i == r.begin + 1) continue;  // function name
      if (is_name_occurrence(tokens, i)) occurrences[tokens[i]].push_back(i);
    }
    for (auto& [name, pos] : occurrences) {
      if (name == fname) continue;
      if (params.count(name)) {
        sites.push_back({SiteKind::ReplaceParam, pos, name});
      } else if (locals.count(name)) {
        sites.push_back({SiteKind::ReplaceLocalVar, pos, name});
      }
    }

    int depth = 0;
    for (std::size_t i = r.begin; i < r.end; ++i) {
      const auto& t = tokens[i];
      if (t == tok::kIndent) ++depth;
      if (t == tok::kDedent) --depth;
      if (i >= r.body && (t == "True" || t == "False")) {
        sites.push_back({SiteKind::ReplaceBoolLiteral, {i}, t});
      }
      if (i >= r.body && tok::is_layout(t) && depth >= 1 && i + 1 < r.end) {
        const auto& next = tokens[i + 1];
        if (!tok::is_layout(next) && next != "elif" && next != "else") {
          sites.push_back({SiteKind::InsertPrint, {i + 1}, ""});
          sites.push_back({SiteKind::InsertDeadCode, {i + 1}, ""});
        }
      }
    }
  }
  sites.push_back({SiteKind::InsertPrint, {tokens.size()}, ""});
  sites.push_back({SiteKind::InsertDeadCode, {tokens.size()}, ""});
  std::stable_sort(sites.begin(), sites.end(), site_less);
  return sites;
}

CandidatePool make_candidate_pool(const Vocabulary& vocab) {
  CandidatePool pool;
  for (std::size_t i = Vocabulary::kNumSpecials; i < vocab.size(); ++i) {
    const auto& t = vocab.tokens()[i];
    if (tok::is_layout(t)) continue;
    if (tok::is_name(t)) pool.identifiers.push_back(static_cast<TokenId>(i));
    if (tok::is_string_literal(t)) pool.strings.push_back(static_cast<TokenId>(i));
  }
  return pool;
}

std::vector<std::string> bound_names(std::span<const std::string> tokens) {
  std::set<std::string> names;
  for (const auto& t : tokens) {
    if (tok::is_identifier_shaped(t) && !tok::is_keyword(t)) names.insert(t);
  }
  return {names.begin(), names.end()};
}

namespace {

void check_payload(const Program& p, const Transformation& t,
                   const std::set<std::string>& names) {
  const auto& payload = t.payload;
  if (payload.empty() || tok::is_special(payload) || tok::is_layout(payload)) {
    throw IllegalPayload("payload \"" + payload + "\" is a reserved token");
  }
  switch (t.site.kind) {
    case SiteKind::ReplaceLocalVar:
    case SiteKind::ReplaceParam:
      if (payload == t.site.original) return;
      if (!tok::is_name(payload)) {
        throw IllegalPayload("payload \"" + payload + "\" is not a plain identifier");
      }
      if (names.count(payload)) {
        throw IllegalPayload("payload \"" + payload + "\" collides with a name in " + p.id);
      }
      return;
    case SiteKind::ReplaceBoolLiteral:
      if (payload != t.site.original && payload != bool_rewrite(t.site.original)) {
        throw IllegalPayload("boolean site accepts only its literal or rewrite");
      }
      return;
    case SiteKind::InsertPrint:
      if (!tok::is_string_literal(payload)) {
        throw IllegalPayload("print payload \"" + payload + "\" is not a string literal");
      }
      return;
    case SiteKind::InsertDeadCode:
      if (!tok::is_name(payload)) {
        throw IllegalPayload("payload \"" + payload + "\" is not a plain identifier");
      }
      if (names.count(payload)) {
        throw IllegalPayload("payload \"" + payload + "\" collides with a name in " + p.id);
      }
      return;
  }
}

std::vector<std::string> insertion_tokens(const Transformation& t) {
  if (t.site.kind == SiteKind::InsertPrint) return {"print", "(", t.payload, ")"};
  return {t.payload, "=", "0"};
}

bool introduces_name(const Transformation& t) {
  if (t.site.kind == SiteKind::InsertDeadCode) return true;
  return (t.site.kind == SiteKind::ReplaceLocalVar || t.site.kind == SiteKind::ReplaceParam) &&
         t.payload != t.site.original;
}

}  // namespace

View apply_transformations(const Program& p, std::span<const Transformation> ts) {
  const auto names_vec = bound_names(p.tokens);
  const std::set<std::string> names(names_vec.begin(), names_vec.end());

  std::set<std::string> introduced;
  std::vector<const Site*> seen;
  for (const auto& t : ts) {
    if (std::find(p.sites.begin(), p.sites.end(), t.site) == p.sites.end()) {
      throw StaleSite("site " + std::string(to_string(t.site.kind)) + " not found in " + p.id);
    }
    for (const Site* s : seen) {
      if (*s == t.site) throw IllegalPayload("site transformed twice in one view");
    }
    seen.push_back(&t.site);
    check_payload(p, t, names);
    if (introduces_name(t) && !introduced.insert(t.payload).second) {
      throw IllegalPayload("payload \"" + t.payload + "\" used by two transformations");
    }
  }

  const std::size_t n = p.tokens.size();
  // Per base position: replacement text (if any) and owning transformation.
  std::vector<int> replaced_by(n, -1);
  std::map<std::size_t, std::vector<std::size_t>> inserts;  // offset -> transformation idx
  for (std::size_t k = 0; k < ts.size(); ++k) {
    const auto& t = ts[k];
    if (is_replace(t.site.kind)) {
      for (auto pos : t.site.positions) replaced_by[pos] = static_cast<int>(k);
    } else {
      inserts[t.site.positions.front()].push_back(k);
    }
  }
  for (auto& [off, list] : inserts) {
    std::stable_sort(list.begin(), list.end(), [&](std::size_t a, std::size_t b) {
      return ts[a].site.kind < ts[b].site.kind;
    });
  }

  View v;
  v.base_id = p.id;
  v.applied.assign(ts.begin(), ts.end());
  v.payload_positions.assign(ts.size(), {});
  v.tokens.reserve(n + 8 * ts.size());

  auto emit_inserts = [&](std::size_t offset) {
    auto it = inserts.find(offset);
    if (it == inserts.end()) return;
    for (std::size_t k : it->second) {
      const auto body = insertion_tokens(ts[k]);
      const std::size_t begin = v.tokens.size();
      if (offset == n) v.tokens.emplace_back(tok::kNewline);
      const std::size_t payload_at =
          v.tokens.size() + (ts[k].site.kind == SiteKind::InsertPrint ? 2 : 0);
      v.tokens.insert(v.tokens.end(), body.begin(), body.end());
      if (offset < n) v.tokens.emplace_back(tok::kNewline);
      v.payload_positions[k].push_back(payload_at);
      v.inserted.emplace_back(begin, v.tokens.size());
    }
  };

  for (std::size_t i = 0; i < n; ++i) {
    emit_inserts(i);
    const int k = replaced_by[i];
    if (k < 0) {
      v.tokens.push_back(p.tokens[i]);
      continue;
    }
    const auto& t = ts[static_cast<std::size_t>(k)];
    v.payload_positions[static_cast<std::size_t>(k)].push_back(v.tokens.size());
    if (t.site.kind == SiteKind::ReplaceBoolLiteral && t.payload != t.site.original) {
      const char lhs = t.site.original == "True" ? '1' : '0';
      v.tokens.insert(v.tokens.end(), {"(", std::string(1, lhs), "==", "1", ")"});
    } else {
      v.tokens.push_back(t.payload);
    }
  }
  emit_inserts(n);
  return v;
}

View apply_transformation(const Program& p, const Transformation& t) {
  return apply_transformations(p, std::span<const Transformation>(&t, 1));
}

std::vector<TokenId> payload_candidates(const Program& p, const Site& site,
                                        const CandidatePool& pool, const Vocabulary& vocab,
                                        std::span<const std::string> taken) {
  std::vector<TokenId> out;
  switch (site.kind) {
    case SiteKind::ReplaceBoolLiteral:
      return out;
    case SiteKind::InsertPrint:
      return pool.strings;
    case SiteKind::ReplaceLocalVar:
    case SiteKind::ReplaceParam:
    case SiteKind::InsertDeadCode: {
      const auto names_vec = bound_names(p.tokens);
      const std::set<std::string> names(names_vec.begin(), names_vec.end());
      const std::set<std::string> used(taken.begin(), taken.end());
      out.reserve(pool.identifiers.size());
      for (TokenId id : pool.identifiers) {
        const auto& text = vocab.text(id);
        if (names.count(text) || used.count(text)) continue;
        out.push_back(id);
      }
      return out;
    }
  }
  return out;
}

View identity_view(const Program& p) {
  View v;
  v.base_id = p.id;
  v.tokens = p.tokens;
  return v;
}

View random_view(const Program& p, std::size_t k, const CandidatePool& pool,
                 const Vocabulary& vocab, Rng& rng, SiteFilter filter) {
  std::vector<const Site*> eligible;
  for (const auto& s : p.sites) {
    if (site_allowed(filter, s.kind)) eligible.push_back(&s);
  }
  if (eligible.empty()) throw NoSites("program " + p.id + " has no eligible sites");
  if (k == 0) return identity_view(p);

  const auto chosen = sample_distinct(rng, eligible.size(), k);
  std::vector<Transformation> ts;
  std::vector<std::string> taken;
  for (std::size_t idx : chosen) {
    const Site& site = *eligible[idx];
    Transformation t{site, site.original};
    if (site.kind == SiteKind::ReplaceBoolLiteral) {
      t.payload = bool_rewrite(site.original);
    } else {
      const auto cands = payload_candidates(p, site, pool, vocab, taken);
      if (!cands.empty()) {
        t.payload = vocab.text(cands[uniform_index(rng, cands.size())]);
      } else if (site.kind == SiteKind::InsertPrint) {
        t.payload = "\"debug\"";
      } else if (site.kind == SiteKind::InsertDeadCode) {
        t.payload = "unused_" + std::to_string(ts.size());
      }
      if (t.site.kind != SiteKind::InsertPrint) taken.push_back(t.payload);
    }
    ts.push_back(std::move(t));
  }
  return apply_transformations(p, ts);
}

View random_view_or_identity(const Program& p, std::size_t k, const CandidatePool& pool,
                             const Vocabulary& vocab, Rng& rng, SiteFilter filter) {
  try {
    return random_view(p, k, pool, vocab, rng, filter);
  } catch (const NoSites&) {
    return identity_view(p);
  }
}

Program view_as_program(const Program& base, const View& v) {
  return make_program_from_tokens(base.id, v.tokens, base.summary);
}

std::string view_to_json(const Program& base, const View& v) {
  nlohmann::json obj;
  std::string summary;
  for (std::size_t i = 0; i < base.summary.size(); ++i) {
    if (i) summary += ' ';
    summary += base.summary[i];
  }
  obj["id"] = base.id;
  obj["code"] = detokenize(v.tokens);
  obj["summary"] = summary;
  nlohmann::json applied = nlohmann::json::array();
  for (const auto& t : v.applied) {
    applied.push_back({{"kind", std::string(to_string(t.site.kind))},
                       {"positions", t.site.positions},
                       {"payload", t.payload}});
  }
  obj["applied"] = applied;
  return obj.dump();
}

}  // namespace clawsat
