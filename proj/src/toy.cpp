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

#include "clawsat/toy.hpp"

#include <cstdio>
#include <functional>
#include <map>
#include <set>

#include "clawsat/rng.hpp"

namespace clawsat {

namespace {

enum class Signature { List, Int, ListTarget };

// Roles: L list param, T target param, N int param, A accumulator / result,
// B second local, I loop variable, K index.
using Names = std::map<char, std::string>;

struct Lines {
  std::vector<std::pair<int, std::string>> rows;
  void operator()(int depth, std::string text) { rows.emplace_back(depth, std::move(text)); }
};

struct Template {
  std::string name;
  std::string summary;
  Signature signature;
  std::vector<std::string> a_names;  // informative accumulator names
  std::vector<std::string> b_names;  // informative second-local names
  std::function<void(const Names&, Rng&, Lines&)> body;
};

bool coin(Rng& rng) { return uniform_index(rng, 2) == 0; }

std::string pick(const std::vector<std::string>& pool, Rng& rng) {
  return pool[uniform_index(rng, pool.size())];
}

void accumulate(const Names& n, Rng& rng, Lines& out, const std::string& init,
                const std::string& op) {
  const auto& A = n.at('A');
  out(1, A + " = " + init);
  if (coin(rng)) {
    out(1, "for " + n.at('I') + " in " + n.at('L') + ":");
    out(2, coin(rng) ? A + " " + op + "= " + n.at('I')
                     : A + " = " + A + " " + op + " " + n.at('I'));
  } else {
    const auto& K = n.at('K');
    out(1, K + " = 0");
    out(1, "while " + K + " < len(" + n.at('L') + "):");
    out(2, A + " " + op + "= " + n.at('L') + "[" + K + "]");
    out(2, K + " += 1");
  }
}

void extreme(const Names& n, Rng& rng, Lines& out, const std::string& cmp) {
  const auto& A = n.at('A');
  const auto& I = n.at('I');
  out(1, A + " = " + n.at('L') + "[0]");
  out(1, "for " + I + " in " + n.at('L') + ":");
  if (coin(rng)) {
    out(2, "if " + I + " " + cmp + " " + A + ":");
    out(3, A + " = " + I);
  } else {
    out(2, "if " + I + " " + cmp + " " + A + ": " + A + " = " + I);
  }
}

void count_if(const Names& n, Rng& rng, Lines& out, const std::string& cond) {
  const auto& A = n.at('A');
  out(1, A + " = 0");
  out(1, "for " + n.at('I') + " in " + n.at('L') + ":");
  out(2, "if " + cond + ":");
  out(3, coin(rng) ? A + " += 1" : A + " = " + A + " + 1");
}

void filter_if(const Names& n, Rng& rng, Lines& out, const std::string& cond) {
  const auto& A = n.at('A');
  out(1, A + " = []");
  out(1, "for " + n.at('I') + " in " + n.at('L') + ":");
  if (coin(rng)) {
    out(2, "if " + cond + ":");
    out(3, A + ".append(" + n.at('I') + ")");
  } else {
    out(2, "if not " + cond + ":");
    out(3, "continue");
    out(2, A + ".append(" + n.at('I') + ")");
  }
}

const std::vector<Template>& templates() {
  static const std::vector<Template> all = [] {
    std::vector<Template> t;
    t.push_back({"sum", "return the sum of the list", Signature::List,
                 {"total", "running_sum", "summed", "acc"}, {},
                 [](const Names& n, Rng& r, Lines& o) {
                   accumulate(n, r, o, "0", "+");
                   o(1, "return " + n.at('A'));
                 }});
    t.push_back({"product", "return the product of the list", Signature::List,
                 {"prod", "product", "mult", "running_product"}, {},
                 [](const Names& n, Rng& r, Lines& o) {
                   accumulate(n, r, o, "1", "*");
                   o(1, "return " + n.at('A'));
                 }});
    t.push_back({"max", "return the largest value in the list", Signature::List,
                 {"best", "largest", "biggest", "top"}, {},
                 [](const Names& n, Rng& r, Lines& o) {
                   extreme(n, r, o, ">");
                   o(1, "return " + n.at('A'));
                 }});
    t.push_back({"min", "return the smallest value in the list", Signature::List,
                 {"smallest", "lowest", "least", "bottom"}, {},
                 [](const Names& n, Rng& r, Lines& o) {
                   extreme(n, r, o, "<");
                   o(1, "return " + n.at('A'));
                 }});
    t.push_back({"count_positive", "count the positive values in the list", Signature::List,
                 {"positives", "n_positive", "pos_count"}, {},
                 [](const Names& n, Rng& r, Lines& o) {
                   count_if(n, r, o, n.at('I') + " > 0");
                   o(1, "return " + n.at('A'));
                 }});
    t.push_back({"count_negative", "count the negative values in the list", Signature::List,
                 {"negatives", "n_negative", "neg_count"}, {},
                 [](const Names& n, Rng& r, Lines& o) {
                   count_if(n, r, o, n.at('I') + " < 0");
                   o(1, "return " + n.at('A'));
                 }});
    t.push_back({"count_even", "count the even values in the list", Signature::List,
                 {"evens", "n_even", "even_count"}, {},
                 [](const Names& n, Rng& r, Lines& o) {
                   count_if(n, r, o, n.at('I') + " % 2 == 0");
                   o(1, "return " + n.at('A'));
                 }});
    t.push_back({"filter_positive", "return a list of the positive values", Signature::List,
                 {"positive_items", "kept_positive", "pos_list"}, {},
                 [](const Names& n, Rng& r, Lines& o) {
                   filter_if(n, r, o, n.at('I') + " > 0");
                   o(1, "return " + n.at('A'));
                 }});
    t.push_back({"filter_even", "return a list of the even values", Signature::List,
                 {"even_items", "kept_even", "even_list"}, {},
                 [](const Names& n, Rng& r, Lines& o) {
                   filter_if(n, r, o, n.at('I') + " % 2 == 0");
                   o(1, "return " + n.at('A'));
                 }});
    t.push_back({"square", "return a list of the squared values", Signature::List,
                 {"squares", "squared", "sq_list"}, {},
                 [](const Names& n, Rng& r, Lines& o) {
                   const auto& A = n.at('A');
                   const auto& I = n.at('I');
                   o(1, A + " = []");
                   o(1, "for " + I + " in " + n.at('L') + ":");
                   o(2, A + ".append(" + I + (coin(r) ? " * " + I : " ** 2") + ")");
                   o(1, "return " + A);
                 }});
    t.push_back({"contains", "check if the list contains the target", Signature::ListTarget,
                 {"found", "present", "seen"}, {},
                 [](const Names& n, Rng& r, Lines& o) {
                   const auto& A = n.at('A');
                   const auto& I = n.at('I');
                   o(1, A + " = False");
                   o(1, "for " + I + " in " + n.at('L') + ":");
                   o(2, "if " + I + " == " + n.at('T') + ":");
                   o(3, A + " = True");
                   if (coin(r)) o(3, "break");
                   o(1, "return " + A);
                 }});
    t.push_back({"index_of", "return the index of the target in the list",
                 Signature::ListTarget, {"index", "position", "idx"}, {},
                 [](const Names& n, Rng&, Lines& o) {
                   const auto& A = n.at('A');
                   const auto& I = n.at('I');
                   o(1, A + " = 0");
                   o(1, "for " + I + " in " + n.at('L') + ":");
                   o(2, "if " + I + " == " + n.at('T') + ":");
                   o(3, "return " + A);
                   o(2, A + " += 1");
                   o(1, "return -1");
                 }});
    t.push_back({"factorial", "return the factorial of n", Signature::Int,
                 {"fact", "factorial_value", "fact_acc"}, {},
                 [](const Names& n, Rng& r, Lines& o) {
                   const auto& A = n.at('A');
                   const auto& K = n.at('K');
                   o(1, A + " = 1");
                   if (coin(r)) {
                     o(1, "for " + K + " in range(1, " + n.at('N') + " + 1):");
                     o(2, A + " *= " + K);
                   } else {
                     o(1, K + " = 1");
                     o(1, "while " + K + " <= " + n.at('N') + ":");
                     o(2, A + " = " + A + " * " + K);
                     o(2, K + " += 1");
                   }
                   o(1, "return " + A);
                 }});
    t.push_back({"fibonacci", "return the nth fibonacci number", Signature::Int,
                 {"prev", "fib_prev", "older"}, {"curr", "fib_curr", "newer"},
                 [](const Names& n, Rng& r, Lines& o) {
                   const auto& A = n.at('A');
                   const auto& B = n.at('B');
                   o(1, A + " = 0");
                   o(1, B + " = 1");
                   o(1, "for " + n.at('K') + " in range(" + n.at('N') + "):");
                   if (coin(r)) {
                     o(2, A + ", " + B + " = " + B + ", " + A + " + " + B);
                   } else {
                     o(2, B + " = " + A + " + " + B);
                     o(2, A + " = " + B + " - " + A);
                   }
                   o(1, "return " + A);
                 }});
    t.push_back({"sum_range", "return the sum of numbers up to n", Signature::Int,
                 {"total_to_n", "range_sum", "acc_n"}, {},
                 [](const Names& n, Rng&, Lines& o) {
                   const auto& A = n.at('A');
                   o(1, A + " = 0");
                   o(1, "for " + n.at('K') + " in range(" + n.at('N') + " + 1):");
                   o(2, A + " += " + n.at('K'));
                   o(1, "return " + A);
                 }});
    t.push_back({"reverse", "return the list in reverse order", Signature::List,
                 {"reversed_items", "backwards", "rev"}, {},
                 [](const Names& n, Rng& r, Lines& o) {
                   const auto& A = n.at('A');
                   o(1, A + " = []");
                   if (coin(r)) {
                     o(1, "for " + n.at('I') + " in " + n.at('L') + ":");
                     o(2, A + " = [" + n.at('I') + "] + " + A);
                   } else {
                     const auto& K = n.at('K');
                     o(1, K + " = len(" + n.at('L') + ") - 1");
                     o(1, "while " + K + " >= 0:");
                     o(2, A + ".append(" + n.at('L') + "[" + K + "])");
                     o(2, K + " -= 1");
                   }
                   o(1, "return " + A);
                 }});
    t.push_back({"all_positive", "check if all values in the list are positive",
                 Signature::List, {"all_positive", "ok_positive", "every_pos"}, {},
                 [](const Names& n, Rng&, Lines& o) {
                   const auto& A = n.at('A');
                   o(1, A + " = True");
                   o(1, "for " + n.at('I') + " in " + n.at('L') + ":");
                   o(2, "if " + n.at('I') + " <= 0:");
                   o(3, A + " = False");
                   o(1, "return " + A);
                 }});
    t.push_back({"sign", "return the sign of n as a word", Signature::Int,
                 {"sign_word", "label_sign", "kind_sign"}, {},
                 [](const Names& n, Rng& r, Lines& o) {
                   const auto& A = n.at('A');
                   const auto& N = n.at('N');
                   o(1, A + " = \"zero\"");
                   o(1, "if " + N + " > 0:");
                   o(2, A + " = \"positive\"");
                   if (coin(r)) {
                     o(1, "elif " + N + " < 0:");
                     o(2, A + " = \"negative\"");
                   } else {
                     o(1, "if " + N + " < 0:");
                     o(2, A + " = \"negative\"");
                   }
                   o(1, "return " + A);
                 }});
    t.push_back({"average", "return the average of the list", Signature::List,
                 {"mean_total", "avg_sum", "running_total"}, {},
                 [](const Names& n, Rng& r, Lines& o) {
                   accumulate(n, r, o, "0", "+");
                   o(1, "return " + n.at('A') + " // len(" + n.at('L') + ")");
                 }});
    t.push_back({"is_sorted", "check if the list is sorted", Signature::List,
                 {"ordered", "sorted_flag", "in_order"}, {},
                 [](const Names& n, Rng&, Lines& o) {
                   const auto& A = n.at('A');
                   const auto& K = n.at('K');
                   const auto& L = n.at('L');
                   o(1, A + " = True");
                   o(1, K + " = 1");
                   o(1, "while " + K + " < len(" + L + "):");
                   o(2, "if " + L + "[" + K + " - 1] > " + L + "[" + K + "]:");
                   o(3, A + " = False");
                   o(2, K + " += 1");
                   o(1, "return " + A);
                 }});
    t.push_back({"count_occurrences", "count how many times the target appears in the list",
                 Signature::ListTarget, {"occurrences", "matches", "hits"}, {},
                 [](const Names& n, Rng& r, Lines& o) {
                   count_if(n, r, o, n.at('I') + " == " + n.at('T'));
                   o(1, "return " + n.at('A'));
                 }});
    return t;
  }();
  return all;
}

const std::vector<std::string> kFunctionNames = {"f", "func", "solve", "compute", "process",
                                                 "helper", "run", "calc", "handle", "method",
                                                 "apply", "work"};
const std::vector<std::string> kListNames = {"nums", "values", "items", "lst",
                                             "arr", "data", "xs", "seq"};
const std::vector<std::string> kTargetNames = {"target", "key", "needle", "wanted", "q"};
const std::vector<std::string> kIntNames = {"n", "num", "size", "limit", "m"};
const std::vector<std::string> kGenericNames = {"res", "out", "r", "tmp", "v",
                                                "w", "state", "cur", "h", "g"};
const std::vector<std::string> kLoopNames = {"item", "elem", "value", "x", "e", "y"};
const std::vector<std::string> kIndexNames = {"i", "j", "k", "c", "p"};
const std::vector<std::string> kNoiseNames = {"unused", "extra", "spare", "scratch",
                                              "note", "marker"};
const std::vector<std::string> kStrings = {"\"start\"", "\"begin\"", "\"debug\"", "\"trace\"",
                                           "\"ok\"", "\"info\"", "\"check\"", "\"log\""};

constexpr double kInformative = 0.6;

struct Generated {
  Program program;
  Signature signature;
};

Generated generate_one(std::uint64_t seed, std::size_t index) {
  Rng rng(derive_seed(seed, "toy", {index}));
  const auto& tpls = templates();
  const Template& t = tpls[uniform_index(rng, tpls.size())];

  Names names;
  std::set<std::string> used;
  auto choose = [&](char role, const std::vector<std::string>& pool) {
    std::string s;
    do {
      s = pick(pool, rng);
    } while (used.count(s));
    used.insert(s);
    names[role] = s;
  };
  auto choose_local = [&](char role, const std::vector<std::string>& informative) {
    const bool use_informative = uniform_real(rng) < kInformative;
    std::vector<std::string> pool;
    for (const auto& s : use_informative ? informative : kGenericNames) {
      if (!used.count(s)) pool.push_back(s);
    }
    if (pool.empty()) pool = kGenericNames;
    choose(role, pool);
  };

  const std::string fname = pick(kFunctionNames, rng);
  used.insert(fname);
  std::vector<std::string> params;
  if (t.signature == Signature::Int) {
    choose('N', kIntNames);
    params.push_back(names['N']);
  } else {
    choose('L', kListNames);
    params.push_back(names['L']);
    if (t.signature == Signature::ListTarget) {
      choose('T', kTargetNames);
      params.push_back(names['T']);
    }
  }
  choose_local('A', t.a_names);
  choose_local('B', t.b_names.empty() ? kGenericNames : t.b_names);
  choose('I', kLoopNames);
  choose('K', kIndexNames);

  Lines body;
  const std::size_t noise = uniform_index(rng, 3);
  for (std::size_t k = 0; k < noise; ++k) {
    switch (uniform_index(rng, 4)) {
      case 0: body(1, "print(" + pick(kStrings, rng) + ")"); break;
      case 1:
        if (names.count('L')) {
          choose('X' + static_cast<char>(k), kNoiseNames);
          body(1, names['X' + static_cast<char>(k)] + " = len(" + names['L'] + ")");
          break;
        }
        [[fallthrough]];
      case 2:
        choose('X' + static_cast<char>(k), kNoiseNames);
        body(1, names['X' + static_cast<char>(k)] + " = 0");
        break;
      default:
        choose('X' + static_cast<char>(k), kNoiseNames);
        body(1, names['X' + static_cast<char>(k)] + " = " + pick(kStrings, rng));
        break;
    }
  }
  t.body(names, rng, body);

  std::string code = "def " + fname + "(";
  for (std::size_t k = 0; k < params.size(); ++k) code += (k ? ", " : "") + params[k];
  code += "):\n";
  for (const auto& [depth, text] : body.rows) {
    code += std::string(static_cast<std::size_t>(depth) * 4, ' ') + text + "\n";
  }
  char id[32];
  std::snprintf(id, sizeof id, "toy-%06zu", index);
  return {make_program(id, code, t.summary), t.signature};
}

Value int_list(std::initializer_list<int> xs) {
  List out;
  for (int x : xs) out.emplace_back(x);
  return out;
}

std::vector<Inputs> inputs_for(Signature s) {
  switch (s) {
    case Signature::List:
      return {{int_list({1, 2, 3})},
              {int_list({-2, 5, 0, 7})},
              {int_list({3, -1, 4, 1, -5, 9})},
              {int_list({4})},
              {int_list({})}};
    case Signature::Int: return {{0}, {1}, {5}, {-3}, {10}};
    case Signature::ListTarget:
      return {{int_list({1, 2, 3}), 2},
              {int_list({4, -1, 4, 7}), 4},
              {int_list({5, 6}), 9},
              {int_list({}), 1}};
  }
  return {};
}

}  // namespace

const std::vector<std::string>& toy_template_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& t : templates()) out.push_back(t.name);
    return out;
  }();
  return names;
}

std::vector<Program> generate_toy_corpus(std::size_t n, std::uint64_t seed) {
  std::vector<Program> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(generate_one(seed, i).program);
  return out;
}

std::vector<Fixture> toy_fixtures(std::size_t n, std::uint64_t seed) {
  std::vector<Fixture> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    Generated g = generate_one(seed, i);
    out.push_back({std::move(g.program), inputs_for(g.signature)});
  }
  return out;
}

}  // namespace clawsat
