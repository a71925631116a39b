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

#include "clawsat/interpreter.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "clawsat/error.hpp"
#include "clawsat/token.hpp"

namespace clawsat {

namespace {

// ---------------------------------------------------------------- AST

struct Expr;
using ExprPtr = std::unique_ptr<Expr>;

struct Expr {
  enum Kind { Name, Int, Str, Bool, None, ListLit, TupleLit, Bin, Neg, And, Or, Not, Cmp,
              Call, Method, Index } kind;
  std::string text;  // name, operator, method name, string contents
  std::int64_t ival = 0;
  std::vector<ExprPtr> kids;
  std::vector<std::string> ops;  // comparison chain
  std::size_t pos = 0;
};

struct Stmt;
using StmtPtr = std::unique_ptr<Stmt>;
using Block = std::vector<StmtPtr>;

struct Stmt {
  enum Kind { Assign, AugAssign, ExprStmt, Return, If, For, While, Pass, Break, Continue,
              Def } kind;
  std::vector<ExprPtr> targets;
  ExprPtr value;
  std::string op;
  Block body;
  Block orelse;
  std::string name;
  std::vector<std::string> params;
  std::set<std::string> assigned;  // Def only
  std::size_t pos = 0;
};

// ---------------------------------------------------------------- parser

class Parser {
 public:
  explicit Parser(std::span<const std::string> toks) : t_(toks) {}

  Block module() {
    Block b = statements(false);
    if (!eof()) fail("unexpected token");
    return b;
  }

 private:
  std::span<const std::string> t_;
  std::size_t i_ = 0;

  [[noreturn]] void fail(const std::string& what) const {
    std::string at = eof() ? "end of input" : "'" + t_[i_] + "'";
    throw MalformedSource("token " + std::to_string(i_) + " (" + at + "): " + what);
  }
  bool eof() const { return i_ >= t_.size(); }
  const std::string& peek(std::size_t k = 0) const {
    static const std::string empty;
    return i_ + k < t_.size() ? t_[i_ + k] : empty;
  }
  bool at(std::string_view s) const { return !eof() && t_[i_] == s; }
  bool accept(std::string_view s) {
    if (at(s)) {
      ++i_;
      return true;
    }
    return false;
  }
  void expect(std::string_view s) {
    if (!accept(s)) fail("expected '" + std::string(s) + "'");
  }
  std::string name() {
    if (eof() || !tok::is_identifier_shaped(t_[i_]) || tok::is_keyword(t_[i_])) {
      fail("expected a name");
    }
    return t_[i_++];
  }

  Block statements(bool in_block) {
    Block out;
    while (!eof()) {
      if (in_block && at(tok::kDedent)) {
        ++i_;
        return out;
      }
      bool indented_suite = false;
      out.push_back(statement(indented_suite));
      if (indented_suite) continue;
      if (eof()) break;
      if (at(tok::kNewline)) {
        ++i_;
        continue;
      }
      if (at(tok::kDedent)) continue;
      fail("expected end of statement");
    }
    return out;
  }

  // After ':' either an indented block or a one-line simple statement.
  Block suite(bool& indented) {
    if (accept(tok::kIndent)) {
      indented = true;
      return statements(true);
    }
    indented = false;
    Block b;
    bool dummy = false;
    b.push_back(statement(dummy));
    return b;
  }

  // A one-line suite may be followed by NEWLINE elif/else.
  bool continuation(std::string_view kw, bool indented) {
    if (at(kw)) return true;
    if (!indented && at(tok::kNewline) && peek(1) == kw) {
      ++i_;
      return true;
    }
    return false;
  }

  StmtPtr statement(bool& indented) {
    auto s = std::make_unique<Stmt>();
    s->pos = i_;
    indented = false;
    if (accept("def")) {
      s->kind = Stmt::Def;
      s->name = name();
      expect("(");
      if (!at(")")) {
        s->params.push_back(name());
        while (accept(",")) s->params.push_back(name());
      }
      expect(")");
      expect(":");
      s->body = suite(indented);
      collect_assigned(s->body, s->assigned);
      return s;
    }
    if (accept("if")) return if_tail(std::move(s), indented);
    if (accept("while")) {
      s->kind = Stmt::While;
      s->value = expr();
      expect(":");
      s->body = suite(indented);
      return s;
    }
    if (accept("for")) {
      s->kind = Stmt::For;
      do {
        auto n = std::make_unique<Expr>();
        n->kind = Expr::Name;
        n->pos = i_;
        n->text = name();
        s->targets.push_back(std::move(n));
      } while (accept(","));
      expect("in");
      s->value = expr_list();
      expect(":");
      s->body = suite(indented);
      return s;
    }
    if (accept("return")) {
      s->kind = Stmt::Return;
      if (!eof() && !tok::is_layout(peek())) s->value = expr_list();
      return s;
    }
    if (accept("pass")) {
      s->kind = Stmt::Pass;
      return s;
    }
    if (accept("break")) {
      s->kind = Stmt::Break;
      return s;
    }
    if (accept("continue")) {
      s->kind = Stmt::Continue;
      return s;
    }
    ExprPtr lhs = expr_list();
    if (accept("=")) {
      s->kind = Stmt::Assign;
      check_target(*lhs);
      s->targets.push_back(std::move(lhs));
      s->value = expr_list();
      return s;
    }
    for (std::string_view op : {"+=", "-=", "*=", "//=", "%=", "/="}) {
      if (accept(op)) {
        s->kind = Stmt::AugAssign;
        if (lhs->kind != Expr::Name && lhs->kind != Expr::Index) fail("bad augmented target");
        s->op = std::string(op.substr(0, op.size() - 1));
        s->targets.push_back(std::move(lhs));
        s->value = expr();
        return s;
      }
    }
    s->kind = Stmt::ExprStmt;
    s->value = std::move(lhs);
    return s;
  }

  StmtPtr if_tail(StmtPtr s, bool& indented) {
    s->kind = Stmt::If;
    s->value = expr();
    expect(":");
    s->body = suite(indented);
    if (continuation("elif", indented)) {
      auto inner = std::make_unique<Stmt>();
      inner->pos = i_;
      ++i_;
      bool ind = false;
      s->orelse.push_back(if_tail(std::move(inner), ind));
      indented = ind;
    } else if (continuation("else", indented)) {
      ++i_;
      expect(":");
      s->orelse = suite(indented);
    }
    return s;
  }

  void check_target(const Expr& e) {
    if (e.kind == Expr::Name || e.kind == Expr::Index) return;
    if (e.kind == Expr::TupleLit) {
      for (const auto& k : e.kids) {
        if (k->kind != Expr::Name) fail("bad assignment target");
      }
      return;
    }
    fail("bad assignment target");
  }

  static void collect_assigned(const Block& b, std::set<std::string>& out) {
    for (const auto& s : b) {
      if (s->kind == Stmt::Assign || s->kind == Stmt::AugAssign || s->kind == Stmt::For) {
        for (const auto& t : s->targets) {
          if (t->kind == Expr::Name) out.insert(t->text);
          if (t->kind == Expr::TupleLit) {
            for (const auto& k : t->kids) out.insert(k->text);
          }
        }
      }
      if (s->kind != Stmt::Def) {
        collect_assigned(s->body, out);
        collect_assigned(s->orelse, out);
      }
    }
  }

  ExprPtr make(Expr::Kind k, std::size_t pos) {
    auto e = std::make_unique<Expr>();
    e->kind = k;
    e->pos = pos;
    return e;
  }

  ExprPtr expr_list() {
    const std::size_t pos = i_;
    ExprPtr first = expr();
    if (!at(",")) return first;
    auto tup = make(Expr::TupleLit, pos);
    tup->kids.push_back(std::move(first));
    while (accept(",")) {
      if (eof() || tok::is_layout(peek()) || at("=") || at(")") || at(":")) break;
      tup->kids.push_back(expr());
    }
    return tup;
  }

  ExprPtr expr() { return or_expr(); }

  ExprPtr or_expr() {
    ExprPtr l = and_expr();
    while (at("or")) {
      auto e = make(Expr::Or, i_++);
      e->kids.push_back(std::move(l));
      e->kids.push_back(and_expr());
      l = std::move(e);
    }
    return l;
  }

  ExprPtr and_expr() {
    ExprPtr l = not_expr();
    while (at("and")) {
      auto e = make(Expr::And, i_++);
      e->kids.push_back(std::move(l));
      e->kids.push_back(not_expr());
      l = std::move(e);
    }
    return l;
  }

  ExprPtr not_expr() {
    if (at("not")) {
      auto e = make(Expr::Not, i_++);
      e->kids.push_back(not_expr());
      return e;
    }
    return comparison();
  }

  ExprPtr comparison() {
    const std::size_t pos = i_;
    ExprPtr l = arith();
    ExprPtr cmp;
    for (;;) {
      std::string op;
      if (at("==") || at("!=") || at("<") || at("<=") || at(">") || at(">=") || at("in")) {
        op = t_[i_++];
      } else if (at("not") && peek(1) == "in") {
        i_ += 2;
        op = "not in";
      } else if (at("is")) {
        ++i_;
        op = accept("not") ? "is not" : "is";
      } else {
        break;
      }
      if (!cmp) {
        cmp = make(Expr::Cmp, pos);
        cmp->kids.push_back(std::move(l));
      }
      cmp->ops.push_back(op);
      cmp->kids.push_back(arith());
    }
    return cmp ? std::move(cmp) : std::move(l);
  }

  ExprPtr arith() {
    ExprPtr l = term();
    while (at("+") || at("-")) {
      auto e = make(Expr::Bin, i_);
      e->text = t_[i_++];
      e->kids.push_back(std::move(l));
      e->kids.push_back(term());
      l = std::move(e);
    }
    return l;
  }

  ExprPtr term() {
    ExprPtr l = factor();
    while (at("*") || at("//") || at("%") || at("/")) {
      auto e = make(Expr::Bin, i_);
      e->text = t_[i_++];
      e->kids.push_back(std::move(l));
      e->kids.push_back(factor());
      l = std::move(e);
    }
    return l;
  }

  ExprPtr factor() {
    if (at("-")) {
      auto e = make(Expr::Neg, i_++);
      e->kids.push_back(factor());
      return e;
    }
    if (accept("+")) return factor();
    ExprPtr base = primary();
    if (at("**")) {
      auto e = make(Expr::Bin, i_);
      e->text = t_[i_++];
      e->kids.push_back(std::move(base));
      e->kids.push_back(factor());
      return e;
    }
    return base;
  }

  std::vector<ExprPtr> args() {
    std::vector<ExprPtr> out;
    if (!at(")")) {
      out.push_back(expr());
      while (accept(",")) {
        if (at(")")) break;
        out.push_back(expr());
      }
    }
    expect(")");
    return out;
  }

  ExprPtr primary() {
    ExprPtr e = atom();
    for (;;) {
      if (at("(")) {
        auto c = make(Expr::Call, e->pos);
        ++i_;
        c->kids.push_back(std::move(e));
        for (auto& a : args()) c->kids.push_back(std::move(a));
        e = std::move(c);
      } else if (at("[")) {
        auto x = make(Expr::Index, i_++);
        x->kids.push_back(std::move(e));
        x->kids.push_back(expr());
        expect("]");
        e = std::move(x);
      } else if (at(".")) {
        auto m = make(Expr::Method, i_++);
        m->text = name();
        expect("(");
        m->kids.push_back(std::move(e));
        for (auto& a : args()) m->kids.push_back(std::move(a));
        e = std::move(m);
      } else {
        return e;
      }
    }
  }

  ExprPtr atom() {
    if (eof()) fail("unexpected end of input");
    const std::string& t = t_[i_];
    const std::size_t pos = i_;
    if (t == "True" || t == "False") {
      auto e = make(Expr::Bool, pos);
      e->ival = t == "True";
      ++i_;
      return e;
    }
    if (t == "None") {
      ++i_;
      return make(Expr::None, pos);
    }
    if (tok::is_int_literal(t)) {
      auto e = make(Expr::Int, pos);
      try {
        e->ival = std::stoll(t);
      } catch (const std::exception&) {
        fail("integer literal out of range");
      }
      ++i_;
      return e;
    }
    if (tok::is_string_literal(t)) {
      auto e = make(Expr::Str, pos);
      e->text = t.substr(1, t.size() - 2);
      ++i_;
      return e;
    }
    if (accept("(")) {
      if (accept(")")) return make(Expr::TupleLit, pos);
      ExprPtr inner = expr_list();
      expect(")");
      return inner;
    }
    if (accept("[")) {
      auto e = make(Expr::ListLit, pos);
      if (!at("]")) {
        e->kids.push_back(expr());
        while (accept(",")) {
          if (at("]")) break;
          e->kids.push_back(expr());
        }
      }
      expect("]");
      return e;
    }
    auto e = make(Expr::Name, pos);
    e->text = name();
    return e;
  }
};

// ---------------------------------------------------------------- runtime

struct PyError {
  std::string kind;
};
struct Timeout {};

bool truthy(const Value& v) {
  return std::visit(
      [](const auto& x) -> bool {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, NoneType>) return false;
        else if constexpr (std::is_same_v<T, bool>) return x;
        else if constexpr (std::is_same_v<T, std::int64_t>) return x != 0;
        else if constexpr (std::is_same_v<T, std::string>) return !x.empty();
        else if constexpr (std::is_same_v<T, std::shared_ptr<List>>) return !x->empty();
        else return true;
      },
      v.v);
}

bool is_int_like(const Value& v) {
  return std::holds_alternative<std::int64_t>(v.v) || std::holds_alternative<bool>(v.v);
}
std::int64_t as_int(const Value& v) {
  if (auto p = std::get_if<std::int64_t>(&v.v)) return *p;
  if (auto b = std::get_if<bool>(&v.v)) return *b ? 1 : 0;
  throw PyError{"TypeError"};
}
const std::shared_ptr<List>& as_list(const Value& v) {
  if (auto p = std::get_if<std::shared_ptr<List>>(&v.v)) return *p;
  throw PyError{"TypeError"};
}

bool equal(const Value& a, const Value& b) {
  if (is_int_like(a) && is_int_like(b)) return as_int(a) == as_int(b);
  if (a.v.index() != b.v.index()) return false;
  if (auto la = std::get_if<std::shared_ptr<List>>(&a.v)) {
    const auto& lb = std::get<std::shared_ptr<List>>(b.v);
    if (la->get() == lb.get()) return true;
    if ((*la)->size() != lb->size()) return false;
    for (std::size_t i = 0; i < lb->size(); ++i) {
      if (!equal((**la)[i], (*lb)[i])) return false;
    }
    return true;
  }
  return a.v == b.v;
}

int compare(const Value& a, const Value& b) {
  if (is_int_like(a) && is_int_like(b)) {
    const auto x = as_int(a), y = as_int(b);
    return x < y ? -1 : (x > y ? 1 : 0);
  }
  if (auto sa = std::get_if<std::string>(&a.v)) {
    if (auto sb = std::get_if<std::string>(&b.v)) return sa->compare(*sb) < 0 ? -1 : (*sa == *sb ? 0 : 1);
  }
  if (auto la = std::get_if<std::shared_ptr<List>>(&a.v)) {
    if (auto lb = std::get_if<std::shared_ptr<List>>(&b.v)) {
      const auto n = std::min((*la)->size(), (*lb)->size());
      for (std::size_t i = 0; i < n; ++i) {
        int c = compare((**la)[i], (**lb)[i]);
        if (c) return c;
      }
      return (*la)->size() < (*lb)->size() ? -1 : ((*la)->size() > (*lb)->size() ? 1 : 0);
    }
  }
  throw PyError{"TypeError"};
}

template <typename Op>
std::int64_t checked(Op op, std::int64_t x, std::int64_t y) {
  std::int64_t r = 0;
  if (op(x, y, &r)) throw PyError{"OverflowError"};
  return r;
}

std::int64_t floordiv(std::int64_t a, std::int64_t b) {
  if (b == 0) throw PyError{"ZeroDivisionError"};
  if (a == INT64_MIN && b == -1) throw PyError{"OverflowError"};
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

std::int64_t floormod(std::int64_t a, std::int64_t b) {
  if (b == 0) throw PyError{"ZeroDivisionError"};
  if (b == -1) return 0;
  std::int64_t m = a % b;
  if (m != 0 && ((m < 0) != (b < 0))) m += b;
  return m;
}

Value binop(const std::string& op, const Value& a, const Value& b) {
  if (is_int_like(a) && is_int_like(b)) {
    const auto x = as_int(a), y = as_int(b);
    using I = std::int64_t;
    if (op == "+") return checked([](I a, I b, I* r) { return __builtin_add_overflow(a, b, r); }, x, y);
    if (op == "-") return checked([](I a, I b, I* r) { return __builtin_sub_overflow(a, b, r); }, x, y);
    if (op == "*") return checked([](I a, I b, I* r) { return __builtin_mul_overflow(a, b, r); }, x, y);
    if (op == "//") return floordiv(x, y);
    if (op == "%") return floormod(x, y);
    if (op == "**") {
      if (y < 0) throw PyError{"TypeError"};
      std::int64_t acc = 1;
      for (std::int64_t k = 0; k < y; ++k) {
        if (__builtin_mul_overflow(acc, x, &acc)) throw PyError{"OverflowError"};
      }
      return acc;
    }
    throw PyError{"TypeError"};
  }
  if (op == "+") {
    if (auto sa = std::get_if<std::string>(&a.v)) {
      if (auto sb = std::get_if<std::string>(&b.v)) return *sa + *sb;
    }
    if (auto la = std::get_if<std::shared_ptr<List>>(&a.v)) {
      if (auto lb = std::get_if<std::shared_ptr<List>>(&b.v)) {
        List out = **la;
        out.insert(out.end(), (*lb)->begin(), (*lb)->end());
        return out;
      }
    }
  }
  if (op == "*" && is_int_like(b)) {
    const auto n = std::max<std::int64_t>(0, as_int(b));
    if (n > 100000) throw PyError{"MemoryError"};
    if (auto sa = std::get_if<std::string>(&a.v)) {
      std::string out;
      for (std::int64_t k = 0; k < n; ++k) out += *sa;
      return out;
    }
    if (auto la = std::get_if<std::shared_ptr<List>>(&a.v)) {
      List out;
      for (std::int64_t k = 0; k < n; ++k) out.insert(out.end(), (*la)->begin(), (*la)->end());
      return out;
    }
  }
  throw PyError{"TypeError"};
}

std::string str_of(const Value& v) {
  if (auto s = std::get_if<std::string>(&v.v)) return *s;
  return repr(v);
}

struct Frame {
  std::map<std::string, Value> locals;
  const std::set<std::string>* assigned = nullptr;
};

enum class Flow { Normal, Return, Break, Continue };

class Machine {
 public:
  Machine(const ExecLimits& limits, Outcome& out)
      : limits_(limits), out_(out), start_(std::chrono::steady_clock::now()) {}

  void load(Block module) {
    module_ = std::move(module);
    exec_block(module_, globals_);
  }

  Value call_first(const std::vector<Value>& args) {
    for (const auto& s : module_) {
      if (s->kind == Stmt::Def) return call_user(*s, args);
    }
    throw PyError{"NameError"};
  }

 private:
  const ExecLimits& limits_;
  Outcome& out_;
  std::chrono::steady_clock::time_point start_;
  std::uint64_t steps_ = 0;
  int depth_ = 0;
  Block module_;
  Frame globals_;
  std::map<std::string, const Stmt*> functions_;
  Value ret_;

  void tick() {
    ++steps_;
    if (steps_ > limits_.max_steps) throw Timeout{};
    if ((steps_ & 4095) == 0 && std::chrono::steady_clock::now() - start_ > limits_.wall) {
      throw Timeout{};
    }
  }

  Value lookup(const std::string& name, Frame& f) {
    auto it = f.locals.find(name);
    if (it != f.locals.end()) return it->second;
    if (&f != &globals_) {
      if (f.assigned && f.assigned->count(name)) throw PyError{"UnboundLocalError"};
      auto g = globals_.locals.find(name);
      if (g != globals_.locals.end()) return g->second;
    }
    if (functions_.count(name)) return Callable{name, false};
    if (tok::is_builtin(name)) return Callable{name, true};
    throw PyError{"NameError"};
  }

  Value call_user(const Stmt& def, const std::vector<Value>& args) {
    if (args.size() != def.params.size()) throw PyError{"TypeError"};
    if (++depth_ > limits_.max_depth) throw PyError{"RecursionError"};
    Frame f;
    f.assigned = &def.assigned;
    for (std::size_t k = 0; k < args.size(); ++k) f.locals[def.params[k]] = args[k];
    Value result;
    if (exec_block(def.body, f) == Flow::Return) result = ret_;
    --depth_;
    return result;
  }

  Value call_builtin(const std::string& name, std::vector<Value>& a, std::size_t pos) {
    auto need = [&](std::size_t lo, std::size_t hi) {
      if (a.size() < lo || a.size() > hi) throw PyError{"TypeError"};
    };
    auto iterable = [&](const Value& v) -> List {
      if (auto l = std::get_if<std::shared_ptr<List>>(&v.v)) return **l;
      if (auto s = std::get_if<std::string>(&v.v)) {
        List out;
        for (char c : *s) out.emplace_back(std::string(1, c));
        return out;
      }
      throw PyError{"TypeError"};
    };
    if (name == "print") {
      std::string line;
      for (std::size_t k = 0; k < a.size(); ++k) {
        if (k) line += ' ';
        line += str_of(a[k]);
      }
      out_.prints.emplace_back(pos, line);
      return NoneType{};
    }
    if (name == "len") {
      need(1, 1);
      if (auto s = std::get_if<std::string>(&a[0].v)) return static_cast<std::int64_t>(s->size());
      return static_cast<std::int64_t>(as_list(a[0])->size());
    }
    if (name == "range") {
      need(1, 3);
      std::int64_t lo = 0, hi, step = 1;
      if (a.size() == 1) {
        hi = as_int(a[0]);
      } else {
        lo = as_int(a[0]);
        hi = as_int(a[1]);
        if (a.size() == 3) step = as_int(a[2]);
      }
      if (step == 0) throw PyError{"ValueError"};
      List out;
      for (std::int64_t k = lo; step > 0 ? k < hi : k > hi; k += step) {
        if (out.size() > 100000) throw PyError{"MemoryError"};
        out.emplace_back(k);
        tick();
      }
      return out;
    }
    if (name == "abs") {
      need(1, 1);
      const auto x = as_int(a[0]);
      if (x == INT64_MIN) throw PyError{"OverflowError"};
      return x < 0 ? -x : x;
    }
    if (name == "min" || name == "max") {
      List items = a.size() == 1 ? iterable(a[0]) : a;
      if (items.empty()) throw PyError{"ValueError"};
      Value best = items[0];
      for (const auto& v : items) {
        const int c = compare(v, best);
        if ((name == "min" && c < 0) || (name == "max" && c > 0)) best = v;
      }
      return best;
    }
    if (name == "sum") {
      need(1, 2);
      Value acc = a.size() == 2 ? a[1] : Value(std::int64_t{0});
      for (const auto& v : iterable(a[0])) acc = binop("+", acc, v);
      return acc;
    }
    if (name == "str") {
      need(1, 1);
      return str_of(a[0]);
    }
    if (name == "int") {
      need(1, 1);
      if (auto s = std::get_if<std::string>(&a[0].v)) {
        try {
          std::size_t used = 0;
          const auto v = std::stoll(*s, &used);
          if (used != s->size()) throw PyError{"ValueError"};
          return static_cast<std::int64_t>(v);
        } catch (const std::logic_error&) {
          throw PyError{"ValueError"};
        }
      }
      return as_int(a[0]);
    }
    if (name == "bool") {
      need(1, 1);
      return truthy(a[0]);
    }
    if (name == "list") {
      need(0, 1);
      return a.empty() ? List{} : iterable(a[0]);
    }
    if (name == "sorted" || name == "reversed") {
      need(1, 1);
      List items = iterable(a[0]);
      if (name == "sorted") {
        std::stable_sort(items.begin(), items.end(),
                         [](const Value& x, const Value& y) { return compare(x, y) < 0; });
      } else {
        std::reverse(items.begin(), items.end());
      }
      return items;
    }
    throw PyError{"NameError"};
  }

  Value call_method(const std::string& method, const Value& obj, std::vector<Value>& a) {
    const auto& list = as_list(obj);
    if (method == "append") {
      if (a.size() != 1) throw PyError{"TypeError"};
      if (list->size() > 100000) throw PyError{"MemoryError"};
      list->push_back(a[0]);
      return NoneType{};
    }
    if (method == "pop") {
      if (list->empty()) throw PyError{"IndexError"};
      if (a.empty()) {
        Value v = list->back();
        list->pop_back();
        return v;
      }
      auto k = as_int(a[0]);
      const auto n = static_cast<std::int64_t>(list->size());
      if (k < 0) k += n;
      if (k < 0 || k >= n) throw PyError{"IndexError"};
      Value v = (*list)[static_cast<std::size_t>(k)];
      list->erase(list->begin() + k);
      return v;
    }
    throw PyError{"AttributeError"};
  }

  Value index(const Value& obj, const Value& idx) {
    auto k = as_int(idx);
    if (auto s = std::get_if<std::string>(&obj.v)) {
      const auto n = static_cast<std::int64_t>(s->size());
      if (k < 0) k += n;
      if (k < 0 || k >= n) throw PyError{"IndexError"};
      return std::string(1, (*s)[static_cast<std::size_t>(k)]);
    }
    const auto& list = as_list(obj);
    const auto n = static_cast<std::int64_t>(list->size());
    if (k < 0) k += n;
    if (k < 0 || k >= n) throw PyError{"IndexError"};
    return (*list)[static_cast<std::size_t>(k)];
  }

  Value eval(const Expr& e, Frame& f) {
    tick();
    switch (e.kind) {
      case Expr::Name: return lookup(e.text, f);
      case Expr::Int: return e.ival;
      case Expr::Str: return e.text;
      case Expr::Bool: return e.ival != 0;
      case Expr::None: return NoneType{};
      case Expr::ListLit:
      case Expr::TupleLit: {
        List out;
        for (const auto& k : e.kids) out.push_back(eval(*k, f));
        return out;
      }
      case Expr::Bin: return binop(e.text, eval(*e.kids[0], f), eval(*e.kids[1], f));
      case Expr::Neg: {
        const auto x = as_int(eval(*e.kids[0], f));
        if (x == INT64_MIN) throw PyError{"OverflowError"};
        return -x;
      }
      case Expr::And: {
        Value l = eval(*e.kids[0], f);
        return truthy(l) ? eval(*e.kids[1], f) : l;
      }
      case Expr::Or: {
        Value l = eval(*e.kids[0], f);
        return truthy(l) ? l : eval(*e.kids[1], f);
      }
      case Expr::Not: return !truthy(eval(*e.kids[0], f));
      case Expr::Cmp: {
        Value l = eval(*e.kids[0], f);
        for (std::size_t k = 0; k < e.ops.size(); ++k) {
          Value r = eval(*e.kids[k + 1], f);
          const auto& op = e.ops[k];
          bool ok;
          if (op == "==") ok = equal(l, r);
          else if (op == "!=") ok = !equal(l, r);
          else if (op == "<") ok = compare(l, r) < 0;
          else if (op == "<=") ok = compare(l, r) <= 0;
          else if (op == ">") ok = compare(l, r) > 0;
          else if (op == ">=") ok = compare(l, r) >= 0;
          else if (op == "is") ok = l.v.index() == r.v.index() && equal(l, r);
          else if (op == "is not") ok = !(l.v.index() == r.v.index() && equal(l, r));
          else {
            bool found = false;
            if (auto s = std::get_if<std::string>(&r.v)) {
              auto needle = std::get_if<std::string>(&l.v);
              if (!needle) throw PyError{"TypeError"};
              found = s->find(*needle) != std::string::npos;
            } else {
              for (const auto& x : *as_list(r)) {
                if (equal(x, l)) {
                  found = true;
                  break;
                }
              }
            }
            ok = op == "in" ? found : !found;
          }
          if (!ok) return false;
          l = std::move(r);
        }
        return true;
      }
      case Expr::Call: {
        Value fn = eval(*e.kids[0], f);
        std::vector<Value> a;
        for (std::size_t k = 1; k < e.kids.size(); ++k) a.push_back(eval(*e.kids[k], f));
        auto c = std::get_if<Callable>(&fn.v);
        if (!c) throw PyError{"TypeError"};
        if (c->builtin) return call_builtin(c->name, a, e.pos);
        return call_user(*functions_.at(c->name), a);
      }
      case Expr::Method: {
        Value obj = eval(*e.kids[0], f);
        std::vector<Value> a;
        for (std::size_t k = 1; k < e.kids.size(); ++k) a.push_back(eval(*e.kids[k], f));
        return call_method(e.text, obj, a);
      }
      case Expr::Index: return index(eval(*e.kids[0], f), eval(*e.kids[1], f));
    }
    throw PyError{"SystemError"};
  }

  void assign(const Expr& target, Value v, Frame& f) {
    if (target.kind == Expr::Name) {
      f.locals[target.text] = std::move(v);
    } else if (target.kind == Expr::Index) {
      Value obj = eval(*target.kids[0], f);
      auto k = as_int(eval(*target.kids[1], f));
      const auto& list = as_list(obj);
      const auto n = static_cast<std::int64_t>(list->size());
      if (k < 0) k += n;
      if (k < 0 || k >= n) throw PyError{"IndexError"};
      (*list)[static_cast<std::size_t>(k)] = std::move(v);
    } else {
      const auto& items = as_list(v);
      if (items->size() != target.kids.size()) throw PyError{"ValueError"};
      List copy = *items;
      for (std::size_t k = 0; k < copy.size(); ++k) assign(*target.kids[k], copy[k], f);
    }
  }

  Flow exec_block(const Block& b, Frame& f) {
    for (const auto& s : b) {
      Flow fl = exec(*s, f);
      if (fl != Flow::Normal) return fl;
    }
    return Flow::Normal;
  }

  Flow exec(const Stmt& s, Frame& f) {
    tick();
    switch (s.kind) {
      case Stmt::Def:
        functions_[s.name] = &s;
        return Flow::Normal;
      case Stmt::Assign:
        assign(*s.targets[0], eval(*s.value, f), f);
        return Flow::Normal;
      case Stmt::AugAssign: {
        const Expr& t = *s.targets[0];
        Value cur = eval(t, f);
        Value rhs = eval(*s.value, f);
        if (s.op == "+" && std::holds_alternative<std::shared_ptr<List>>(cur.v)) {
          auto& list = *as_list(cur);
          const List extra = *as_list(rhs);
          list.insert(list.end(), extra.begin(), extra.end());
          assign(t, cur, f);
        } else {
          assign(t, binop(s.op == "/" ? "//" : s.op, cur, rhs), f);
        }
        return Flow::Normal;
      }
      case Stmt::ExprStmt:
        eval(*s.value, f);
        return Flow::Normal;
      case Stmt::Return:
        if (&f == &globals_) throw PyError{"SyntaxError"};
        ret_ = s.value ? eval(*s.value, f) : Value(NoneType{});
        return Flow::Return;
      case Stmt::If:
        if (truthy(eval(*s.value, f))) return exec_block(s.body, f);
        return exec_block(s.orelse, f);
      case Stmt::While:
        while (truthy(eval(*s.value, f))) {
          Flow fl = exec_block(s.body, f);
          if (fl == Flow::Break) break;
          if (fl == Flow::Return) return fl;
        }
        return Flow::Normal;
      case Stmt::For: {
        Value it = eval(*s.value, f);
        List items;
        if (auto str = std::get_if<std::string>(&it.v)) {
          for (char c : *str) items.emplace_back(std::string(1, c));
        } else {
          items = *as_list(it);
        }
        for (auto& v : items) {
          if (s.targets.size() == 1) {
            assign(*s.targets[0], v, f);
          } else {
            const auto& parts = as_list(v);
            if (parts->size() != s.targets.size()) throw PyError{"ValueError"};
            for (std::size_t k = 0; k < parts->size(); ++k) assign(*s.targets[k], (*parts)[k], f);
          }
          Flow fl = exec_block(s.body, f);
          if (fl == Flow::Break) break;
          if (fl == Flow::Return) return fl;
        }
        return Flow::Normal;
      }
      case Stmt::Pass: return Flow::Normal;
      case Stmt::Break: return Flow::Break;
      case Stmt::Continue: return Flow::Continue;
    }
    return Flow::Normal;
  }
};

}  // namespace

std::string repr(const Value& value) {
  return std::visit(
      [](const auto& x) -> std::string {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, NoneType>) return "None";
        else if constexpr (std::is_same_v<T, bool>) return x ? "True" : "False";
        else if constexpr (std::is_same_v<T, std::int64_t>) return std::to_string(x);
        else if constexpr (std::is_same_v<T, std::string>) return "'" + x + "'";
        else if constexpr (std::is_same_v<T, std::shared_ptr<List>>) {
          std::string out = "[";
          for (std::size_t k = 0; k < x->size(); ++k) {
            if (k) out += ", ";
            out += repr((*x)[k]);
          }
          return out + "]";
        } else {
          return "<function " + x.name + ">";
        }
      },
      value.v);
}

Outcome run_program(std::span<const std::string> tokens, const std::vector<Value>& args,
                    const ExecLimits& limits) {
  Block module = Parser(tokens).module();
  Outcome out;
  // Arguments are deep-copied so callers' lists survive mutation.
  std::vector<Value> copies;
  for (const auto& a : args) {
    if (auto l = std::get_if<std::shared_ptr<List>>(&a.v)) {
      copies.emplace_back(List(**l));
    } else {
      copies.push_back(a);
    }
  }
  Machine m(limits, out);
  try {
    m.load(std::move(module));
    out.result = repr(m.call_first(copies));
  } catch (const PyError& e) {
    out.ok = false;
    out.error = e.kind;
  } catch (const Timeout&) {
    throw ExecutionTimeout("execution exceeded its budget");
  }
  return out;
}

}  // namespace clawsat
