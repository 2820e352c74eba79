// Copyright 2026 The qmem Authors
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

#include "qmem/qmasm/parser.hpp"

#include <algorithm>
#include <functional>
#include <set>

#include "qmem/errors.hpp"
#include "qmem/qmasm/lexer.hpp"

namespace qmem::qmasm {

namespace {

const std::set<std::string> kUnsupported = {
    "def",    "defcal", "cal",     "defcalgrammar", "array", "extern",  "box",   "delay",  "barrier",
    "const",  "float",  "let",     "input",         "output", "gphase", "opaque", "inv",   "pow",
    "duration", "stretch", "complex", "uint", "bool", "break", "continue", "return", "switch", "end",
    "qreg",   "creg",   "durationof", "port", "frame", "waveform", "pragma"};

ExprPtr make_int(long long v, SourceLoc loc) {
  auto e = std::make_shared<Expr>();
  e->kind = Expr::Kind::Int;
  e->ival = v;
  e->loc = loc;
  return e;
}

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  Program run() {
    Program p;
    if (is_word("OPENQASM")) {
      next();
      const Token& v = peek();
      if (v.kind != TokenKind::Integer && v.kind != TokenKind::Real) error("expected version number");
      p.version = next().text;
      if (p.version != "3" && p.version.rfind("3.", 0) != 0) {
        error_at(v, "unsupported OpenQASM version " + v.text);
      }
      expect(";");
    }
    while (peek().kind != TokenKind::End) {
      if (is_word("include")) {
        include();
        continue;
      }
      p.body.push_back(statement());
    }
    p.warnings = std::move(warnings_);
    return p;
  }

 private:
  const Token& peek(std::size_t k = 0) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }
  const Token& next() { return toks_[std::min(pos_++, toks_.size() - 1)]; }
  bool is_sym(const char* s, std::size_t k = 0) const {
    return peek(k).kind == TokenKind::Symbol && peek(k).text == s;
  }
  bool is_word(const char* s, std::size_t k = 0) const {
    return peek(k).kind == TokenKind::Identifier && peek(k).text == s;
  }
  bool accept(const char* s) {
    if (!is_sym(s)) return false;
    ++pos_;
    return true;
  }

  [[noreturn]] void error_at(const Token& t, const std::string& msg) const {
    const std::string near = t.kind == TokenKind::End ? "end of input" : "'" + t.text + "'";
    throw ParseError(to_string(t.loc) + ": " + msg + " near " + near);
  }
  [[noreturn]] void error(const std::string& msg) const { error_at(peek(), msg); }

  void expect(const char* s) {
    if (!accept(s)) error(std::string("expected '") + s + "'");
  }

  std::string ident(const char* what) {
    const Token& t = peek();
    if (t.kind != TokenKind::Identifier) error(std::string("expected ") + what);
    if (kUnsupported.count(t.text)) error_at(t, "unsupported feature '" + t.text + "'");
    ++pos_;
    return t.text;
  }

  void include() {
    next();
    const Token& f = next();
    if (f.kind != TokenKind::String) error_at(f, "expected file name string");
    if (f.text != "stdgates.inc") error_at(f, "unsupported feature 'include' (only stdgates.inc is built in)");
    expect(";");
  }

  // ---- expressions -------------------------------------------------------

  ExprPtr binary(std::string op, ExprPtr l, ExprPtr r, SourceLoc loc) {
    auto e = std::make_shared<Expr>();
    e->kind = Expr::Kind::Binary;
    e->name = std::move(op);
    e->args = {std::move(l), std::move(r)};
    e->loc = loc;
    return e;
  }

  ExprPtr expr() { return logic_or(); }

  ExprPtr logic_or() {
    auto l = logic_and();
    while (is_sym("||")) {
      const auto loc = next().loc;
      l = binary("||", l, logic_and(), loc);
    }
    return l;
  }
  ExprPtr logic_and() {
    auto l = equality();
    while (is_sym("&&")) {
      const auto loc = next().loc;
      l = binary("&&", l, equality(), loc);
    }
    return l;
  }
  ExprPtr equality() {
    auto l = relational();
    while (is_sym("==") || is_sym("!=")) {
      const Token& t = next();
      l = binary(t.text, l, relational(), t.loc);
    }
    return l;
  }
  ExprPtr relational() {
    auto l = additive();
    while (is_sym("<") || is_sym("<=") || is_sym(">") || is_sym(">=")) {
      const Token& t = next();
      l = binary(t.text, l, additive(), t.loc);
    }
    return l;
  }
  ExprPtr additive() {
    auto l = multiplicative();
    while (is_sym("+") || is_sym("-")) {
      const Token& t = next();
      l = binary(t.text, l, multiplicative(), t.loc);
    }
    return l;
  }
  ExprPtr multiplicative() {
    auto l = unary();
    while (is_sym("*") || is_sym("/") || is_sym("%")) {
      const Token& t = next();
      l = binary(t.text, l, unary(), t.loc);
    }
    return l;
  }
  ExprPtr unary() {
    if (is_sym("-") || is_sym("!") || is_sym("+")) {
      const Token& t = next();
      auto e = std::make_shared<Expr>();
      e->kind = Expr::Kind::Unary;
      e->name = t.text;
      e->loc = t.loc;
      e->args = {unary()};
      return e;
    }
    return power();
  }
  ExprPtr power() {
    auto base = primary();
    if (is_sym("^") || is_sym("**")) {
      const auto loc = next().loc;
      return binary("^", base, unary(), loc);
    }
    return base;
  }
  ExprPtr primary() {
    const Token& t = peek();
    auto e = std::make_shared<Expr>();
    e->loc = t.loc;
    if (t.kind == TokenKind::Integer) {
      ++pos_;
      e->kind = Expr::Kind::Int;
      try {
        e->ival = std::stoll(t.text);
      } catch (const std::exception&) {
        error_at(t, "integer literal out of range");
      }
      return e;
    }
    if (t.kind == TokenKind::Real) {
      ++pos_;
      e->kind = Expr::Kind::Real;
      e->rval = std::stod(t.text);
      return e;
    }
    if (accept("(")) {
      auto inner = expr();
      expect(")");
      return inner;
    }
    if (t.kind == TokenKind::Identifier) {
      if (t.text == "pi") {
        ++pos_;
        e->kind = Expr::Kind::Pi;
        return e;
      }
      if (t.text == "true" || t.text == "false") {
        ++pos_;
        e->kind = Expr::Kind::Int;
        e->ival = t.text == "true";
        return e;
      }
      e->name = ident("identifier");
      if (accept("[")) {
        e->kind = Expr::Kind::Index;
        e->args = {expr()};
        expect("]");
      } else {
        e->kind = Expr::Kind::Ident;
      }
      return e;
    }
    error("expected expression");
  }

  // ---- operands ----------------------------------------------------------

  Operand operand() {
    Operand o;
    o.loc = peek().loc;
    o.name = ident("register name");
    if (accept("[")) {
      o.index = expr();
      if (accept(":")) {
        o.select = Operand::Select::Slice;
        if (!is_sym("]")) o.end = expr();
      } else {
        o.select = Operand::Select::Index;
      }
      expect("]");
    }
    return o;
  }

  ExprPtr bracketed_expr() {
    expect("[");
    auto e = expr();
    expect("]");
    return e;
  }

  // ---- statements --------------------------------------------------------

  Block body() {
    Block b;
    if (accept("{")) {
      while (!is_sym("}")) {
        if (peek().kind == TokenKind::End) error("expected '}'");
        b.push_back(statement());
      }
      expect("}");
    } else {
      b.push_back(statement());
    }
    return b;
  }

  ExprPtr optional_size() {
    if (!is_sym("[")) return nullptr;
    return bracketed_expr();
  }

  Stmt statement() {
    const Token& t = peek();
    Stmt s;
    s.loc = t.loc;
    if (t.kind != TokenKind::Identifier) error("expected statement");
    const std::string& w = t.text;
    if (kUnsupported.count(w)) error_at(t, "unsupported feature '" + w + "'");

    if (w == "include") error_at(t, "include is only allowed at top level");
    if (w == "OPENQASM") error("OPENQASM header must be the first statement");
    if (w == "qubit") {
      next();
      s.kind = StmtKind::QubitDecl;
      s.size = optional_size();
      s.name = ident("register name");
      expect(";");
      return s;
    }
    if (w == "bit" || w == "int" || w == "angle") {
      next();
      s.kind = w == "bit" ? StmtKind::BitDecl : w == "int" ? StmtKind::IntDecl : StmtKind::AngleDecl;
      s.size = optional_size();
      s.name = ident("variable name");
      if (accept("=")) {
        if (s.kind == StmtKind::BitDecl && is_sym("[")) {
          bit_literal(s);
        } else if (is_word("measure")) {
          error("declaration with measurement initializer is not supported; declare, then measure");
        } else {
          s.value = expr();
        }
      }
      expect(";");
      return s;
    }
    if (w == "gate") {
      next();
      s.kind = StmtKind::GateDef;
      s.name = ident("gate name");
      if (accept("(")) {
        if (!is_sym(")")) {
          do {
            s.params.push_back(ident("parameter name"));
          } while (accept(","));
        }
        expect(")");
      }
      do {
        s.qargs.push_back(ident("qubit argument"));
      } while (accept(","));
      if (!is_sym("{")) error("expected '{'");
      s.body = body();
      return s;
    }
    if (w == "measure") {
      next();
      s.kind = StmtKind::Measure;
      s.operands.push_back(operand());
      expect("->");
      s.operands.push_back(operand());
      expect(";");
      return s;
    }
    if (w == "reset") {
      next();
      s.kind = StmtKind::Reset;
      s.operands.push_back(operand());
      expect(";");
      return s;
    }
    if (w == "if") {
      next();
      s.kind = StmtKind::If;
      expect("(");
      s.value = expr();
      expect(")");
      s.body = body();
      if (is_word("else")) {
        next();
        s.has_else = true;
        s.else_body = body();
      }
      return s;
    }
    if (w == "for") {
      next();
      s.kind = StmtKind::For;
      if (is_word("int") && peek(1).kind == TokenKind::Identifier) next();
      s.name = ident("loop variable");
      if (!is_word("in")) error("expected 'in'");
      next();
      expect("[");
      s.range_start = expr();
      expect(":");
      auto second = expr();
      if (accept(":")) {
        s.range_step = second;
        s.range_end = expr();
      } else {
        s.range_end = second;
      }
      expect("]");
      s.body = body();
      return s;
    }
    if (w == "while") {
      next();
      s.kind = StmtKind::While;
      expect("(");
      s.value = expr();
      expect(")");
      s.body = body();
      return s;
    }
    if (w == "mem") {
      next();
      s.kind = StmtKind::MemDecl;
      s.size = expr();
      expect(";");
      return s;
    }
    if (w == "ld") {
      next();
      s.kind = StmtKind::Load;
      s.operands.push_back(operand());
      expect("=");
      s.value = bracketed_expr();
      expect(";");
      return s;
    }
    if (w == "st") {
      next();
      s.kind = StmtKind::Store;
      s.value = bracketed_expr();
      expect("=");
      s.operands.push_back(operand());
      expect(";");
      return s;
    }
    if (w == "mreset") {
      next();
      s.kind = StmtKind::MReset;
      if (is_sym("[")) {
        s.value = bracketed_expr();
      } else if (!is_sym(";")) {
        s.value = expr();
      }
      expect(";");
      return s;
    }
    if (w == "qram") {
      next();
      s.kind = StmtKind::QramDecl;
      s.name = ident("QRAM name");
      expect("[");
      s.size = expr();
      expect(",");
      s.size2 = expr();
      expect("]");
      expect(";");
      return s;
    }
    if (w == "qinit") {
      next();
      s.kind = StmtKind::QInit;
      s.name = ident("QRAM name");
      expect("[");
      if (peek().kind == TokenKind::Identifier && is_sym("]", 1)) {
        s.value = primary();
      } else {
        s.has_literal = true;
        do {
          s.literal.push_back(expr());
        } while (accept(","));
      }
      expect("]");
      expect(";");
      return s;
    }
    if (w == "qld") {
      next();
      s.kind = StmtKind::QLoad;
      s.name = ident("QRAM name");
      expect("(");
      s.operands.push_back(operand());  // bus
      expect(")");
      expect("[");
      s.operands.push_back(operand());  // address
      expect("]");
      expect(";");
      return s;
    }
    if (w == "ldqram") {
      next();
      s.kind = StmtKind::QLoad;
      s.alias = true;
      s.name = ident("QRAM name");
      Operand addr = operand();
      Operand bus = operand();
      s.operands = {bus, addr};
      expect(";");
      return s;
    }
    if (is_assignment()) {
      s.kind = StmtKind::Assign;
      Operand target;
      target.loc = peek().loc;
      target.name = ident("variable");
      if (accept("[")) {
        target.select = Operand::Select::Index;
        target.index = expr();
        expect("]");
      }
      s.target = target;
      s.op = next().text;
      if (is_word("measure")) {
        if (s.op != "=") error("measurement needs plain '='");
        next();
        s.kind = StmtKind::Measure;
        s.operands.push_back(operand());
        s.operands.push_back(*s.target);
        s.target.reset();
      } else {
        s.value = expr();
      }
      expect(";");
      return s;
    }
    return gate_call();
  }

  bool is_assignment() const {
    if (peek().kind != TokenKind::Identifier) return false;
    std::size_t k = 1;
    if (is_sym("[", k)) {
      int depth = 0;
      for (;; ++k) {
        const Token& t = peek(k);
        if (t.kind == TokenKind::End) return false;
        if (t.kind == TokenKind::Symbol && t.text == "[") ++depth;
        if (t.kind == TokenKind::Symbol && t.text == "]" && --depth == 0) break;
      }
      ++k;
    }
    return is_sym("=", k) || is_sym("+=", k) || is_sym("-=", k);
  }

  void bit_literal(Stmt& s) {
    expect("[");
    s.has_literal = true;
    if (!is_sym("]")) {
      do {
        s.literal.push_back(expr());
      } while (accept(","));
    }
    expect("]");
  }

  Stmt gate_call() {
    Stmt s;
    s.kind = StmtKind::GateCall;
    s.loc = peek().loc;
    while (is_word("ctrl") || is_word("negctrl")) {
      Modifier m;
      m.negated = next().text == "negctrl";
      if (accept("(")) {
        m.count = expr();
        expect(")");
      }
      expect("@");
      s.modifiers.push_back(m);
    }
    if (is_word("inv") || is_word("pow")) error_at(peek(), "unsupported feature '" + peek().text + "' modifier");
    s.name = ident("gate name");
    if (accept("(")) {
      if (!is_sym(")")) {
        do {
          s.args.push_back(expr());
        } while (accept(","));
      }
      expect(")");
    }
    // Operands on one line may also be separated by whitespace alone, as in `cx b aux;`.
    do {
      s.operands.push_back(operand());
    } while (accept(",") ||
             (peek().kind == TokenKind::Identifier && peek().loc.line == toks_[pos_ - 1].loc.line));
    expect(";");
    return s;
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  std::vector<Diagnostic> warnings_;
};

}  // namespace

Program parse_program(std::string_view source) {
  Parser p(tokenize(source));
  Program prog = p.run();
  // Bit-array literals shorter than their declared width are zero-padded on the right.
  std::vector<Diagnostic> extra;
  std::function<void(Block&)> pad = [&](Block& block) {
    for (auto& s : block) {
      if (s.kind == StmtKind::BitDecl && s.has_literal) {
        const auto width = fold_int(s.size);
        const long long n = width ? *width : 1;
        const auto len = static_cast<long long>(s.literal.size());
        if (len > n) {
          throw ParseError(to_string(s.loc) + ": literal has " + std::to_string(len) + " elements but '" + s.name +
                           "' holds " + std::to_string(n) + " bits");
        }
        if (len < n) {
          extra.push_back({Severity::Warning, s.loc,
                           std::to_string(len) + "-element literal assigned to bit[" + std::to_string(n) + "] " +
                               s.name + " is zero-padded on the right"});
          while (static_cast<long long>(s.literal.size()) < n) s.literal.push_back(make_int(0, s.loc));
        }
      }
      pad(s.body);
      pad(s.else_body);
    }
  };
  pad(prog.body);
  prog.warnings.insert(prog.warnings.end(), extra.begin(), extra.end());
  return prog;
}

std::optional<long long> fold_int(const ExprPtr& e) {
  if (!e) return std::nullopt;
  switch (e->kind) {
    case Expr::Kind::Int: return e->ival;
    case Expr::Kind::Unary: {
      const auto v = fold_int(e->args[0]);
      if (!v) return std::nullopt;
      if (e->name == "-") return -*v;
      if (e->name == "+") return *v;
      return static_cast<long long>(!*v);
    }
    case Expr::Kind::Binary: {
      const auto a = fold_int(e->args[0]), b = fold_int(e->args[1]);
      if (!a || !b) return std::nullopt;
      const std::string& op = e->name;
      if (op == "+") return *a + *b;
      if (op == "-") return *a - *b;
      if (op == "*") return *a * *b;
      if (op == "/") return *b == 0 ? std::nullopt : std::optional<long long>(*a / *b);
      if (op == "%") return *b == 0 ? std::nullopt : std::optional<long long>(*a % *b);
      if (op == "^") {
        if (*b < 0 || *b > 62) return std::nullopt;
        long long r = 1;
        for (long long k = 0; k < *b; ++k) r *= *a;
        return r;
      }
      if (op == "==") return static_cast<long long>(*a == *b);
      if (op == "!=") return static_cast<long long>(*a != *b);
      if (op == "<") return static_cast<long long>(*a < *b);
      if (op == "<=") return static_cast<long long>(*a <= *b);
      if (op == ">") return static_cast<long long>(*a > *b);
      if (op == ">=") return static_cast<long long>(*a >= *b);
      if (op == "&&") return static_cast<long long>(*a && *b);
      if (op == "||") return static_cast<long long>(*a || *b);
      return std::nullopt;
    }
    default: return std::nullopt;
  }
}

}  // namespace qmem::qmasm
