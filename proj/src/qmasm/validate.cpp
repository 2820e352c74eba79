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

#include "qmem/qmasm/validate.hpp"

#include <map>
#include <optional>
#include <set>
#include <string>

#include "qmem/qmasm/builtins.hpp"

namespace qmem::qmasm {

namespace {

enum class SymKind { Qubit, Bit, Int, Angle, Gate, Qram };

struct Symbol {
  SymKind kind = SymKind::Int;
  std::optional<long long> size;  // register width
  long long aux = 0;              // qram word_len; gate qarg count
  long long params = 0;           // gate parameter count
};

class Validator {
 public:
  std::vector<Diagnostic> run(const Program& p) {
    scopes_.emplace_back();
    block(p.body, true, false);
    return std::move(diags_);
  }

 private:
  void error(SourceLoc loc, std::string msg) { diags_.push_back({Severity::Error, loc, std::move(msg)}); }
  void note(SourceLoc loc, std::string msg) { diags_.push_back({Severity::Note, loc, std::move(msg)}); }

  const Symbol* lookup(const std::string& name) const {
    for (auto it = scopes_.rbegin(); it != scopes_.rend(); ++it) {
      auto f = it->find(name);
      if (f != it->end()) return &f->second;
    }
    return nullptr;
  }

  void declare(SourceLoc loc, const std::string& name, Symbol sym) {
    if (scopes_.back().count(name) || (sym.kind == SymKind::Gate && is_builtin_gate(name))) {
      error(loc, "'" + name + "' is already declared");
      return;
    }
    scopes_.back()[name] = sym;
  }

  /// Returns false for an angle-valued expression.
  bool expr(const ExprPtr& e, bool in_gate) {
    if (!e) return true;
    switch (e->kind) {
      case Expr::Kind::Int: return true;
      case Expr::Kind::Real:
      case Expr::Kind::Pi: return false;
      case Expr::Kind::Ident:
      case Expr::Kind::Index: {
        const Symbol* s = lookup(e->name);
        if (!s) {
          error(e->loc, "unknown identifier '" + e->name + "'");
          return true;
        }
        if (s->kind == SymKind::Qubit) error(e->loc, "qubit register '" + e->name + "' used as a classical value");
        if (s->kind == SymKind::Gate || s->kind == SymKind::Qram) {
          error(e->loc, "'" + e->name + "' is not a classical value");
        }
        if (e->kind == Expr::Kind::Index) {
          if (s->kind != SymKind::Bit) error(e->loc, "'" + e->name + "' cannot be indexed");
          expr(e->args[0], in_gate);
          const auto i = fold_int(e->args[0]);
          if (i && s->size && (*i < 0 || *i >= *s->size)) {
            error(e->loc, "index " + std::to_string(*i) + " out of range for " + e->name + "[" +
                              std::to_string(*s->size) + "]");
          }
          return true;
        }
        return s->kind != SymKind::Angle;
      }
      case Expr::Kind::Unary: return expr(e->args[0], in_gate);
      case Expr::Kind::Binary: {
        const bool a = expr(e->args[0], in_gate);
        const bool b = expr(e->args[1], in_gate);
        const std::string& op = e->name;
        if (op == "==" || op == "!=" || op == "<" || op == "<=" || op == ">" || op == ">=" || op == "&&" ||
            op == "||") {
          if (op == "&&" || op == "||") {
            if (!a || !b) error(e->loc, "logical operator on an angle value");
          }
          return true;
        }
        if (op == "%" && (!a || !b)) error(e->loc, "'%' needs integer operands");
        return a && b;
      }
    }
    return true;
  }

  void condition(const ExprPtr& e) {
    if (!expr(e, false)) error(e->loc, "condition must be integer or bit valued, not an angle");
  }

  /// Inclusive index range of an operand, if constant.
  std::optional<std::pair<long long, long long>> static_range(const Operand& o) const {
    const Symbol* sym = lookup(o.name);
    if (!sym || !sym->size) return std::nullopt;
    const long long last = *sym->size - 1;
    switch (o.select) {
      case Operand::Select::All: return std::pair{0LL, last};
      case Operand::Select::Index: {
        const auto i = fold_int(o.index);
        if (!i) return std::nullopt;
        return std::pair{*i, *i};
      }
      case Operand::Select::Slice: {
        const auto a = fold_int(o.index);
        const auto b = o.end ? fold_int(o.end) : std::optional<long long>(last);
        if (!a || !b) return std::nullopt;
        return std::pair{*a, *b};
      }
    }
    return std::nullopt;
  }

  /// Static width of a qubit operand, if known.
  std::optional<long long> operand(const Operand& o, bool quantum, const std::set<std::string>* gate_qargs) {
    if (gate_qargs && gate_qargs->count(o.name)) {
      if (o.select != Operand::Select::All) error(o.loc, "gate argument '" + o.name + "' cannot be indexed");
      return 1;
    }
    const Symbol* s = lookup(o.name);
    if (!s) {
      error(o.loc, "unknown register '" + o.name + "'");
      return std::nullopt;
    }
    if (quantum && s->kind != SymKind::Qubit) {
      error(o.loc, "'" + o.name + "' is not a qubit register");
      return std::nullopt;
    }
    if (!quantum && s->kind != SymKind::Bit) {
      error(o.loc, "'" + o.name + "' is not a bit register");
      return std::nullopt;
    }
    if (gate_qargs) error(o.loc, "gate bodies may only use their own qubit arguments");
    const auto n = s->size;
    switch (o.select) {
      case Operand::Select::All: return n;
      case Operand::Select::Index: {
        expr(o.index, false);
        const auto i = fold_int(o.index);
        if (i && n && (*i < 0 || *i >= *n)) {
          error(o.loc, "index " + std::to_string(*i) + " out of range for " + o.name + "[" + std::to_string(*n) + "]");
        }
        return 1;
      }
      case Operand::Select::Slice: {
        expr(o.index, false);
        if (o.end) expr(o.end, false);
        const auto lo = fold_int(o.index);
        const auto hi = o.end ? fold_int(o.end) : (n ? std::optional<long long>(*n - 1) : std::nullopt);
        if (lo && hi && n) {
          if (*lo < 0 || *hi >= *n || *lo > *hi) {
            error(o.loc, "slice [" + std::to_string(*lo) + ":" + std::to_string(*hi) + "] out of range for " + o.name +
                             "[" + std::to_string(*n) + "]");
            return std::nullopt;
          }
          return *hi - *lo + 1;
        }
        return std::nullopt;
      }
    }
    return std::nullopt;
  }

  void memory_span(const Stmt& s, std::optional<long long> width) {
    if (!mem_size_) {
      error(s.loc, "memory access before any 'mem' declaration");
      return;
    }
    const auto a = fold_int(s.value);
    if (a && *a < 0) {
      error(s.loc, "negative memory address " + std::to_string(*a));
      return;
    }
    if (a && width && *a + *width > *mem_size_) {
      error(s.loc, "span [" + std::to_string(*a) + "," + std::to_string(*a + *width) + ") exceeds memory size " +
                       std::to_string(*mem_size_));
    }
  }

  void gate_call(const Stmt& s, const std::set<std::string>* gate_qargs) {
    long long controls = 0;
    for (const auto& m : s.modifiers) {
      const auto c = m.count ? fold_int(m.count) : std::optional<long long>(1);
      if (!c || *c < 1) {
        error(s.loc, "control count must be a positive integer constant");
        return;
      }
      controls += *c;
    }
    long long want_params = 0, want_qubits = 0;
    if (const auto* b = find_builtin_gate(s.name)) {
      want_params = b->params;
      want_qubits = b->qubits;
    } else if (const Symbol* g = lookup(s.name); g && g->kind == SymKind::Gate) {
      want_params = g->params;
      want_qubits = g->aux;
    } else {
      error(s.loc, "unknown gate '" + s.name + "'");
      return;
    }
    if (static_cast<long long>(s.args.size()) != want_params) {
      error(s.loc, "gate '" + s.name + "' takes " + std::to_string(want_params) + " parameter(s), got " +
                       std::to_string(s.args.size()));
    }
    for (const auto& a : s.args) expr(a, gate_qargs != nullptr);
    if (static_cast<long long>(s.operands.size()) != want_qubits + controls) {
      error(s.loc, "gate '" + s.name + "' expects " + std::to_string(want_qubits + controls) +
                       " qubit operand(s), got " + std::to_string(s.operands.size()));
    }
    std::optional<long long> broadcast;
    for (const auto& o : s.operands) {
      const auto w = operand(o, true, gate_qargs);
      if (w && *w != 1) {
        if (broadcast && *broadcast != *w) error(o.loc, "broadcast width mismatch");
        broadcast = w;
      }
    }
    std::set<std::pair<std::string, long long>> seen;
    for (const auto& o : s.operands) {
      std::optional<long long> i = 0;
      if (o.select == Operand::Select::Index) {
        i = fold_int(o.index);
      } else if (!gate_qargs || !gate_qargs->count(o.name)) {
        continue;
      }
      if (i && !seen.insert({o.name, *i}).second) {
        error(o.loc, "repeated qubit argument in gate '" + s.name + "'");
        break;
      }
    }
  }

  void gate_def(const Stmt& s) {
    Symbol g;
    g.kind = SymKind::Gate;
    g.params = static_cast<long long>(s.params.size());
    g.aux = static_cast<long long>(s.qargs.size());
    declare(s.loc, s.name, g);
    std::set<std::string> qargs(s.qargs.begin(), s.qargs.end());
    if (qargs.size() != s.qargs.size()) error(s.loc, "repeated qubit argument in gate '" + s.name + "'");
    scopes_.emplace_back();
    for (const auto& p : s.params) scopes_.back()[p] = {SymKind::Angle, std::nullopt, 0, 0};
    for (const auto& st : s.body) {
      if (st.kind == StmtKind::GateCall) {
        gate_call(st, &qargs);
      } else if (st.kind == StmtKind::AngleDecl || st.kind == StmtKind::IntDecl) {
        expr(st.value, true);
        declare(st.loc, st.name, {st.kind == StmtKind::AngleDecl ? SymKind::Angle : SymKind::Int, std::nullopt, 0, 0});
      } else {
        error(st.loc, "only gate calls and angle/int declarations are allowed in a gate body");
      }
    }
    scopes_.pop_back();
  }

  void block(const Block& b, bool top, bool in_loop) {
    for (const auto& s : b) statement(s, top, in_loop);
  }

  void nested(const Block& b, bool in_loop) {
    scopes_.emplace_back();
    block(b, false, in_loop);
    scopes_.pop_back();
  }

  void statement(const Stmt& s, bool top, bool in_loop) {
    switch (s.kind) {
      case StmtKind::QubitDecl: {
        if (!top) error(s.loc, "qubit registers must be declared at top level");
        const auto n = s.size ? fold_int(s.size) : std::optional<long long>(1);
        if (!n || *n < 1) error(s.loc, "qubit register size must be a positive integer constant");
        declare(s.loc, s.name, {SymKind::Qubit, n, 0, 0});
        break;
      }
      case StmtKind::BitDecl: {
        const auto n = s.size ? fold_int(s.size) : std::optional<long long>(1);
        if (!n || *n < 1) error(s.loc, "bit register size must be a positive integer constant");
        for (const auto& e : s.literal) {
          const auto v = fold_int(e);
          if (!v || (*v != 0 && *v != 1)) error(e->loc, "bit-array literal elements must be 0 or 1");
        }
        if (s.value) expr(s.value, false);
        declare(s.loc, s.name, {SymKind::Bit, n, 0, 0});
        break;
      }
      case StmtKind::IntDecl:
        if (s.value && !expr(s.value, false)) error(s.loc, "int initializer is angle valued");
        declare(s.loc, s.name, {SymKind::Int, std::nullopt, 0, 0});
        break;
      case StmtKind::AngleDecl:
        expr(s.value, false);
        declare(s.loc, s.name, {SymKind::Angle, std::nullopt, 0, 0});
        break;
      case StmtKind::GateDef:
        if (!top) error(s.loc, "gates must be defined at top level");
        gate_def(s);
        break;
      case StmtKind::GateCall: gate_call(s, nullptr); break;
      case StmtKind::Measure: {
        const auto a = operand(s.operands[0], true, nullptr);
        const auto b = operand(s.operands[1], false, nullptr);
        if (a && b && *a != *b) {
          error(s.loc, "measure width mismatch: " + std::to_string(*a) + " qubit(s) into " + std::to_string(*b) +
                           " bit(s)");
        }
        break;
      }
      case StmtKind::Reset: operand(s.operands[0], true, nullptr); break;
      case StmtKind::If:
        condition(s.value);
        nested(s.body, in_loop);
        if (s.has_else) nested(s.else_body, in_loop);
        break;
      case StmtKind::For: {
        expr(s.range_start, false);
        expr(s.range_end, false);
        if (s.range_step) {
          expr(s.range_step, false);
          const auto st = fold_int(s.range_step);
          if (st && *st == 0) error(s.loc, "range step must be nonzero");
        }
        scopes_.emplace_back();
        scopes_.back()[s.name] = {SymKind::Int, std::nullopt, 0, 0};
        block(s.body, false, true);
        scopes_.pop_back();
        break;
      }
      case StmtKind::While:
        condition(s.value);
        nested(s.body, true);
        break;
      case StmtKind::Assign: {
        const Symbol* t = lookup(s.target->name);
        if (!t) {
          error(s.target->loc, "unknown identifier '" + s.target->name + "'");
        } else if (t->kind != SymKind::Int && t->kind != SymKind::Bit && t->kind != SymKind::Angle) {
          error(s.target->loc, "'" + s.target->name + "' is not assignable");
        } else if (s.target->select == Operand::Select::Index) {
          if (t->kind != SymKind::Bit) error(s.target->loc, "'" + s.target->name + "' cannot be indexed");
          expr(s.target->index, false);
          const auto i = fold_int(s.target->index);
          if (i && t->size && (*i < 0 || *i >= *t->size)) {
            error(s.target->loc, "index " + std::to_string(*i) + " out of range for " + s.target->name);
          }
        }
        const bool integral = expr(s.value, false);
        if (t && t->kind != SymKind::Angle && !integral) error(s.loc, "assigning an angle to an integer variable");
        break;
      }
      case StmtKind::MemDecl: {
        if (!top) error(s.loc, "'mem' must be declared at top level");
        if (mem_size_) error(s.loc, "'mem' may appear only once");
        if (memory_used_) error(s.loc, "'mem' must precede every ld/st/mreset");
        const auto n = fold_int(s.size);
        if (!n || *n < 1) {
          error(s.loc, "memory size must be a positive integer constant");
        } else {
          mem_size_ = *n;
        }
        break;
      }
      case StmtKind::Load:
      case StmtKind::Store: {
        memory_used_ = true;
        expr(s.value, false);
        memory_span(s, operand(s.operands[0], true, nullptr));
        break;
      }
      case StmtKind::MReset:
        memory_used_ = true;
        if (s.value) {
          expr(s.value, false);
          memory_span(s, 1);
        } else if (!mem_size_) {
          error(s.loc, "memory access before any 'mem' declaration");
        }
        break;
      case StmtKind::QramDecl: {
        if (!top) error(s.loc, "'qram' must be declared at top level");
        const auto n = fold_int(s.size), w = fold_int(s.size2);
        if (!n || *n < 1 || *n > 30) error(s.loc, "QRAM address length must be a positive integer constant");
        if (!w || *w < 1) error(s.loc, "QRAM word length must be a positive integer constant");
        declare(s.loc, s.name, {SymKind::Qram, n, w.value_or(1), 0});
        break;
      }
      case StmtKind::QInit: {
        const Symbol* q = lookup(s.name);
        if (!q || q->kind != SymKind::Qram) {
          error(s.loc, "unknown QRAM '" + s.name + "'");
          break;
        }
        std::optional<long long> len;
        if (s.has_literal) {
          len = static_cast<long long>(s.literal.size());
          for (const auto& e : s.literal) {
            const auto v = fold_int(e);
            if (!v || (*v != 0 && *v != 1)) error(e->loc, "QRAM data must be 0 or 1");
          }
        } else {
          const Symbol* d = lookup(s.value->name);
          if (!d || d->kind != SymKind::Bit) {
            error(s.value->loc, "qinit needs a bit register or literal");
          } else {
            len = d->size;
          }
        }
        if (len && q->size && *q->size <= 30) {
          const long long want = (1LL << *q->size) * q->aux;
          if (*len != want) {
            error(s.loc, "qinit array length " + std::to_string(*len) + " does not match QRAM size " +
                             std::to_string(want) + " (2^" + std::to_string(*q->size) + " x " +
                             std::to_string(q->aux) + ")");
          }
        }
        break;
      }
      case StmtKind::QLoad: {
        const Symbol* q = lookup(s.name);
        if (!q || q->kind != SymKind::Qram) {
          error(s.loc, "unknown QRAM '" + s.name + "'");
          break;
        }
        if (s.alias) note(s.loc, "'ldqram " + s.name + " addr bus' is an alias; prefer 'qld " + s.name + "(bus)[addr]'");
        const auto bw = operand(s.operands[0], true, nullptr);
        const auto aw = operand(s.operands[1], true, nullptr);
        if (bw && *bw != q->aux) {
          error(s.operands[0].loc, "QRAM bus width " + std::to_string(*bw) + " does not match word length " +
                                       std::to_string(q->aux));
        }
        if (aw && q->size && *aw != *q->size) {
          error(s.operands[1].loc, "QRAM address width " + std::to_string(*aw) + " does not match address length " +
                                       std::to_string(*q->size));
        }
        const auto br = static_range(s.operands[0]), ar = static_range(s.operands[1]);
        if (s.operands[0].name == s.operands[1].name && br && ar && br->first <= ar->second &&
            ar->first <= br->second) {
          error(s.loc, "QRAM bus and address registers must be distinct");
        }
        break;
      }
    }
    (void)in_loop;
  }

  std::vector<std::map<std::string, Symbol>> scopes_;
  std::vector<Diagnostic> diags_;
  std::optional<long long> mem_size_;
  bool memory_used_ = false;
};

}  // namespace

std::vector<Diagnostic> validate(const Program& program) { return Validator().run(program); }

bool has_errors(const std::vector<Diagnostic>& diagnostics) {
  for (const auto& d : diagnostics) {
    if (d.severity == Severity::Error) return true;
  }
  return false;
}

}  // namespace qmem::qmasm
