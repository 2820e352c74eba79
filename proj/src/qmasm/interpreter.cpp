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

#include "qmem/qmasm/interpreter.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <set>

#include "qmem/errors.hpp"
#include "qmem/qmasm/builtins.hpp"

namespace qmem::qmasm {

namespace {

struct Value {
  bool real = false;
  long long i = 0;
  double r = 0.0;

  double as_real() const { return real ? r : static_cast<double>(i); }
  long long as_int() const {
    if (!real) return i;
    if (r != std::floor(r)) throw ArgumentError("expected an integer, got " + std::to_string(r));
    return static_cast<long long>(r);
  }
  bool truthy() const { return real ? r != 0.0 : i != 0; }
};

Value int_value(long long v) { return {false, v, 0.0}; }
Value real_value(double v) { return {true, 0, v}; }

struct Var {
  enum class Kind { Bits, Int, Angle } kind = Kind::Int;
  std::vector<int> bits;  // bit k of the register at index k
  Value value;
};

std::string bits_string(const std::vector<int>& bits) {
  std::string s;
  for (auto it = bits.rbegin(); it != bits.rend(); ++it) s.push_back(*it ? '1' : '0');
  return s;
}

/// Qubit-argument and parameter bindings inside a user gate body.
struct GateFrame {
  std::map<std::string, int> qargs;
  std::map<std::string, Value> values;
};

struct Controls {
  std::vector<int> qubits;
  std::vector<int> values;
};

class Machine {
 public:
  Machine(const Program& program, const RunConfig& config, std::uint64_t seed, ShotResult& out)
      : program_(program), config_(config), rng_(seed), out_(out) {}

  void run() {
    allocate();
    scopes_.emplace_back();
    block(program_.body);
    finish();
  }

  void finish() {
    while (!scopes_.empty()) pop_scope();
    if (memory_) {
      for (long a = 0; a < memory_->capacity(); ++a) {
        if (memory_->status(a) == CellStatus::Occupied) decay(a);
      }
    }
    for (const auto& name : declared_) out_.classical.emplace_back(name, finals_[name]);
    std::string key;
    for (const auto& name : declared_) {
      if (!measured_.count(name)) continue;
      if (!key.empty()) key += ' ';
      key += name + "=" + finals_[name];
    }
    out_.outcome = key;
  }

  void allocate() {
    int next = 0;
    std::vector<std::pair<int, std::string>> labels;
    for (const auto& s : program_.body) {
      if (s.kind == StmtKind::QubitDecl) {
        const long long n = s.size ? fold_int(s.size).value_or(0) : 1;
        if (n < 1) throw ArgumentError("bad size for qubit register '" + s.name + "'");
        std::vector<int> qs;
        for (long long k = 0; k < n; ++k) {
          labels.emplace_back(next, s.name + "[" + std::to_string(k) + "]");
          qs.push_back(next++);
        }
        qregs_[s.name] = qs;
        out_.registers.emplace_back(s.name, qs);
      }
    }
    for (const auto& s : program_.body) {
      if (s.kind != StmtKind::MemDecl) continue;
      const long long n = fold_int(s.size).value_or(0);
      if (n < 1) throw ArgumentError("bad memory size");
      std::vector<int> cells;
      for (long long k = 0; k < n; ++k) {
        labels.emplace_back(next, "mem[" + std::to_string(k) + "]");
        cells.push_back(next++);
      }
      memory_.emplace(cells, config_.store_policy);
      stored_at_.assign(static_cast<std::size_t>(n), 0.0);
    }
    for (const auto& s : program_.body) {
      if (s.kind != StmtKind::QramDecl) continue;
      QramDevice dev;
      dev.addr_len = static_cast<int>(fold_int(s.size).value_or(0));
      dev.word_len = static_cast<int>(fold_int(s.size2).value_or(0));
      if (dev.addr_len < 1 || dev.addr_len > 30 || dev.word_len < 1) {
        throw ArgumentError("bad shape for QRAM '" + s.name + "'");
      }
      dev.backend = config_.backend;
      if (config_.backend == QramBackend::Circuit) {
        const int need = qram_qubit_count(dev.addr_len, dev.word_len, QramBackend::Circuit, true) -
                         dev.addr_len - dev.word_len;
        if (next + need > config_.max_qubits) {
          throw ResourceError("qubit budget exceeded: circuit QRAM '" + s.name + "' needs " + std::to_string(need) +
                              " more qubits on top of " + std::to_string(next) + ", budget is " +
                              std::to_string(config_.max_qubits));
        }
        auto take = [&](std::vector<int>& v, Index count, const std::string& tag) {
          for (Index k = 0; k < count; ++k) {
            labels.emplace_back(next, s.name + "." + tag + "[" + std::to_string(k) + "]");
            v.push_back(next++);
          }
        };
        take(dev.memory_qubits, dev.data_size(), "cell");
        take(dev.router_qubits, dev.cells() - 1, "router");
        take(dev.channel_qubits, static_cast<Index>(dev.addr_len), "channel");
      }
      qrams_[s.name] = dev;
    }
    out_.state = StateVector(next, 0, config_.max_qubits);
    for (const auto& [q, label] : labels) out_.state.set_label(q, label);
  }

  // ---- classical ---------------------------------------------------------

  Var* find(const std::string& name) {
    for (auto it = scopes_.rbegin(); it != scopes_.rend(); ++it) {
      auto f = it->find(name);
      if (f != it->end()) return &f->second;
    }
    return nullptr;
  }

  void declare(const std::string& name, Var v) {
    if (scopes_.back().count(name)) throw StateError("'" + name + "' declared twice in one scope");
    if (std::find(declared_.begin(), declared_.end(), name) == declared_.end()) declared_.push_back(name);
    scopes_.back()[name] = std::move(v);
  }

  static std::string render(const Var& v) {
    switch (v.kind) {
      case Var::Kind::Bits: return bits_string(v.bits);
      case Var::Kind::Int: return std::to_string(v.value.i);
      case Var::Kind::Angle: {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.12g", v.value.r);
        return buf;
      }
    }
    return "";
  }

  void pop_scope() {
    for (const auto& [name, v] : scopes_.back()) finals_[name] = render(v);
    scopes_.pop_back();
  }

  Value eval(const ExprPtr& e, const GateFrame* frame = nullptr) {
    switch (e->kind) {
      case Expr::Kind::Int: return int_value(e->ival);
      case Expr::Kind::Real: return real_value(e->rval);
      case Expr::Kind::Pi: return real_value(std::numbers::pi);
      case Expr::Kind::Ident: {
        if (frame) {
          auto f = frame->values.find(e->name);
          if (f != frame->values.end()) return f->second;
        }
        const Var* v = find(e->name);
        if (!v) throw StateError("unknown identifier '" + e->name + "'");
        if (v->kind != Var::Kind::Bits) return v->value;
        long long x = 0;
        for (std::size_t k = 0; k < v->bits.size() && k < 63; ++k) x |= static_cast<long long>(v->bits[k]) << k;
        return int_value(x);
      }
      case Expr::Kind::Index: {
        const Var* v = find(e->name);
        if (!v || v->kind != Var::Kind::Bits) throw StateError("'" + e->name + "' is not a bit register");
        const long long i = eval(e->args[0], frame).as_int();
        if (i < 0 || i >= static_cast<long long>(v->bits.size())) {
          throw AddressError("index " + std::to_string(i) + " out of range for " + e->name);
        }
        return int_value(v->bits[static_cast<std::size_t>(i)]);
      }
      case Expr::Kind::Unary: {
        const Value a = eval(e->args[0], frame);
        if (e->name == "!") return int_value(!a.truthy());
        if (e->name == "+") return a;
        return a.real ? real_value(-a.r) : int_value(-a.i);
      }
      case Expr::Kind::Binary: return binary(e->name, eval(e->args[0], frame), eval(e->args[1], frame));
    }
    return {};
  }

  static Value binary(const std::string& op, Value a, Value b) {
    if (op == "&&") return int_value(a.truthy() && b.truthy());
    if (op == "||") return int_value(a.truthy() || b.truthy());
    const bool real = a.real || b.real;
    if (op == "==" || op == "!=" || op == "<" || op == "<=" || op == ">" || op == ">=") {
      const double x = a.as_real(), y = b.as_real();
      bool r = false;
      if (op == "==") r = real ? x == y : a.i == b.i;
      if (op == "!=") r = real ? x != y : a.i != b.i;
      if (op == "<") r = real ? x < y : a.i < b.i;
      if (op == "<=") r = real ? x <= y : a.i <= b.i;
      if (op == ">") r = real ? x > y : a.i > b.i;
      if (op == ">=") r = real ? x >= y : a.i >= b.i;
      return int_value(r);
    }
    if (op == "^") {
      if (!real && b.i >= 0) {
        long long r = 1;
        for (long long k = 0; k < b.i; ++k) r *= a.i;
        return int_value(r);
      }
      return real_value(std::pow(a.as_real(), b.as_real()));
    }
    if (real) {
      const double x = a.as_real(), y = b.as_real();
      if (op == "+") return real_value(x + y);
      if (op == "-") return real_value(x - y);
      if (op == "*") return real_value(x * y);
      if (op == "/") return real_value(x / y);
      if (op == "%") return real_value(std::fmod(x, y));
    } else {
      if ((op == "/" || op == "%") && b.i == 0) throw ArgumentError("integer division by zero");
      if (op == "+") return int_value(a.i + b.i);
      if (op == "-") return int_value(a.i - b.i);
      if (op == "*") return int_value(a.i * b.i);
      if (op == "/") return int_value(a.i / b.i);
      if (op == "%") return int_value(a.i % b.i);
    }
    throw ArgumentError("unknown operator '" + op + "'");
  }

  // ---- timeline ----------------------------------------------------------

  void tick(std::string op, double duration, double fidelity) {
    out_.timeline.push_back({clock_, std::move(op), duration});
    clock_ += duration;
    out_.fidelity_estimate *= fidelity;
  }

  void decay(long addr) {
    const double idle = clock_ - stored_at_[static_cast<std::size_t>(addr)];
    const double t = config_.timing.raqm.t_storage;
    if (t > 0 && idle > 0) out_.fidelity_estimate *= std::exp(-idle / t);
  }

  std::string qubit_name(int q) const { return out_.state.labels()[static_cast<std::size_t>(q)]; }

  // ---- quantum -----------------------------------------------------------

  std::vector<int> qubits(const Operand& o, const GateFrame* frame) {
    if (frame) {
      auto f = frame->qargs.find(o.name);
      if (f != frame->qargs.end()) return {f->second};
    }
    auto r = qregs_.find(o.name);
    if (r == qregs_.end()) throw StateError("unknown qubit register '" + o.name + "'");
    const auto& reg = r->second;
    const auto n = static_cast<long long>(reg.size());
    switch (o.select) {
      case Operand::Select::All: return reg;
      case Operand::Select::Index: {
        const long long i = eval(o.index, frame).as_int();
        if (i < 0 || i >= n) throw AddressError("index " + std::to_string(i) + " out of range for " + o.name);
        return {reg[static_cast<std::size_t>(i)]};
      }
      case Operand::Select::Slice: {
        const long long lo = eval(o.index, frame).as_int();
        const long long hi = o.end ? eval(o.end, frame).as_int() : n - 1;
        if (lo < 0 || hi >= n || lo > hi) {
          throw AddressError("slice [" + std::to_string(lo) + ":" + std::to_string(hi) + "] out of range for " +
                             o.name);
        }
        return {reg.begin() + lo, reg.begin() + hi + 1};
      }
    }
    return {};
  }

  std::vector<std::size_t> bit_positions(const Operand& o, Var*& var) {
    var = find(o.name);
    if (!var || var->kind != Var::Kind::Bits) throw StateError("'" + o.name + "' is not a bit register");
    const auto n = static_cast<long long>(var->bits.size());
    std::vector<std::size_t> out;
    switch (o.select) {
      case Operand::Select::All:
        for (long long k = 0; k < n; ++k) out.push_back(static_cast<std::size_t>(k));
        break;
      case Operand::Select::Index: {
        const long long i = eval(o.index).as_int();
        if (i < 0 || i >= n) throw AddressError("index " + std::to_string(i) + " out of range for " + o.name);
        out.push_back(static_cast<std::size_t>(i));
        break;
      }
      case Operand::Select::Slice: {
        const long long lo = eval(o.index).as_int();
        const long long hi = o.end ? eval(o.end).as_int() : n - 1;
        if (lo < 0 || hi >= n || lo > hi) throw AddressError("slice out of range for " + o.name);
        for (long long k = lo; k <= hi; ++k) out.push_back(static_cast<std::size_t>(k));
        break;
      }
    }
    return out;
  }

  void primitive(GateSpec g, const std::string& name) {
    apply_gate(out_.state, g);
    std::string label = name;
    for (std::size_t k = 0; k < g.targets.size(); ++k) label += (k ? ", " : " ") + qubit_name(g.targets[k]);
    for (std::size_t k = 0; k < g.controls.size(); ++k) {
      label += (k ? ", " : " ctrl ") + std::string(g.control_values[k] ? "" : "!") + qubit_name(g.controls[k]);
    }
    out_.trace.push_back({TraceKind::Gate, std::move(g), {}, {}, {}, -1, 0});
    tick(label, config_.timing.gate_time, config_.timing.gate_fidelity);
  }

  void gate_call(const Stmt& s, const GateFrame* frame, const Controls& outer, int depth) {
    if (depth > 64) throw StateError("gate '" + s.name + "' expands too deeply");
    std::vector<std::vector<int>> ops;
    std::size_t width = 1;
    for (const auto& o : s.operands) {
      ops.push_back(qubits(o, frame));
      if (ops.back().size() != 1) {
        if (width != 1 && width != ops.back().size()) throw ArgumentError("broadcast width mismatch in '" + s.name + "'");
        width = ops.back().size();
      }
    }
    std::vector<Value> args;
    for (const auto& a : s.args) args.push_back(eval(a, frame));

    std::vector<int> mod_values;
    for (const auto& m : s.modifiers) {
      const long long c = m.count ? eval(m.count, frame).as_int() : 1;
      if (c < 1) throw ArgumentError("control count must be positive");
      for (long long k = 0; k < c; ++k) mod_values.push_back(m.negated ? 0 : 1);
    }
    const std::size_t nmod = mod_values.size();

    const BuiltinGate* builtin = find_builtin_gate(s.name);
    const Stmt* def = nullptr;
    if (!builtin) {
      auto g = gates_.find(s.name);
      if (g == gates_.end()) throw StateError("unknown gate '" + s.name + "'");
      def = g->second;
    }
    const std::size_t want = nmod + static_cast<std::size_t>(builtin ? builtin->qubits : static_cast<int>(def->qargs.size()));
    if (ops.size() != want) {
      throw ArgumentError("gate '" + s.name + "' expects " + std::to_string(want) + " qubit operand(s)");
    }
    const std::size_t want_args = builtin ? static_cast<std::size_t>(builtin->params) : def->params.size();
    if (args.size() != want_args) throw ArgumentError("gate '" + s.name + "' has the wrong number of parameters");

    for (std::size_t k = 0; k < width; ++k) {
      std::vector<int> q;
      for (const auto& o : ops) q.push_back(o.size() == 1 ? o[0] : o[k]);
      Controls c = outer;
      for (std::size_t m = 0; m < nmod; ++m) {
        c.qubits.push_back(q[m]);
        c.values.push_back(mod_values[m]);
      }
      if (builtin) {
        const auto nc = static_cast<std::size_t>(builtin->controls);
        for (std::size_t m = 0; m < nc; ++m) {
          c.qubits.push_back(q[nmod + m]);
          c.values.push_back(1);
        }
        GateSpec g;
        g.kind = builtin->kind;
        for (const auto& a : args) g.params.push_back(a.as_real());
        g.targets.assign(q.begin() + static_cast<std::ptrdiff_t>(nmod + nc), q.end());
        g.controls = c.qubits;
        g.control_values = c.values;
        primitive(std::move(g), s.name);
      } else {
        GateFrame inner;
        for (std::size_t m = 0; m < def->params.size(); ++m) inner.values[def->params[m]] = args[m];
        for (std::size_t m = 0; m < def->qargs.size(); ++m) inner.qargs[def->qargs[m]] = q[nmod + m];
        for (const auto& st : def->body) {
          if (st.kind == StmtKind::GateCall) {
            gate_call(st, &inner, c, depth + 1);
          } else if (st.kind == StmtKind::AngleDecl || st.kind == StmtKind::IntDecl) {
            Value v = st.value ? eval(st.value, &inner) : Value{};
            if (st.kind == StmtKind::AngleDecl) v = real_value(v.as_real());
            inner.values[st.name] = v;
          } else {
            throw StateError("unsupported statement in gate '" + s.name + "'");
          }
        }
      }
    }
  }

  std::string bit_key(const std::string& name, std::size_t i) const {
    return name + "[" + std::to_string(i) + "]";
  }

  void measure(const Stmt& s) {
    const auto src = qubits(s.operands[0], nullptr);
    Var* var = nullptr;
    const auto dst = bit_positions(s.operands[1], var);
    if (src.size() != dst.size()) throw ArgumentError("measure width mismatch");
    measured_.insert(s.operands[1].name);
    for (std::size_t k = 0; k < src.size(); ++k) {
      const int q = src[k];
      const auto forced = config_.post_select.find(bit_key(s.operands[1].name, dst[k]));
      int outcome;
      if (forced != config_.post_select.end()) {
        outcome = forced->second;
        postselect_qubit(out_.state, q, outcome);
        out_.trace.push_back({TraceKind::PostSelect, {}, {}, {}, {}, q, outcome});
      } else {
        outcome = measure_qubit(out_.state, q, rng_);
        out_.trace.push_back({TraceKind::Measure, {}, {}, {}, {}, q, outcome});
      }
      var->bits[dst[k]] = outcome;
      tick("measure " + qubit_name(q), config_.timing.gate_time, 1.0);
    }
  }

  void reset_traced(int q) {
    const int o = measure_qubit(out_.state, q, rng_);
    if (o) apply_gate(out_.state, GateSpec::x(q));
    out_.trace.push_back({TraceKind::Reset, {}, {}, {}, {}, q, o});
  }

  RaqmDevice& memory() {
    if (!memory_) throw StateError("no 'mem' declared");
    return *memory_;
  }

  void memory_access(const Stmt& s) {
    auto& mem = memory();
    const auto qs = qubits(s.operands[0], nullptr);
    const long long base = eval(s.value).as_int();
    const bool store = s.kind == StmtKind::Store;
    const double dt = config_.timing.raqm.t_addr + config_.timing.raqm.t_rw;
    for (std::size_t k = 0; k < qs.size(); ++k) {
      const long addr = static_cast<long>(base) + static_cast<long>(k);
      if (store) {
        if (mem.capacity() > addr && addr >= 0 && mem.status(addr) == CellStatus::Occupied) decay(addr);
        raqm_store(mem, out_.state, addr, qs[k]);
        stored_at_[static_cast<std::size_t>(addr)] = clock_ + dt;
      } else {
        if (mem.capacity() > addr && addr >= 0 && mem.status(addr) == CellStatus::Occupied) decay(addr);
        raqm_load(mem, out_.state, addr, qs[k]);
      }
      out_.trace.push_back({TraceKind::Gate, GateSpec::swap(qs[k], mem.cell_qubit(addr)), {}, {}, {}, -1, 0});
      tick(std::string(store ? "st [" : "ld [") + std::to_string(addr) + "] " + qubit_name(qs[k]), dt,
           config_.timing.raqm_fidelity);
    }
  }

  void mreset(const Stmt& s) {
    auto& mem = memory();
    std::optional<long> addr;
    if (s.value) addr = static_cast<long>(eval(s.value).as_int());
    const long first = addr ? *addr : 0;
    if (addr) mem.cell_qubit(*addr);
    const auto outcomes = raqm_reset(mem, out_.state, addr, rng_);
    for (std::size_t k = 0; k < outcomes.size(); ++k) {
      const long a = first + static_cast<long>(k);
      out_.trace.push_back({TraceKind::Reset, {}, {}, {}, {}, mem.cell_qubit(a), outcomes[k]});
    }
    tick(addr ? "mreset [" + std::to_string(*addr) + "]" : std::string("mreset"),
         config_.timing.raqm.t_addr + config_.timing.raqm.t_rw, 1.0);
  }

  QramDevice& qram(const std::string& name) {
    auto f = qrams_.find(name);
    if (f == qrams_.end()) throw StateError("unknown QRAM '" + name + "'");
    return f->second;
  }

  void qinit(const Stmt& s) {
    auto& dev = qram(s.name);
    std::vector<std::uint8_t> data;
    if (s.has_literal) {
      for (const auto& e : s.literal) data.push_back(static_cast<std::uint8_t>(eval(e).as_int() != 0));
    } else {
      const Var* v = find(s.value->name);
      if (!v || v->kind != Var::Kind::Bits) throw StateError("qinit needs a bit register");
      for (int b : v->bits) data.push_back(static_cast<std::uint8_t>(b));
    }
    const auto old = dev.data.value_or(std::vector<std::uint8_t>(data.size(), 0));
    qinit_load(dev, data, &out_.state);
    if (dev.materialized()) {
      for (std::size_t k = 0; k < data.size() && k < old.size(); ++k) {
        if (data[k] != old[k]) out_.trace.push_back({TraceKind::Gate, GateSpec::x(dev.memory_qubits[k]), {}, {}, {}, -1, 0});
      }
    }
  }

  void qload(const Stmt& s) {
    auto& dev = qram(s.name);
    const auto bus = qubits(s.operands[0], nullptr);
    const auto addr = qubits(s.operands[1], nullptr);
    oracle_query(dev, out_.state, addr, bus);
    TraceOp op;
    op.kind = TraceKind::QramQuery;
    op.addr = addr;
    op.bus = bus;
    op.data = *dev.data;
    out_.trace.push_back(std::move(op));
    tick("qld " + s.name, config_.timing.qram_stage_time * dev.addr_len, config_.timing.qram_fidelity);
  }

  void assign(const Stmt& s) {
    Var* v = find(s.target->name);
    if (!v) throw StateError("unknown identifier '" + s.target->name + "'");
    Value x = eval(s.value);
    auto combine = [&](Value old) {
      if (s.op == "+=") return binary("+", old, x);
      if (s.op == "-=") return binary("-", old, x);
      return x;
    };
    if (v->kind == Var::Kind::Bits) {
      if (s.target->select == Operand::Select::Index) {
        const long long i = eval(s.target->index).as_int();
        if (i < 0 || i >= static_cast<long long>(v->bits.size())) {
          throw AddressError("index " + std::to_string(i) + " out of range for " + s.target->name);
        }
        auto& bit = v->bits[static_cast<std::size_t>(i)];
        bit = static_cast<int>(combine(int_value(bit)).as_int() & 1);
      } else {
        long long cur = 0;
        for (std::size_t k = 0; k < v->bits.size() && k < 63; ++k) cur |= static_cast<long long>(v->bits[k]) << k;
        const long long nv = combine(int_value(cur)).as_int();
        for (std::size_t k = 0; k < v->bits.size(); ++k) v->bits[k] = k < 63 ? static_cast<int>((nv >> k) & 1) : 0;
      }
    } else if (v->kind == Var::Kind::Int) {
      v->value = int_value(combine(v->value).as_int());
    } else {
      v->value = real_value(combine(v->value).as_real());
    }
  }

  void declare_var(const Stmt& s) {
    Var v;
    if (s.kind == StmtKind::BitDecl) {
      v.kind = Var::Kind::Bits;
      const long long n = s.size ? eval(s.size).as_int() : 1;
      if (n < 1) throw ArgumentError("bad size for bit register '" + s.name + "'");
      v.bits.assign(static_cast<std::size_t>(n), 0);
      if (s.has_literal) {
        for (std::size_t k = 0; k < s.literal.size() && k < v.bits.size(); ++k) {
          v.bits[k] = static_cast<int>(eval(s.literal[k]).as_int() & 1);
        }
      } else if (s.value) {
        const long long x = eval(s.value).as_int();
        for (std::size_t k = 0; k < v.bits.size() && k < 63; ++k) v.bits[k] = static_cast<int>((x >> k) & 1);
      }
    } else if (s.kind == StmtKind::IntDecl) {
      v.kind = Var::Kind::Int;
      if (s.value) v.value = int_value(eval(s.value).as_int());
    } else {
      v.kind = Var::Kind::Angle;
      v.value = real_value(s.value ? eval(s.value).as_real() : 0.0);
    }
    declare(s.name, std::move(v));
  }

  void nested(const Block& b) {
    scopes_.emplace_back();
    block(b);
    pop_scope();
  }

  void block(const Block& b) {
    for (const auto& s : b) statement(s);
  }

  void statement(const Stmt& s) {
    switch (s.kind) {
      case StmtKind::QubitDecl:
      case StmtKind::MemDecl:
      case StmtKind::QramDecl: break;
      case StmtKind::BitDecl:
      case StmtKind::IntDecl:
      case StmtKind::AngleDecl: declare_var(s); break;
      case StmtKind::GateDef: gates_[s.name] = &s; break;
      case StmtKind::GateCall: gate_call(s, nullptr, {}, 0); break;
      case StmtKind::Measure: measure(s); break;
      case StmtKind::Reset:
        for (int q : qubits(s.operands[0], nullptr)) {
          reset_traced(q);
          tick("reset " + qubit_name(q), config_.timing.gate_time, 1.0);
        }
        break;
      case StmtKind::If:
        if (eval(s.value).truthy()) {
          nested(s.body);
        } else if (s.has_else) {
          nested(s.else_body);
        }
        break;
      case StmtKind::For: {
        const long long a = eval(s.range_start).as_int();
        const long long b = eval(s.range_end).as_int();
        const long long step = s.range_step ? eval(s.range_step).as_int() : 1;
        if (step == 0) throw ArgumentError("range step must be nonzero");
        long iterations = 0;
        for (long long i = a; step > 0 ? i <= b : i >= b; i += step) {
          if (++iterations > config_.max_loop_iterations) throw StateError("loop iteration limit (" + std::to_string(config_.max_loop_iterations) + ") exceeded");
          scopes_.emplace_back();
          scopes_.back()[s.name] = Var{Var::Kind::Int, {}, int_value(i)};
          block(s.body);
          scopes_.back().erase(s.name);
          pop_scope();
        }
        break;
      }
      case StmtKind::While: {
        long iterations = 0;
        while (eval(s.value).truthy()) {
          if (++iterations > config_.max_loop_iterations) throw StateError("loop iteration limit (" + std::to_string(config_.max_loop_iterations) + ") exceeded");
          nested(s.body);
        }
        break;
      }
      case StmtKind::Assign: assign(s); break;
      case StmtKind::Load:
      case StmtKind::Store: memory_access(s); break;
      case StmtKind::MReset: mreset(s); break;
      case StmtKind::QInit: qinit(s); break;
      case StmtKind::QLoad: qload(s); break;
    }
  }

 private:
  const Program& program_;
  const RunConfig& config_;
  Rng rng_;
  ShotResult& out_;

  std::map<std::string, std::vector<int>> qregs_;
  std::map<std::string, const Stmt*> gates_;
  std::map<std::string, QramDevice> qrams_;
  std::optional<RaqmDevice>& memory_ = out_.memory;
  std::vector<double> stored_at_;
  std::vector<std::map<std::string, Var>> scopes_;
  std::vector<std::string> declared_;
  std::map<std::string, std::string> finals_;
  std::set<std::string> measured_;
  double clock_ = 0.0;
};

void collect_bits(const Block& b, std::map<std::string, long long>& out) {
  for (const auto& s : b) {
    if (s.kind == StmtKind::BitDecl) out[s.name] = s.size ? fold_int(s.size).value_or(0) : 1;
    collect_bits(s.body, out);
    collect_bits(s.else_body, out);
  }
}

/// Maps `name[i]`, `name<i>` and 1-bit `name` onto `name[i]`.
std::string resolve_bit(const std::string& key, const std::map<std::string, long long>& bits) {
  auto in_range = [&](const std::string& name, long long i) {
    auto f = bits.find(name);
    return f != bits.end() && i >= 0 && i < f->second;
  };
  const auto open = key.find('[');
  if (open != std::string::npos && key.back() == ']') {
    const std::string name = key.substr(0, open);
    const std::string digits = key.substr(open + 1, key.size() - open - 2);
    if (!digits.empty() && digits.find_first_not_of("0123456789") == std::string::npos &&
        in_range(name, std::stoll(digits))) {
      return name + "[" + digits + "]";
    }
  } else {
    if (in_range(key, 0) && bits.at(key) == 1) return key + "[0]";
    std::size_t cut = key.size();
    while (cut > 0 && std::isdigit(static_cast<unsigned char>(key[cut - 1]))) --cut;
    if (cut > 0 && cut < key.size()) {
      const std::string name = key.substr(0, cut);
      const long long i = std::stoll(key.substr(cut));
      if (in_range(name, i)) return name + "[" + std::to_string(i) + "]";
    }
  }
  throw ConfigurationError("post-select key '" + key + "' is not a declared bit");
}

}  // namespace

std::pair<std::string, int> parse_post_select(std::string_view text) {
  const auto eq = text.find('=');
  if (eq == std::string_view::npos || eq == 0) {
    throw ArgumentError("post-select must look like bit=value, got '" + std::string(text) + "'");
  }
  const std::string_view v = text.substr(eq + 1);
  if (v != "0" && v != "1") throw ArgumentError("post-select value must be 0 or 1, got '" + std::string(v) + "'");
  return {std::string(text.substr(0, eq)), v == "1" ? 1 : 0};
}

std::uint64_t shot_seed(std::uint64_t seed, int shot) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (static_cast<std::uint64_t>(shot) + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

ShotResult execute_shot(const Program& program, const RunConfig& config, std::uint64_t seed) {
  ShotResult out;
  out.seed = seed;
  Machine m(program, config, seed, out);
  try {
    m.run();
  } catch (const Error& e) {
    out.ok = false;
    out.error = e.what();
  }
  return out;
}

RunResult execute(const Program& program, const RunConfig& config) {
  if (config.shots < 1) throw ConfigurationError("shots must be at least 1");
  std::map<std::string, long long> bits;
  collect_bits(program.body, bits);
  RunConfig resolved = config;
  resolved.post_select.clear();
  for (const auto& [key, value] : config.post_select) {
    if (value != 0 && value != 1) throw ConfigurationError("post-select value for '" + key + "' must be 0 or 1");
    resolved.post_select[resolve_bit(key, bits)] = value;
  }

  RunResult result;
  for (const auto& w : program.warnings) result.warnings.push_back(to_string(w));
  for (int k = 0; k < config.shots; ++k) {
    const std::uint64_t seed = config.shots == 1 ? config.seed : shot_seed(config.seed, k);
    ShotResult shot = execute_shot(program, resolved, seed);
    result.shot_log.push_back({k, seed, shot.ok, shot.error, shot.outcome});
    if (shot.ok) ++result.counts[shot.outcome];
    if (k == 0) result.first = std::move(shot);
  }
  return result;
}

StateVector replay_trace(const std::vector<TraceOp>& trace, int num_qubits, int max_qubits) {
  StateVector s(num_qubits, 0, max_qubits);
  for (const auto& op : trace) {
    switch (op.kind) {
      case TraceKind::Gate: apply_gate(s, op.gate); break;
      case TraceKind::QramQuery: {
        QramDevice dev;
        dev.addr_len = static_cast<int>(op.addr.size());
        dev.word_len = static_cast<int>(op.bus.size());
        dev.data = op.data;
        oracle_query(dev, s, op.addr, op.bus);
        break;
      }
      case TraceKind::PostSelect:
      case TraceKind::Measure: postselect_qubit(s, op.qubit, op.outcome); break;
      case TraceKind::Reset:
        postselect_qubit(s, op.qubit, op.outcome);
        if (op.outcome) apply_gate(s, GateSpec::x(op.qubit));
        break;
    }
  }
  return s;
}

void write_report(std::ostream& os, const RunResult& result, const ReportOptions& options) {
  const ShotResult& first = result.first;
  long ok = 0;
  for (const auto& r : result.shot_log) ok += r.ok ? 1 : 0;
  os << "shots\t" << result.shot_log.size() << "\tok\t" << ok << "\n";
  for (const auto& w : result.warnings) os << "warning: " << w << "\n";
  for (const auto& r : result.shot_log) {
    if (!r.ok) os << "error\tshot " << r.shot << "\tseed " << r.seed << "\t" << r.error << "\n";
  }
  if (!first.ok) return;

  os << "[classical]\n";
  for (const auto& [name, value] : first.classical) os << name << "=" << value << "\n";
  if (result.shot_log.size() > 1) {
    os << "[counts]\n";
    for (const auto& [key, n] : result.counts) os << (key.empty() ? "-" : key) << "\t" << n << "\n";
  }
  if ((options.dump_memory || options.dump_state) && first.memory) {
    os << "[memory]\n";
    dump_memory(*first.memory, first.state, os);
  }
  if (options.dump_state) {
    os << "[registers]\n";
    for (const auto& [name, qs] : first.registers) {
      os << name;
      for (int q : qs) os << "\t" << q;
      os << "\n";
    }
    os << "[state]\n";
    dump_state(first.state, os);
  }
  if (options.timeline) {
    os << "[timeline]\n";
    char buf[64];
    for (const auto& e : first.timeline) {
      std::snprintf(buf, sizeof buf, "%.9g", e.t_start);
      os << buf << "\t" << e.op << "\t";
      std::snprintf(buf, sizeof buf, "%.9g", e.duration);
      os << buf << "\n";
    }
  }
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12f", first.fidelity_estimate);
  os << "fidelity_estimate\t" << buf << "\t(heuristic)\n";
  const StateVector oracle = replay_trace(first.trace, first.state.num_qubits(), first.state.num_qubits());
  std::snprintf(buf, sizeof buf, "%.12f", state_fidelity(oracle, first.state));
  os << "fidelity_vs_oracle\t" << buf << "\n";
}

}  // namespace qmem::qmasm
