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

#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace qmem::qmasm {

struct SourceLoc {
  int line = 0;
  int col = 0;
};

std::string to_string(const SourceLoc& loc);

enum class Severity { Error, Warning, Note };

struct Diagnostic {
  Severity severity = Severity::Error;
  SourceLoc loc;
  std::string message;
};

std::string to_string(const Diagnostic& d);

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
  enum class Kind { Int, Real, Pi, Ident, Index, Unary, Binary };
  Kind kind = Kind::Int;
  SourceLoc loc;
  long long ival = 0;
  double rval = 0.0;
  std::string name;  // Ident/Index name, or the operator for Unary/Binary
  std::vector<ExprPtr> args;
};

/// `q`, `q[i]`, `q[a:b]` (inclusive) or `q[a:]`.
struct Operand {
  enum class Select { All, Index, Slice };
  std::string name;
  Select select = Select::All;
  ExprPtr index;  // Index, or slice start
  ExprPtr end;    // slice end; empty means "to the last element"
  SourceLoc loc;
};

struct Modifier {
  bool negated = false;
  ExprPtr count;  // ctrl(k) @; empty means 1
};

struct Stmt;
using Block = std::vector<Stmt>;

enum class StmtKind {
  QubitDecl,
  BitDecl,
  IntDecl,
  AngleDecl,
  GateDef,
  GateCall,
  Measure,
  Reset,
  If,
  For,
  While,
  Assign,
  MemDecl,
  Load,
  Store,
  MReset,
  QramDecl,
  QInit,
  QLoad,
};

struct Stmt {
  StmtKind kind = StmtKind::GateCall;
  SourceLoc loc;

  std::string name;              // declared/called/assigned name, QRAM name, loop variable
  ExprPtr size;                  // register size, mem size, qram addr_len
  ExprPtr size2;                 // qram word_len
  ExprPtr value;                 // initializer, condition, address, assigned value
  std::vector<ExprPtr> literal;  // bit-array literal elements
  bool has_literal = false;

  std::vector<std::string> params;  // gate definition parameters
  std::vector<std::string> qargs;   // gate definition qubit arguments
  std::vector<ExprPtr> args;        // gate call parameters
  std::vector<Modifier> modifiers;  // gate call modifiers
  std::vector<Operand> operands;    // gate call/reset/ld/st/qld operands; measure source+target
  std::string op;                   // assignment operator
  std::optional<Operand> target;    // assignment target with optional index

  ExprPtr range_start, range_step, range_end;  // for loops
  Block body, else_body;
  bool alias = false;  // ldqram spelling
  bool has_else = false;
};

struct Program {
  std::string version;
  Block body;
  std::vector<Diagnostic> warnings;
};

/// Value of an integer constant expression, if it is one.
std::optional<long long> fold_int(const ExprPtr& e);

}  // namespace qmem::qmasm
