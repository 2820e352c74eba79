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

#include <array>
#include <string_view>

#include "qmem/statevec.hpp"

namespace qmem::qmasm {

/// A built-in gate: `controls` leading operands control `kind` on the rest.
struct BuiltinGate {
  std::string_view name;
  int params;
  int qubits;
  GateKind kind;
  int controls;
};

inline constexpr std::array<BuiltinGate, 15> kBuiltinGates{{
    {"U", 3, 1, GateKind::U, 0},
    {"h", 0, 1, GateKind::H, 0},
    {"x", 0, 1, GateKind::X, 0},
    {"y", 0, 1, GateKind::Y, 0},
    {"z", 0, 1, GateKind::Z, 0},
    {"s", 0, 1, GateKind::S, 0},
    {"sdg", 0, 1, GateKind::Sdg, 0},
    {"t", 0, 1, GateKind::T, 0},
    {"tdg", 0, 1, GateKind::Tdg, 0},
    {"p", 1, 1, GateKind::Phase, 0},
    {"cx", 0, 2, GateKind::X, 1},
    {"cz", 0, 2, GateKind::Z, 1},
    {"cp", 1, 2, GateKind::Phase, 1},
    {"ccx", 0, 3, GateKind::X, 2},
    {"swap", 0, 2, GateKind::SWAP, 0},
}};

inline const BuiltinGate* find_builtin_gate(std::string_view name) {
  for (const auto& g : kBuiltinGates) {
    if (g.name == name) return &g;
  }
  return nullptr;
}

inline bool is_builtin_gate(std::string_view name) { return find_builtin_gate(name) != nullptr; }

}  // namespace qmem::qmasm
