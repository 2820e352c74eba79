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
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qmem/statevec.hpp"

namespace qmem {

enum class Direction { Read, Write };
enum class DataKind { Classical, Quantum };
enum class Coupling { Cnot, Swap };

struct QramMode {
  Direction direction = Direction::Read;
  DataKind data = DataKind::Classical;
  Coupling coupling = Coupling::Cnot;

  /// e.g. "read-classical-cnot".
  std::string name() const;
  static QramMode parse(std::string_view name);
  static std::array<QramMode, 8> all();

  friend bool operator==(const QramMode&, const QramMode&) = default;
};

enum class QramBackend { Functional, Circuit };

const char* to_string(QramBackend b);
QramBackend parse_backend(std::string_view name);

/// Bucket-brigade QRAM bound to qubits of a shared StateVector.
///
/// Cell (j, b) of address j and word bit b lives on memory_qubits[j * word_len + b].
/// Router r(l, p) at level l with path prefix p lives on router_qubits[2^l - 1 + p].
struct QramDevice {
  int addr_len = 1;
  int word_len = 1;
  std::optional<std::vector<std::uint8_t>> data;
  std::vector<int> memory_qubits;
  std::vector<int> router_qubits;
  std::vector<int> channel_qubits;
  QramBackend backend = QramBackend::Functional;

  Index cells() const { return Index{1} << addr_len; }
  std::size_t data_size() const { return static_cast<std::size_t>(cells()) * static_cast<std::size_t>(word_len); }
  bool materialized() const { return !memory_qubits.empty(); }
  bool has_router_tree() const { return !router_qubits.empty(); }
  int cell_qubit(Index j, int b) const;
  int router_qubit(int level, Index prefix) const;
  /// Every qubit owned by the device.
  std::vector<int> owned_qubits() const;
};

/// Qubits a standalone instance needs: addr + bus + memory (+ routers + channels).
int qram_qubit_count(int addr_len, int word_len, QramBackend backend, bool materialize_memory = true);

/// Canonical standalone layout: addr, bus, memory, routers, channels, in that order.
struct QramLayout {
  std::vector<int> addr;
  std::vector<int> bus;
  QramDevice device;
  int num_qubits = 0;
  /// addr + bus + memory; the ancillas sit above these.
  int core_qubits = 0;
};

QramLayout canonical_layout(int addr_len, int word_len, QramBackend backend,
                            int max_qubits = kDefaultMaxQubits);

/// Loads classical data. Materialized memory cells are flipped to hold |x>.
void qinit_load(QramDevice& device, std::vector<std::uint8_t> x, StateVector* state = nullptr);

/// O_x: sum_j c_j |j>|0> -> sum_j c_j |j>|x_j>.
void oracle_query(const QramDevice& device, StateVector& state, const std::vector<int>& addr,
                  const std::vector<int>& bus);

/// Per address branch j, couples the bus with cell j according to `mode`.
void apply_mode(const QramDevice& device, StateVector& state, const QramMode& mode,
                const std::vector<int>& addr, const std::vector<int>& bus);

/// Router-tree gate sequence: load address, route bus, couple at leaves, unroute, unload.
std::vector<GateSpec> build_router_program(const QramDevice& device, const QramMode& mode,
                                           const std::vector<int>& addr, const std::vector<int>& bus,
                                           int max_qubits = kDefaultMaxQubits);

void run_program(StateVector& state, const std::vector<GateSpec>& gates);

struct EntanglementProfile {
  double addr = 1.0;
  double bus = 1.0;
  double memory = 1.0;
  double addr_bus = 1.0;
  double addr_memory = 1.0;
  bool memory_materialized = false;
};

EntanglementProfile entanglement_profile(const StateVector& state, const QramDevice& device,
                                         const std::vector<int>& addr, const std::vector<int>& bus);

inline constexpr double kProductPurity = 1.0 - 1e-6;
inline constexpr double kEntangledPurity = 1.0 - 1e-3;

/// "addr, b", "all", "addr, QMC", or "unclassified".
std::string classify(const EntanglementProfile& p);
std::string expected_pattern(const QramMode& mode);

/// Probability that routers and channels are all |0>.
double ancilla_zero_probability(const StateVector& state, const QramDevice& device);
/// Purity of routers + channels together (1 when no tree is present).
double ancilla_purity(const StateVector& state, const QramDevice& device);

struct QramInput {
  StateVector state;
  std::vector<std::uint8_t> data;
};

/// Non-degenerate input for mode classification: random address superposition,
/// non-constant data, and mode-dependent bus/memory preparation.
QramInput generic_mode_input(const QramLayout& layout, const QramMode& mode, Rng& rng);

/// Random address state, random bus qubits, random product memory, non-constant data.
QramInput random_product_input(const QramLayout& layout, Rng& rng);

/// Product of single-qubit states; entry k is qubit k.
StateVector product_state(const std::vector<Eigen::Vector2cd>& qubits);

Eigen::Vector2cd random_qubit(Rng& rng);

}  // namespace qmem
