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

#include <deque>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "qmem/statevec.hpp"

namespace qmem {

enum class CellStatus { Reset, Occupied };

/// What happens when a store targets an occupied cell.
enum class StorePolicy { Error, Swap };

struct RaqmTiming {
  double t_addr = 0.0;
  double t_rw = 0.0;  // per-cell RW time T_RW,QMC
  double t_storage = 0.0;
};

struct TimedOp {
  std::string op;
  double duration = 0.0;
};

/// Random-access quantum memory: one qubit per cell, classical addressing.
class RaqmDevice {
 public:
  explicit RaqmDevice(std::vector<int> cell_qubits, StorePolicy policy = StorePolicy::Error,
                      std::optional<RaqmTiming> timing = std::nullopt);

  long capacity() const { return static_cast<long>(cells_.size()); }
  int cell_qubit(long addr) const;
  const std::vector<int>& cell_qubits() const { return cells_; }
  CellStatus status(long addr) const;
  void set_status(long addr, CellStatus s);
  StorePolicy policy() const { return policy_; }
  void set_policy(StorePolicy p) { policy_ = p; }

  const std::optional<RaqmTiming>& timing() const { return timing_; }
  /// T_addr + T_RW,QMC, or 0 without timing.
  double access_time() const;
  const std::vector<TimedOp>& timeline() const { return timeline_; }
  void record(std::string op, double duration);

 private:
  void check_addr(long addr) const;

  std::vector<int> cells_;
  std::vector<CellStatus> status_;
  StorePolicy policy_;
  std::optional<RaqmTiming> timing_;
  std::vector<TimedOp> timeline_;
};

/// SWAP between a bus qubit and a memory cell.
void qmc_swap(StateVector& state, int bus, int cell);

void raqm_store(RaqmDevice& device, StateVector& state, long addr, int bus);
void raqm_load(RaqmDevice& device, StateVector& state, long addr, int bus);
/// Measure-and-discard reset of one cell, or of every cell when `addr` is empty.
/// Returns the discarded outcomes in address order.
std::vector<int> raqm_reset(RaqmDevice& device, StateVector& state, std::optional<long> addr, Rng& rng);

enum class BufferEvent { ReadSuccess, ReadUnderflow, WriteStored, WriteOverflow };

struct BufferStatus {
  BufferEvent meaning;
  int sf_bit;

  static BufferStatus of(BufferEvent e);
};

const char* to_string(BufferEvent e);

class BufferDevice {
 public:
  explicit BufferDevice(std::vector<int> cell_qubits);

  std::size_t capacity() const { return cells_.size(); }
  const std::vector<int>& cell_qubits() const { return cells_; }
  /// Occupied cell indices, oldest first.
  const std::deque<std::size_t>& fifo() const { return fifo_; }
  bool full() const { return fifo_.size() == cells_.size(); }
  bool empty() const { return fifo_.empty(); }

 private:
  friend BufferStatus buffer_write(BufferDevice&, StateVector&, int);
  friend BufferStatus buffer_read(BufferDevice&, StateVector&, int);

  std::vector<int> cells_;
  std::deque<std::size_t> fifo_;
};

/// Stores the bus into the lowest-index free cell. Overflow leaves the state untouched.
BufferStatus buffer_write(BufferDevice& device, StateVector& state, int bus);
/// Moves the oldest stored state onto the bus. Underflow leaves the state untouched.
BufferStatus buffer_read(BufferDevice& device, StateVector& state, int bus);

/// Q-cache admission: alpha_ex_qc / beta_qm > r_threshold.
bool cache_admit(double alpha_ex_qc, double beta_qm, double r_threshold = 2.0);

/// Cell report: `addr<TAB>status<TAB>purity<TAB>state-or-"entangled"`.
void dump_memory(const RaqmDevice& device, const StateVector& state, std::ostream& os);

/// Single-qubit state of an unentangled qubit, global phase fixed so the first
/// nonzero amplitude is real and positive. Empty when purity < 1 - 1e-9.
std::optional<Eigen::Vector2cd> qubit_state(const StateVector& state, int q);

/// Purity of one qubit; 1 for a single-qubit register.
double qubit_purity(const StateVector& state, int q);

}  // namespace qmem
