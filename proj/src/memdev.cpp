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

#include "qmem/memdev.hpp"

#include <cstdio>

namespace qmem {

namespace {

std::string format_amplitude(std::complex<double> v) {
  char buf[64];
  const double re = std::abs(v.real()) < 1e-15 ? 0.0 : v.real();
  const double im = std::abs(v.imag()) < 1e-15 ? 0.0 : v.imag();
  std::snprintf(buf, sizeof buf, "%.6g%+.6gi", re, im);
  return buf;
}

}  // namespace

RaqmDevice::RaqmDevice(std::vector<int> cell_qubits, StorePolicy policy,
                       std::optional<RaqmTiming> timing)
    : cells_(std::move(cell_qubits)),
      status_(cells_.size(), CellStatus::Reset),
      policy_(policy),
      timing_(timing) {
  if (cells_.empty()) throw ArgumentError("RAQM needs at least one cell");
}

void RaqmDevice::check_addr(long addr) const {
  if (addr < 0 || addr >= capacity()) {
    throw AddressError("address " + std::to_string(addr) + " out of range [0, " +
                       std::to_string(capacity()) + ")");
  }
}

int RaqmDevice::cell_qubit(long addr) const {
  check_addr(addr);
  return cells_[static_cast<std::size_t>(addr)];
}

CellStatus RaqmDevice::status(long addr) const {
  check_addr(addr);
  return status_[static_cast<std::size_t>(addr)];
}

void RaqmDevice::set_status(long addr, CellStatus s) {
  check_addr(addr);
  status_[static_cast<std::size_t>(addr)] = s;
}

double RaqmDevice::access_time() const { return timing_ ? timing_->t_addr + timing_->t_rw : 0.0; }

void RaqmDevice::record(std::string op, double duration) {
  if (timing_) timeline_.push_back({std::move(op), duration});
}

void qmc_swap(StateVector& state, int bus, int cell) {
  if (bus == cell) throw ArgumentError("bus and cell are the same qubit (" + std::to_string(bus) + ")");
  apply_swap(state, bus, cell);
}

void raqm_store(RaqmDevice& device, StateVector& state, long addr, int bus) {
  const int cell = device.cell_qubit(addr);
  if (device.status(addr) == CellStatus::Occupied && device.policy() == StorePolicy::Error) {
    throw PolicyError("store to occupied cell at address " + std::to_string(addr));
  }
  qmc_swap(state, bus, cell);
  device.set_status(addr, CellStatus::Occupied);
  device.record("st [" + std::to_string(addr) + "]", device.access_time());
}

void raqm_load(RaqmDevice& device, StateVector& state, long addr, int bus) {
  const int cell = device.cell_qubit(addr);
  qmc_swap(state, bus, cell);
  device.set_status(addr, CellStatus::Reset);
  device.record("ld [" + std::to_string(addr) + "]", device.access_time());
}

std::vector<int> raqm_reset(RaqmDevice& device, StateVector& state, std::optional<long> addr, Rng& rng) {
  long first = 0, last = device.capacity();
  if (addr) {
    device.cell_qubit(*addr);
    first = *addr;
    last = *addr + 1;
  }
  std::vector<int> outcomes;
  for (long a = first; a < last; ++a) {
    const int q = device.cell_qubit(a);
    const int o = measure_qubit(state, q, rng);
    if (o) apply_gate(state, GateSpec::x(q));
    outcomes.push_back(o);
    device.set_status(a, CellStatus::Reset);
  }
  device.record(addr ? "mreset [" + std::to_string(*addr) + "]" : std::string("mreset"),
                device.access_time());
  return outcomes;
}

BufferStatus BufferStatus::of(BufferEvent e) {
  switch (e) {
    case BufferEvent::ReadSuccess: return {e, 1};
    case BufferEvent::ReadUnderflow: return {e, 0};
    case BufferEvent::WriteStored: return {e, 0};
    case BufferEvent::WriteOverflow: return {e, 1};
  }
  return {e, 0};
}

const char* to_string(BufferEvent e) {
  switch (e) {
    case BufferEvent::ReadSuccess: return "read-success";
    case BufferEvent::ReadUnderflow: return "read-underflow";
    case BufferEvent::WriteStored: return "write-stored";
    case BufferEvent::WriteOverflow: return "write-overflow";
  }
  return "?";
}

BufferDevice::BufferDevice(std::vector<int> cell_qubits) : cells_(std::move(cell_qubits)) {
  if (cells_.empty()) throw ArgumentError("buffer needs at least one cell");
}

BufferStatus buffer_write(BufferDevice& device, StateVector& state, int bus) {
  if (device.full()) return BufferStatus::of(BufferEvent::WriteOverflow);
  std::size_t slot = 0;
  while (std::find(device.fifo_.begin(), device.fifo_.end(), slot) != device.fifo_.end()) ++slot;
  qmc_swap(state, bus, device.cells_[slot]);
  device.fifo_.push_back(slot);
  return BufferStatus::of(BufferEvent::WriteStored);
}

BufferStatus buffer_read(BufferDevice& device, StateVector& state, int bus) {
  if (device.empty()) return BufferStatus::of(BufferEvent::ReadUnderflow);
  const std::size_t slot = device.fifo_.front();
  qmc_swap(state, bus, device.cells_[slot]);
  device.fifo_.pop_front();
  return BufferStatus::of(BufferEvent::ReadSuccess);
}

bool cache_admit(double alpha_ex_qc, double beta_qm, double r_threshold) {
  if (!(beta_qm > 0.0)) throw ArgumentError("beta_qm must be positive");
  return alpha_ex_qc / beta_qm > r_threshold;
}

double qubit_purity(const StateVector& state, int q) {
  state.check_qubit(q);
  if (state.num_qubits() == 1) return 1.0;
  return reduced_purity(state, {q});
}

std::optional<Eigen::Vector2cd> qubit_state(const StateVector& state, int q) {
  state.check_qubit(q);
  Eigen::Vector2cd v;
  if (state.num_qubits() == 1) {
    v = state.amplitudes();
  } else {
    const Eigen::Matrix2cd rho = reduced_density_matrix(state, {q});
    if (rho.squaredNorm() < 1.0 - 1e-9) return std::nullopt;
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es(rho);
    v = es.eigenvectors().col(1);
  }
  const int lead = std::abs(v[0]) > 1e-12 ? 0 : 1;
  v *= std::polar(1.0, -std::arg(v[lead]));
  return v;
}

void dump_memory(const RaqmDevice& device, const StateVector& state, std::ostream& os) {
  char buf[32];
  for (long a = 0; a < device.capacity(); ++a) {
    const int q = device.cell_qubit(a);
    const double purity = qubit_purity(state, q);
    std::snprintf(buf, sizeof buf, "%.9f", purity);
    os << a << '\t' << (device.status(a) == CellStatus::Reset ? "reset" : "occupied") << '\t' << buf
       << '\t';
    if (auto v = qubit_state(state, q)) {
      os << '[' << format_amplitude((*v)[0]) << ", " << format_amplitude((*v)[1]) << ']';
    } else {
      os << "entangled";
    }
    os << '\n';
  }
}

}  // namespace qmem
