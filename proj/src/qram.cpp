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

#include "qmem/qram.hpp"

#include <algorithm>
#include <set>

namespace qmem {

namespace {

void check_registers(const QramDevice& device, const StateVector& state, const std::vector<int>& addr,
                     const std::vector<int>& bus) {
  if (static_cast<int>(addr.size()) != device.addr_len) {
    throw ArgumentError("address register has " + std::to_string(addr.size()) + " qubits, QRAM expects " +
                        std::to_string(device.addr_len));
  }
  if (static_cast<int>(bus.size()) != device.word_len) {
    throw ArgumentError("bus register has " + std::to_string(bus.size()) + " qubits, QRAM word length is " +
                        std::to_string(device.word_len));
  }
  std::set<int> seen;
  auto add = [&](int q) {
    state.check_qubit(q);
    if (!seen.insert(q).second) throw ArgumentError("QRAM qubit " + std::to_string(q) + " overlaps another role");
  };
  for (int q : addr) add(q);
  for (int q : bus) add(q);
  for (int q : device.owned_qubits()) add(q);
}

std::vector<std::uint8_t> random_data(std::size_t size, Rng& rng) {
  std::vector<std::uint8_t> x(size);
  for (;;) {
    for (auto& b : x) b = static_cast<std::uint8_t>(rng.next() >> 63);
    if (size < 2 || std::any_of(x.begin(), x.end(), [&](auto b) { return b != x[0]; })) return x;
  }
}

StateVector embed(const StateVector& core, int num_qubits) {
  if (num_qubits == core.num_qubits()) return core;
  return tensor(StateVector(num_qubits - core.num_qubits(), 0), core);
}

double purity_or_one(const StateVector& s, const std::vector<int>& subset) {
  if (static_cast<int>(subset.size()) >= s.num_qubits()) return 1.0;
  return reduced_purity(s, subset);
}

}  // namespace

std::string QramMode::name() const {
  std::string s = direction == Direction::Read ? "read" : "write";
  s += data == DataKind::Classical ? "-classical" : "-quantum";
  s += coupling == Coupling::Cnot ? "-cnot" : "-swap";
  return s;
}

QramMode QramMode::parse(std::string_view name) {
  for (const auto& m : all()) {
    if (m.name() == name) return m;
  }
  throw ArgumentError("unknown QRAM mode '" + std::string(name) + "'");
}

std::array<QramMode, 8> QramMode::all() {
  std::array<QramMode, 8> out;
  std::size_t k = 0;
  for (auto d : {Direction::Read, Direction::Write}) {
    for (auto t : {DataKind::Classical, DataKind::Quantum}) {
      for (auto c : {Coupling::Cnot, Coupling::Swap}) out[k++] = {d, t, c};
    }
  }
  return out;
}

const char* to_string(QramBackend b) { return b == QramBackend::Functional ? "functional" : "circuit"; }

QramBackend parse_backend(std::string_view name) {
  if (name == "functional") return QramBackend::Functional;
  if (name == "circuit") return QramBackend::Circuit;
  throw ArgumentError("unknown backend '" + std::string(name) + "'");
}

int QramDevice::cell_qubit(Index j, int b) const {
  if (!materialized()) throw ConfigurationError("QRAM memory qubits are not materialized");
  return memory_qubits.at(static_cast<std::size_t>(j) * static_cast<std::size_t>(word_len) +
                          static_cast<std::size_t>(b));
}

int QramDevice::router_qubit(int level, Index prefix) const {
  return router_qubits.at(((std::size_t{1} << level) - 1) + static_cast<std::size_t>(prefix));
}

std::vector<int> QramDevice::owned_qubits() const {
  std::vector<int> out = memory_qubits;
  out.insert(out.end(), router_qubits.begin(), router_qubits.end());
  out.insert(out.end(), channel_qubits.begin(), channel_qubits.end());
  return out;
}

int qram_qubit_count(int addr_len, int word_len, QramBackend backend, bool materialize_memory) {
  if (addr_len < 1 || word_len < 1 || addr_len > 30) throw ArgumentError("QRAM needs addr_len >= 1 and word_len >= 1");
  long long total = addr_len + word_len;
  if (materialize_memory) total += (1LL << addr_len) * word_len;
  if (backend == QramBackend::Circuit) total += (1LL << addr_len) - 1 + addr_len;
  return total > 1'000'000 ? 1'000'000 : static_cast<int>(total);
}

QramLayout canonical_layout(int addr_len, int word_len, QramBackend backend, int max_qubits) {
  const int total = qram_qubit_count(addr_len, word_len, backend, true);
  if (total > max_qubits) {
    throw ResourceError("qubit budget exceeded: QRAM with " + std::to_string(addr_len) + " address bits needs " +
                        std::to_string(total) + " qubits, budget is " + std::to_string(max_qubits));
  }
  QramLayout l;
  int next = 0;
  for (int k = 0; k < addr_len; ++k) l.addr.push_back(next++);
  for (int k = 0; k < word_len; ++k) l.bus.push_back(next++);
  l.device.addr_len = addr_len;
  l.device.word_len = word_len;
  l.device.backend = backend;
  for (std::size_t k = 0; k < l.device.data_size(); ++k) l.device.memory_qubits.push_back(next++);
  l.core_qubits = next;
  if (backend == QramBackend::Circuit) {
    for (Index k = 0; k + 1 < l.device.cells(); ++k) l.device.router_qubits.push_back(next++);
    for (int k = 0; k < addr_len; ++k) l.device.channel_qubits.push_back(next++);
  }
  l.num_qubits = next;
  return l;
}

void qinit_load(QramDevice& device, std::vector<std::uint8_t> x, StateVector* state) {
  if (x.size() != device.data_size()) {
    throw ArgumentError("QRAM data has " + std::to_string(x.size()) + " bits, expected " +
                        std::to_string(device.data_size()) + " (2^" + std::to_string(device.addr_len) + " x " +
                        std::to_string(device.word_len) + ")");
  }
  for (auto b : x) {
    if (b > 1) throw ArgumentError("QRAM data must be bits");
  }
  if (state && device.materialized()) {
    const auto& old = device.data;
    for (std::size_t k = 0; k < x.size(); ++k) {
      const int prev = old ? (*old)[k] : 0;
      if (prev != x[k]) apply_gate(*state, GateSpec::x(device.memory_qubits[k]));
    }
  }
  device.data = std::move(x);
}

void oracle_query(const QramDevice& device, StateVector& state, const std::vector<int>& addr,
                  const std::vector<int>& bus) {
  if (!device.data) throw StateError("QRAM query before any data was loaded");
  check_registers(device, state, addr, bus);
  if (device.backend == QramBackend::Circuit && device.has_router_tree()) {
    run_program(state, build_router_program(device, {Direction::Read, DataKind::Classical, Coupling::Cnot}, addr,
                                            bus, state.num_qubits()));
    return;
  }
  const auto& x = *device.data;
  std::vector<Index> flip(device.cells(), 0);
  for (Index j = 0; j < device.cells(); ++j) {
    for (int b = 0; b < device.word_len; ++b) {
      if (x[j * static_cast<Index>(device.word_len) + static_cast<Index>(b)]) flip[j] |= Index{1} << bus[b];
    }
  }
  auto& a = state.amplitudes();
  for (Index i = 0; i < state.dim(); ++i) {
    const Index partner = i ^ flip[detail::gather(i, addr)];
    if (partner > i) std::swap(a[static_cast<Eigen::Index>(i)], a[static_cast<Eigen::Index>(partner)]);
  }
}

void apply_mode(const QramDevice& device, StateVector& state, const QramMode& mode,
                const std::vector<int>& addr, const std::vector<int>& bus) {
  const bool plain_read = mode == QramMode{Direction::Read, DataKind::Classical, Coupling::Cnot};
  if (!device.materialized()) {
    if (plain_read) {
      oracle_query(device, state, addr, bus);
      return;
    }
    throw ConfigurationError("QRAM mode " + mode.name() + " needs materialized memory qubits");
  }
  check_registers(device, state, addr, bus);
  if (device.backend == QramBackend::Circuit && device.has_router_tree()) {
    run_program(state, build_router_program(device, mode, addr, bus, state.num_qubits()));
    return;
  }
  std::vector<int> values(addr.size());
  for (Index j = 0; j < device.cells(); ++j) {
    for (std::size_t k = 0; k < addr.size(); ++k) values[k] = static_cast<int>((j >> k) & 1U);
    for (int b = 0; b < device.word_len; ++b) {
      const int cell = device.cell_qubit(j, b);
      const int wire = bus[static_cast<std::size_t>(b)];
      if (mode.coupling == Coupling::Swap) {
        apply_swap(state, wire, cell, addr, values);
      } else {
        const auto& x = gate_matrix<double>(GateSpec::x(0));
        if (mode.direction == Direction::Read) {
          auto c = addr;
          c.push_back(cell);
          auto v = values;
          v.push_back(1);
          apply_matrix(state, x, wire, c, v);
        } else {
          auto c = addr;
          c.push_back(wire);
          auto v = values;
          v.push_back(1);
          apply_matrix(state, x, cell, c, v);
        }
      }
    }
  }
}

std::vector<GateSpec> build_router_program(const QramDevice& device, const QramMode& mode,
                                           const std::vector<int>& addr, const std::vector<int>& bus,
                                           int max_qubits) {
  const int n = device.addr_len;
  const int needed = qram_qubit_count(n, device.word_len, QramBackend::Circuit, true);
  if (needed > max_qubits) {
    throw ResourceError("qubit budget exceeded: router tree for " + std::to_string(n) + " address bits needs " +
                        std::to_string(needed) + " qubits, budget is " + std::to_string(max_qubits));
  }
  if (static_cast<Index>(device.router_qubits.size()) != device.cells() - 1 ||
      static_cast<int>(device.channel_qubits.size()) != n || !device.materialized()) {
    throw ConfigurationError("circuit backend needs 2^n - 1 routers, n channels and materialized memory");
  }
  if (static_cast<int>(addr.size()) != n || static_cast<int>(bus.size()) != device.word_len) {
    throw ArgumentError("address/bus width does not match the QRAM shape");
  }
  const auto& ch = device.channel_qubits;

  // Routers along the path `prefix` (l bits, MSB = root choice) must hold its bits.
  auto path = [&](GateSpec g, int l, Index prefix) {
    for (int k = 0; k < l; ++k) {
      g.controlled_by(device.router_qubit(k, prefix >> (l - k)), static_cast<int>((prefix >> (l - 1 - k)) & 1U));
    }
    return g;
  };

  std::vector<GateSpec> load;
  for (int l = 0; l < n; ++l) {
    load.push_back(GateSpec::swap(addr[static_cast<std::size_t>(n - 1 - l)], ch[0]));
    for (int d = 0; d < l; ++d) load.push_back(GateSpec::swap(ch[static_cast<std::size_t>(d)], ch[static_cast<std::size_t>(d + 1)]));
    for (Index p = 0; p < (Index{1} << l); ++p) {
      load.push_back(path(GateSpec::swap(ch[static_cast<std::size_t>(l)], device.router_qubit(l, p)), l, p));
    }
  }

  std::vector<GateSpec> prog = load;
  const int leaf_wire = ch[static_cast<std::size_t>(n - 1)];
  for (int b = 0; b < device.word_len; ++b) {
    std::vector<GateSpec> down;
    down.push_back(GateSpec::swap(bus[static_cast<std::size_t>(b)], ch[0]));
    for (int d = 0; d + 1 < n; ++d) down.push_back(GateSpec::swap(ch[static_cast<std::size_t>(d)], ch[static_cast<std::size_t>(d + 1)]));
    prog.insert(prog.end(), down.begin(), down.end());
    for (Index j = 0; j < device.cells(); ++j) {
      const int cell = device.cell_qubit(j, b);
      GateSpec g;
      if (mode.coupling == Coupling::Swap) {
        g = GateSpec::swap(leaf_wire, cell);
      } else if (mode.direction == Direction::Read) {
        g = GateSpec::cnot(cell, leaf_wire);
      } else {
        g = GateSpec::cnot(leaf_wire, cell);
      }
      prog.push_back(path(g, n, j));
    }
    prog.insert(prog.end(), down.rbegin(), down.rend());
  }
  prog.insert(prog.end(), load.rbegin(), load.rend());
  return prog;
}

namespace {

/// A controlled X, CNOT or SWAP as bit masks on basis indices.
struct PermutationStep {
  Index control_mask = 0;
  Index control_bits = 0;
  Index flip = 0;       // X/CNOT target
  Index swap_a = 0;     // SWAP pair
  Index swap_b = 0;
};

std::optional<PermutationStep> as_permutation(const StateVector& state, const GateSpec& g) {
  std::vector<int> controls = g.controls;
  std::vector<int> values = g.control_values;
  values.resize(controls.size(), 1);
  std::vector<int> targets = g.targets;
  PermutationStep p;
  switch (g.kind) {
    case GateKind::X: break;
    case GateKind::CNOT:
      controls.push_back(g.targets.at(0));
      values.push_back(1);
      targets = {g.targets.at(1)};
      break;
    case GateKind::SWAP: break;
    default: return std::nullopt;
  }
  detail::make_stencil(state, targets, controls, values);
  for (std::size_t k = 0; k < controls.size(); ++k) {
    p.control_mask |= Index{1} << controls[k];
    if (values[k]) p.control_bits |= Index{1} << controls[k];
  }
  if (g.kind == GateKind::SWAP) {
    p.swap_a = Index{1} << targets.at(0);
    p.swap_b = Index{1} << targets.at(1);
  } else {
    p.flip = Index{1} << targets.at(0);
  }
  return p;
}

}  // namespace

void run_program(StateVector& state, const std::vector<GateSpec>& gates) {
  // Permutation-only programs move each nonzero amplitude along its own path.
  std::vector<PermutationStep> steps;
  for (const auto& g : gates) {
    const auto p = as_permutation(state, g);
    if (!p) {
      for (const auto& h : gates) apply_gate(state, h);
      return;
    }
    steps.push_back(*p);
  }
  auto& a = state.amplitudes();
  std::vector<std::pair<Index, std::complex<double>>> support;
  for (Index i = 0; i < state.dim(); ++i) {
    const auto v = a[static_cast<Eigen::Index>(i)];
    if (v != std::complex<double>(0)) support.emplace_back(i, v);
  }
  for (const auto& [i, v] : support) a[static_cast<Eigen::Index>(i)] = 0;
  for (const auto& [i0, v] : support) {
    Index i = i0;
    for (const auto& p : steps) {
      if ((i & p.control_mask) != p.control_bits) continue;
      if (p.flip) {
        i ^= p.flip;
      } else if (((i & p.swap_a) != 0) != ((i & p.swap_b) != 0)) {
        i ^= p.swap_a | p.swap_b;
      }
    }
    a[static_cast<Eigen::Index>(i)] = v;
  }
}

EntanglementProfile entanglement_profile(const StateVector& state, const QramDevice& device,
                                         const std::vector<int>& addr, const std::vector<int>& bus) {
  EntanglementProfile p;
  p.memory_materialized = device.materialized();
  p.addr = purity_or_one(state, addr);
  p.bus = purity_or_one(state, bus);
  auto ab = addr;
  ab.insert(ab.end(), bus.begin(), bus.end());
  p.addr_bus = purity_or_one(state, ab);
  if (device.materialized()) {
    p.memory = purity_or_one(state, device.memory_qubits);
    auto am = addr;
    am.insert(am.end(), device.memory_qubits.begin(), device.memory_qubits.end());
    p.addr_memory = purity_or_one(state, am);
  } else {
    p.memory = 1.0;
    p.addr_memory = p.addr;
  }
  return p;
}

std::string classify(const EntanglementProfile& p) {
  auto product = [](double v) { return v >= kProductPurity; };
  auto entangled = [](double v) { return v <= kEntangledPurity; };
  if (product(p.memory) && entangled(p.addr) && entangled(p.bus)) return "addr, b";
  if (product(p.bus) && entangled(p.addr) && entangled(p.memory)) return "addr, QMC";
  if (entangled(p.addr) && entangled(p.bus) && entangled(p.memory)) return "all";
  return "unclassified";
}

std::string expected_pattern(const QramMode& mode) {
  if (mode.direction == Direction::Read) {
    return mode.data == DataKind::Classical && mode.coupling == Coupling::Cnot ? "addr, b" : "all";
  }
  return mode.coupling == Coupling::Swap ? "addr, QMC" : "all";
}

double ancilla_zero_probability(const StateVector& state, const QramDevice& device) {
  Index mask = 0;
  for (int q : device.router_qubits) mask |= Index{1} << q;
  for (int q : device.channel_qubits) mask |= Index{1} << q;
  double p = 0.0;
  for (Index i = 0; i < state.dim(); ++i) {
    if ((i & mask) == 0) p += std::norm(state[i]);
  }
  return p;
}

double ancilla_purity(const StateVector& state, const QramDevice& device) {
  auto anc = device.router_qubits;
  anc.insert(anc.end(), device.channel_qubits.begin(), device.channel_qubits.end());
  if (anc.empty()) return 1.0;
  return purity_or_one(state, anc);
}

Eigen::Vector2cd random_qubit(Rng& rng) {
  const auto s = random_state(1, rng);
  return s.amplitudes();
}

StateVector product_state(const std::vector<Eigen::Vector2cd>& qubits) {
  if (qubits.empty()) throw ArgumentError("product_state needs at least one qubit");
  StateVector s{StateVector::Vector(qubits[0])};
  for (std::size_t k = 1; k < qubits.size(); ++k) s = tensor(StateVector{StateVector::Vector(qubits[k])}, s);
  return s;
}

QramInput generic_mode_input(const QramLayout& layout, const QramMode& mode, Rng& rng) {
  const auto& dev = layout.device;
  const int n = dev.addr_len, w = dev.word_len;
  const auto x = random_data(dev.data_size(), rng);
  const StateVector addr_state = random_state(n, rng);
  StateVector addr_bus;
  if (mode.direction == Direction::Write) {
    StateVector::Vector v = StateVector::Vector::Zero(Eigen::Index{1} << (n + w));
    for (Index j = 0; j < dev.cells(); ++j) {
      if (mode.data == DataKind::Classical) {
        Index word = 0;
        for (int b = 0; b < w; ++b) word |= Index{x[j * static_cast<Index>(w) + static_cast<Index>(b)]} << b;
        v[static_cast<Eigen::Index>(j | (word << n))] = addr_state[j];
      } else {
        const auto payload = random_state(w, rng);
        for (Index word = 0; word < payload.dim(); ++word) {
          v[static_cast<Eigen::Index>(j | (word << n))] = addr_state[j] * payload[word];
        }
      }
    }
    addr_bus = StateVector(std::move(v));
  } else {
    addr_bus = tensor(StateVector(w, 0), addr_state);
  }
  StateVector memory;
  if (mode.direction == Direction::Read && mode.data == DataKind::Classical) {
    Index word = 0;
    for (std::size_t k = 0; k < x.size(); ++k) word |= Index{x[k]} << k;
    memory = StateVector(static_cast<int>(x.size()), word);
  } else if (mode.direction == Direction::Read) {
    std::vector<Eigen::Vector2cd> cells;
    for (std::size_t k = 0; k < dev.data_size(); ++k) cells.push_back(random_qubit(rng));
    memory = product_state(cells);
  } else {
    memory = StateVector(static_cast<int>(dev.data_size()), 0);
  }
  return {embed(tensor(memory, addr_bus), layout.num_qubits), x};
}

QramInput random_product_input(const QramLayout& layout, Rng& rng) {
  const auto& dev = layout.device;
  const auto x = random_data(dev.data_size(), rng);
  StateVector core = random_state(dev.addr_len, rng);
  std::vector<Eigen::Vector2cd> rest;
  for (int b = 0; b < dev.word_len; ++b) rest.push_back(random_qubit(rng));
  for (std::size_t k = 0; k < dev.data_size(); ++k) rest.push_back(random_qubit(rng));
  core = tensor(product_state(rest), core);
  return {embed(core, layout.num_qubits), x};
}

}  // namespace qmem
