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

#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "qmem/memdev.hpp"
#include "qmem/qmasm/ast.hpp"
#include "qmem/qram.hpp"
#include "qmem/statevec.hpp"

namespace qmem::qmasm {

/// Per-instruction durations (s) and fidelities for the timeline report.
struct TimingProfile {
  double gate_time = 40e-9;
  double gate_fidelity = 0.999;
  RaqmTiming raqm{0.0, 1e-6, 1e-3};
  double raqm_fidelity = 0.99;
  double qram_stage_time = 100e-9;
  double qram_fidelity = 0.99;
};

struct RunConfig {
  std::uint64_t seed = 0;
  int shots = 1;
  /// Bit -> forced outcome. Keys are `name[i]`, `name<i>` or a 1-bit register name.
  std::map<std::string, int> post_select;
  QramBackend backend = QramBackend::Functional;
  StorePolicy store_policy = StorePolicy::Swap;
  int max_qubits = kDefaultMaxQubits;
  TimingProfile timing;
  long max_loop_iterations = 1'000'000;
};

/// Parses `bit=value`, e.g. `caux0=1` or `caux[0]=1`.
std::pair<std::string, int> parse_post_select(std::string_view text);

enum class TraceKind { Gate, QramQuery, PostSelect, Measure, Reset };

/// One step of the flattened gate list a shot actually executed.
struct TraceOp {
  TraceKind kind = TraceKind::Gate;
  GateSpec gate;
  std::vector<int> addr;
  std::vector<int> bus;
  std::vector<std::uint8_t> data;  // QRAM contents at query time
  int qubit = -1;
  int outcome = 0;
};

struct TimelineEntry {
  double t_start = 0.0;
  std::string op;
  double duration = 0.0;
};

struct ShotResult {
  std::uint64_t seed = 0;
  bool ok = true;
  std::string error;
  /// Final bit/int values: bits as MSB-first strings, ints in decimal.
  std::vector<std::pair<std::string, std::string>> classical;
  /// Measured bit registers, `name=bits` joined by spaces.
  std::string outcome;
  StateVector state;
  std::vector<std::pair<std::string, std::vector<int>>> registers;
  std::optional<RaqmDevice> memory;
  std::vector<TimelineEntry> timeline;
  double fidelity_estimate = 1.0;
  std::vector<TraceOp> trace;
};

struct ShotRecord {
  int shot = 0;
  std::uint64_t seed = 0;
  bool ok = true;
  std::string error;
  std::string outcome;
};

struct RunResult {
  ShotResult first;
  std::vector<ShotRecord> shot_log;
  std::map<std::string, long> counts;
  std::vector<std::string> warnings;
};

/// Seed of shot `k` derived from the run seed.
std::uint64_t shot_seed(std::uint64_t seed, int shot);

/// Runs one shot. Runtime failures are returned in `ok`/`error`, never thrown.
ShotResult execute_shot(const Program& program, const RunConfig& config, std::uint64_t seed);

/// Runs `config.shots` shots. Throws ConfigurationError for bad post-select keys.
RunResult execute(const Program& program, const RunConfig& config);

/// Dense replay of a recorded trace from |0...0>.
StateVector replay_trace(const std::vector<TraceOp>& trace, int num_qubits,
                         int max_qubits = kDefaultMaxQubits);

struct ReportOptions {
  bool dump_state = false;
  bool dump_memory = false;
  bool timeline = false;
};

void write_report(std::ostream& os, const RunResult& result, const ReportOptions& options);

}  // namespace qmem::qmasm
