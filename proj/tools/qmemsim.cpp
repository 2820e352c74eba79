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

// qmemsim: run qmasm programs, compute memory metrics, cross-check QRAM backends.

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "qmem/errors.hpp"
#include "qmem/metrics.hpp"
#include "qmem/qmasm/interpreter.hpp"
#include "qmem/qmasm/parser.hpp"
#include "qmem/qmasm/validate.hpp"
#include "qmem/qram.hpp"

namespace {

using namespace qmem;

struct RunArgs {
  std::string path;
  std::uint64_t seed = 0;
  int shots = 1;
  std::vector<std::string> post_select;
  std::string backend = "functional";
  bool dump_state = false;
  bool dump_memory = false;
  bool timeline = false;
};

int cmd_run(const RunArgs& a) {
  std::ifstream in(a.path);
  if (!in) {
    std::cerr << "error: cannot read '" << a.path << "'\n";
    return 2;
  }
  std::stringstream buf;
  buf << in.rdbuf();

  qmasm::Program program;
  try {
    program = qmasm::parse_program(buf.str());
  } catch (const ParseError& e) {
    const std::string what = e.what();
    const auto cut = what.find(": ");
    if (cut == std::string::npos) {
      std::cerr << a.path << ": error: " << what << "\n";
    } else {
      std::cerr << a.path << ":" << what.substr(0, cut) << ": error: " << what.substr(cut + 2) << "\n";
    }
    return 1;
  }
  const auto diags = qmasm::validate(program);
  for (const auto& d : program.warnings) std::cerr << a.path << ":" << qmasm::to_string(d) << "\n";
  for (const auto& d : diags) std::cerr << a.path << ":" << qmasm::to_string(d) << "\n";
  if (qmasm::has_errors(diags)) return 1;

  qmasm::RunConfig config;
  config.seed = a.seed;
  config.shots = a.shots;
  try {
    config.backend = parse_backend(a.backend);
    for (const auto& p : a.post_select) {
      const auto [key, value] = qmasm::parse_post_select(p);
      config.post_select[key] = value;
    }
    auto result = qmasm::execute(program, config);
    result.warnings.clear();  // already reported above
    qmasm::write_report(std::cout, result, {a.dump_state, a.dump_memory, a.timeline});
    const bool failed = std::any_of(result.shot_log.begin(), result.shot_log.end(), [](const auto& r) { return !r.ok; });
    if (failed) {
      std::cerr << "error: " << result.shot_log.size() << " shot(s) run, at least one aborted\n";
      return 2;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}

struct MetricsArgs {
  std::string path;
  bool check_paper = false;
  std::string fig2;
};

int cmd_metrics(const MetricsArgs& a) {
  Dataset ds;
  try {
    ds = load_platform_dataset(a.path);
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  for (const auto& w : ds.warnings) std::cerr << "warning: " << w << "\n";

  int status = 0;
  if (a.check_paper) {
    const auto checks = check_paper(ds.records);
    long fails = 0;
    for (const auto& c : checks) {
      char value[32];
      std::snprintf(value, sizeof value, "%.6g", c.computed);
      std::cout << (c.pass ? "PASS" : "FAIL") << "\t" << c.row << "\t" << c.field << "\tprinted " << c.printed
                << "\tcomputed " << value << "\n";
      fails += c.pass ? 0 : 1;
    }
    std::cout << "summary\t" << checks.size() - static_cast<std::size_t>(fails) << "/" << checks.size()
              << " printed values reproduced\n";
    if (fails) status = 1;
  } else {
    write_metrics_csv(ds.records, std::cout);
  }

  if (!a.fig2.empty()) {
    std::ofstream out(a.fig2);
    if (!out) {
      std::cerr << "error: cannot write '" << a.fig2 << "'\n";
      return 2;
    }
    const auto points = emit_fig2_points(ds.records);
    write_fig2_csv(points, out);
    long clamped = 0;
    for (const auto& p : points) {
      if (p.clamped) {
        ++clamped;
        std::cerr << "fig2: " << p.name << " clamped to " << kFig2Clamp << "\n";
      }
    }
    std::cerr << "fig2: " << points.size() << " points, " << clamped << " clamped -> " << a.fig2 << "\n";
  }
  return status;
}

struct QramArgs {
  int addr_bits = 2;
  std::string modes = "all";
  int seeds = 50;
  std::uint64_t seed = 0;
};

struct SeedOutcome {
  double fidelity = 0.0;
  double ancilla_purity = 0.0;
  double ancilla_zero = 0.0;
};

/// Random core state through both backends; the circuit one carries |0> ancillas above the core.
SeedOutcome check_seed(int n, const QramMode& mode, std::uint64_t seed) {
  const auto fl = canonical_layout(n, 1, QramBackend::Functional);
  const auto cl = canonical_layout(n, 1, QramBackend::Circuit);
  Rng rng(seed);
  const auto core = random_state(fl.num_qubits, rng);
  std::vector<std::uint8_t> data(fl.device.data_size());
  for (auto& x : data) x = static_cast<std::uint8_t>(rng.below(2));

  auto f_state = core;
  auto fdev = fl.device;
  fdev.data = data;
  apply_mode(fdev, f_state, mode, fl.addr, fl.bus);

  auto c_state = tensor(StateVector(cl.num_qubits - cl.core_qubits, 0), core);
  auto cdev = cl.device;
  cdev.data = data;
  apply_mode(cdev, c_state, mode, cl.addr, cl.bus);

  SeedOutcome out;
  out.fidelity = std::norm(f_state.amplitudes().dot(c_state.amplitudes().head(f_state.amplitudes().size())));
  out.ancilla_purity = ancilla_purity(c_state, cdev);
  out.ancilla_zero = ancilla_zero_probability(c_state, cdev);
  return out;
}

int cmd_qram_check(const QramArgs& a) {
  std::vector<QramMode> modes;
  try {
    if (a.modes == "all") {
      const auto all = QramMode::all();
      modes.assign(all.begin(), all.end());
    } else {
      std::stringstream ss(a.modes);
      std::string item;
      while (std::getline(ss, item, ',')) modes.push_back(QramMode::parse(item));
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  if (a.addr_bits < 1) {
    std::cerr << "error: --addr-bits must be at least 1\n";
    return 2;
  }
  try {
    canonical_layout(a.addr_bits, 1, QramBackend::Circuit);
  } catch (const ResourceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }

  constexpr double kTol = 1e-9;
  bool all_pass = true;
  std::cout << "qram-check\taddr_bits " << a.addr_bits << "\tseeds " << a.seeds << "\n";
  for (const auto& mode : modes) {
    double min_fid = 1.0, min_pur = 1.0, min_zero = 1.0;
    for (int k = 0; k < a.seeds; ++k) {
      const auto r = check_seed(a.addr_bits, mode, qmasm::shot_seed(a.seed, k));
      min_fid = std::min(min_fid, r.fidelity);
      min_pur = std::min(min_pur, r.ancilla_purity);
      min_zero = std::min(min_zero, r.ancilla_zero);
    }
    const bool eq = min_fid >= 1 - kTol;
    const bool anc = min_pur >= 1 - kTol && min_zero >= 1 - kTol;
    char line[160];
    std::snprintf(line, sizeof line, "%s\t%s\tequivalence\tmin fidelity %.12f\n", eq ? "PASS" : "FAIL",
                  mode.name().c_str(), min_fid);
    std::cout << line;
    std::snprintf(line, sizeof line, "%s\t%s\tancilla-restoration\tmin purity %.12f\tmin P(0) %.12f\n",
                  anc ? "PASS" : "FAIL", mode.name().c_str(), min_pur, min_zero);
    std::cout << line;

    const auto layout = canonical_layout(a.addr_bits, 1, QramBackend::Functional);
    Rng rng(qmasm::shot_seed(a.seed, -1));
    auto in = generic_mode_input(layout, mode, rng);
    auto dev = layout.device;
    dev.data = in.data;
    apply_mode(dev, in.state, mode, layout.addr, layout.bus);
    const auto got = classify(entanglement_profile(in.state, dev, layout.addr, layout.bus));
    const auto want = expected_pattern(mode);
    const bool cls = got == want;
    std::cout << (cls ? "PASS" : "FAIL") << "\t" << mode.name() << "\tpattern\t" << got << "\texpected " << want
              << "\n";
    all_pass = all_pass && eq && anc && cls;
  }
  std::cout << (all_pass ? "PASS" : "FAIL") << "\tall\n";
  return all_pass ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qmemsim: quantum memory simulator and qmasm toolchain"};
  app.require_subcommand(1);

  RunArgs run;
  auto* r = app.add_subcommand("run", "Parse, validate and execute a qmasm program");
  r->add_option("program", run.path, "Program file")->required();
  r->add_option("--seed", run.seed, "Random seed");
  r->add_option("--shots", run.shots, "Number of shots")->check(CLI::PositiveNumber);
  r->add_option("--post-select", run.post_select, "Force a measured bit, e.g. caux0=1");
  r->add_option("--backend", run.backend, "QRAM backend")->check(CLI::IsMember({"functional", "circuit"}));
  r->add_flag("--dump-state", run.dump_state, "Print the final state vector and memory");
  r->add_flag("--dump-memory", run.dump_memory, "Print the memory cells");
  r->add_flag("--timeline", run.timeline, "Print the instruction timeline");

  MetricsArgs metrics;
  auto* m = app.add_subcommand("metrics", "Compute storage/latency/addressability metrics from a dataset");
  m->add_option("dataset", metrics.path, "Platform dataset CSV")->required();
  m->add_flag("--check-paper", metrics.check_paper, "Compare against the printed values in the notes column");
  m->add_option("--fig2", metrics.fig2, "Write the alpha_in/alpha_ex scatter data to this path");

  QramArgs qram;
  auto* q = app.add_subcommand("qram-check", "Cross-check QRAM backends and entanglement patterns");
  q->add_option("--addr-bits", qram.addr_bits, "Address length");
  q->add_option("--modes", qram.modes, "Comma-separated mode names, or all");
  q->add_option("--seeds", qram.seeds, "Random inputs per mode")->check(CLI::PositiveNumber);
  q->add_option("--seed", qram.seed, "Base seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }
  if (*r) return cmd_run(run);
  if (*m) return cmd_metrics(metrics);
  return cmd_qram_check(qram);
}
