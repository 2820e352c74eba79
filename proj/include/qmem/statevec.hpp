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

#include <Eigen/Dense>

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <numbers>
#include <ostream>
#include <random>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "qmem/errors.hpp"

namespace qmem {

using Index = std::uint64_t;

inline constexpr int kDefaultMaxQubits = 24;

/// Seedable random source with a platform-independent double mapping.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Standard normal (Box-Muller).
  double normal() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
    std::uint64_t v;
    do {
      v = engine_();
    } while (v >= limit);
    return v % n;
  }

 private:
  std::mt19937_64 engine_;
};

/// Dense pure state. Qubit 0 is the least significant bit of the basis index.
template <typename Scalar>
class BasicStateVector {
 public:
  using RealScalar = Scalar;
  using ComplexScalar = std::complex<Scalar>;
  using Vector = Eigen::Matrix<ComplexScalar, Eigen::Dynamic, 1>;

  BasicStateVector() : BasicStateVector(0, 0) {}

  BasicStateVector(int num_qubits, Index basis_index, int max_qubits = kDefaultMaxQubits) {
    if (num_qubits < 0) throw ArgumentError("negative qubit count");
    if (num_qubits > max_qubits || num_qubits > 62) {
      throw ResourceError("qubit budget exceeded: " + std::to_string(num_qubits) +
                          " qubits requested, budget is " + std::to_string(max_qubits));
    }
    const Index d = Index{1} << num_qubits;
    if (basis_index >= d) {
      throw ArgumentError("basis index " + std::to_string(basis_index) + " out of range for " +
                          std::to_string(num_qubits) + " qubits");
    }
    num_qubits_ = num_qubits;
    amps_ = Vector::Zero(static_cast<Eigen::Index>(d));
    amps_[static_cast<Eigen::Index>(basis_index)] = ComplexScalar(1);
    labels_.resize(static_cast<std::size_t>(num_qubits));
  }

  explicit BasicStateVector(Vector amplitudes) : amps_(std::move(amplitudes)) {
    const auto d = static_cast<Index>(amps_.size());
    if (d == 0 || (d & (d - 1)) != 0) throw ArgumentError("amplitude count must be a power of two");
    num_qubits_ = std::countr_zero(d);
    labels_.resize(static_cast<std::size_t>(num_qubits_));
  }

  int num_qubits() const { return num_qubits_; }
  Index dim() const { return static_cast<Index>(amps_.size()); }

  Vector& amplitudes() { return amps_; }
  const Vector& amplitudes() const { return amps_; }

  ComplexScalar& operator[](Index i) { return amps_[static_cast<Eigen::Index>(i)]; }
  const ComplexScalar& operator[](Index i) const { return amps_[static_cast<Eigen::Index>(i)]; }

  const std::vector<std::string>& labels() const { return labels_; }

  void set_label(int qubit, std::string name) {
    check_qubit(qubit);
    labels_[static_cast<std::size_t>(qubit)] = std::move(name);
  }

  /// Index of the qubit carrying `label`.
  int qubit(std::string_view label) const {
    auto it = std::find(labels_.begin(), labels_.end(), label);
    if (it == labels_.end()) throw ArgumentError("no qubit labelled '" + std::string(label) + "'");
    return static_cast<int>(it - labels_.begin());
  }

  Scalar norm_squared() const { return amps_.squaredNorm(); }

  void normalize() {
    const Scalar n = amps_.norm();
    if (n == Scalar(0)) throw StateError("cannot normalize the zero vector");
    amps_ /= n;
  }

  void check_qubit(int q) const {
    if (q < 0 || q >= num_qubits_) {
      throw ArgumentError("qubit index " + std::to_string(q) + " out of range [0, " +
                          std::to_string(num_qubits_) + ")");
    }
  }

 private:
  int num_qubits_ = 0;
  Vector amps_;
  std::vector<std::string> labels_;
};

using StateVector = BasicStateVector<double>;

template <typename Scalar = double>
BasicStateVector<Scalar> init_state(int num_qubits, Index basis_index = 0,
                                    int max_qubits = kDefaultMaxQubits) {
  return BasicStateVector<Scalar>(num_qubits, basis_index, max_qubits);
}

enum class GateKind { U, H, X, Y, Z, S, Sdg, T, Tdg, Phase, Rk, CNOT, CZ, SWAP };

/// A gate with optional controls. CNOT and CZ list (control, target) in `targets`.
/// Each control fires on the matching entry of `control_values` (default 1).
struct GateSpec {
  GateKind kind = GateKind::X;
  std::vector<double> params;
  std::vector<int> targets;
  std::vector<int> controls;
  std::vector<int> control_values;

  static GateSpec u(double theta, double phi, double lambda, int t) {
    return {GateKind::U, {theta, phi, lambda}, {t}, {}, {}};
  }
  static GateSpec h(int t) { return {GateKind::H, {}, {t}, {}, {}}; }
  static GateSpec x(int t) { return {GateKind::X, {}, {t}, {}, {}}; }
  static GateSpec z(int t) { return {GateKind::Z, {}, {t}, {}, {}}; }
  static GateSpec phase(double lambda, int t) { return {GateKind::Phase, {lambda}, {t}, {}, {}}; }
  static GateSpec rk(int k, int t) { return {GateKind::Rk, {static_cast<double>(k)}, {t}, {}, {}}; }
  static GateSpec cnot(int c, int t) { return {GateKind::CNOT, {}, {c, t}, {}, {}}; }
  static GateSpec cz(int c, int t) { return {GateKind::CZ, {}, {c, t}, {}, {}}; }
  static GateSpec swap(int a, int b) { return {GateKind::SWAP, {}, {a, b}, {}, {}}; }

  GateSpec& controlled_by(int q, int value = 1) {
    controls.push_back(q);
    control_values.resize(controls.size() - 1, 1);
    control_values.push_back(value);
    return *this;
  }
};

template <typename Scalar = double>
using Matrix2 = Eigen::Matrix<std::complex<Scalar>, 2, 2>;

/// 2x2 matrix of a single-target kind (CNOT/CZ give the target action).
template <typename Scalar = double>
Matrix2<Scalar> gate_matrix(const GateSpec& g) {
  using C = std::complex<Scalar>;
  const Scalar r = Scalar(1) / std::sqrt(Scalar(2));
  const C i(0, 1);
  auto param = [&](std::size_t k) {
    if (g.params.size() <= k) throw ArgumentError("gate is missing parameter " + std::to_string(k));
    return static_cast<Scalar>(g.params[k]);
  };
  Matrix2<Scalar> m;
  switch (g.kind) {
    case GateKind::U: {
      const Scalar th = param(0), ph = param(1), la = param(2);
      m << std::cos(th / 2), -std::exp(i * la) * std::sin(th / 2),
          std::exp(i * ph) * std::sin(th / 2), std::exp(i * (ph + la)) * std::cos(th / 2);
      break;
    }
    case GateKind::H: m << r, r, r, -r; break;
    case GateKind::X:
    case GateKind::CNOT: m << 0, 1, 1, 0; break;
    case GateKind::Y: m << 0, -i, i, 0; break;
    case GateKind::Z:
    case GateKind::CZ: m << 1, 0, 0, -1; break;
    case GateKind::S: m << 1, 0, 0, i; break;
    case GateKind::Sdg: m << 1, 0, 0, -i; break;
    case GateKind::T: m << 1, 0, 0, std::exp(i * (std::numbers::pi_v<Scalar> / 4)); break;
    case GateKind::Tdg: m << 1, 0, 0, std::exp(-i * (std::numbers::pi_v<Scalar> / 4)); break;
    case GateKind::Phase: m << 1, 0, 0, std::exp(i * param(0)); break;
    case GateKind::Rk: {
      const Scalar k = param(0);
      if (k < 1 || k != std::floor(k)) throw ArgumentError("R_k needs an integer k >= 1");
      m << 1, 0, 0, std::exp(i * (2 * std::numbers::pi_v<Scalar> / std::exp2(k)));
      break;
    }
    case GateKind::SWAP: throw ArgumentError("SWAP has no 2x2 matrix");
  }
  return m;
}

namespace detail {

/// Spreads the bits of `k` over the positions not listed in `sorted` (ascending).
inline Index deposit(Index k, const std::vector<int>& sorted) {
  for (int p : sorted) {
    const Index low = k & ((Index{1} << p) - 1);
    k = ((k >> p) << (p + 1)) | low;
  }
  return k;
}

/// Pulls the bits at `qubits` into a compact integer, qubits[0] as LSB.
inline Index gather(Index i, const std::vector<int>& qubits) {
  Index r = 0;
  for (std::size_t k = 0; k < qubits.size(); ++k) r |= ((i >> qubits[k]) & 1U) << k;
  return r;
}

struct Stencil {
  std::vector<int> fixed_positions;  // sorted
  Index fixed_bits = 0;              // control values
  Index count = 0;                   // number of free basis indices
};

template <typename Scalar>
Stencil make_stencil(const BasicStateVector<Scalar>& s, const std::vector<int>& targets,
                     const std::vector<int>& controls, const std::vector<int>& values) {
  Stencil st;
  std::vector<int> all = targets;
  all.insert(all.end(), controls.begin(), controls.end());
  for (int q : all) s.check_qubit(q);
  std::vector<int> sorted = all;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw ArgumentError("repeated qubit index among gate targets/controls");
  }
  if (!values.empty() && values.size() != controls.size()) {
    throw ArgumentError("control value count does not match control count");
  }
  for (std::size_t c = 0; c < controls.size(); ++c) {
    const int v = values.empty() ? 1 : values[c];
    if (v != 0 && v != 1) throw ArgumentError("control value must be 0 or 1");
    if (v) st.fixed_bits |= Index{1} << controls[c];
  }
  st.fixed_positions = std::move(sorted);
  st.count = s.dim() >> st.fixed_positions.size();
  return st;
}

}  // namespace detail

/// Applies a 2x2 unitary on `target`, conditioned on `controls`.
template <typename Scalar>
void apply_matrix(BasicStateVector<Scalar>& s, const Matrix2<Scalar>& m, int target,
                  const std::vector<int>& controls = {}, const std::vector<int>& values = {}) {
  const auto st = detail::make_stencil(s, {target}, controls, values);
  const Index tbit = Index{1} << target;
  auto& a = s.amplitudes();
  const bool diagonal = m(0, 1) == std::complex<Scalar>(0) && m(1, 0) == std::complex<Scalar>(0);
  const bool flip = m(0, 0) == std::complex<Scalar>(0) && m(1, 1) == std::complex<Scalar>(0) &&
                    m(0, 1) == std::complex<Scalar>(1) && m(1, 0) == std::complex<Scalar>(1);
  for (Index k = 0; k < st.count; ++k) {
    const auto i0 = static_cast<Eigen::Index>(detail::deposit(k, st.fixed_positions) | st.fixed_bits);
    const auto i1 = static_cast<Eigen::Index>(static_cast<Index>(i0) | tbit);
    if (flip) {
      std::swap(a[i0], a[i1]);
    } else if (diagonal) {
      a[i0] *= m(0, 0);
      a[i1] *= m(1, 1);
    } else {
      const auto x = a[i0], y = a[i1];
      a[i0] = m(0, 0) * x + m(0, 1) * y;
      a[i1] = m(1, 0) * x + m(1, 1) * y;
    }
  }
}

/// Exchanges qubits `q1` and `q2`, conditioned on `controls`.
template <typename Scalar>
void apply_swap(BasicStateVector<Scalar>& s, int q1, int q2, const std::vector<int>& controls = {},
                const std::vector<int>& values = {}) {
  const auto st = detail::make_stencil(s, {q1, q2}, controls, values);
  const Index b1 = Index{1} << q1, b2 = Index{1} << q2;
  auto& a = s.amplitudes();
  for (Index k = 0; k < st.count; ++k) {
    const Index base = detail::deposit(k, st.fixed_positions) | st.fixed_bits;
    std::swap(a[static_cast<Eigen::Index>(base | b1)], a[static_cast<Eigen::Index>(base | b2)]);
  }
}

template <typename Scalar>
void apply_gate(BasicStateVector<Scalar>& s, const GateSpec& g) {
  auto values = g.control_values;
  if (!values.empty() || !g.controls.empty()) values.resize(g.controls.size(), 1);
  const std::size_t want = (g.kind == GateKind::SWAP || g.kind == GateKind::CNOT ||
                            g.kind == GateKind::CZ)
                               ? 2
                               : 1;
  if (g.targets.size() != want) {
    throw ArgumentError("gate expects " + std::to_string(want) + " target qubit(s), got " +
                        std::to_string(g.targets.size()));
  }
  if (g.kind == GateKind::SWAP) {
    apply_swap(s, g.targets[0], g.targets[1], g.controls, values);
    return;
  }
  if (g.kind == GateKind::CNOT || g.kind == GateKind::CZ) {
    std::vector<int> controls{g.targets[0]};
    controls.insert(controls.end(), g.controls.begin(), g.controls.end());
    std::vector<int> vals{1};
    vals.insert(vals.end(), values.begin(), values.end());
    apply_matrix(s, gate_matrix<Scalar>(g), g.targets[1], controls, vals);
    return;
  }
  apply_matrix(s, gate_matrix<Scalar>(g), g.targets[0], g.controls, values);
}

/// Full unitary of `g` over its own qubits: targets first, then controls, bit k = k-th listed.
template <typename Scalar = double>
Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, Eigen::Dynamic> gate_unitary(const GateSpec& g) {
  GateSpec local = g;
  int next = 0;
  for (auto& t : local.targets) t = next++;
  for (auto& c : local.controls) c = next++;
  const Index d = Index{1} << next;
  Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, Eigen::Dynamic> u(d, d);
  for (Index col = 0; col < d; ++col) {
    BasicStateVector<Scalar> s(next, col);
    apply_gate(s, local);
    u.col(static_cast<Eigen::Index>(col)) = s.amplitudes();
  }
  return u;
}

template <typename Scalar>
Scalar probability_one(const BasicStateVector<Scalar>& s, int q) {
  s.check_qubit(q);
  const Index bit = Index{1} << q;
  Scalar p = 0;
  const auto& a = s.amplitudes();
  for (Index i = 0; i < s.dim(); ++i) {
    if (i & bit) p += std::norm(a[static_cast<Eigen::Index>(i)]);
  }
  return p;
}

/// Projects qubit `q` onto `outcome` and renormalizes. Returns the outcome probability.
template <typename Scalar>
Scalar postselect_qubit(BasicStateVector<Scalar>& s, int q, int outcome) {
  if (outcome != 0 && outcome != 1) throw ArgumentError("outcome must be 0 or 1");
  const Scalar p1 = probability_one(s, q);
  const Scalar p = outcome ? p1 : Scalar(1) - p1;
  if (p < Scalar(1e-12)) {
    throw PostSelectionError("post-selection of qubit " + std::to_string(q) + " on " +
                                 std::to_string(outcome) + " has probability " + std::to_string(p),
                             static_cast<double>(p));
  }
  const Index bit = Index{1} << q;
  const Scalar scale = Scalar(1) / std::sqrt(p);
  auto& a = s.amplitudes();
  for (Index i = 0; i < s.dim(); ++i) {
    auto& v = a[static_cast<Eigen::Index>(i)];
    if (((i & bit) != 0) == (outcome == 1)) {
      v *= scale;
    } else {
      v = 0;
    }
  }
  return p;
}

/// Born-rule measurement in the computational basis; collapses `s`.
template <typename Scalar>
int measure_qubit(BasicStateVector<Scalar>& s, int q, Rng& rng) {
  const Scalar p1 = probability_one(s, q);
  const int outcome = rng.uniform() < static_cast<double>(p1) ? 1 : 0;
  postselect_qubit(s, q, outcome);
  return outcome;
}

/// Measure, discard, and return the qubit to |0>.
template <typename Scalar>
void reset_qubit(BasicStateVector<Scalar>& s, int q, Rng& rng) {
  if (measure_qubit(s, q, rng) == 1) apply_gate(s, GateSpec::x(q));
}

namespace detail {

template <typename Scalar>
void check_subset(const BasicStateVector<Scalar>& s, const std::vector<int>& subset) {
  if (subset.empty()) throw ArgumentError("subset must be nonempty");
  if (static_cast<int>(subset.size()) >= s.num_qubits()) {
    throw ArgumentError("subset must be a proper subset of the qubits");
  }
  std::vector<int> sorted = subset;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw ArgumentError("subset has a repeated qubit");
  }
  for (int q : subset) s.check_qubit(q);
}

inline std::vector<int> complement(int n, const std::vector<int>& subset) {
  std::vector<int> out;
  for (int q = 0; q < n; ++q) {
    if (std::find(subset.begin(), subset.end(), q) == subset.end()) out.push_back(q);
  }
  return out;
}

/// Amplitudes arranged as (subset index) x (complement index), with empty rows/columns dropped.
template <typename Scalar>
Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, Eigen::Dynamic> split_matrix(
    const BasicStateVector<Scalar>& s, const std::vector<int>& subset, bool keep_all_rows) {
  const auto comp = complement(s.num_qubits(), subset);
  std::unordered_map<Index, Eigen::Index> rows, cols;
  struct Entry {
    Eigen::Index r, c;
    std::complex<Scalar> v;
  };
  std::vector<Entry> entries;
  if (keep_all_rows) {
    for (Index r = 0; r < (Index{1} << subset.size()); ++r) rows.emplace(r, static_cast<Eigen::Index>(r));
  }
  const auto& a = s.amplitudes();
  for (Index i = 0; i < s.dim(); ++i) {
    const auto v = a[static_cast<Eigen::Index>(i)];
    if (std::norm(v) < Scalar(1e-30)) continue;
    const Index r = gather(i, subset), c = gather(i, comp);
    auto ri = rows.emplace(r, static_cast<Eigen::Index>(rows.size())).first->second;
    auto ci = cols.emplace(c, static_cast<Eigen::Index>(cols.size())).first->second;
    entries.push_back({ri, ci, v});
  }
  Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, Eigen::Dynamic> m =
      Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, Eigen::Dynamic>::Zero(
          static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
  for (const auto& e : entries) m(e.r, e.c) = e.v;
  return m;
}

}  // namespace detail

/// Tr(rho_A^2) for the subsystem A = `subset`.
template <typename Scalar>
Scalar reduced_purity(const BasicStateVector<Scalar>& s, const std::vector<int>& subset) {
  detail::check_subset(s, subset);
  const auto m = detail::split_matrix(s, subset, false);
  if (m.size() == 0) return Scalar(0);
  Scalar p;
  if (m.rows() <= m.cols()) {
    p = (m * m.adjoint()).squaredNorm();
  } else {
    p = (m.adjoint() * m).squaredNorm();
  }
  return p / (s.norm_squared() * s.norm_squared());
}

/// rho_A with subset[0] as the least significant bit of the row index.
template <typename Scalar>
Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, Eigen::Dynamic> reduced_density_matrix(
    const BasicStateVector<Scalar>& s, const std::vector<int>& subset) {
  detail::check_subset(s, subset);
  const auto m = detail::split_matrix(s, subset, true);
  return m * m.adjoint();
}

/// |<a|b>|^2.
template <typename Scalar>
Scalar state_fidelity(const BasicStateVector<Scalar>& a, const BasicStateVector<Scalar>& b) {
  if (a.num_qubits() != b.num_qubits()) {
    throw ArgumentError("fidelity of states with " + std::to_string(a.num_qubits()) + " and " +
                        std::to_string(b.num_qubits()) + " qubits");
  }
  return std::norm(a.amplitudes().dot(b.amplitudes()));
}

/// Haar-like random state from normalized complex Gaussians.
template <typename Scalar = double>
BasicStateVector<Scalar> random_state(int num_qubits, Rng& rng) {
  BasicStateVector<Scalar> s(num_qubits, 0);
  for (Index i = 0; i < s.dim(); ++i) {
    const auto re = static_cast<Scalar>(rng.normal());
    const auto im = static_cast<Scalar>(rng.normal());
    s[i] = {re, im};
  }
  s.normalize();
  return s;
}

/// |high> (x) |low>; `low` occupies the lower qubit indices.
template <typename Scalar>
BasicStateVector<Scalar> tensor(const BasicStateVector<Scalar>& high, const BasicStateVector<Scalar>& low,
                                int max_qubits = kDefaultMaxQubits) {
  const int n = high.num_qubits() + low.num_qubits();
  if (n > max_qubits) {
    throw ResourceError("qubit budget exceeded: " + std::to_string(n) + " qubits requested, budget is " +
                        std::to_string(max_qubits));
  }
  typename BasicStateVector<Scalar>::Vector v(static_cast<Eigen::Index>(high.dim() * low.dim()));
  for (Index h = 0; h < high.dim(); ++h) {
    v.segment(static_cast<Eigen::Index>(h * low.dim()), static_cast<Eigen::Index>(low.dim())) =
        high[h] * low.amplitudes();
  }
  BasicStateVector<Scalar> out(std::move(v));
  for (int q = 0; q < low.num_qubits(); ++q) out.set_label(q, low.labels()[static_cast<std::size_t>(q)]);
  for (int q = 0; q < high.num_qubits(); ++q) {
    out.set_label(q + low.num_qubits(), high.labels()[static_cast<std::size_t>(q)]);
  }
  return out;
}

/// MSB-first bitstring, q[0] rightmost.
inline std::string bitstring(Index value, int width) {
  std::string s(static_cast<std::size_t>(width), '0');
  for (int k = 0; k < width; ++k) {
    if ((value >> k) & 1U) s[static_cast<std::size_t>(width - 1 - k)] = '1';
  }
  return s;
}

/// One line per amplitude: index, bitstring, re, im. Amplitudes below `threshold` are skipped.
template <typename Scalar>
void dump_state(const BasicStateVector<Scalar>& s, std::ostream& os, double threshold = 1e-12) {
  char buf[96];
  for (Index i = 0; i < s.dim(); ++i) {
    const auto v = s[i];
    if (std::abs(v) < threshold) continue;
    std::snprintf(buf, sizeof buf, "\t%.12g\t%.12g\n", static_cast<double>(v.real()),
                  static_cast<double>(v.imag()));
    os << i << '\t' << bitstring(i, s.num_qubits()) << buf;
  }
}

}  // namespace qmem
