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

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace qmem {

/// Timing/fidelity parameters of one platform. Times are in seconds.
struct PlatformRecord {
  std::string name;
  double t_storage = 0.0;
  double tau_rw = 0.0;
  double eta = 1.0;
  std::optional<double> t_op;  // empty: external metrics not applicable
  double t_addr = 0.0;
  long n_cells = 1;
  long n_parallel = 1;
  std::string notes;  // `key=value` tokens separated by ';'

  std::optional<std::string> note(std::string_view key) const;
  /// True when `field` is listed in the `nonrecomputable=` note (entries separated by '|').
  bool non_recomputable(std::string_view field) const;
};

struct MetricsResult {
  double t_rw = 0.0;  // (T_addr + tau) / eta
  double alpha_in = 0.0;
  std::optional<double> alpha_ex;
  double alpha_qmd = 0.0;
  std::optional<double> beta;
  double gamma = 0.0;
};

struct StorageRatios {
  double alpha_in = 0.0;
  std::optional<double> alpha_ex;
};

struct BufferMetrics {
  double alpha_ex_qb = 0.0;
  double beta_qb = 0.0;
  long recommended_capacity = 1;
};

/// Throws ArgumentError naming the first violated invariant.
void validate_record(const PlatformRecord& rec);

/// tau / eta.
double rw_time(double tau, double eta);

/// (T_storage - 2 T_RW) * eta / T_op.
double external_storage_ratio(double t_storage, double t_rw, double eta, double t_op);

StorageRatios storage_ratios(const PlatformRecord& rec);

MetricsResult qmd_metrics(const PlatformRecord& rec);

BufferMetrics buffer_cache_metrics(double t_storage, double t_rw, double eta, double t_g, double t_c);

/// "557us", "1.48 ms", "52.9min", "3e-7" -> seconds.
double parse_duration(std::string_view text);

struct Dataset {
  std::vector<PlatformRecord> records;
  std::vector<std::string> warnings;
};

Dataset parse_platform_dataset(std::istream& in, const std::string& source = "<input>");
Dataset load_platform_dataset(const std::string& path);

struct Fig2Point {
  std::string name;
  double alpha_in = 0.0;
  double alpha_ex_plotted = 0.0;
  bool clamped = false;
};

inline constexpr double kFig2Clamp = 0.5;

/// One point per record, or per `group=` with alpha_ex taken from the `role=external` member.
std::vector<Fig2Point> emit_fig2_points(const std::vector<PlatformRecord>& records);

/// True when `value` equals `printed` within one unit of its last displayed digit.
/// "<0" accepts any negative value.
bool matches_printed(double value, std::string_view printed);

struct PaperCheck {
  std::string row;
  std::string field;
  std::string printed;
  double computed = 0.0;
  bool pass = false;
};

/// Compares every printed value recorded in the notes against the recomputed metric.
std::vector<PaperCheck> check_paper(const std::vector<PlatformRecord>& records);

void write_metrics_csv(const std::vector<PlatformRecord>& records, std::ostream& os);
void write_fig2_csv(const std::vector<Fig2Point>& points, std::ostream& os);

}  // namespace qmem
