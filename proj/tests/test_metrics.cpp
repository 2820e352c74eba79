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

#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <sstream>

#include "qmem/errors.hpp"
#include "qmem/metrics.hpp"

namespace qmem {
namespace {

const char* kHeader = "name,t_storage_s,tau_rw_s,eta,t_op_s,t_addr_s,n_cells,n_parallel,notes\n";

Dataset parse(const std::string& body) {
  std::istringstream in(std::string(kHeader) + body);
  return parse_platform_dataset(in, "mem.csv");
}

PlatformRecord record(double t_storage, double tau, double eta, std::optional<double> t_op) {
  PlatformRecord r;
  r.name = "r";
  r.t_storage = t_storage;
  r.tau_rw = tau;
  r.eta = eta;
  r.t_op = t_op;
  return r;
}

TEST(Duration, UnitsAndBareSeconds) {
  EXPECT_DOUBLE_EQ(parse_duration("100ns"), 100e-9);
  EXPECT_DOUBLE_EQ(parse_duration("2 us"), 2e-6);
  EXPECT_DOUBLE_EQ(parse_duration("2\xC2\xB5s"), 2e-6);
  EXPECT_DOUBLE_EQ(parse_duration("1.5ms"), 1.5e-3);
  EXPECT_DOUBLE_EQ(parse_duration("3min"), 180.0);
  EXPECT_DOUBLE_EQ(parse_duration("2h"), 7200.0);
  EXPECT_DOUBLE_EQ(parse_duration("4s"), 4.0);
  EXPECT_DOUBLE_EQ(parse_duration("1e-3"), 1e-3);
  EXPECT_THROW(parse_duration("fast"), ParseError);
  EXPECT_THROW(parse_duration("ns"), ParseError);
}

TEST(Ratios, InternalAndExternal) {
  // T_RW = 1 us / 0.5 = 2 us
  const auto s = storage_ratios(record(1e-3, 1e-6, 0.5, 1e-6));
  EXPECT_NEAR(s.alpha_in, 500.0, 1e-9);
  ASSERT_TRUE(s.alpha_ex.has_value());
  EXPECT_NEAR(*s.alpha_ex, (1e-3 - 4e-6) * 0.5 / 1e-6, 1e-6);
  EXPECT_FALSE(storage_ratios(record(1e-3, 1e-6, 0.5, std::nullopt)).alpha_ex.has_value());
  EXPECT_TRUE(std::isinf(storage_ratios(record(1.0, 0.0, 1.0, std::nullopt)).alpha_in));
}

TEST(Ratios, ExternalRatioCanGoNegative) {
  EXPECT_LT(external_storage_ratio(1e-6, 1e-6, 1.0, 1e-7), 0.0);
  EXPECT_THROW(external_storage_ratio(1.0, 0.0, 1.0, 0.0), ArgumentError);
}

TEST(Metrics, AddressingTimeEntersEveryRatio) {
  auto r = record(1e-3, 1e-6, 0.8, 4e-8);
  r.t_addr = 3e-6;
  r.n_cells = 8;
  r.n_parallel = 2;
  const auto m = qmd_metrics(r);
  const double t_rw = (3e-6 + 1e-6) / 0.8;
  EXPECT_NEAR(m.t_rw, t_rw, 1e-18);
  EXPECT_NEAR(m.alpha_qmd, 1e-3 / t_rw, 1e-9);
  ASSERT_TRUE(m.beta.has_value());
  EXPECT_NEAR(*m.beta, t_rw / 4e-8, 1e-9);
  EXPECT_NEAR(m.gamma, t_rw * 8 / (1e-3 * 2), 1e-15);
}

TEST(Metrics, RecordsAreValidated) {
  EXPECT_THROW(validate_record(record(1, 1, 0.0, std::nullopt)), ArgumentError);
  EXPECT_THROW(validate_record(record(1, 1, 1.5, std::nullopt)), ArgumentError);
  EXPECT_THROW(validate_record(record(-1, 1, 1, std::nullopt)), ArgumentError);
  auto r = record(1, 1, 1, std::nullopt);
  r.n_parallel = 2;
  EXPECT_THROW(validate_record(r), ArgumentError);
  EXPECT_THROW(rw_time(1.0, 0.0), ArgumentError);
}

TEST(Buffer, CacheMetrics) {
  const auto b = buffer_cache_metrics(1e-3, 1e-6, 0.5, 2e-6, 1e-6);
  EXPECT_NEAR(b.alpha_ex_qb, 1e-3 * 0.5 / 2e-6, 1e-9);
  EXPECT_NEAR(b.beta_qb, (1e-6 / 0.5) / 1e-6, 1e-12);
  EXPECT_EQ(b.recommended_capacity, 2);
  EXPECT_THROW(buffer_cache_metrics(1, 0, 1, 0, 1), ArgumentError);
}

TEST(Dataset, ParsesRowsCommentsAndNotes) {
  const auto ds = parse(
      "# comment\n"
      "\n"
      "a,1ms,1us,0.5,40ns,,,,\"alpha_in=500;platform=x, y\"\n"
      "b,1s,1ms,1,,2us,4,2,\n");
  ASSERT_EQ(ds.records.size(), 2u);
  EXPECT_EQ(ds.records[0].note("platform"), "x, y");
  EXPECT_EQ(ds.records[0].note("alpha_in"), "500");
  EXPECT_FALSE(ds.records[1].t_op.has_value());
  EXPECT_EQ(ds.records[1].n_cells, 4);
  EXPECT_DOUBLE_EQ(ds.records[1].t_addr, 2e-6);
}

TEST(Dataset, RejectsBadHeader) {
  std::istringstream in("name,t_storage\n");
  EXPECT_THROW(parse_platform_dataset(in), ParseError);
}

TEST(Dataset, ReportsEveryBadRowWithLocation) {
  try {
    parse("a,1ms,1us,2,,,,,\nb,xx,1us,1,,,,,\nc,1ms\n");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("mem.csv:2: a: eta must be in (0, 1]"), std::string::npos) << msg;
    EXPECT_NE(msg.find("mem.csv:3: field t_storage_s"), std::string::npos) << msg;
    EXPECT_NE(msg.find("mem.csv:4: expected 9 fields, got 2"), std::string::npos) << msg;
  }
}

TEST(Dataset, EmptyInputWarns) {
  std::istringstream in("# nothing\n");
  EXPECT_EQ(parse_platform_dataset(in).warnings.size(), 1u);
  EXPECT_THROW(load_platform_dataset("/nonexistent/x.csv"), ParseError);
}

TEST(Printed, ToleranceIsOneUnitOfLastDigit) {
  EXPECT_TRUE(matches_printed(2.634, "2.63"));
  EXPECT_TRUE(matches_printed(2.64, "2.63"));
  EXPECT_FALSE(matches_printed(2.6501, "2.63"));
  EXPECT_TRUE(matches_printed(1.23e5, "1.2e5"));
  EXPECT_FALSE(matches_printed(1.35e5, "1.2e5"));
  EXPECT_TRUE(matches_printed(4200, "4200"));
  EXPECT_TRUE(matches_printed(-3.0, "<0"));
  EXPECT_FALSE(matches_printed(0.1, "<0"));
}

TEST(Fig2, NegativeExternalRatiosAreClamped) {
  const auto ds = parse(
      "good,1ms,1us,1,1us,,,,\n"
      "bad,1us,1us,1,1us,,,,\n"
      "none,1ms,1us,1,,,,,\n");
  const auto pts = emit_fig2_points(ds.records);
  ASSERT_EQ(pts.size(), 3u);
  EXPECT_FALSE(pts[0].clamped);
  EXPECT_NEAR(pts[0].alpha_ex_plotted, (1e-3 - 2e-6) / 1e-6, 1e-6);
  EXPECT_TRUE(pts[1].clamped);
  EXPECT_EQ(pts[1].alpha_ex_plotted, kFig2Clamp);
  EXPECT_TRUE(pts[2].clamped);
  std::ostringstream os;
  write_fig2_csv(pts, os);
  EXPECT_NE(os.str().find("bad,1,0.5,clamped\n"), std::string::npos) << os.str();
}

TEST(Fig2, GroupedRowsShareOnePoint) {
  const auto ds = parse(
      "in,1ms,1us,1,,,,,group=g\n"
      "ex,1ms,10us,1,1us,,,,group=g;role=external\n");
  const auto pts = emit_fig2_points(ds.records);
  ASSERT_EQ(pts.size(), 1u);
  EXPECT_EQ(pts[0].name, "in");
  EXPECT_NEAR(pts[0].alpha_in, 1000.0, 1e-9);
  EXPECT_NEAR(pts[0].alpha_ex_plotted, (1e-3 - 2e-5) / 1e-6, 1e-6);
}

TEST(CheckPaper, SkipsNonRecomputableFields) {
  const auto ds = parse(
      "a,1ms,1us,1,,,,,alpha_in=1000;alpha=999\n"
      "b,1ms,1us,1,,,,,alpha_in=7;nonrecomputable=alpha_in\n");
  const auto checks = check_paper(ds.records);
  ASSERT_EQ(checks.size(), 2u);
  EXPECT_TRUE(checks[0].pass);
  EXPECT_TRUE(checks[1].pass);
  EXPECT_EQ(checks[1].field, "alpha");
}

TEST(CheckPaper, BundledTablesReproduce) {
  for (const char* file : {"table1.csv", "table3_raqm.csv"}) {
    const auto ds = load_platform_dataset(std::string(QMEM_SOURCE_DIR) + "/data/" + file);
    const auto checks = check_paper(ds.records);
    EXPECT_FALSE(checks.empty()) << file;
    for (const auto& c : checks) EXPECT_TRUE(c.pass) << file << ' ' << c.row << ' ' << c.field << " printed " << c.printed << " computed " << c.computed;
  }
}

TEST(Csv, MetricsRoundTripHeader) {
  std::ostringstream os;
  write_metrics_csv(parse("a,1ms,1us,1,,,,,\"x,y\"\n").records, os);
  std::istringstream in(os.str());
  std::string header, row;
  std::getline(in, header);
  std::getline(in, row);
  EXPECT_EQ(header, "name,t_storage_s,tau_rw_s,eta,t_op_s,t_addr_s,n_cells,n_parallel,notes,t_rw_s,alpha_in,alpha_ex,alpha_qmd,beta,gamma");
  EXPECT_EQ(row, "a,0.001,1e-06,1,,0,1,1,\"x,y\",1e-06,1000,,1000,,0.001");
}

}  // namespace
}  // namespace qmem
