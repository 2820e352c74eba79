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

#include "qmem/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>

#include "qmem/errors.hpp"

namespace qmem {

namespace {

const std::vector<std::string> kColumns = {"name",   "t_storage_s", "tau_rw_s", "eta",  "t_op_s",
                                           "t_addr_s", "n_cells",   "n_parallel", "notes"};

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (quoted) throw ParseError("unterminated quote");
  out.push_back(trim(cur));
  return out;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

double parse_number(std::string_view text) {
  const std::string s(text);
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size()) throw ParseError("not a number: '" + s + "'");
  return v;
}

long parse_count(std::string_view text) {
  const double v = parse_number(text);
  if (v != std::floor(v)) throw ParseError("not an integer: '" + std::string(text) + "'");
  return static_cast<long>(v);
}

}  // namespace

std::optional<std::string> PlatformRecord::note(std::string_view key) const {
  std::stringstream ss(notes);
  std::string tok;
  while (std::getline(ss, tok, ';')) {
    const auto eq = tok.find('=');
    if (eq == std::string::npos) continue;
    if (trim(tok.substr(0, eq)) == key) return trim(tok.substr(eq + 1));
  }
  return std::nullopt;
}

bool PlatformRecord::non_recomputable(std::string_view field) const {
  const auto v = note("nonrecomputable");
  if (!v) return false;
  std::stringstream ss(*v);
  std::string tok;
  while (std::getline(ss, tok, '|')) {
    if (trim(tok) == field || trim(tok) == "all") return true;
  }
  return false;
}

void validate_record(const PlatformRecord& r) {
  auto fail = [&](const std::string& what) { throw ArgumentError(r.name + ": " + what); };
  if (!(r.t_storage >= 0) || !(r.tau_rw >= 0) || !(r.t_addr >= 0)) fail("times must be >= 0");
  if (r.t_op && !(*r.t_op >= 0)) fail("t_op must be >= 0");
  if (!(r.eta > 0 && r.eta <= 1)) fail("eta must be in (0, 1], got " + num(r.eta));
  if (r.n_cells < 1) fail("n_cells must be >= 1");
  if (r.n_parallel < 1 || r.n_parallel > r.n_cells) fail("n_parallel must be in [1, n_cells]");
}

double rw_time(double tau, double eta) {
  if (!(eta > 0 && eta <= 1)) throw ArgumentError("eta must be in (0, 1], got " + num(eta));
  if (!(tau >= 0)) throw ArgumentError("tau must be >= 0");
  return tau / eta;
}

double external_storage_ratio(double t_storage, double t_rw, double eta, double t_op) {
  if (!(t_op > 0)) throw ArgumentError("alpha_ex is undefined for t_op <= 0");
  return (t_storage - 2.0 * t_rw) * eta / t_op;
}

StorageRatios storage_ratios(const PlatformRecord& rec) {
  validate_record(rec);
  const double t_rw = rw_time(rec.tau_rw, rec.eta);
  StorageRatios out;
  out.alpha_in = t_rw > 0 ? rec.t_storage / t_rw : std::numeric_limits<double>::infinity();
  if (rec.t_op) out.alpha_ex = external_storage_ratio(rec.t_storage, t_rw, rec.eta, *rec.t_op);
  return out;
}

MetricsResult qmd_metrics(const PlatformRecord& rec) {
  const auto ratios = storage_ratios(rec);
  MetricsResult m;
  m.alpha_in = ratios.alpha_in;
  m.alpha_ex = ratios.alpha_ex;
  m.t_rw = (rec.t_addr + rec.tau_rw) / rec.eta;
  m.alpha_qmd = m.t_rw > 0 ? rec.t_storage / m.t_rw : std::numeric_limits<double>::infinity();
  if (rec.t_op && *rec.t_op > 0) m.beta = m.t_rw / *rec.t_op;
  m.gamma = (m.t_rw * static_cast<double>(rec.n_cells)) / (rec.t_storage * static_cast<double>(rec.n_parallel));
  return m;
}

BufferMetrics buffer_cache_metrics(double t_storage, double t_rw, double eta, double t_g, double t_c) {
  if (!(t_g > 0) || !(t_c > 0)) throw ArgumentError("generation and consumption times must be positive");
  if (!(t_storage > 0) || !(t_rw >= 0)) throw ArgumentError("storage time must be positive and t_rw >= 0");
  if (!(eta > 0 && eta <= 1)) throw ArgumentError("eta must be in (0, 1]");
  BufferMetrics b;
  b.alpha_ex_qb = t_storage * eta / std::max(t_g, t_c);
  b.beta_qb = (t_rw / eta) / std::min(t_g, t_c);
  b.recommended_capacity = std::max(1L, std::lround(t_g / t_c));
  return b;
}

double parse_duration(std::string_view text) {
  const std::string s = trim(text);
  static const std::vector<std::pair<std::string, double>> units = {
      {"min", 60.0}, {"ms", 1e-3}, {"us", 1e-6}, {"\xC2\xB5s", 1e-6}, {"ns", 1e-9},
      {"ps", 1e-12}, {"h", 3600.0}, {"s", 1.0}};
  for (const auto& [suffix, scale] : units) {
    if (s.size() > suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0) {
      return parse_number(trim(s.substr(0, s.size() - suffix.size()))) * scale;
    }
  }
  return parse_number(s);
}

Dataset parse_platform_dataset(std::istream& in, const std::string& source) {
  Dataset ds;
  std::string line;
  std::size_t row = 0;
  bool header_seen = false;
  std::vector<std::string> errors;
  while (std::getline(in, line)) {
    ++row;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    std::vector<std::string> f;
    try {
      f = split_csv(line);
    } catch (const ParseError& e) {
      errors.push_back(source + ":" + std::to_string(row) + ": " + e.what());
      continue;
    }
    if (!header_seen) {
      if (f != kColumns) {
        throw ParseError(source + ":" + std::to_string(row) + ": header must be name,t_storage_s,tau_rw_s,eta,t_op_s,"
                         "t_addr_s,n_cells,n_parallel,notes");
      }
      header_seen = true;
      continue;
    }
    if (f.size() != kColumns.size()) {
      errors.push_back(source + ":" + std::to_string(row) + ": expected " + std::to_string(kColumns.size()) +
                       " fields, got " + std::to_string(f.size()));
      continue;
    }
    PlatformRecord r;
    std::size_t k = 0;
    try {
      r.name = f[k];
      if (r.name.empty()) throw ParseError("empty name");
      r.t_storage = parse_duration(f[++k]);
      r.tau_rw = parse_duration(f[++k]);
      r.eta = parse_number(f[++k]);
      if (!f[++k].empty()) r.t_op = parse_duration(f[k]);
      r.t_addr = f[++k].empty() ? 0.0 : parse_duration(f[k]);
      r.n_cells = f[++k].empty() ? 1 : parse_count(f[k]);
      r.n_parallel = f[++k].empty() ? 1 : parse_count(f[k]);
      r.notes = f[++k];
      k = 0;
      validate_record(r);
    } catch (const Error& e) {
      errors.push_back(source + ":" + std::to_string(row) + (k ? ": field " + kColumns[k] : std::string()) + ": " + e.what());
      continue;
    }
    ds.records.push_back(std::move(r));
  }
  if (!errors.empty()) {
    std::string msg = "invalid dataset rows:";
    for (const auto& e : errors) msg += "\n  " + e;
    throw ParseError(msg);
  }
  if (!header_seen) ds.warnings.push_back(source + ": empty dataset");
  return ds;
}

Dataset load_platform_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open dataset '" + path + "'");
  return parse_platform_dataset(in, path);
}

std::vector<Fig2Point> emit_fig2_points(const std::vector<PlatformRecord>& records) {
  struct Acc {
    std::string name;
    std::optional<double> alpha_in, alpha_ex;
  };
  std::vector<Acc> acc;
  std::map<std::string, std::size_t> groups;
  for (const auto& r : records) {
    const auto ratios = storage_ratios(r);
    const bool external = r.note("role") == std::string("external");
    std::size_t slot;
    const auto g = r.note("group");
    if (g && groups.count(*g)) {
      slot = groups[*g];
    } else {
      slot = acc.size();
      acc.push_back({r.name, std::nullopt, std::nullopt});
      if (g) groups[*g] = slot;
    }
    if (external) {
      acc[slot].alpha_ex = ratios.alpha_ex;
    } else {
      acc[slot].name = r.name;
      acc[slot].alpha_in = ratios.alpha_in;
      if (!acc[slot].alpha_ex) acc[slot].alpha_ex = ratios.alpha_ex;
    }
  }
  std::vector<Fig2Point> out;
  for (const auto& a : acc) {
    if (!a.alpha_in) continue;
    Fig2Point p{a.name, *a.alpha_in, kFig2Clamp, true};
    if (a.alpha_ex && *a.alpha_ex >= 0) {
      p.alpha_ex_plotted = *a.alpha_ex;
      p.clamped = false;
    }
    out.push_back(p);
  }
  return out;
}

bool matches_printed(double value, std::string_view printed) {
  const std::string p = trim(printed);
  if (p == "<0") return value < 0;
  const auto e = p.find_first_of("eE");
  const std::string mantissa = p.substr(0, e);
  const int exponent = e == std::string::npos ? 0 : static_cast<int>(parse_number(p.substr(e + 1)));
  const auto dot = mantissa.find('.');
  const int decimals = dot == std::string::npos ? 0 : static_cast<int>(mantissa.size() - dot - 1);
  const double unit = std::pow(10.0, exponent - decimals);
  return std::abs(value - parse_number(p)) <= unit * (1.0 + 1e-9);
}

std::vector<PaperCheck> check_paper(const std::vector<PlatformRecord>& records) {
  std::vector<PaperCheck> out;
  for (const auto& r : records) {
    const auto m = qmd_metrics(r);
    const std::pair<const char*, std::optional<double>> fields[] = {
        {"alpha_in", m.alpha_in}, {"alpha_ex", m.alpha_ex}, {"alpha", m.alpha_qmd},
        {"beta", m.beta},         {"gamma", m.gamma}};
    for (const auto& [field, value] : fields) {
      const auto printed = r.note(field);
      if (!printed || r.non_recomputable(field)) continue;
      PaperCheck c{r.name, field, *printed, value.value_or(std::nan("")), false};
      c.pass = value && matches_printed(*value, *printed);
      out.push_back(c);
    }
  }
  return out;
}

void write_metrics_csv(const std::vector<PlatformRecord>& records, std::ostream& os) {
  for (std::size_t k = 0; k < kColumns.size(); ++k) os << kColumns[k] << ',';
  os << "t_rw_s,alpha_in,alpha_ex,alpha_qmd,beta,gamma\n";
  for (const auto& r : records) {
    const auto m = qmd_metrics(r);
    os << csv_field(r.name) << ',' << num(r.t_storage) << ',' << num(r.tau_rw) << ',' << num(r.eta) << ','
       << (r.t_op ? num(*r.t_op) : "") << ',' << num(r.t_addr) << ',' << r.n_cells << ',' << r.n_parallel << ','
       << csv_field(r.notes) << ',' << num(m.t_rw) << ',' << num(m.alpha_in) << ','
       << (m.alpha_ex ? num(*m.alpha_ex) : "") << ',' << num(m.alpha_qmd) << ','
       << (m.beta ? num(*m.beta) : "") << ',' << num(m.gamma) << '\n';
  }
}

void write_fig2_csv(const std::vector<Fig2Point>& points, std::ostream& os) {
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (const auto& p : points) {
    for (double v : {p.alpha_in, p.alpha_ex_plotted}) {
      if (v > 0 && std::isfinite(v)) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
    }
  }
  if (points.empty()) lo = hi = 1.0;
  os << "# reference line alpha_in = alpha_ex from (" << num(lo) << ", " << num(lo) << ") to (" << num(hi)
     << ", " << num(hi) << ")\n";
  os << "name,alpha_in,alpha_ex_plotted,clamped\n";
  for (const auto& p : points) {
    os << csv_field(p.name) << ',' << num(p.alpha_in) << ',' << num(p.alpha_ex_plotted) << ','
       << (p.clamped ? "clamped" : "") << '\n';
  }
}

}  // namespace qmem
