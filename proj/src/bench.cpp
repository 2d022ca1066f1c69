#include "acrp/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <tuple>

#include <fmt/format.h>

#include "acrp/errors.hpp"
#include "acrp/events.hpp"
#include "acrp/instances.hpp"

namespace acrp {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::vector<SuiteEntry> range(const char* family, int lo, int hi) {
  std::vector<SuiteEntry> out;
  for (int n = lo; n <= hi; ++n) out.push_back({family, n, 0});
  return out;
}

FormulationResult run_one(const Instance& inst, const std::vector<ControlBounds>& cb, SolveParams p,
                          Separation sep) {
  p.separation = sep;
  const SolveOutcome out = solve_2d(inst, p);
  FormulationResult r;
  r.status = to_string(out.status);
  r.lb = out.lb;
  r.ub = out.has_incumbent() ? out.ub : kNaN;
  r.gap_pct = out.has_incumbent() ? 100.0 * out.gap() : kNaN;
  r.time_s = out.seconds;
  r.n_i = out.n_i;
  r.timeout = out.status == SolveStatus::TimeOut;
  r.verified = out.has_incumbent() && verify_controls(inst, cb, out.controls).empty();
  return r;
}

std::string quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + "\"";
}

std::string num(double v) { return std::isnan(v) ? "nan" : fmt::format("{:.17g}", v); }

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out(1);
  bool in_quotes = false;
  for (std::size_t k = 0; k < line.size(); ++k) {
    const char c = line[k];
    if (in_quotes) {
      if (c == '"' && k + 1 < line.size() && line[k + 1] == '"') {
        out.back() += '"';
        ++k;
      } else if (c == '"') {
        in_quotes = false;
      } else {
        out.back() += c;
      }
    } else if (c == '"') {
      in_quotes = true;
    } else if (c == ',') {
      out.emplace_back();
    } else {
      out.back() += c;
    }
  }
  if (in_quotes) throw ParseError("csv: unterminated quote");
  return out;
}

double parse_double(const std::string& s) {
  if (s == "nan") return kNaN;
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw ParseError(fmt::format("csv: bad number '{}'", s));
  }
  if (used != s.size()) throw ParseError(fmt::format("csv: bad number '{}'", s));
  return v;
}

int parse_int(const std::string& s) {
  const double v = parse_double(s);
  if (v != std::floor(v)) throw ParseError(fmt::format("csv: bad integer '{}'", s));
  return static_cast<int>(v);
}

void formulation_header(std::string& s, const char* p) {
  s += fmt::format(",{0}_status,{0}_lb,{0}_ub,{0}_gap_pct,{0}_time_s,{0}_n_i,{0}_timeout,{0}_verified", p);
}

void formulation_row(std::string& s, const FormulationResult& r) {
  s += fmt::format(",{},{},{},{},{},{},{},{}", quote(r.status), num(r.lb), num(r.ub), num(r.gap_pct), num(r.time_s),
                   r.n_i, r.timeout ? 1 : 0, r.verified ? 1 : 0);
}

FormulationResult formulation_from(const std::vector<std::string>& f, std::size_t at) {
  FormulationResult r;
  r.status = f[at];
  r.lb = parse_double(f[at + 1]);
  r.ub = parse_double(f[at + 2]);
  r.gap_pct = parse_double(f[at + 3]);
  r.time_s = parse_double(f[at + 4]);
  r.n_i = parse_int(f[at + 5]);
  r.timeout = parse_int(f[at + 6]) != 0;
  r.verified = parse_int(f[at + 7]) != 0;
  return r;
}

}  // namespace

SuiteSpec named_suite(const std::string& name) {
  SuiteSpec s;
  s.name = name;
  if (name == "cp" || name == "cp15") {
    s.entries = range("CP", 4, 8);
    if (name == "cp15") s.heading_deg = 15.0;
  } else if (name == "fp") {
    s.entries = range("FP", 4, 6);
  } else if (name == "gp") {
    s.entries = range("GP", 4, 5);
  } else if (name == "golden") {
    for (const char* f : {"cp", "fp", "gp"}) {
      const auto e = named_suite(f).entries;
      s.entries.insert(s.entries.end(), e.begin(), e.end());
    }
  } else if (name == "rcp30") {
    for (std::uint64_t seed = 1; seed <= 100; ++seed) s.entries.push_back({"RCP", 30, seed});
    s.heading_deg = 15.0;
    s.solve_disjunctive = false;
    s.solve_shadow = false;
  } else if (name == "smoke") {
    s.entries = {{"CP", 4, 0}, {"FP", 4, 0}};
  } else {
    throw std::invalid_argument(fmt::format("unknown suite '{}'", name));
  }
  return s;
}

BenchmarkRecord bench_instance(const Instance& inst, const SuiteSpec& suite, const SolveParams& params,
                               EventLog* events) {
  BenchmarkRecord rec;
  rec.id = instance_id(inst);
  rec.n_aircraft = inst.size();
  rec.disj.ub = rec.disj.lb = rec.disj.gap_pct = rec.disj.time_s = kNaN;
  rec.shadow = rec.disj;
  rec.delta_ub = rec.gain_pct = rec.pf_pct = rec.pi_pct = rec.preprocess_s = kNaN;

  const ControlBounds bounds =
      ControlBounds::from_percent_degrees(suite.speed_lo_pct, suite.speed_hi_pct, suite.heading_deg);
  const std::vector<ControlBounds> cb(inst.aircraft.size(), bounds);
  SolveParams p = params;
  p.bounds = bounds;
  p.events = events;
  p.label = rec.id;

  const auto t0 = std::chrono::steady_clock::now();
  const Partition part = preprocess(inst.aircraft, cb, inst.d);
  rec.preprocess_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const double pairs = static_cast<double>(std::max<std::size_t>(1, part.all.size()));
  rec.pf_pct = 100.0 * static_cast<double>(part.conflict_free.size()) / pairs;
  rec.pi_pct = 100.0 * static_cast<double>(part.non_separable.size()) / pairs;
  rec.n_c = count_conflicts(inst);

  if (suite.solve_disjunctive) rec.disj = run_one(inst, cb, p, Separation::Disjunctive);
  if (suite.solve_shadow) rec.shadow = run_one(inst, cb, p, Separation::Shadow);
  if (suite.solve_disjunctive && suite.solve_shadow) {
    rec.delta_ub = rec.shadow.ub - rec.disj.ub;
    if (!rec.disj.timeout && !rec.shadow.timeout && rec.shadow.time_s > 0.0) {
      rec.gain_pct = 100.0 * (rec.shadow.time_s - rec.disj.time_s) / rec.shadow.time_s;
    }
  }
  for (const FormulationResult* r : {&rec.disj, &rec.shadow}) {
    if (!r->status.empty() && !std::isnan(r->ub) && !r->verified) {
      rec.error = "controls failed oracle verification";
    }
  }
  return rec;
}

std::vector<BenchmarkRecord> run_suite(const SuiteSpec& suite, const SolveParams& params, const RunOptions& opts) {
  std::vector<SuiteEntry> entries = suite.entries;
  std::stable_sort(entries.begin(), entries.end(), [](const SuiteEntry& a, const SuiteEntry& b) {
    return std::tie(a.family, a.n, a.seed) < std::tie(b.family, b.n, b.seed);
  });
  std::vector<BenchmarkRecord> records(entries.size());
  if (!opts.log_dir.empty()) std::filesystem::create_directories(opts.log_dir);

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < entries.size(); k = next++) {
      const SuiteEntry& e = entries[k];
      BenchmarkRecord& rec = records[k];
      try {
        const Instance inst = generate(e.family, e.n, e.seed);
        if (opts.log_dir.empty()) {
          rec = bench_instance(inst, suite, params);
        } else {
          std::ofstream log(std::filesystem::path(opts.log_dir) / (instance_id(inst) + ".events.jsonl"));
          EventLog events(log);
          rec = bench_instance(inst, suite, params, &events);
        }
      } catch (const std::exception& ex) {
        rec = BenchmarkRecord{};
        rec.id = fmt::format("{}-{}", e.family, e.n);
        rec.error = ex.what();
      }
    }
  };
  const int n_workers = std::max(1, std::min<int>(opts.workers, static_cast<int>(entries.size())));
  std::vector<std::thread> pool;
  for (int t = 1; t < n_workers; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  return records;
}

std::string csv_header() {
  std::string s = "id,n_aircraft,n_c,pf_pct,pi_pct,preprocess_s";
  formulation_header(s, "disj");
  formulation_header(s, "shadow");
  return s + ",delta_ub,gain_pct,error";
}

std::string to_csv(const std::vector<BenchmarkRecord>& records) {
  std::string s = csv_header() + "\n";
  for (const auto& r : records) {
    s += fmt::format("{},{},{},{},{},{}", quote(r.id), r.n_aircraft, r.n_c, num(r.pf_pct), num(r.pi_pct),
                     num(r.preprocess_s));
    formulation_row(s, r.disj);
    formulation_row(s, r.shadow);
    s += fmt::format(",{},{},{}\n", num(r.delta_ub), num(r.gain_pct), quote(r.error));
  }
  return s;
}

std::vector<BenchmarkRecord> records_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != csv_header()) throw ParseError("csv: unexpected header");
  const std::size_t columns = split_csv_line(csv_header()).size();
  std::vector<BenchmarkRecord> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != columns) throw ParseError(fmt::format("csv: expected {} columns, got {}", columns, f.size()));
    BenchmarkRecord r;
    r.id = f[0];
    r.n_aircraft = parse_int(f[1]);
    r.n_c = parse_int(f[2]);
    r.pf_pct = parse_double(f[3]);
    r.pi_pct = parse_double(f[4]);
    r.preprocess_s = parse_double(f[5]);
    r.disj = formulation_from(f, 6);
    r.shadow = formulation_from(f, 14);
    r.delta_ub = parse_double(f[22]);
    r.gain_pct = parse_double(f[23]);
    r.error = f[24];
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<SweepRow> sweep_w(const Instance& inst, const std::vector<double>& ws, const SolveParams& params) {
  for (double w : ws) {
    if (!(w > 0.0 && w < 1.0)) throw std::invalid_argument(fmt::format("weight {} is outside (0, 1)", w));
  }
  std::vector<SweepRow> rows;
  for (double w : ws) {
    SolveParams p = params;
    p.w = w;
    p.label = fmt::format("{}w={}", params.label.empty() ? "" : params.label + "/", w);
    const SolveOutcome out = solve_2d(inst, p);
    SweepRow row;
    row.w = w;
    row.status = to_string(out.status);
    row.objective = out.has_incumbent() ? out.ub : kNaN;
    row.sum_q = row.sum_theta = out.has_incumbent() ? 0.0 : kNaN;
    for (const Controls& c : out.controls) {
      row.sum_q += (1.0 - c.q) * (1.0 - c.q);
      row.sum_theta += c.theta * c.theta;
    }
    rows.push_back(row);
  }
  return rows;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::string s = "w,status,objective,sum_q,sum_theta\n";
  for (const auto& r : rows) {
    s += fmt::format("{},{},{},{},{}\n", num(r.w), r.status, num(r.objective), num(r.sum_q), num(r.sum_theta));
  }
  return s;
}

}  // namespace acrp
