#pragma once

// Experiment harness: named benchmark suites solved with both 2D
// formulations, one CSV row per instance, and the preference-weight sweep.

#include <cstdint>
#include <string>
#include <vector>

#include "acrp/instance.hpp"
#include "acrp/solver2d.hpp"

namespace acrp {

struct SuiteEntry {
  std::string family;
  int n = 0;  ///< aircraft (CP, RCP) or aircraft per stream (FP, GP)
  std::uint64_t seed = 0;
};

struct SuiteSpec {
  std::string name;
  std::vector<SuiteEntry> entries;
  double heading_deg = 30.0;
  double speed_lo_pct = -6.0;
  double speed_hi_pct = 3.0;
  bool solve_disjunctive = true;
  bool solve_shadow = true;
};

/// "cp" (CP-4..8), "fp" (FP-4..6), "gp" (GP-4..5), "golden" (all three),
/// "cp15" (CP-4..8 at 15 degrees), "rcp30" (100 seeds of RCP-30 at 15
/// degrees, pre-processing only) and "smoke" (CP-4, FP-4).
/// Throws std::invalid_argument for other names.
SuiteSpec named_suite(const std::string& name);

struct FormulationResult {
  std::string status;  ///< empty when not solved
  double lb = 0.0;
  double ub = 0.0;
  double gap_pct = 0.0;
  double time_s = 0.0;
  int n_i = 0;
  bool timeout = false;
  bool verified = false;  ///< controls replayed through the distance oracle
};

struct BenchmarkRecord {
  std::string id;
  int n_aircraft = 0;
  int n_c = 0;
  double pf_pct = 0.0;  ///< conflict-free pairs, % of all pairs
  double pi_pct = 0.0;  ///< non-separable pairs, % of all pairs
  double preprocess_s = 0.0;
  FormulationResult disj;
  FormulationResult shadow;
  double delta_ub = 0.0;  ///< shadow UB - disjunctive UB, NaN unless both solved
  double gain_pct = 0.0;  ///< 100 (t_shadow - t_disj) / t_shadow, NaN on timeouts
  std::string error;      ///< per-instance failure, empty on success
};

struct RunOptions {
  int workers = 1;
  std::string log_dir;  ///< per-instance JSON-lines event logs when non-empty
};

/// Records sorted by (family, n, seed). Per-instance failures land in
/// BenchmarkRecord::error and never abort the suite.
std::vector<BenchmarkRecord> run_suite(const SuiteSpec& suite, const SolveParams& params,
                                       const RunOptions& opts = {});

/// Single-instance record with the suite's bounds.
BenchmarkRecord bench_instance(const Instance& inst, const SuiteSpec& suite, const SolveParams& params,
                               EventLog* events = nullptr);

std::string csv_header();
std::string to_csv(const std::vector<BenchmarkRecord>& records);
/// Throws ParseError.
std::vector<BenchmarkRecord> records_from_csv(const std::string& text);

struct SweepRow {
  double w = 0.0;
  std::string status;
  double objective = 0.0;
  double sum_q = 0.0;      ///< sum (1 - q_i)^2
  double sum_theta = 0.0;  ///< sum theta_i^2
};

/// One solve per weight, each w in (0, 1). Throws std::invalid_argument.
std::vector<SweepRow> sweep_w(const Instance& inst, const std::vector<double>& ws, const SolveParams& params);
std::string sweep_csv(const std::vector<SweepRow>& rows);

}  // namespace acrp
