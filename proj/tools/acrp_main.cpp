#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "acrp/bench.hpp"
#include "acrp/errors.hpp"
#include "acrp/events.hpp"
#include "acrp/fl.hpp"
#include "acrp/instances.hpp"
#include "acrp/plot.hpp"
#include "acrp/solver2d.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kError = 1;
constexpr int kInfeasible = 2;
constexpr int kTimeOut = 3;

int exit_code(acrp::SolveStatus s) {
  switch (s) {
    case acrp::SolveStatus::Infeasible: return kInfeasible;
    case acrp::SolveStatus::TimeOut: return kTimeOut;
    default: return kOk;
  }
}

void emit(const std::string& text, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw acrp::Error(fmt::format("cannot write '{}'", path));
  out << text;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw acrp::Error(fmt::format("cannot open '{}'", path));
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::pair<double, double> parse_speed_pct(const std::string& s) {
  const auto colon = s.find(':');
  if (colon == std::string::npos) throw std::invalid_argument("--speed-pct expects lo:hi, e.g. -6:3");
  return {std::stod(s.substr(0, colon)), std::stod(s.substr(colon + 1))};
}

struct SolveArgs {
  std::string instance;
  std::string out;
  std::string formulation = "disjunctive";
  double w = 0.5;
  double eps = 0.01;
  double time_limit = 600.0;
  double heading_deg = 30.0;
  std::string speed_pct = "-6:3";
  bool fl = false;
  std::string dump_lp;
  std::string events;
};

int run_solve(const SolveArgs& a, bool bounds_given) {
  const acrp::Instance inst = acrp::load_instance(a.instance);
  acrp::SolveParams p;
  p.w = a.w;
  p.eps = a.eps;
  p.time_limit = a.time_limit;
  p.separation = a.formulation == "shadow" ? acrp::Separation::Shadow : acrp::Separation::Disjunctive;
  if (bounds_given) {
    const auto [lo, hi] = parse_speed_pct(a.speed_pct);
    p.bounds = acrp::ControlBounds::from_percent_degrees(lo, hi, a.heading_deg);
  }
  std::ofstream event_file;
  std::unique_ptr<acrp::EventLog> events;
  if (!a.events.empty()) {
    event_file.open(a.events, std::ios::binary);
    events = std::make_unique<acrp::EventLog>(event_file);
    p.events = events.get();
  }
  if (!a.dump_lp.empty()) {
    const auto cb = p.bounds ? std::vector<acrp::ControlBounds>(inst.aircraft.size(), *p.bounds) : inst.bounds_per_aircraft();
    const acrp::Partition part = acrp::preprocess(inst.aircraft, cb, inst.d);
    const acrp::MixedIntegerModel m = p.separation == acrp::Separation::Shadow
                                          ? acrp::build_2d_shadow(inst, part, cb, p.w, true)
                                          : acrp::build_2d_disjunctive(inst, part, cb, p.w, true);
    std::ofstream lp(a.dump_lp, std::ios::binary);
    if (!lp) throw acrp::Error(fmt::format("cannot write '{}'", a.dump_lp));
    acrp::dump_lp(m, lp);
  }

  if (a.fl) {
    acrp::FlParams fp;
    fp.solve = p;
    fp.assignment_time_limit = a.time_limit;
    const acrp::FlSolution sol = acrp::solve_2dfl(inst, fp);
    acrp::SolutionDoc doc;
    doc.status = acrp::to_string(sol.status);
    const bool has = !sol.controls.empty();
    doc.objective = has ? sol.objective_2d : std::numeric_limits<double>::quiet_NaN();
    doc.lb = doc.ub = doc.objective;
    doc.gap = std::numeric_limits<double>::quiet_NaN();
    if (has) {
      double lb = 0.0;
      for (const auto& [level, out] : sol.per_level) lb += out.lb;
      doc.lb = lb;
      doc.gap = doc.ub > 0.0 ? (doc.ub - doc.lb) / doc.ub : 0.0;
      doc.controls = sol.controls;
      doc.fl = sol.assignment.fl;
      doc.fl_objective = sol.assignment.objective;
    }
    emit(acrp::to_json(doc), a.out);
    if (!sol.witness.empty()) std::cerr << sol.witness << "\n";
    return exit_code(sol.status);
  }

  const acrp::SolveOutcome out = acrp::solve_2d(inst, p);
  emit(acrp::to_json(acrp::solution_doc(out)), a.out);
  if (!out.witness.empty()) std::cerr << out.witness << "\n";
  return exit_code(out.status);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Aircraft conflict resolution by mixed-integer programming"};
  app.require_subcommand(1);

  auto* gen = app.add_subcommand("gen", "Generate a benchmark instance");
  std::string family;
  int n = 4;
  std::uint64_t seed = 0;
  int fl_count = 0;
  std::string gen_out;
  gen->add_option("family", family, "CP, RCP, FP or GP")->required();
  gen->add_option("--n", n, "Aircraft (CP, RCP) or aircraft per stream (FP, GP)")->required();
  gen->add_option("--seed", seed, "Random seed");
  gen->add_option("--fl-count", fl_count, "Number of flight levels (0: none)");
  gen->add_option("--out", gen_out, "Output file (default stdout)");

  auto* solve = app.add_subcommand("solve", "Solve an instance");
  SolveArgs sa;
  solve->add_option("--instance", sa.instance, "Instance JSON")->required();
  solve->add_option("--out", sa.out, "Solution JSON (default stdout)");
  solve->add_option("--formulation", sa.formulation)->check(CLI::IsMember({"disjunctive", "shadow"}));
  solve->add_option("--w", sa.w, "Preference weight in (0, 1)")->check(CLI::Range(0.0, 1.0));
  solve->add_option("--eps", sa.eps, "Relative optimality gap");
  solve->add_option("--time-limit", sa.time_limit, "Seconds");
  auto* heading_opt = solve->add_option("--heading-deg", sa.heading_deg, "Heading range +/- degrees");
  auto* speed_opt = solve->add_option("--speed-pct", sa.speed_pct, "Speed range lo:hi in percent");
  solve->add_flag("--fl", sa.fl, "Use flight-level changes");
  solve->add_option("--dump-lp", sa.dump_lp, "Write the speed-relaxed model to this file");
  solve->add_option("--events", sa.events, "JSON-lines event log");

  auto* bench = app.add_subcommand("bench", "Run a benchmark suite");
  std::string suite;
  std::string bench_out;
  std::string log_dir;
  int workers = 1;
  double bench_limit = 600.0;
  double bench_eps = 0.01;
  bench->add_option("--suite", suite, "cp, cp15, fp, gp, golden, rcp30 or smoke")->required();
  bench->add_option("--out", bench_out, "CSV output (default stdout)");
  bench->add_option("--workers", workers);
  bench->add_option("--time-limit", bench_limit, "Seconds per solve");
  bench->add_option("--eps", bench_eps);
  bench->add_option("--log-dir", log_dir, "Directory for per-instance event logs");

  auto* sweep = app.add_subcommand("sweep-w", "Solve over a range of preference weights");
  std::string sweep_instance;
  std::string sweep_out;
  std::vector<double> ws = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
  double sweep_eps = 1e-6;
  double sweep_limit = 600.0;
  sweep->add_option("--instance", sweep_instance)->required();
  sweep->add_option("--out", sweep_out, "CSV output (default stdout)");
  sweep->add_option("--w", ws, "Weights");
  sweep->add_option("--eps", sweep_eps);
  sweep->add_option("--time-limit", sweep_limit);

  auto* plot = app.add_subcommand("plot", "Render an instance or a solution as SVG");
  std::string plot_instance;
  std::string plot_solution;
  std::string mode = "trajectories";
  std::vector<int> pair = {0, 1};
  std::string plot_out;
  plot->add_option("--instance", plot_instance)->required();
  plot->add_option("--solution", plot_solution, "Solution JSON (nominal motion without it)");
  plot->add_option("--mode", mode)->check(CLI::IsMember({"trajectories", "velocity"}));
  plot->add_option("--pair", pair, "Aircraft pair for the velocity plane")->expected(2)->delimiter(',');
  plot->add_option("--out", plot_out, "SVG output (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) {
      emit(acrp::to_json(acrp::generate(family, n, seed, fl_count)), gen_out);
      return kOk;
    }
    if (*solve) return run_solve(sa, heading_opt->count() > 0 || speed_opt->count() > 0);
    if (*bench) {
      acrp::SolveParams p;
      p.time_limit = bench_limit;
      p.eps = bench_eps;
      const auto records = acrp::run_suite(acrp::named_suite(suite), p, {workers, log_dir});
      emit(acrp::to_csv(records), bench_out);
      return kOk;
    }
    if (*sweep) {
      acrp::SolveParams p;
      p.eps = sweep_eps;
      p.time_limit = sweep_limit;
      emit(acrp::sweep_csv(acrp::sweep_w(acrp::load_instance(sweep_instance), ws, p)), sweep_out);
      return kOk;
    }
    if (*plot) {
      const acrp::Instance inst = acrp::load_instance(plot_instance);
      std::vector<acrp::Controls> controls;
      if (!plot_solution.empty()) controls = acrp::solution_from_json(slurp(plot_solution)).controls;
      acrp::PlotOptions po;
      po.mode = mode == "velocity" ? acrp::PlotMode::VelocityPlane : acrp::PlotMode::Trajectories;
      po.pair = {pair[0], pair[1]};
      emit(acrp::plot_svg(inst, controls, po), plot_out);
      return kOk;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kError;
  }
  return kError;
}
