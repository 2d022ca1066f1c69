#include "acrp/fl.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <future>

#include <fmt/format.h>

#include "acrp/errors.hpp"
#include "acrp/events.hpp"

namespace acrp {

bool NonSeparableFamily::add(std::vector<int> ids) {
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  if (std::find(sets_.begin(), sets_.end(), ids) != sets_.end()) return false;
  sets_.push_back(std::move(ids));
  return true;
}

std::vector<int> common_levels(const Instance& inst, const std::vector<int>& ids) {
  if (ids.empty()) return {};
  std::vector<int> common = inst.aircraft[static_cast<std::size_t>(ids[0])].fl_set;
  std::sort(common.begin(), common.end());
  for (std::size_t k = 1; k < ids.size(); ++k) {
    std::vector<int> other = inst.aircraft[static_cast<std::size_t>(ids[k])].fl_set;
    std::sort(other.begin(), other.end());
    std::vector<int> both;
    std::set_intersection(common.begin(), common.end(), other.begin(), other.end(), std::back_inserter(both));
    common = std::move(both);
  }
  return common;
}

namespace {

void require_fl_data(const Instance& inst) {
  for (int i = 0; i < inst.size(); ++i) {
    const auto& a = inst.aircraft[static_cast<std::size_t>(i)];
    if (!a.has_fl()) throw MissingFLData(fmt::format("aircraft {} has no flight level data", i));
    if (std::find(a.fl_set.begin(), a.fl_set.end(), *a.fl) == a.fl_set.end()) {
      throw MissingFLData(fmt::format("aircraft {}: base level {} is not reachable", i, *a.fl));
    }
  }
}

std::optional<BnbResult> solve_milp(const MixedIntegerModel& m, double time_limit) {
  BnbOptions bo;
  bo.eps = 0.0;
  bo.abs_gap = 0.5;  // integer objective
  bo.time_limit = time_limit;
  BnbResult r = branch_and_bound(m, bo);
  if (!r.has_incumbent()) return std::nullopt;
  return r;
}

}  // namespace

MixedIntegerModel build_fl_assignment_model(const Instance& inst, const NonSeparableFamily& family) {
  require_fl_data(inst);
  MixedIntegerModel m;
  m.formulation = Formulation::FlAssign;
  for (int i = 0; i < inst.size(); ++i) {
    const auto& a = inst.aircraft[static_cast<std::size_t>(i)];
    const int base = *a.fl;
    LinearConstraint assign{{}, Sense::Equal, 1.0, fmt::format("fl_assign_{}", i)};
    LinearConstraint up{{}, Sense::GreaterEqual, -static_cast<double>(base), fmt::format("fl_dev_up_{}", i)};
    LinearConstraint down{{}, Sense::GreaterEqual, static_cast<double>(base), fmt::format("fl_dev_down_{}", i)};
    double max_dev = 0.0;
    for (int k : a.fl_set) {
      const int r = m.add_var(VarKind::Binary, 0.0, 1.0, {Meaning::Rho, i, k});
      assign.terms.push_back({r, 1.0});
      up.terms.push_back({r, -static_cast<double>(k)});
      down.terms.push_back({r, static_cast<double>(k)});
      max_dev = std::max(max_dev, std::abs(static_cast<double>(k - base)));
    }
    const int drho = m.add_var(VarKind::Continuous, 0.0, max_dev, {Meaning::DRho, i});
    up.terms.push_back({drho, 1.0});
    down.terms.push_back({drho, 1.0});
    m.linear.push_back(std::move(assign));
    m.linear.push_back(std::move(up));
    m.linear.push_back(std::move(down));
    m.objective.lin.push_back({drho, 1.0});
  }
  for (std::size_t s = 0; s < family.size(); ++s) {
    const auto& ids = family.sets()[s];
    for (int k : common_levels(inst, ids)) {
      LinearConstraint c{{}, Sense::LessEqual, static_cast<double>(ids.size()) - 1.0, fmt::format("fl_split_{}_{}", s, k)};
      for (int i : ids) c.terms.push_back({m.require({Meaning::Rho, i, k}), 1.0});
      m.linear.push_back(std::move(c));
    }
  }
  return m;
}

std::optional<FlAssignment> solve_fl_assignment(const Instance& inst, const NonSeparableFamily& family,
                                                double time_limit) {
  MixedIntegerModel m = build_fl_assignment_model(inst, family);
  const auto read = [&](const std::vector<double>& x) {
    FlAssignment a;
    for (int i = 0; i < inst.size(); ++i) {
      const auto& ac = inst.aircraft[static_cast<std::size_t>(i)];
      for (int k : ac.fl_set) {
        if (x[static_cast<std::size_t>(m.require({Meaning::Rho, i, k}))] > 0.5) a.fl.push_back(k);
      }
      a.objective += std::abs(a.fl.back() - *ac.fl);
    }
    return a;
  };
  if (family.empty()) {
    FlAssignment a;
    for (const auto& ac : inst.aircraft) a.fl.push_back(*ac.fl);
    return a;
  }
  const auto first = solve_milp(m, time_limit);
  if (!first) return std::nullopt;
  FlAssignment best = read(first->x);

  // Lexicographic tie-break: fix levels one aircraft at a time to the lowest
  // level that still admits an optimal assignment.
  LinearConstraint cap{{}, Sense::LessEqual, static_cast<double>(best.objective), "fl_optimal"};
  for (int i = 0; i < inst.size(); ++i) cap.terms.push_back({m.require({Meaning::DRho, i}), 1.0});
  m.linear.push_back(std::move(cap));
  for (int i = 0; i < inst.size(); ++i) {
    std::vector<int> levels = inst.aircraft[static_cast<std::size_t>(i)].fl_set;
    std::sort(levels.begin(), levels.end());
    for (int k : levels) {
      if (k > best.fl[static_cast<std::size_t>(i)]) break;
      auto& v = m.vars[static_cast<std::size_t>(m.require({Meaning::Rho, i, k}))];
      if (k == best.fl[static_cast<std::size_t>(i)]) {
        v.lo = 1.0;
        break;
      }
      v.lo = 1.0;
      if (const auto r = solve_milp(m, time_limit)) {
        best = read(r->x);
        break;
      }
      v.lo = 0.0;
    }
  }
  return best;
}

FlSolution solve_2dfl(const Instance& inst, const FlParams& params) {
  require_fl_data(inst);
  const auto t0 = std::chrono::steady_clock::now();
  FlSolution sol;
  const std::vector<ControlBounds> cb =
      params.solve.bounds ? std::vector<ControlBounds>(inst.aircraft.size(), *params.solve.bounds)
                          : inst.bounds_per_aircraft();
  const Partition part = preprocess(inst.aircraft, cb, inst.d);
  for (const auto& [i, j] : part.non_separable) {
    if (!common_levels(inst, {i, j}).empty()) sol.family.add({i, j});
  }
  auto done = [&](SolveStatus s) {
    sol.status = s;
    sol.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return sol;
  };

  for (sol.iterations = 1; sol.iterations <= params.max_iterations; ++sol.iterations) {
    const auto assignment = solve_fl_assignment(inst, sol.family, params.assignment_time_limit);
    if (!assignment) {
      sol.witness = "no level assignment separates the known non-separable sets";
      return done(SolveStatus::Infeasible);
    }
    sol.assignment = *assignment;
    sol.members.clear();
    for (int i = 0; i < inst.size(); ++i) sol.members[sol.assignment.fl[static_cast<std::size_t>(i)]].push_back(i);

    std::map<int, std::future<SolveOutcome>> jobs;
    for (const auto& [level, ids] : sol.members) {
      if (ids.size() < 2) continue;
      SolveParams p = params.solve;
      p.label = fmt::format("{}fl{}", params.solve.label.empty() ? "" : params.solve.label + "/", level);
      Instance sub = inst.subset(ids);
      jobs.emplace(level, std::async(std::launch::async, [sub = std::move(sub), p] { return solve_2d(sub, p); }));
    }
    sol.per_level.clear();
    for (auto& [level, job] : jobs) sol.per_level.emplace(level, job.get());

    bool grew = false;
    bool timed_out = false;
    for (const auto& [level, out] : sol.per_level) {
      if (out.status == SolveStatus::Infeasible) {
        grew = sol.family.add(sol.members[level]) || grew;
      } else if (!out.has_incumbent()) {
        timed_out = true;
      }
    }
    if (params.solve.events) {
      params.solve.events->write("fl_iteration", params.solve.label, {{"iteration", sol.iterations}, {"fl_objective", sol.assignment.objective}, {"family", static_cast<double>(sol.family.size())}});
    }
    if (grew) continue;
    if (timed_out) {
      sol.witness = "a per-level 2D solve ended without a feasible point";
      return done(SolveStatus::TimeOut);
    }
    bool any_infeasible = false;
    for (const auto& [level, out] : sol.per_level) any_infeasible = any_infeasible || out.status == SolveStatus::Infeasible;
    if (any_infeasible) {
      sol.witness = "an inseparable level set reappeared in the assignment";
      return done(SolveStatus::Infeasible);
    }

    sol.controls.assign(inst.aircraft.size(), Controls{1.0, 0.0});
    sol.objective_2d = 0.0;
    SolveStatus status = SolveStatus::Optimal;
    for (const auto& [level, out] : sol.per_level) {
      const auto& ids = sol.members[level];
      for (std::size_t k = 0; k < ids.size(); ++k) sol.controls[static_cast<std::size_t>(ids[k])] = out.controls[k];
      sol.objective_2d += out.ub;
      if (out.status != SolveStatus::Optimal) status = out.status;
    }
    return done(status);
  }
  sol.witness = fmt::format("no separable assignment within {} iterations", params.max_iterations);
  return done(SolveStatus::TimeOut);
}

std::vector<std::pair<int, int>> fl_conflicts(const Instance& inst, const FlSolution& sol, double tol) {
  std::vector<std::pair<int, int>> out;
  if (sol.controls.size() != inst.aircraft.size()) return out;
  const double inf = std::numeric_limits<double>::infinity();
  for (int i = 0; i < inst.size(); ++i) {
    for (int j = i + 1; j < inst.size(); ++j) {
      if (sol.assignment.fl[static_cast<std::size_t>(i)] != sol.assignment.fl[static_cast<std::size_t>(j)]) continue;
      const auto& ci = sol.controls[static_cast<std::size_t>(i)];
      const auto& cj = sol.controls[static_cast<std::size_t>(j)];
      const double dist = min_distance_oracle(inst.aircraft[static_cast<std::size_t>(i)], inst.aircraft[static_cast<std::size_t>(j)],
                                              ci.q, ci.theta, cj.q, cj.theta, inf);
      if (dist < inst.d * (1.0 - tol)) out.emplace_back(i, j);
    }
  }
  return out;
}

}  // namespace acrp
