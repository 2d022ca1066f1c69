#include "acrp/solver2d.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include <fmt/format.h>

#include "acrp/errors.hpp"
#include "acrp/events.hpp"

namespace acrp {

std::vector<SpeedViolation> check_speed_violations(std::span<const double> dx,
                                                   std::span<const double> dy,
                                                   std::span<const ControlBounds> cb, double tol) {
  std::vector<SpeedViolation> out;
  for (std::size_t i = 0; i < dx.size(); ++i) {
    const double q = std::hypot(dx[i], dy[i]);
    if (q > cb[i].q_hi + tol) out.push_back({static_cast<int>(i), SpeedViolationKind::Upper, q});
    if (q < cb[i].q_lo - tol) out.push_back({static_cast<int>(i), SpeedViolationKind::Lower, q});
  }
  return out;
}

std::vector<std::string> verify_controls(const Instance& inst, std::span<const ControlBounds> cb,
                                         std::span<const Controls> controls, double tol) {
  std::vector<std::string> problems;
  const int n = inst.size();
  if (static_cast<int>(controls.size()) != n) {
    problems.push_back(fmt::format("{} controls for {} aircraft", controls.size(), n));
    return problems;
  }
  for (int i = 0; i < n; ++i) {
    const auto& c = controls[static_cast<std::size_t>(i)];
    const auto& b = cb[static_cast<std::size_t>(i)];
    if (c.q < b.q_lo - tol || c.q > b.q_hi + tol) {
      problems.push_back(fmt::format("aircraft {}: speed rate {:.9f} outside [{}, {}]", i, c.q, b.q_lo, b.q_hi));
    }
    if (c.theta < b.theta_lo - tol || c.theta > b.theta_hi + tol) {
      problems.push_back(fmt::format("aircraft {}: heading change {:.9f} outside [{}, {}]", i, c.theta, b.theta_lo, b.theta_hi));
    }
  }
  const double inf = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const auto& a = inst.aircraft[static_cast<std::size_t>(i)];
      const auto& b = inst.aircraft[static_cast<std::size_t>(j)];
      const auto& ci = controls[static_cast<std::size_t>(i)];
      const auto& cj = controls[static_cast<std::size_t>(j)];
      const double dist = min_distance_oracle(a, b, ci.q, ci.theta, cj.q, cj.theta, inf);
      if (dist < inst.d * (1.0 - tol)) {
        problems.push_back(fmt::format("pair ({}, {}): minimum distance {:.9f} below {}", i, j, dist, inst.d));
      }
    }
  }
  return problems;
}

double SolveOutcome::gap() const {
  if (!std::isfinite(ub)) return std::numeric_limits<double>::infinity();
  if (ub <= 0.0) return std::max(0.0, ub - lb);
  return std::max(0.0, (ub - lb) / ub);
}

void add_speed_upper(MixedIntegerModel& m, int aircraft) {
  const int dx = m.require({Meaning::DeltaX, aircraft});
  const int dy = m.require({Meaning::DeltaY, aircraft});
  const double q = m.controls[static_cast<std::size_t>(aircraft)].q_hi;
  m.quad.push_back({{{dx, dx, 1.0}, {dy, dy, 1.0}}, {}, q * q, fmt::format("speed_hi_{}", aircraft)});
}

namespace {

void add_axis_envelope(MixedIntegerModel& m, int aircraft, int delta, int tilde,
                       const PiecewisePartition& part, Meaning seg_meaning, const char* axis) {
  const std::size_t ns = part.num_segments();
  if (ns == 1) {
    const Chord c = part.chord(0);
    m.linear.push_back({{{tilde, 1.0}, {delta, -c.slope}}, Sense::LessEqual, c.intercept,
                        fmt::format("chord_{}_{}", axis, aircraft)});
    return;
  }
  LinearConstraint pick{{}, Sense::Equal, 1.0, fmt::format("segment_pick_{}_{}", axis, aircraft)};
  for (std::size_t k = 0; k < ns; ++k) {
    const Chord c = part.chord(k);
    const int s = m.add_var(VarKind::Binary, 0.0, 1.0, {seg_meaning, aircraft, -1, static_cast<int>(k)});
    pick.terms.push_back({s, 1.0});
    m.indicators.push_back({s, 1, {{{delta, 1.0}}, Sense::GreaterEqual, c.lo, fmt::format("segment_lo_{}_{}_{}", axis, aircraft, k)}});
    m.indicators.push_back({s, 1, {{{delta, 1.0}}, Sense::LessEqual, c.hi, fmt::format("segment_hi_{}_{}_{}", axis, aircraft, k)}});
    m.indicators.push_back({s, 1, {{{tilde, 1.0}, {delta, -c.slope}}, Sense::LessEqual, c.intercept, fmt::format("chord_{}_{}_{}", axis, aircraft, k)}});
  }
  m.linear.push_back(std::move(pick));
}

double square_lo(double lo, double hi) { return (lo <= 0.0 && hi >= 0.0) ? 0.0 : std::min(lo * lo, hi * hi); }
double square_hi(double lo, double hi) { return std::max(lo * lo, hi * hi); }

}  // namespace

void add_speed_lower_envelope(MixedIntegerModel& m, int aircraft, const PiecewisePartition& px,
                              const PiecewisePartition& py) {
  const int dx = m.require({Meaning::DeltaX, aircraft});
  const int dy = m.require({Meaning::DeltaY, aircraft});
  const auto& vx = m.vars[static_cast<std::size_t>(dx)];
  const auto& vy = m.vars[static_cast<std::size_t>(dy)];
  const double x_lo = vx.lo, x_hi = vx.hi, y_lo = vy.lo, y_hi = vy.hi;
  const int tdx = m.add_var(VarKind::Continuous, square_lo(x_lo, x_hi), square_hi(x_lo, x_hi), {Meaning::TildeDx, aircraft});
  const int tdy = m.add_var(VarKind::Continuous, square_lo(y_lo, y_hi), square_hi(y_lo, y_hi), {Meaning::TildeDy, aircraft});
  m.quad.push_back({{{dx, dx, 1.0}}, {{tdx, -1.0}}, 0.0, fmt::format("square_x_{}", aircraft)});
  m.quad.push_back({{{dy, dy, 1.0}}, {{tdy, -1.0}}, 0.0, fmt::format("square_y_{}", aircraft)});
  const double q = m.controls[static_cast<std::size_t>(aircraft)].q_lo;
  m.linear.push_back({{{tdx, 1.0}, {tdy, 1.0}}, Sense::GreaterEqual, q * q, fmt::format("speed_lo_{}", aircraft)});
  add_axis_envelope(m, aircraft, dx, tdx, px, Meaning::SegX, "x");
  add_axis_envelope(m, aircraft, dy, tdy, py, Meaning::SegY, "y");
}

namespace {

struct AircraftCuts {
  bool upper = false;
  bool lower = false;
  PiecewisePartition px;
  PiecewisePartition py;
};

MixedIntegerModel with_cuts(const MixedIntegerModel& base, const std::vector<AircraftCuts>& cuts) {
  MixedIntegerModel m = base;
  m.formulation = Formulation::Miqcp;
  for (std::size_t i = 0; i < cuts.size(); ++i) {
    if (cuts[i].upper) add_speed_upper(m, static_cast<int>(i));
    if (cuts[i].lower) add_speed_lower_envelope(m, static_cast<int>(i), cuts[i].px, cuts[i].py);
  }
  return m;
}

void read_deltas(const MixedIntegerModel& m, std::span<const double> x, std::vector<double>& dx,
                 std::vector<double>& dy) {
  const auto n = m.controls.size();
  dx.resize(n);
  dy.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    dx[i] = x[static_cast<std::size_t>(m.require({Meaning::DeltaX, static_cast<int>(i)}))];
    dy[i] = x[static_cast<std::size_t>(m.require({Meaning::DeltaY, static_cast<int>(i)}))];
  }
}

std::vector<int> read_choices(const MixedIntegerModel& m, const Partition& part, std::span<const double> x) {
  std::vector<int> out;
  for (const auto& [i, j] : part.separable) {
    if (m.separation == Separation::Disjunctive) {
      out.push_back(x[static_cast<std::size_t>(m.require({Meaning::Z, i, j}))] > 0.5 ? 1 : 0);
      continue;
    }
    int pick = 0;
    for (int k = 1; k <= 4 && pick == 0; ++k) {
      if (x[static_cast<std::size_t>(m.require({Meaning::Sigma, i, j, k}))] > 0.5) pick = k;
    }
    out.push_back(pick);
  }
  return out;
}

}  // namespace

SolveOutcome solve_2d(const Instance& inst, const SolveParams& params) {
  using clock = std::chrono::steady_clock;
  const auto t0 = clock::now();
  auto elapsed = [&] { return std::chrono::duration<double>(clock::now() - t0).count(); };
  const std::vector<ControlBounds> cb =
      params.bounds ? std::vector<ControlBounds>(inst.aircraft.size(), *params.bounds) : inst.bounds_per_aircraft();

  SolveOutcome out;
  out.partition = preprocess(inst.aircraft, cb, inst.d);
  out.preprocess_seconds = elapsed();
  const auto finish = [&](SolveStatus s) {
    out.status = s;
    out.seconds = elapsed();
    if (params.events) {
      params.events->write("solve_end", params.label, {{"lb", out.lb}, {"ub", out.ub}, {"n_i", out.n_i}, {"nodes", static_cast<double>(out.nodes)}, {"seconds", out.seconds}});
    }
    return out;
  };

  if (!out.partition.non_separable.empty()) {
    const auto [i, j] = out.partition.non_separable.front();
    out.witness = fmt::format("pair ({}, {}) cannot be separated within the control bounds", i, j);
    return finish(SolveStatus::Infeasible);
  }
  if (!(params.w > 0.0 && params.w < 1.0)) throw std::invalid_argument("preference weight w must lie in (0, 1)");
  if (out.partition.separable.empty()) {
    out.lb = out.ub = 0.0;
    out.dx.assign(inst.aircraft.size(), 1.0);
    out.dy.assign(inst.aircraft.size(), 0.0);
    out.controls.assign(inst.aircraft.size(), Controls{1.0, 0.0});
    return finish(SolveStatus::Optimal);
  }

  const MixedIntegerModel base = params.separation == Separation::Shadow
                                     ? build_2d_shadow(inst, out.partition, cb, params.w, true)
                                     : build_2d_disjunctive(inst, out.partition, cb, params.w, true);
  std::vector<AircraftCuts> cuts(inst.aircraft.size());

  auto run_bnb = [&](const MixedIntegerModel& m, double cutoff) {
    BnbOptions bo;
    bo.eps = params.eps;
    bo.time_limit = std::max(0.0, params.time_limit - elapsed());
    bo.cutoff = cutoff;
    bo.events = params.events;
    bo.label = params.label;
    BnbResult r = branch_and_bound(m, bo);
    out.nodes += r.nodes;
    out.cuts += r.cuts;
    return r;
  };
  auto adopt = [&](const MixedIntegerModel& m, std::span<const double> x, double objective) {
    read_deltas(m, x, out.dx, out.dy);
    out.controls.clear();
    for (std::size_t i = 0; i < out.dx.size(); ++i) out.controls.push_back(recover_controls(out.dx[i], out.dy[i]));
    out.choice = read_choices(m, out.partition, x);
    out.ub = objective;
  };

  BnbResult r = run_bnb(base, std::numeric_limits<double>::infinity());
  if (!r.has_incumbent()) {
    out.lb = r.lb;
    if (r.status == SolveStatus::Infeasible) out.witness = "speed-relaxed model is infeasible";
    return finish(r.status);
  }
  out.lb = r.lb;
  std::vector<double> dx;
  std::vector<double> dy;
  read_deltas(base, r.x, dx, dy);
  auto viol = check_speed_violations(dx, dy, cb);
  if (viol.empty()) {
    adopt(base, r.x, r.ub);
    return finish(r.status);
  }

  MixedIntegerModel current = base;
  std::vector<double> x = r.x;
  while (true) {
    if (auto local = local_nlp_fixed_z(base, x, inst, std::max(1.0, params.time_limit - elapsed()))) {
      if (local->objective < out.ub) {
        out.ub = local->objective;
        out.dx = local->dx;
        out.dy = local->dy;
        out.controls = local->controls;
        out.choice = read_choices(base, out.partition, x);
      }
    }
    if (params.events) params.events->write("iteration", params.label, {{"n_i", out.n_i}, {"lb", out.lb}, {"ub", out.ub}, {"violations", static_cast<double>(viol.size())}});
    if (out.has_incumbent() && out.gap() <= params.eps) return finish(SolveStatus::Optimal);
    if (elapsed() >= params.time_limit || out.n_i >= params.max_iterations) break;

    bool changed = false;
    for (const auto& v : viol) {
      auto& c = cuts[static_cast<std::size_t>(v.aircraft)];
      if (v.kind == SpeedViolationKind::Upper) {
        changed = changed || !c.upper;
        c.upper = true;
        continue;
      }
      if (!c.lower) {
        const auto& vx = base.vars[static_cast<std::size_t>(base.require({Meaning::DeltaX, v.aircraft}))];
        const auto& vy = base.vars[static_cast<std::size_t>(base.require({Meaning::DeltaY, v.aircraft}))];
        c.px = PiecewisePartition(vx.lo, vx.hi);
        c.py = PiecewisePartition(vy.lo, vy.hi);
        c.lower = true;
        changed = true;
        continue;
      }
      const auto i = static_cast<std::size_t>(v.aircraft);
      const double tx = x[static_cast<std::size_t>(current.require({Meaning::TildeDx, v.aircraft}))];
      const double ty = x[static_cast<std::size_t>(current.require({Meaning::TildeDy, v.aircraft}))];
      if (tx > dx[i] * dx[i] + 1e-9) changed = c.px.refine(dx[i]) || changed;
      if (ty > dy[i] * dy[i] + 1e-9) changed = c.py.refine(dy[i]) || changed;
    }
    if (!changed) break;  // nothing left to tighten at this point

    ++out.n_i;
    current = with_cuts(base, cuts);
    r = run_bnb(current, out.ub);
    out.lb = std::max(out.lb, std::min(r.lb, out.ub));
    if (!r.has_incumbent()) {
      if (r.status == SolveStatus::Infeasible && !out.has_incumbent()) {
        out.witness = "speed-constrained relaxation is infeasible";
        return finish(SolveStatus::Infeasible);
      }
      // No point better than the incumbent: the bound now certifies it.
      if (r.status == SolveStatus::Infeasible) return finish(SolveStatus::Optimal);
      break;
    }
    x = r.x;
    read_deltas(current, x, dx, dy);
    viol = check_speed_violations(dx, dy, cb);
    if (viol.empty()) {
      adopt(current, x, r.ub);
      out.lb = std::max(out.lb, r.lb);
      return finish(r.status == SolveStatus::TimeOut ? SolveStatus::TimeOut : SolveStatus::Optimal);
    }
  }
  if (out.has_incumbent() && out.gap() <= params.eps) return finish(SolveStatus::Optimal);
  if (elapsed() >= params.time_limit || !out.has_incumbent()) return finish(SolveStatus::TimeOut);
  return finish(SolveStatus::Feasible);
}

}  // namespace acrp
