#include <chrono>
#include <cmath>

#include <fmt/format.h>

#include "acrp/solver2d.hpp"

namespace acrp {

namespace {

struct Attempt {
  std::vector<double> dx;
  std::vector<double> dy;
  double objective = std::numeric_limits<double>::infinity();
};

// Sequential convex solve from direction guesses u_i: each round solves the
// fixed-binary QP with u_i . delta_i >= q_lo (a subset of |delta_i| >= q_lo)
// and re-centres u_i on the new point.
std::optional<Attempt> sequential_solve(const MixedIntegerModel& lm, const CompileOptions& co,
                                        std::vector<double> ux, std::vector<double> uy,
                                        double deadline_s,
                                        std::chrono::steady_clock::time_point t0) {
  const int n = static_cast<int>(lm.controls.size());
  std::optional<Attempt> best;
  double prev = std::numeric_limits<double>::infinity();
  for (int round = 0; round < 30; ++round) {
    const double left = deadline_s - std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (left <= 0.0) break;
    MixedIntegerModel m = lm;
    for (int i = 0; i < n; ++i) {
      m.linear.push_back({{{m.require({Meaning::DeltaX, i}), ux[static_cast<std::size_t>(i)]},
                           {m.require({Meaning::DeltaY, i}), uy[static_cast<std::size_t>(i)]}},
                          Sense::GreaterEqual,
                          m.controls[static_cast<std::size_t>(i)].q_lo,
                          fmt::format("speed_lo_lin_{}", i)});
    }
    BnbOptions bo;
    bo.compile = co;
    bo.time_limit = left;
    bo.eps = 0.0;
    const BnbResult r = branch_and_bound(m, bo);
    if (!r.has_incumbent()) break;
    Attempt a;
    for (int i = 0; i < n; ++i) {
      const double x = r.x[static_cast<std::size_t>(m.require({Meaning::DeltaX, i}))];
      const double y = r.x[static_cast<std::size_t>(m.require({Meaning::DeltaY, i}))];
      a.dx.push_back(x);
      a.dy.push_back(y);
      const double norm = std::hypot(x, y);
      ux[static_cast<std::size_t>(i)] = x / norm;
      uy[static_cast<std::size_t>(i)] = y / norm;
    }
    a.objective = r.ub;
    best = std::move(a);
    if (std::abs(prev - r.ub) <= 1e-12 * (1.0 + std::abs(r.ub))) break;
    prev = r.ub;
  }
  return best;
}

}  // namespace

std::optional<LocalSolution> local_nlp_fixed_z(const MixedIntegerModel& base,
                                               std::span<const double> x, const Instance& inst,
                                               double time_limit) {
  const auto t0 = std::chrono::steady_clock::now();
  const int n = static_cast<int>(base.controls.size());
  MixedIntegerModel lm = base;
  lm.quad.clear();
  for (int i = 0; i < n; ++i) add_speed_upper(lm, i);

  CompileOptions co;
  co.drop_meanings = {Meaning::TildeDx, Meaning::TildeDy, Meaning::SegX, Meaning::SegY};
  for (std::size_t v = 0; v < base.vars.size(); ++v) {
    if (base.vars[v].kind == VarKind::Binary) co.fixed.emplace_back(static_cast<int>(v), x[v] > 0.5 ? 1 : 0);
  }

  // Start directions: the relaxation point, then the nominal headings.
  std::vector<double> ux(static_cast<std::size_t>(n), 1.0);
  std::vector<double> uy(static_cast<std::size_t>(n), 0.0);
  for (int i = 0; i < n; ++i) {
    const double dx = x[static_cast<std::size_t>(base.require({Meaning::DeltaX, i}))];
    const double dy = x[static_cast<std::size_t>(base.require({Meaning::DeltaY, i}))];
    const double norm = std::hypot(dx, dy);
    if (norm > 1e-9) {
      ux[static_cast<std::size_t>(i)] = dx / norm;
      uy[static_cast<std::size_t>(i)] = dy / norm;
    }
  }
  std::optional<Attempt> best = sequential_solve(lm, co, ux, uy, time_limit, t0);
  if (!best) {
    std::fill(ux.begin(), ux.end(), 1.0);
    std::fill(uy.begin(), uy.end(), 0.0);
    best = sequential_solve(lm, co, ux, uy, time_limit, t0);
  }
  if (!best) return std::nullopt;

  LocalSolution sol;
  sol.dx = best->dx;
  sol.dy = best->dy;
  for (int i = 0; i < n; ++i) {
    sol.controls.push_back(recover_controls(sol.dx[static_cast<std::size_t>(i)], sol.dy[static_cast<std::size_t>(i)]));
    sol.objective += objective_term(sol.dx[static_cast<std::size_t>(i)], sol.dy[static_cast<std::size_t>(i)], base.w);
  }
  if (!verify_controls(inst, base.controls, sol.controls).empty()) return std::nullopt;
  return sol;
}

}  // namespace acrp
