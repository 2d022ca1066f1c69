#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <set>
#include <sstream>

#include "acrp/errors.hpp"
#include "acrp/fl.hpp"
#include "acrp/instances.hpp"
#include "acrp/model.hpp"
#include "oracles.hpp"

using namespace acrp;

namespace {

struct Built {
  Instance inst;
  Partition part;
  std::vector<ControlBounds> cb;
};

Built prepare(const Instance& inst) {
  Built b{inst, {}, inst.bounds_per_aircraft()};
  b.part = preprocess(b.inst.aircraft, b.cb, b.inst.d);
  return b;
}

std::vector<double> nominal_point(const MixedIntegerModel& m) {
  std::vector<double> x(m.vars.size(), 0.0);
  for (std::size_t v = 0; v < m.vars.size(); ++v) {
    if (m.vars[v].tag.meaning == Meaning::DeltaX) x[v] = 1.0;
  }
  return x;
}

}  // namespace

TEST(Model, Cp4VariableCounts) {
  const Built b = prepare(gen_cp(4));
  const MixedIntegerModel m = build_2d_disjunctive(b.inst, b.part, b.cb, 0.5, true);
  EXPECT_EQ(m.count(Meaning::DeltaX) + m.count(Meaning::DeltaY), 8);
  EXPECT_EQ(m.count(Meaning::Vx) + m.count(Meaning::Vy), 12);
  EXPECT_EQ(m.num_binaries(), 6);
  EXPECT_TRUE(m.lint().empty());
}

TEST(Model, ShadowHasFourBinariesPerPair) {
  const Built b = prepare(gen_cp(5));
  const MixedIntegerModel m = build_2d_shadow(b.inst, b.part, b.cb, 0.5, true);
  EXPECT_EQ(m.count(Meaning::Sigma), 4 * 10);
  EXPECT_EQ(m.count(Meaning::Z), 0);
  EXPECT_TRUE(m.lint().empty());
}

TEST(Model, ObjectiveZeroAtNominalControls) {
  const Built b = prepare(gen_cp(6));
  for (bool shadow : {false, true}) {
    const MixedIntegerModel m = shadow ? build_2d_shadow(b.inst, b.part, b.cb, 0.3, false)
                                       : build_2d_disjunctive(b.inst, b.part, b.cb, 0.3, false);
    EXPECT_NEAR(m.objective.value(nominal_point(m)), 0.0, 1e-15);
  }
}

TEST(Model, ObjectiveTermBySubstitution) {
  EXPECT_NEAR(objective_term(0.97, 0.1, 0.5), 0.00545, 1e-15);
  Instance one;
  one.aircraft.resize(1);
  const Built b = prepare(one);
  const MixedIntegerModel m = build_2d_disjunctive(b.inst, b.part, b.cb, 0.5, true);
  std::vector<double> x(m.vars.size(), 0.0);
  x[static_cast<std::size_t>(m.require({Meaning::DeltaX, 0}))] = 0.97;
  x[static_cast<std::size_t>(m.require({Meaning::DeltaY, 0}))] = 0.1;
  EXPECT_NEAR(m.objective.value(x), 0.00545, 1e-15);
}

TEST(Model, RecoverControls) {
  const Controls c1 = recover_controls(1.0, 0.0);
  EXPECT_DOUBLE_EQ(c1.q, 1.0);
  EXPECT_DOUBLE_EQ(c1.theta, 0.0);
  const Controls c2 = recover_controls(0.94 * std::cos(kPi / 6), 0.94 * std::sin(kPi / 6));
  EXPECT_NEAR(c2.q, 0.94, 1e-15);
  EXPECT_NEAR(c2.theta, kPi / 6, 1e-15);
  EXPECT_THROW(recover_controls(0.0, 0.0), DegenerateControl);

  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> q(0.94, 1.03);
  std::uniform_real_distribution<double> th(-kPi / 6, kPi / 6);
  for (int t = 0; t < 1000; ++t) {
    const double qq = q(rng);
    const double tt = th(rng);
    const Controls c = recover_controls(qq * std::cos(tt), qq * std::sin(tt));
    EXPECT_NEAR(c.q, qq, 1e-12);
    EXPECT_NEAR(c.theta, tt, 1e-12);
  }
}

TEST(Model, DeltaBoundsFromControlBounds) {
  const DeltaBounds db = delta_bounds(ControlBounds{});
  EXPECT_NEAR(db.dx_lo, 0.94 * std::cos(kPi / 6), 1e-15);
  EXPECT_NEAR(db.dx_hi, 1.03, 1e-15);
  EXPECT_NEAR(db.dy_lo, -1.03 * 0.5, 1e-15);
  EXPECT_NEAR(db.dy_hi, 1.03 * 0.5, 1e-15);
}

TEST(Model, RelativeMotionMatchesKinematics) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> hd(-kPi, kPi);
  std::uniform_real_distribution<double> sp(450.0, 600.0);
  std::uniform_real_distribution<double> q(0.94, 1.03);
  std::uniform_real_distribution<double> th(-0.5, 0.5);
  for (int t = 0; t < 500; ++t) {
    AircraftState a;
    AircraftState b;
    a.heading = hd(rng);
    b.heading = hd(rng);
    a.speed = sp(rng);
    b.speed = sp(rng);
    const double qa = q(rng), ta = th(rng), qb = q(rng), tb = th(rng);
    const auto rows = relative_motion(a, b);
    const double d[4] = {qa * std::cos(ta), qa * std::sin(ta), qb * std::cos(tb), qb * std::sin(tb)};
    const auto ref = oracle::rel_velocity(a, b, qa, ta, qb, tb);
    for (int k = 0; k < 2; ++k) {
      const MotionRow& r = rows[static_cast<std::size_t>(k)];
      const double v = r.dxi * d[0] + r.dyi * d[1] + r.dxj * d[2] + r.dyj * d[3];
      EXPECT_NEAR(v, ref[static_cast<std::size_t>(k)], 1e-9);
    }
  }
}

TEST(Model, ShadowTangentHalfAngle) {
  AircraftState a;
  AircraftState b;
  b.x = 30.0;
  const PairGeometry pg = relative_state(a, b, 5.0);
  const ShadowAngles sa = shadow_angles(pg);
  EXPECT_NEAR(sa.half_angle, std::asin(1.0 / 6.0), 1e-15);
  EXPECT_NEAR(sa.half_angle, 0.16745, 1e-5);
  // Both tangent lines through p pass at distance d from the other aircraft.
  for (double ang : {sa.left, sa.right}) {
    const double dist = std::abs(pg.x * std::sin(ang) - pg.y * std::cos(ang));
    EXPECT_NEAR(dist, 5.0, 1e-12);
  }
}

TEST(Model, ShadowAndDisjunctiveAgreeOnRandomVelocities) {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> pos(-60.0, 60.0);
  std::uniform_real_distribution<double> vel(-1100.0, 1100.0);
  int checked = 0;
  for (int t = 0; t < 10000; ++t) {
    AircraftState a;
    AircraftState b;
    a.x = pos(rng);
    a.y = pos(rng);
    if (std::hypot(a.x, a.y) < 5.5) continue;
    const PairGeometry pg = relative_state(a, b, 5.0);
    const double vx = vel(rng);
    const double vy = vel(rng);
    const double g = g_value(pg, vx, vy);
    if (std::abs(g) < 1e-6 * 25.0 * (vx * vx + vy * vy)) continue;
    EXPECT_EQ(disjunctive_feasible(pg, vx, vy), shadow_feasible(pg, vx, vy)) << t;
    ++checked;
  }
  EXPECT_GT(checked, 9000);
}

TEST(Model, BigMsMatchBoxMaxima) {
  const Built b = prepare(gen_cp(4));
  const MixedIntegerModel m = build_2d_shadow(b.inst, b.part, b.cb, 0.5, true);
  for (const auto& ind : m.indicators) {
    double worst = 0.0;
    // Enumerate the box corners of the constraint's variables.
    const auto& terms = ind.con.terms;
    const std::size_t n = terms.size();
    for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
      double lhs = 0.0;
      for (std::size_t k = 0; k < n; ++k) {
        const Variable& v = m.vars[static_cast<std::size_t>(terms[k].var)];
        lhs += terms[k].coef * ((mask >> k) & 1u ? v.hi : v.lo);
      }
      const double viol = ind.con.sense == Sense::LessEqual ? lhs - ind.con.rhs : ind.con.rhs - lhs;
      worst = std::max(worst, viol);
    }
    EXPECT_NEAR(ind.big_m, worst, 1e-9 * (1.0 + worst));
  }
}

TEST(Model, RelaxationDropsOnlySpeedConstraints) {
  const Built b = prepare(gen_cp(5));
  for (bool shadow : {false, true}) {
    const MixedIntegerModel full = shadow ? build_2d_shadow(b.inst, b.part, b.cb, 0.5, false)
                                          : build_2d_disjunctive(b.inst, b.part, b.cb, 0.5, false);
    const MixedIntegerModel relax = shadow ? build_2d_shadow(b.inst, b.part, b.cb, 0.5, true)
                                           : build_2d_disjunctive(b.inst, b.part, b.cb, 0.5, true);
    std::set<std::string> names;
    for (const auto& c : full.linear) names.insert(c.name);
    for (const auto& c : full.indicators) names.insert(c.con.name);
    for (const auto& c : relax.linear) EXPECT_TRUE(names.count(c.name)) << c.name;
    for (const auto& c : relax.indicators) EXPECT_TRUE(names.count(c.con.name)) << c.con.name;
    EXPECT_TRUE(relax.quad.empty());
    EXPECT_EQ(full.quad.size(), 5u);
  }
}

TEST(Model, FlAssignmentRows) {
  Instance inst = gen_cp(3);
  for (auto& a : inst.aircraft) {
    a.fl = 3;
    a.fl_set = {2, 3, 4};
  }
  const MixedIntegerModel m = build_fl_assignment_model(inst, {});
  EXPECT_EQ(m.count(Meaning::Rho), 9);
  for (const auto& c : m.linear) {
    if (c.name == "fl_assign_0") {
      EXPECT_EQ(c.terms.size(), 3u);
      EXPECT_EQ(c.sense, Sense::Equal);
      EXPECT_EQ(c.rhs, 1.0);
    }
  }
  EXPECT_TRUE(m.lint().empty());
}

TEST(Model, TwoDFlModelRequiresLevels) {
  const Built b = prepare(gen_cp(3));
  EXPECT_THROW(build_2dfl_model(b.inst, b.part, b.cb, 0.5), MissingFLData);
}

TEST(Model, TwoDFlModelLinksSharedLevels) {
  Instance inst = gen_cp(3);
  for (auto& a : inst.aircraft) {
    a.fl = 3;
    a.fl_set = {2, 3, 4};
  }
  const Built b = prepare(inst);
  const MixedIntegerModel m = build_2dfl_model(b.inst, b.part, b.cb, 0.5);
  EXPECT_EQ(m.count(Meaning::Phi), 3);
  EXPECT_TRUE(m.lint().empty());
  // rho_0,3 = rho_1,3 = 1 must force phi_01 = 1: with phi = 0 the point
  // violates a linking row.
  std::vector<double> x(m.vars.size(), 0.0);
  for (std::size_t v = 0; v < m.vars.size(); ++v) {
    const VarTag& t = m.vars[v].tag;
    if (t.meaning == Meaning::DeltaX) x[v] = 1.0;
    if (t.meaning == Meaning::Rho && t.c == 3) x[v] = 1.0;
  }
  double worst = 0.0;
  for (const auto& c : m.linear) worst = std::max(worst, c.violation(x));
  EXPECT_GT(worst, 0.5);
}

TEST(Model, LpDumpListsEveryConstraint) {
  const Built b = prepare(gen_cp(4));
  const MixedIntegerModel m = build_2d_disjunctive(b.inst, b.part, b.cb, 0.5, true);
  std::ostringstream out;
  dump_lp(m, out);
  const std::string text = out.str();
  for (const auto& c : m.linear) EXPECT_NE(text.find(c.name), std::string::npos) << c.name;
  for (const auto& c : m.indicators) EXPECT_NE(text.find(c.con.name), std::string::npos) << c.con.name;
}
