#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <set>

#include "acrp/errors.hpp"
#include "acrp/geometry.hpp"
#include "oracles.hpp"

using namespace acrp;

namespace {

PairGeometry pg_at(double x, double y, double d = 5.0) {
  AircraftState a;
  AircraftState b;
  a.x = x;
  a.y = y;
  return relative_state(a, b, d);
}

double line_angle(const LineCoeffs& l) { return std::atan2(l.phi, l.gamma); }

// Signed angle from line u to line v, folded into (-pi/2, pi/2].
double line_turn(double u, double v) {
  double t = std::remainder(v - u, kPi);
  if (t <= -kPi / 2) t += kPi;
  return t;
}

}  // namespace

TEST(RelativeState, SubtractsPositions) {
  AircraftState a;
  AircraftState b;
  b.x = 30.0;
  const PairGeometry pg = relative_state(a, b, 5.0);
  EXPECT_DOUBLE_EQ(pg.x, -30.0);
  EXPECT_DOUBLE_EQ(pg.y, 0.0);
}

TEST(RelativeState, RejectsInitialLoss) {
  AircraftState a;
  AircraftState b;
  b.x = 3.0;
  EXPECT_THROW(relative_state(a, b, 5.0), InitialLossOfSeparation);
}

TEST(RelativeState, RootLineSlopesOnAxis) {
  const PairGeometry pg = pg_at(-30.0, 0.0);
  const double expected = 5.0 / std::sqrt(875.0);
  std::vector<double> slopes;
  for (const LineCoeffs& l : {pg.lower, pg.upper}) slopes.push_back(l.phi / l.gamma);
  std::sort(slopes.begin(), slopes.end());
  EXPECT_NEAR(slopes[0], -expected, 1e-12);
  EXPECT_NEAR(slopes[1], expected, 1e-12);
}

TEST(RelativeState, RootLinesAreZerosOfG) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-60.0, 60.0);
  for (int t = 0; t < 1000; ++t) {
    const double x = u(rng);
    const double y = u(rng);
    if (std::hypot(x, y) < 5.5) continue;
    const PairGeometry pg = pg_at(x, y);
    for (const LineCoeffs& l : {pg.lower, pg.upper}) {
      const double n = l.norm();
      const double g = g_value(pg, l.gamma / n, l.phi / n);
      EXPECT_NEAR(g, 0.0, 1e-9 * (x * x + y * y));
    }
  }
}

TEST(GValue, DirectSubstitution) {
  const PairGeometry pg = pg_at(30.0, 0.0);
  EXPECT_DOUBLE_EQ(g_value(pg, 0.0, 1.0), 875.0);
  EXPECT_DOUBLE_EQ(g_value(pg, 1.0, 0.0), -25.0);
}

TEST(TMin, ClosureDivergenceAndRest) {
  const PairGeometry pg = pg_at(30.0, 0.0);
  EXPECT_DOUBLE_EQ(*t_min(pg, -1.0, 0.0), 30.0);
  EXPECT_DOUBLE_EQ(*t_min(pg, 1.0, 0.0), -30.0);
  EXPECT_FALSE(t_min(pg, 0.0, 0.0).has_value());
}

TEST(IsConflict, HeadOnAndDiverging) {
  const PairGeometry pg = pg_at(30.0, 0.0);
  EXPECT_TRUE(is_conflict(pg, -1000.0, 0.0));
  EXPECT_FALSE(is_conflict(pg, 1.0, 0.0));
  EXPECT_FALSE(is_conflict(pg, 0.0, 0.0));
}

TEST(IsConflict, AgreesWithSampledDistance) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> pos(-80.0, 80.0);
  std::uniform_real_distribution<double> vel(-1100.0, 1100.0);
  int checked = 0;
  for (int t = 0; t < 1000; ++t) {
    const double x = pos(rng);
    const double y = pos(rng);
    if (std::hypot(x, y) < 5.5) continue;
    const double vx = vel(rng);
    const double vy = vel(rng);
    const PairGeometry pg = pg_at(x, y);
    const double horizon = 3.0 * std::hypot(x, y) / std::hypot(vx, vy);
    const double dmin = oracle::min_distance(x, y, vx, vy, horizon);
    if (std::abs(dmin - 5.0) < 1e-6) continue;
    EXPECT_EQ(is_conflict(pg, vx, vy), dmin < 5.0) << x << " " << y << " " << vx << " " << vy;
    ++checked;
  }
  EXPECT_GT(checked, 900);
}

TEST(VelocityBox, ZeroForIdenticalFixedControls) {
  AircraftState a;
  AircraftState b;
  b.x = 30.0;
  const ControlBounds fixed{1.0, 1.0, 0.0, 0.0};
  const VelocityBox box = velocity_box(a, b, fixed, fixed);
  EXPECT_NEAR(box.vx_lo, 0.0, 1e-12);
  EXPECT_NEAR(box.vx_hi, 0.0, 1e-12);
  EXPECT_NEAR(box.vy_lo, 0.0, 1e-12);
  EXPECT_NEAR(box.vy_hi, 0.0, 1e-12);
}

TEST(VelocityBox, HeadOn) {
  AircraftState a;
  AircraftState b;
  b.x = 30.0;
  b.heading = kPi;
  const ControlBounds fixed{1.0, 1.0, 0.0, 0.0};
  const VelocityBox box = velocity_box(a, b, fixed, fixed);
  EXPECT_NEAR(box.vx_lo, 1000.0, 1e-9);
  EXPECT_NEAR(box.vx_hi, 1000.0, 1e-9);
  EXPECT_NEAR(box.vy_lo, 0.0, 1e-9);
  EXPECT_NEAR(box.vy_hi, 0.0, 1e-9);
}

TEST(VelocityBox, ContainsSampledVelocities) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> hd(-kPi, kPi);
  std::uniform_real_distribution<double> sp(400.0, 600.0);
  const ControlBounds cb;
  for (int pair = 0; pair < 20; ++pair) {
    AircraftState a;
    AircraftState b;
    a.heading = hd(rng);
    b.heading = hd(rng);
    a.speed = sp(rng);
    b.speed = sp(rng);
    b.x = 40.0;
    const VelocityBox box = velocity_box(a, b, cb, cb);
    std::uniform_real_distribution<double> q(cb.q_lo, cb.q_hi);
    std::uniform_real_distribution<double> th(cb.theta_lo, cb.theta_hi);
    for (int s = 0; s < 500; ++s) {
      const auto v = oracle::rel_velocity(a, b, q(rng), th(rng), q(rng), th(rng));
      ASSERT_TRUE(box.contains(v[0], v[1], 1e-9)) << v[0] << " " << v[1];
    }
  }
}

TEST(ClassifyPair, StandardBoundsLabelsConfirmedByOracle) {
  // With speed -6%/+3% and heading +/-30 deg all three pairs are separable:
  // some sampled control combinations conflict and some do not.
  const double headings[3][2] = {{2.01, 1.30}, {1.25, 1.88}, {1.04, 2.09}};
  const ControlBounds cb;
  for (const auto& h : headings) {
    const Instance inst = oracle::east_pair(h[0], h[1]);
    PairGeometry pg = relative_state(inst.aircraft[0], inst.aircraft[1], 5.0);
    pg.box = velocity_box(inst.aircraft[0], inst.aircraft[1], cb, cb);
    EXPECT_EQ(classify_pair(pg), PairClass::Separable);
    int conflicts = 0;
    int total = 0;
    for (int k = 0; k < 12; ++k) {
      for (int l = 0; l < 12; ++l) {
        const double qa = cb.q_lo + (cb.q_hi - cb.q_lo) * (k % 3) / 2.0;
        const double ta = cb.theta_lo + (cb.theta_hi - cb.theta_lo) * k / 11.0;
        const double qb = cb.q_lo + (cb.q_hi - cb.q_lo) * (l % 3) / 2.0;
        const double tb = cb.theta_lo + (cb.theta_hi - cb.theta_lo) * l / 11.0;
        const auto v = oracle::rel_velocity(inst.aircraft[0], inst.aircraft[1], qa, ta, qb, tb);
        conflicts += oracle::min_distance(-30.0, 0.0, v[0], v[1], 1.0) < 5.0 ? 1 : 0;
        ++total;
      }
    }
    EXPECT_GT(conflicts, 0);
    EXPECT_LT(conflicts, total);
  }
}

TEST(ClassifyPair, NarrowHeadingRangeReproducesAllThreeClasses) {
  const ControlBounds cb = ControlBounds::from_percent_degrees(-6.0, 3.0, 2.0);
  const double headings[3][2] = {{2.01, 1.30}, {1.25, 1.88}, {1.04, 2.09}};
  const PairClass expected[3] = {PairClass::ConflictFree, PairClass::Separable, PairClass::NonSeparable};
  for (int c = 0; c < 3; ++c) {
    const Instance inst = oracle::east_pair(headings[c][0], headings[c][1]);
    PairGeometry pg = relative_state(inst.aircraft[0], inst.aircraft[1], 5.0);
    pg.box = velocity_box(inst.aircraft[0], inst.aircraft[1], cb, cb);
    ASSERT_EQ(classify_pair(pg), expected[c]) << c;

    // 20^4 control grid checked with the closed-form distance, which is
    // cross-validated against sampling below.
    int conflicts = 0;
    const int n = 20;
    for (int i1 = 0; i1 < n; ++i1) {
      for (int i2 = 0; i2 < n; ++i2) {
        for (int i3 = 0; i3 < n; ++i3) {
          for (int i4 = 0; i4 < n; ++i4) {
            const double qa = cb.q_lo + (cb.q_hi - cb.q_lo) * i1 / (n - 1);
            const double ta = cb.theta_lo + (cb.theta_hi - cb.theta_lo) * i2 / (n - 1);
            const double qb = cb.q_lo + (cb.q_hi - cb.q_lo) * i3 / (n - 1);
            const double tb = cb.theta_lo + (cb.theta_hi - cb.theta_lo) * i4 / (n - 1);
            const double dist = min_distance_oracle(inst.aircraft[0], inst.aircraft[1], qa, ta, qb, tb, 1e6);
            conflicts += dist < 5.0 ? 1 : 0;
          }
        }
      }
    }
    if (expected[c] == PairClass::ConflictFree) EXPECT_EQ(conflicts, 0);
    if (expected[c] == PairClass::NonSeparable) EXPECT_EQ(conflicts, n * n * n * n);
    if (expected[c] == PairClass::Separable) {
      EXPECT_GT(conflicts, 0);
      EXPECT_LT(conflicts, n * n * n * n);
    }
  }
}

TEST(ClassifyPair, NonSeparableImpliesAllCornersConflict) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> hd(-kPi, kPi);
  std::uniform_real_distribution<double> pos(-40.0, 40.0);
  const ControlBounds cb = ControlBounds::from_percent_degrees(-6.0, 3.0, 5.0);
  int nonsep = 0;
  for (int t = 0; t < 4000; ++t) {
    AircraftState a;
    AircraftState b;
    a.x = pos(rng);
    a.y = pos(rng);
    a.heading = hd(rng);
    b.heading = hd(rng);
    if (std::hypot(a.x, a.y) < 5.5) continue;
    PairGeometry pg = relative_state(a, b, 5.0);
    pg.box = velocity_box(a, b, cb, cb);
    if (classify_pair(pg) != PairClass::NonSeparable) continue;
    ++nonsep;
    for (const auto& c : pg.box.corners()) EXPECT_TRUE(is_conflict(pg, c[0], c[1]));
  }
  EXPECT_GT(nonsep, 0);
}

TEST(ClassifyPair, ParallelSameHeadingIsConflictFree) {
  AircraftState a;
  AircraftState b;
  a.y = 20.0;
  const ControlBounds cb;
  PairGeometry pg = relative_state(a, b, 5.0);
  pg.box = velocity_box(a, b, cb, cb);
  EXPECT_NE(classify_pair(pg), PairClass::NonSeparable);
  const ControlBounds fixed{1.0, 1.0, 0.0, 0.0};
  pg.box = velocity_box(a, b, fixed, fixed);
  EXPECT_EQ(classify_pair(pg), PairClass::ConflictFree);
}

TEST(Preprocess, IsAPartition) {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> hd(-kPi, kPi);
  std::uniform_real_distribution<double> pos(-100.0, 100.0);
  for (int t = 0; t < 20; ++t) {
    std::vector<AircraftState> ac;
    while (ac.size() < 8) {
      AircraftState s;
      s.x = pos(rng);
      s.y = pos(rng);
      s.heading = hd(rng);
      bool ok = true;
      for (const auto& o : ac) ok = ok && std::hypot(o.x - s.x, o.y - s.y) > 6.0;
      if (ok) ac.push_back(s);
    }
    const std::vector<ControlBounds> cb(ac.size());
    const Partition p = preprocess(ac, cb, 5.0);
    EXPECT_EQ(p.all.size(), 28u);
    EXPECT_EQ(p.conflict_free.size() + p.separable.size() + p.non_separable.size(), p.all.size());
    std::set<std::pair<int, int>> seen;
    for (const auto* set : {&p.conflict_free, &p.separable, &p.non_separable}) {
      for (const auto& pr : *set) EXPECT_TRUE(seen.insert(pr).second);
    }
    EXPECT_EQ(seen.size(), p.all.size());
  }
}

TEST(Preprocess, PropagatesInitialLoss) {
  std::vector<AircraftState> ac(3);
  ac[1].x = 50.0;
  ac[2].x = 52.0;
  const std::vector<ControlBounds> cb(3);
  try {
    preprocess(ac, cb, 5.0);
    FAIL();
  } catch (const InitialLossOfSeparation& e) {
    EXPECT_EQ(e.i(), 1);
    EXPECT_EQ(e.j(), 2);
  }
}

TEST(MinDistance, ClosedFormExamples) {
  AircraftState a;
  AircraftState b;
  b.x = 30.0;
  b.heading = kPi;
  EXPECT_NEAR(min_distance_oracle(a, b, 1, 0, 1, 0, 10.0), 0.0, 1e-9);
  b.heading = 0.0;
  EXPECT_NEAR(min_distance_oracle(a, b, 1, 0, 1, 0, 10.0), 30.0, 1e-12);
}

TEST(MinDistance, ClosedFormMatchesSampling) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> hd(-kPi, kPi);
  std::uniform_real_distribution<double> pos(-60.0, 60.0);
  for (int t = 0; t < 500; ++t) {
    AircraftState a;
    AircraftState b;
    a.x = pos(rng);
    a.y = pos(rng);
    a.heading = hd(rng);
    b.heading = hd(rng);
    const double closed = min_distance_oracle(a, b, 1.0, 0.1, 0.97, -0.2, 0.5);
    const double sampled = min_distance_sampled(a, b, 1.0, 0.1, 0.97, -0.2, 0.5, 1e-4);
    const auto v = oracle::rel_velocity(a, b, 1.0, 0.1, 0.97, -0.2);
    const double ref = oracle::min_distance(a.x - b.x, a.y - b.y, v[0], v[1], 0.5);
    EXPECT_NEAR(closed, ref, 1e-6);
    EXPECT_GE(sampled, closed - 1e-9);
    EXPECT_NEAR(sampled, closed, 0.1);
  }
}

TEST(RootLines, NormalLineBisectsRootLines) {
  std::mt19937_64 rng(19);
  std::uniform_real_distribution<double> pos(-100.0, 100.0);
  std::uniform_real_distribution<double> dd(1.0, 10.0);
  for (int t = 0; t < 1000; ++t) {
    const double d = dd(rng);
    const double x = pos(rng);
    const double y = pos(rng);
    if (std::hypot(x, y) < 1.01 * d) continue;
    const PairGeometry pg = pg_at(x, y, d);
    const double n = line_angle(pg.n_line);
    const double a = line_turn(line_angle(pg.lower), n);
    const double b = line_turn(n, line_angle(pg.upper));
    EXPECT_NEAR(std::abs(a), std::abs(b), 1e-9);
    EXPECT_NEAR(a, b, 1e-9);  // same turning direction: N lies between them
  }
}

TEST(RootLines, GNonPositiveOnNormalLine) {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> pos(-100.0, 100.0);
  std::uniform_real_distribution<double> s(-1200.0, 1200.0);
  for (int t = 0; t < 1000; ++t) {
    const double x = pos(rng);
    const double y = pos(rng);
    if (std::hypot(x, y) < 5.5) continue;
    const PairGeometry pg = pg_at(x, y);
    const double n = pg.n_line.norm();
    for (int k = 0; k < 100; ++k) {
      const double m = s(rng);
      const double vx = m * pg.n_line.gamma / n;
      const double vy = m * pg.n_line.phi / n;
      const double scale = (x * x + y * y) * (vx * vx + vy * vy);
      EXPECT_LE(g_value(pg, vx, vy), 1e-9 * scale);
    }
  }
}

TEST(RootLines, ConflictRegionIsConvex) {
  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> pos(-60.0, 60.0);
  std::uniform_real_distribution<double> vel(-1000.0, 1000.0);
  std::uniform_real_distribution<double> lam(0.0, 1.0);
  int pairs = 0;
  for (int t = 0; t < 400000 && pairs < 500; ++t) {
    const double x = pos(rng);
    const double y = pos(rng);
    if (std::hypot(x, y) < 5.5) continue;
    const PairGeometry pg = pg_at(x, y);
    const double ax = vel(rng), ay = vel(rng), bx = vel(rng), by = vel(rng);
    if (!is_conflict(pg, ax, ay) || !is_conflict(pg, bx, by)) continue;
    ++pairs;
    for (int k = 0; k < 10; ++k) {
      const double l = lam(rng);
      EXPECT_FALSE(disjunctive_feasible(pg, l * ax + (1 - l) * bx, l * ay + (1 - l) * by));
    }
  }
  EXPECT_GT(pairs, 100);
}
