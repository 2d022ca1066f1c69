#pragma once

// Reference computations used by the tests. They deliberately avoid the
// library's closed forms: distances come from dense sampling refined by
// golden-section search, QPs from enumeration of active sets.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "acrp/geometry.hpp"
#include "acrp/instance.hpp"
#include "acrp/model.hpp"
#include "acrp/qp.hpp"

namespace oracle {

inline double dist_at(double px, double py, double vx, double vy, double t) {
  return std::hypot(px + vx * t, py + vy * t);
}

/// min over t in [0, horizon] of |p + v t|: coarse scan, then golden section
/// around the best sample.
inline double min_distance(double px, double py, double vx, double vy, double horizon) {
  const int n = 2000;
  int best = 0;
  double best_d = dist_at(px, py, vx, vy, 0.0);
  for (int k = 1; k <= n; ++k) {
    const double d = dist_at(px, py, vx, vy, horizon * k / n);
    if (d < best_d) {
      best_d = d;
      best = k;
    }
  }
  double a = horizon * std::max(0, best - 1) / n;
  double b = horizon * std::min(n, best + 1) / n;
  const double r = (std::sqrt(5.0) - 1.0) / 2.0;
  for (int it = 0; it < 200; ++it) {
    const double c = b - r * (b - a);
    const double d = a + r * (b - a);
    if (dist_at(px, py, vx, vy, c) < dist_at(px, py, vx, vy, d)) b = d;
    else a = c;
  }
  return std::min(best_d, dist_at(px, py, vx, vy, 0.5 * (a + b)));
}

/// Relative velocity of a pair under controls, straight from the kinematics.
inline std::array<double, 2> rel_velocity(const acrp::AircraftState& a, const acrp::AircraftState& b,
                                          double qa, double ta, double qb, double tb) {
  return {a.speed * qa * std::cos(a.heading + ta) - b.speed * qb * std::cos(b.heading + tb),
          a.speed * qa * std::sin(a.heading + ta) - b.speed * qb * std::sin(b.heading + tb)};
}

/// Smallest pairwise distance over all pairs for all future time, using
/// sampling; the horizon covers the time for the fastest closure to cross
/// the scene several times.
inline double instance_min_distance(const acrp::Instance& inst, const std::vector<acrp::Controls>& c) {
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < inst.size(); ++i) {
    for (int j = i + 1; j < inst.size(); ++j) {
      const auto& a = inst.aircraft[static_cast<std::size_t>(i)];
      const auto& b = inst.aircraft[static_cast<std::size_t>(j)];
      const auto v = rel_velocity(a, b, c[static_cast<std::size_t>(i)].q, c[static_cast<std::size_t>(i)].theta,
                                  c[static_cast<std::size_t>(j)].q, c[static_cast<std::size_t>(j)].theta);
      const double px = a.x - b.x;
      const double py = a.y - b.y;
      const double speed = std::hypot(v[0], v[1]);
      const double horizon = speed > 1e-12 ? 3.0 * std::hypot(px, py) / speed : 1.0;
      best = std::min(best, min_distance(px, py, v[0], v[1], horizon));
    }
  }
  return best;
}

inline double objective(const std::vector<acrp::Controls>& c, double w) {
  double s = 0.0;
  for (const auto& x : c) {
    const double dx = x.q * std::cos(x.theta);
    const double dy = x.q * std::sin(x.theta);
    s += w * dy * dy + (1.0 - w) * (1.0 - dx) * (1.0 - dx);
  }
  return s;
}

/// Optimum of a strictly convex QP with inequality rows only (A x >= b) by
/// enumerating every active subset: solve the equality KKT system, keep the
/// feasible points with non-negative multipliers, return the best.
struct BruteQp {
  bool feasible = false;
  Eigen::VectorXd x;
  double objective = std::numeric_limits<double>::infinity();
};

inline BruteQp brute_force_qp(const Eigen::MatrixXd& H, const Eigen::VectorXd& c, const Eigen::MatrixXd& A,
                              const Eigen::VectorXd& b) {
  const auto n = H.rows();
  const auto m = A.rows();
  BruteQp best;
  for (std::uint32_t mask = 0; mask < (1u << m); ++mask) {
    std::vector<int> act;
    for (int k = 0; k < m; ++k) {
      if (mask & (1u << k)) act.push_back(k);
    }
    const auto na = static_cast<Eigen::Index>(act.size());
    if (na > n) continue;
    Eigen::MatrixXd K = Eigen::MatrixXd::Zero(n + na, n + na);
    Eigen::VectorXd rhs(n + na);
    K.topLeftCorner(n, n) = H;
    rhs.head(n) = -c;
    for (Eigen::Index r = 0; r < na; ++r) {
      K.block(0, n + r, n, 1) = -A.row(act[static_cast<std::size_t>(r)]).transpose();
      K.block(n + r, 0, 1, n) = A.row(act[static_cast<std::size_t>(r)]);
      rhs(n + r) = b(act[static_cast<std::size_t>(r)]);
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(K);
    if (lu.rank() < n + na) continue;
    const Eigen::VectorXd sol = lu.solve(rhs);
    const Eigen::VectorXd x = sol.head(n);
    bool ok = true;
    for (Eigen::Index r = 0; r < na; ++r) ok = ok && sol(n + r) >= -1e-9;
    for (Eigen::Index k = 0; k < m && ok; ++k) ok = A.row(k).dot(x) >= b(k) - 1e-9;
    if (!ok) continue;
    const double f = 0.5 * x.dot(H * x) + c.dot(x);
    if (f < best.objective) {
      best.feasible = true;
      best.objective = f;
      best.x = x;
    }
  }
  return best;
}

/// Two-aircraft scene: both at 500 NM/h, i at the origin, j 30 NM east.
inline acrp::Instance east_pair(double heading_i, double heading_j) {
  acrp::Instance inst;
  inst.family = "pair";
  inst.aircraft.resize(2);
  inst.aircraft[0].heading = heading_i;
  inst.aircraft[1].x = 30.0;
  inst.aircraft[1].heading = heading_j;
  return inst;
}

}  // namespace oracle
