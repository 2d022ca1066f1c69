#include "acrp/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <fmt/format.h>

#include "acrp/errors.hpp"

namespace acrp {

InitialLossOfSeparation::InitialLossOfSeparation(int i, int j, double distance, double d)
    : Error(fmt::format("aircraft {} and {} are {:.6g} NM apart at t=0 (separation norm {:.6g})",
                        i, j, distance, d)),
      i_(i),
      j_(j) {}

void ControlBounds::validate() const {
  if (!(q_lo > 0.0 && q_lo <= 1.0 && q_hi >= 1.0)) {
    throw std::invalid_argument(
        fmt::format("speed-rate bounds [{}, {}] must satisfy 0 < lo <= 1 <= hi", q_lo, q_hi));
  }
  if (!(theta_lo <= 0.0 && theta_hi >= 0.0 && std::abs(theta_lo) < kPi / 2 &&
        std::abs(theta_hi) < kPi / 2)) {
    throw std::invalid_argument(fmt::format(
        "heading bounds [{}, {}] must satisfy lo <= 0 <= hi, |.| < pi/2", theta_lo, theta_hi));
  }
}

double ControlBounds::theta_abs_max() const {
  return std::max(std::abs(theta_lo), std::abs(theta_hi));
}

ControlBounds ControlBounds::from_percent_degrees(double speed_lo_pct, double speed_hi_pct,
                                                  double heading_deg) {
  ControlBounds cb;
  cb.q_lo = 1.0 + speed_lo_pct / 100.0;
  cb.q_hi = 1.0 + speed_hi_pct / 100.0;
  cb.theta_lo = -heading_deg * kPi / 180.0;
  cb.theta_hi = heading_deg * kPi / 180.0;
  cb.validate();
  return cb;
}

std::array<std::array<double, 2>, 4> VelocityBox::corners() const {
  return {{{vx_lo, vy_lo}, {vx_hi, vy_lo}, {vx_hi, vy_hi}, {vx_lo, vy_hi}}};
}

bool VelocityBox::contains(double vx, double vy, double slack) const {
  return vx >= vx_lo - slack && vx <= vx_hi + slack && vy >= vy_lo - slack &&
         vy <= vy_hi + slack;
}

double LineCoeffs::norm() const { return std::hypot(gamma, phi); }

double PairGeometry::distance() const { return std::hypot(x, y); }

double PairGeometry::cone_half_angle() const {
  return std::asin(std::min(1.0, d / distance()));
}

const char* to_string(PairClass c) {
  switch (c) {
    case PairClass::ConflictFree:
      return "conflict-free";
    case PairClass::Separable:
      return "separable";
    case PairClass::NonSeparable:
      return "non-separable";
  }
  return "?";
}

std::array<LineCoeffs, 4> root_line_equations(double x, double y, double d) {
  const double s = std::sqrt(std::max(0.0, x * x + y * y - d * d));
  const double xy = x * y;
  // a vx - b vy = 0  is stored as gamma = -b, phi = -a.
  return {{
      {-(xy + d * s), -(y * y - d * d)},
      {-(xy - d * s), -(y * y - d * d)},
      {x * x - d * d, xy + d * s},
      {x * x - d * d, xy - d * s},
  }};
}

namespace {

// Pick the root-line equation whose direction (gamma, phi) is parallel to u and
// orient it antiparallel to u, so that eval(v) = -k cross(u, v) with k > 0.
LineCoeffs select_root_line(const std::array<LineCoeffs, 4>& eqs, double ux, double uy) {
  double scale = 0.0;
  for (const auto& e : eqs) scale = std::max(scale, e.norm());
  LineCoeffs best;
  double best_align = -1.0;
  for (const auto& e : eqs) {
    const double n = e.norm();
    if (n <= 1e-12 * scale) continue;
    const double align = std::abs(e.gamma * ux + e.phi * uy) / n;
    if (align > best_align) {
      best_align = align;
      best = e;
    }
  }
  if (best.gamma * ux + best.phi * uy > 0.0) {
    best.gamma = -best.gamma;
    best.phi = -best.phi;
  }
  return best;
}

}  // namespace

PairGeometry relative_state(const AircraftState& a, const AircraftState& b, double d, int i,
                            int j) {
  PairGeometry pg;
  pg.i = i;
  pg.j = j;
  pg.x = a.x - b.x;
  pg.y = a.y - b.y;
  pg.d = d;
  const double dist = std::hypot(pg.x, pg.y);
  if (dist < d) throw InitialLossOfSeparation(i, j, dist, d);

  pg.p_line = {pg.y, -pg.x};
  pg.n_line = {pg.x, pg.y};

  const double beta = pg.cone_half_angle();
  const double cx = -pg.x / dist;
  const double cy = -pg.y / dist;
  const double cb = std::cos(beta);
  const double sb = std::sin(beta);
  // u1 = c rotated by +beta, u2 = c rotated by -beta.
  const double u1x = cx * cb - cy * sb;
  const double u1y = cx * sb + cy * cb;
  const double u2x = cx * cb + cy * sb;
  const double u2y = -cx * sb + cy * cb;

  const auto eqs = root_line_equations(pg.x, pg.y, d);
  pg.lower = select_root_line(eqs, u1x, u1y);
  pg.upper = select_root_line(eqs, u2x, u2y);
  return pg;
}

double g_value(const PairGeometry& pg, double vx, double vy) {
  const double d2 = pg.d * pg.d;
  return vx * vx * (pg.y * pg.y - d2) + vy * vy * (pg.x * pg.x - d2) -
         2.0 * vx * vy * pg.x * pg.y;
}

std::optional<double> t_min(const PairGeometry& pg, double vx, double vy) {
  const double v2 = vx * vx + vy * vy;
  if (v2 < Tolerances::velocity * Tolerances::velocity) return std::nullopt;
  return -(pg.x * vx + pg.y * vy) / v2;
}

bool is_conflict(const PairGeometry& pg, double vx, double vy) {
  const auto t = t_min(pg, vx, vy);
  if (!t) return false;
  return g_value(pg, vx, vy) < 0.0 && *t > 0.0;
}

bool is_conflict_tol(const PairGeometry& pg, double vx, double vy) {
  const auto t = t_min(pg, vx, vy);
  if (!t) return false;
  const double v2 = vx * vx + vy * vy;
  const double band = Tolerances::g_rel * pg.d * pg.d * v2;
  return g_value(pg, vx, vy) < -band && *t > Tolerances::time;
}

bool disjunctive_feasible(const PairGeometry& pg, double vx, double vy, double slack) {
  const double nn = pg.n_line.norm();
  const double nl = pg.lower.norm();
  const double nu = pg.upper.norm();
  const double n = pg.n_line.eval(vx, vy) / nn;
  const bool z1 = n <= slack && pg.lower.eval(vx, vy) / nl <= slack;
  const bool z0 = n >= -slack && pg.upper.eval(vx, vy) / nu >= -slack;
  return z1 || z0;
}

std::array<double, 2> relative_velocity(const AircraftState& a, const AircraftState& b,
                                        double q_a, double theta_a, double q_b,
                                        double theta_b) {
  const double ha = a.heading + theta_a;
  const double hb = b.heading + theta_b;
  return {q_a * a.speed * std::cos(ha) - q_b * b.speed * std::cos(hb),
          q_a * a.speed * std::sin(ha) - q_b * b.speed * std::sin(hb)};
}

namespace {

struct Interval {
  double lo;
  double hi;
};

Interval mul(Interval a, Interval b) {
  const double p[4] = {a.lo * b.lo, a.lo * b.hi, a.hi * b.lo, a.hi * b.hi};
  return {*std::min_element(p, p + 4), *std::max_element(p, p + 4)};
}

Interval scale(Interval a, double k) {
  return k >= 0 ? Interval{a.lo * k, a.hi * k} : Interval{a.hi * k, a.lo * k};
}

Interval add(Interval a, Interval b) { return {a.lo + b.lo, a.hi + b.hi}; }

// Interval enclosure of one aircraft's velocity contribution
//   q v (cos(h) cos(t) - sin(h) sin(t)),  q v (sin(h) cos(t) + cos(h) sin(t)).
std::array<Interval, 2> velocity_enclosure(const AircraftState& s, const ControlBounds& cb) {
  const Interval q{cb.q_lo * s.speed, cb.q_hi * s.speed};
  const double tmax = cb.theta_abs_max();
  const Interval cos_t{std::cos(tmax), (cb.theta_lo <= 0.0 && cb.theta_hi >= 0.0)
                                           ? 1.0
                                           : std::max(std::cos(cb.theta_lo), std::cos(cb.theta_hi))};
  const Interval sin_t{std::sin(cb.theta_lo), std::sin(cb.theta_hi)};
  const double ch = std::cos(s.heading);
  const double sh = std::sin(s.heading);
  const Interval qc = mul(q, cos_t);
  const Interval qs = mul(q, sin_t);
  return {add(scale(qc, ch), scale(qs, -sh)), add(scale(qc, sh), scale(qs, ch))};
}

}  // namespace

VelocityBox velocity_box(const AircraftState& a, const AircraftState& b,
                         const ControlBounds& cb_a, const ControlBounds& cb_b) {
  const auto ea = velocity_enclosure(a, cb_a);
  const auto eb = velocity_enclosure(b, cb_b);
  VelocityBox box;
  box.vx_lo = ea[0].lo - eb[0].hi;
  box.vx_hi = ea[0].hi - eb[0].lo;
  box.vy_lo = ea[1].lo - eb[1].hi;
  box.vy_hi = ea[1].hi - eb[1].lo;
  return box;
}

std::vector<std::array<double, 2>> lp_candidate_points(const PairGeometry& pg) {
  std::vector<std::array<double, 2>> pts;
  pts.reserve(13);
  const auto& b = pg.box;
  for (const auto& c : b.corners()) pts.push_back(c);
  for (const LineCoeffs* l : {&pg.lower, &pg.upper}) {
    // gamma vy = phi vx
    if (l->gamma != 0.0) {
      pts.push_back({b.vx_lo, l->phi * b.vx_lo / l->gamma});
      pts.push_back({b.vx_hi, l->phi * b.vx_hi / l->gamma});
    }
    if (l->phi != 0.0) {
      pts.push_back({l->gamma * b.vy_lo / l->phi, b.vy_lo});
      pts.push_back({l->gamma * b.vy_hi / l->phi, b.vy_hi});
    }
  }
  pts.push_back({0.0, 0.0});
  return pts;
}

PairClass classify_pair(const PairGeometry& pg) {
  const auto& b = pg.box;
  const double scale = std::max({1.0, std::abs(b.vx_lo), std::abs(b.vx_hi),
                                 std::abs(b.vy_lo), std::abs(b.vy_hi)});
  const double tol = Tolerances::lp_feasibility * scale;
  const double nl = pg.lower.norm();
  const double nu = pg.upper.norm();
  bool lp_feasible = false;
  for (const auto& p : lp_candidate_points(pg)) {
    if (!b.contains(p[0], p[1], tol)) continue;
    // The apex is zero relative velocity, which never conflicts.
    if (std::hypot(p[0], p[1]) < Tolerances::velocity) continue;
    if (pg.lower.eval(p[0], p[1]) / nl >= -tol && pg.upper.eval(p[0], p[1]) / nu <= tol) {
      lp_feasible = true;
      break;
    }
  }
  if (!lp_feasible) return PairClass::ConflictFree;
  int k = 0;
  for (const auto& c : b.corners()) k += is_conflict(pg, c[0], c[1]) ? 1 : 0;
  return k == 4 ? PairClass::NonSeparable : PairClass::Separable;
}

const PairGeometry& Partition::pair(int i, int j) const {
  if (i > j) std::swap(i, j);
  for (std::size_t k = 0; k < all.size(); ++k) {
    if (all[k].first == i && all[k].second == j) return geometry[k];
  }
  throw UnknownPair(fmt::format("pair ({}, {}) is not part of the instance", i, j));
}

Partition preprocess(std::span<const AircraftState> aircraft,
                     std::span<const ControlBounds> bounds, double d) {
  if (bounds.size() != aircraft.size()) {
    throw std::invalid_argument("one ControlBounds entry is required per aircraft");
  }
  Partition part;
  const int n = static_cast<int>(aircraft.size());
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      PairGeometry pg = relative_state(aircraft[i], aircraft[j], d, i, j);
      pg.box = velocity_box(aircraft[i], aircraft[j], bounds[i], bounds[j]);
      const PairClass c = classify_pair(pg);
      part.all.emplace_back(i, j);
      part.geometry.push_back(pg);
      part.classes.push_back(c);
      switch (c) {
        case PairClass::ConflictFree:
          part.conflict_free.emplace_back(i, j);
          break;
        case PairClass::Separable:
          part.separable.emplace_back(i, j);
          break;
        case PairClass::NonSeparable:
          part.non_separable.emplace_back(i, j);
          break;
      }
    }
  }
  return part;
}

double min_distance_oracle(const AircraftState& a, const AircraftState& b, double q_a,
                           double theta_a, double q_b, double theta_b, double horizon) {
  const auto v = relative_velocity(a, b, q_a, theta_a, q_b, theta_b);
  const double px = a.x - b.x;
  const double py = a.y - b.y;
  const double v2 = v[0] * v[0] + v[1] * v[1];
  double t = 0.0;
  if (v2 > 0.0) t = std::clamp(-(px * v[0] + py * v[1]) / v2, 0.0, horizon);
  return std::hypot(px + v[0] * t, py + v[1] * t);
}

double min_distance_sampled(const AircraftState& a, const AircraftState& b, double q_a,
                            double theta_a, double q_b, double theta_b, double horizon,
                            double dt) {
  if (!(dt > 0.0) || !(horizon > 0.0)) {
    throw std::invalid_argument("min_distance_sampled needs dt > 0 and horizon > 0");
  }
  const auto v = relative_velocity(a, b, q_a, theta_a, q_b, theta_b);
  const double px = a.x - b.x;
  const double py = a.y - b.y;
  double best = std::numeric_limits<double>::infinity();
  const auto steps = static_cast<long>(std::floor(horizon / dt));
  for (long k = 0; k <= steps; ++k) {
    const double t = static_cast<double>(k) * dt;
    best = std::min(best, std::hypot(px + v[0] * t, py + v[1] * t));
  }
  best = std::min(best, std::hypot(px + v[0] * horizon, py + v[1] * horizon));
  return best;
}

}  // namespace acrp
