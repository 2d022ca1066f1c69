#pragma once

// Closed-form pairwise separation geometry in the relative-velocity plane.
//
// For a pair (i, j) with relative initial position p = p_i - p_j and relative
// velocity v = v_i - v_j, the pair keeps a distance of at least d for all
// t >= 0 iff  g(v) >= 0  or  t_min(v) <= 0,  where
//
//   g(v)     = vx^2 (y^2 - d^2) + vy^2 (x^2 - d^2) - 2 vx vy x y
//            = (p x v)^2 - d^2 |v|^2
//   t_min(v) = -(p . v) / |v|^2.
//
// The roots of g are two lines R1, R2 through the origin. Together with the
// normal line N (v parallel to p) they give a one-binary disjunction of two
// convex wedges whose union is exactly the conflict-free set:
//
//   z = 1:  N(v) <= 0  and  L(v) <= 0
//   z = 0:  N(v) >= 0  and  U(v) >= 0
//
// with N(v) = x vy - y vx, L(v) = gamma_l vy - phi_l vx and
// U(v) = gamma_u vy - phi_u vx.

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace acrp {

inline constexpr double kPi = 3.14159265358979323846;

/// Tolerances used by every separation test in the library.
struct Tolerances {
  /// Below this relative speed (NM/h) a pair is at rest and stays separated.
  static constexpr double velocity = 1e-9;
  /// g is compared against -g_rel * d^2 * |v|^2.
  static constexpr double g_rel = 1e-6;
  /// t_min values (h) below this count as diverging.
  static constexpr double time = 1e-9;
  /// Feasibility slack for the extreme-point tests of classify_pair.
  static constexpr double lp_feasibility = 1e-8;
};

struct AircraftState {
  double x = 0.0;        ///< initial position (NM)
  double y = 0.0;        ///< initial position (NM)
  double speed = 500.0;  ///< nominal speed (NM/h), > 0
  double heading = 0.0;  ///< nominal heading (rad), in (-pi, pi]
  std::optional<int> fl;   ///< base flight level
  std::vector<int> fl_set; ///< reachable flight levels (sorted, may be empty)

  bool has_fl() const { return fl.has_value() && !fl_set.empty(); }
};

/// Per-aircraft bounds on the speed rate q and heading deviation theta.
struct ControlBounds {
  double q_lo = 0.94;
  double q_hi = 1.03;
  double theta_lo = -kPi / 6.0;
  double theta_hi = kPi / 6.0;

  /// Throws std::invalid_argument when the bounds violate
  /// 0 < q_lo <= 1 <= q_hi or theta_lo <= 0 <= theta_hi with |theta| < pi/2.
  void validate() const;
  double theta_abs_max() const;

  static ControlBounds from_percent_degrees(double speed_lo_pct, double speed_hi_pct,
                                            double heading_deg);
};

struct VelocityBox {
  double vx_lo = 0.0;
  double vx_hi = 0.0;
  double vy_lo = 0.0;
  double vy_hi = 0.0;

  std::array<std::array<double, 2>, 4> corners() const;
  bool contains(double vx, double vy, double slack = 0.0) const;
};

/// Coefficients of the line  gamma * vy - phi * vx = 0.
struct LineCoeffs {
  double gamma = 0.0;
  double phi = 0.0;

  double eval(double vx, double vy) const { return gamma * vy - phi * vx; }
  double norm() const;
};

struct PairGeometry {
  int i = -1;
  int j = -1;
  double x = 0.0;  ///< x_i - x_j (NM)
  double y = 0.0;  ///< y_i - y_j (NM)
  double d = 5.0;
  LineCoeffs p_line;  ///< P: x vx + y vy = 0, stored as gamma = y, phi = -x
  LineCoeffs n_line;  ///< N: x vy - y vx = 0
  LineCoeffs lower;   ///< R line bounding the z = 1 wedge (gamma_l, phi_l)
  LineCoeffs upper;   ///< R line bounding the z = 0 wedge (gamma_u, phi_u)
  VelocityBox box;

  double distance() const;
  /// Half-angle of the conflict cone, asin(d / |p|).
  double cone_half_angle() const;
};

enum class PairClass : std::uint8_t { ConflictFree, Separable, NonSeparable };

const char* to_string(PairClass c);

/// Relative geometry of (a, b). Root-line coefficients come from the quadratic
/// root equations of g; the box is left empty (see velocity_box).
PairGeometry relative_state(const AircraftState& a, const AircraftState& b, double d,
                            int i = 0, int j = 1);

/// All four root-line equations (gamma, phi) in the order
/// (y^2-d^2) vx - (xy + dS) vy, (y^2-d^2) vx - (xy - dS) vy,
/// (x^2-d^2) vy - (xy + dS) vx, (x^2-d^2) vy - (xy - dS) vx, with
/// S = sqrt(x^2 + y^2 - d^2). Degenerate (all-zero) equations are kept.
std::array<LineCoeffs, 4> root_line_equations(double x, double y, double d);

double g_value(const PairGeometry& pg, double vx, double vy);

/// Time of closest approach, or nullopt when |v| is below Tolerances::velocity
/// (the pair is at rest relative to each other and stays separated).
std::optional<double> t_min(const PairGeometry& pg, double vx, double vy);

/// Strict conflict test: g < 0 and t_min > 0.
bool is_conflict(const PairGeometry& pg, double vx, double vy);

/// Conflict test with the library tolerance bands: g < -g_rel d^2 |v|^2 and
/// t_min > Tolerances::time. Used to verify solver output, where optimal
/// points sit on the boundary of the conflict region.
bool is_conflict_tol(const PairGeometry& pg, double vx, double vy);

/// True if (vx, vy) satisfies one of the two disjuncts, each constraint
/// evaluated on unit-normalised coefficients with the given slack.
bool disjunctive_feasible(const PairGeometry& pg, double vx, double vy, double slack = 0.0);

/// Relative velocity of the pair for given controls.
std::array<double, 2> relative_velocity(const AircraftState& a, const AircraftState& b,
                                        double q_a, double theta_a, double q_b,
                                        double theta_b);

VelocityBox velocity_box(const AircraftState& a, const AircraftState& b,
                         const ControlBounds& cb_a, const ControlBounds& cb_b);

/// Candidate extreme points of LP(i,j): box corners, intersections of both
/// conflict-region lines with the four box edges, and the lines' intersection.
std::vector<std::array<double, 2>> lp_candidate_points(const PairGeometry& pg);

PairClass classify_pair(const PairGeometry& pg);

struct Partition {
  std::vector<std::pair<int, int>> all;
  std::vector<std::pair<int, int>> conflict_free;
  std::vector<std::pair<int, int>> separable;
  std::vector<std::pair<int, int>> non_separable;
  std::vector<PairGeometry> geometry;  ///< one per entry of `all`, same order
  std::vector<PairClass> classes;      ///< one per entry of `all`

  const PairGeometry& pair(int i, int j) const;
};

/// Classify every pair i < j. Throws InitialLossOfSeparation.
Partition preprocess(std::span<const AircraftState> aircraft,
                     std::span<const ControlBounds> bounds, double d);

/// Minimum pairwise distance over t in [0, horizon] for uniform motion under
/// the given controls, in closed form.
double min_distance_oracle(const AircraftState& a, const AircraftState& b, double q_a,
                           double theta_a, double q_b, double theta_b, double horizon);

/// Same quantity sampled every dt hours (plus the horizon endpoint), for
/// cross-checking the closed form.
double min_distance_sampled(const AircraftState& a, const AircraftState& b, double q_a,
                            double theta_a, double q_b, double theta_b, double horizon,
                            double dt);

}  // namespace acrp
