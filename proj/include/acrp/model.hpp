#pragma once

// Formulation-agnostic mixed-integer model container and the builders for the
// 2D conflict resolution models (disjunctive and shadow separation) and the
// flight-level linking constraints.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "acrp/geometry.hpp"
#include "acrp/instance.hpp"

namespace acrp {

enum class VarKind : std::uint8_t { Continuous, Binary };

/// What a variable stands for. Index fields: aircraft i for per-aircraft
/// symbols, pair (a, b) for pair symbols, and a third index for sigma (1..4),
/// rho (flight level) and segment binaries (segment number).
enum class Meaning : std::uint8_t {
  DeltaX,
  DeltaY,
  TildeDx,
  TildeDy,
  Vx,
  Vy,
  Z,
  Sigma,
  Rho,
  Phi,
  SegX,
  SegY,
  DRho,
};

const char* to_string(Meaning m);

struct VarTag {
  Meaning meaning = Meaning::DeltaX;
  int a = -1;
  int b = -1;
  int c = -1;

  bool operator==(const VarTag&) const = default;
  std::string name() const;
};

struct VarTagHash {
  std::size_t operator()(const VarTag& t) const;
};

struct Variable {
  VarKind kind = VarKind::Continuous;
  double lo = 0.0;
  double hi = 0.0;
  VarTag tag;
};

enum class Sense : std::uint8_t { LessEqual, GreaterEqual, Equal };

struct Term {
  int var = -1;
  double coef = 0.0;
};

struct LinearConstraint {
  std::vector<Term> terms;
  Sense sense = Sense::LessEqual;
  double rhs = 0.0;
  std::string name;

  double lhs(std::span<const double> x) const;
  /// Amount by which x violates the constraint (0 when satisfied).
  double violation(std::span<const double> x) const;
};

/// coef * x_i * x_j, with i <= j.
struct QuadEntry {
  int i = -1;
  int j = -1;
  double coef = 0.0;
};

/// sum(quad) + sum(lin) <= rhs, with a positive semidefinite quadratic part.
struct QuadConstraint {
  std::vector<QuadEntry> quad;
  std::vector<Term> lin;
  double rhs = 0.0;
  std::string name;

  double lhs(std::span<const double> x) const;
  double violation(std::span<const double> x) const;
};

/// `con` must hold whenever var `binary` takes `active_value`.
struct IndicatorConstraint {
  int binary = -1;
  int active_value = 1;
  LinearConstraint con;
  /// Tight big-M from the variable bounds (max over the bounds of the
  /// constraint's violation); filled in by MixedIntegerModel::compute_big_ms.
  double big_m = 0.0;
};

struct Objective {
  std::vector<QuadEntry> quad;
  std::vector<Term> lin;
  double constant = 0.0;

  double value(std::span<const double> x) const;
};

enum class Formulation : std::uint8_t { Disjunctive2D, Shadow2D, MiqpRelax, Miqcp, FlAssign };
enum class Separation : std::uint8_t { Disjunctive, Shadow };

const char* to_string(Formulation f);
const char* to_string(Separation s);

class MixedIntegerModel {
 public:
  Formulation formulation = Formulation::Disjunctive2D;
  Separation separation = Separation::Disjunctive;
  std::vector<Variable> vars;
  std::vector<LinearConstraint> linear;
  std::vector<QuadConstraint> quad;
  std::vector<IndicatorConstraint> indicators;
  Objective objective;
  /// Speed-rate and heading bounds per aircraft of the model. The nonconvex
  /// speed lower bound is never stored as a constraint; the solver reads it
  /// from here.
  std::vector<ControlBounds> controls;
  double w = 0.5;

  int add_var(VarKind kind, double lo, double hi, VarTag tag);
  /// Variable index for a tag, or -1.
  int find(const VarTag& tag) const;
  int require(const VarTag& tag) const;

  int num_binaries() const;
  int count(Meaning m) const;

  void compute_big_ms();

  /// Largest violation over bounds, integrality, linear, quadratic and
  /// indicator constraints.
  double max_violation(std::span<const double> x) const;

  /// Structural problems (empty when the model is well formed): unknown
  /// variable references, duplicate tags, non-binary indicators, binaries
  /// with bounds other than [0, 1], non-PSD quadratic forms.
  std::vector<std::string> lint() const;

 private:
  std::unordered_map<VarTag, int, VarTagHash> index_;
};

/// Relative-motion coefficients of one pair: v = sum_k coef_k * delta_k over
/// (dx_i, dy_i, dx_j, dy_j).
struct MotionRow {
  double dxi = 0.0;
  double dyi = 0.0;
  double dxj = 0.0;
  double dyj = 0.0;
};

std::array<MotionRow, 2> relative_motion(const AircraftState& a, const AircraftState& b);

/// Bounds on (delta_x, delta_y) implied by speed-rate and heading bounds.
struct DeltaBounds {
  double dx_lo, dx_hi, dy_lo, dy_hi;
};
DeltaBounds delta_bounds(const ControlBounds& cb);

/// 2D objective term of one aircraft: w dy^2 + (1 - w)(1 - dx)^2.
double objective_term(double dx, double dy, double w);

struct Controls {
  double q = 1.0;
  double theta = 0.0;
};

/// q = |delta|, theta = atan2(dy, dx). Throws DegenerateControl near zero.
Controls recover_controls(double dx, double dy);

MixedIntegerModel build_2d_disjunctive(const Instance& inst, const Partition& part,
                                       std::span<const ControlBounds> cb, double w,
                                       bool relax_speed);

/// Headings of the two tangent lines from the relative position to the disc of
/// radius d: left = tangent reached by rotating the closing direction by
/// +asin(d/|p|), right by -asin(d/|p|).
struct ShadowAngles {
  double left = 0.0;
  double right = 0.0;
  double half_angle = 0.0;
};
ShadowAngles shadow_angles(const PairGeometry& pg);

/// Four shadow half-plane systems for one pair, each as two constraints
/// a.v <= 0 on (vx, vy); used by the model builder and the equivalence tests.
struct ShadowSystem {
  std::array<std::array<std::array<double, 2>, 2>, 4> a;  ///< [sigma][row] = (ax, ay)
};
ShadowSystem shadow_system(const PairGeometry& pg);
bool shadow_feasible(const PairGeometry& pg, double vx, double vy, double slack = 0.0);

MixedIntegerModel build_2d_shadow(const Instance& inst, const Partition& part,
                                  std::span<const ControlBounds> cb, double w,
                                  bool relax_speed);

/// Lexicographic 2D+FL model: the 2D controls of build_2d_disjunctive (speed
/// upper bound kept as a quadratic constraint) plus rho/phi binaries, the
/// assignment and level-sharing rows, and for every pair of
/// fl_candidate_pairs the separation rows relaxed by M(1 - z) + M(1 - phi).
/// The objective is the FL deviation (sum of drho); the 2D deviation is the
/// second objective and is not part of the container. Throws MissingFLData.
MixedIntegerModel build_2dfl_model(const Instance& inst, const Partition& part,
                                   std::span<const ControlBounds> cb, double w);

/// Pairs that are separable or non-separable and share a reachable FL.
std::vector<std::pair<int, int>> fl_candidate_pairs(const Instance& inst, const Partition& part);

/// Human-readable LP-style dump, one constraint per line.
void dump_lp(const MixedIntegerModel& m, std::ostream& out);

}  // namespace acrp
