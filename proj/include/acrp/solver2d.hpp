#pragma once

// 2D conflict resolution: speed-relaxed MIQP, then constraint generation on
// the speed bounds (outer-approximation of the upper bound, piecewise chords
// of the lower bound) with a fixed-binary local solve for upper bounds.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "acrp/bnb.hpp"
#include "acrp/geometry.hpp"
#include "acrp/instance.hpp"
#include "acrp/model.hpp"
#include "acrp/partition.hpp"

namespace acrp {

class EventLog;

struct SolveParams {
  Separation separation = Separation::Disjunctive;
  double w = 0.5;
  double eps = 0.01;
  double time_limit = 600.0;  ///< seconds, wall clock
  std::optional<ControlBounds> bounds;  ///< overrides the instance bounds
  int max_iterations = 200;             ///< MIQCP rounds
  EventLog* events = nullptr;
  std::string label;
};

enum class SpeedViolationKind : std::uint8_t { Upper, Lower };

struct SpeedViolation {
  int aircraft = -1;
  SpeedViolationKind kind = SpeedViolationKind::Upper;
  double q = 0.0;  ///< |delta|
};

/// Aircraft whose |delta| leaves [q_lo, q_hi] by more than tol.
std::vector<SpeedViolation> check_speed_violations(std::span<const double> dx,
                                                   std::span<const double> dy,
                                                   std::span<const ControlBounds> cb,
                                                   double tol = 1e-6);

/// Problems found when replaying controls through the geometry: control
/// bounds (within tol) and closed-form minimum distance below d (1 - tol) for
/// any pair. Empty when the controls are a valid resolution.
std::vector<std::string> verify_controls(const Instance& inst, std::span<const ControlBounds> cb,
                                         std::span<const Controls> controls, double tol = 1e-6);

struct SolveOutcome {
  SolveStatus status = SolveStatus::Infeasible;
  double lb = -std::numeric_limits<double>::infinity();
  double ub = std::numeric_limits<double>::infinity();
  std::vector<Controls> controls;  ///< per aircraft, empty without incumbent
  std::vector<double> dx;
  std::vector<double> dy;
  /// Per separable pair (partition order): z for the disjunctive model, the
  /// first active sigma (1..4) for the shadow model.
  std::vector<int> choice;
  int n_i = 0;  ///< constraint-generation rounds after the first MIQP
  std::int64_t nodes = 0;
  int cuts = 0;
  double seconds = 0.0;
  double preprocess_seconds = 0.0;
  Partition partition;
  std::string witness;  ///< reason for Infeasible

  bool has_incumbent() const { return !controls.empty(); }
  /// (ub - lb) / ub; 0 when ub == 0.
  double gap() const;
};

/// Speed-lower-bound machinery of one aircraft: variables tdx, tdy with
/// dx^2 <= tdx, dy^2 <= tdy, tdx + tdy >= q_lo^2 and the chords of the two
/// partitions (plain rows for one segment, segment binaries otherwise).
void add_speed_lower_envelope(MixedIntegerModel& m, int aircraft, const PiecewisePartition& px,
                              const PiecewisePartition& py);
/// dx^2 + dy^2 <= q_hi^2 for one aircraft.
void add_speed_upper(MixedIntegerModel& m, int aircraft);

struct LocalSolution {
  std::vector<double> dx;
  std::vector<double> dy;
  std::vector<Controls> controls;
  double objective = 0.0;
};

/// Feasible point of the nonconvex model with every binary of `base` fixed to
/// its rounded value in `x` (a vector of `base` or of a model that extends it
/// by appending variables). Sequential convex solve with the speed lower
/// bound linearised from inside; nullopt when no feasible point is found or
/// the result fails verify_controls.
std::optional<LocalSolution> local_nlp_fixed_z(const MixedIntegerModel& base,
                                               std::span<const double> x, const Instance& inst,
                                               double time_limit = 60.0);

SolveOutcome solve_2d(const Instance& inst, const SolveParams& params = {});

}  // namespace acrp
