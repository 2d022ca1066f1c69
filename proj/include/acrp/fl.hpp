#pragma once

// Lexicographic 2D+FL resolution: choose flight levels with the fewest level
// changes such that every level's aircraft set is 2D separable, then resolve
// each level in 2D. Level sets proven inseparable are cut from the
// assignment model and the assignment is re-solved.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "acrp/bnb.hpp"
#include "acrp/instance.hpp"
#include "acrp/model.hpp"
#include "acrp/solver2d.hpp"

namespace acrp {

/// Aircraft subsets known to be 2D non-separable, stored sorted and unique.
class NonSeparableFamily {
 public:
  /// Returns false if the set (after sorting) is already present.
  bool add(std::vector<int> ids);
  const std::vector<std::vector<int>>& sets() const { return sets_; }
  std::size_t size() const { return sets_.size(); }
  bool empty() const { return sets_.empty(); }

 private:
  std::vector<std::vector<int>> sets_;
};

/// Levels shared by every aircraft of `ids`.
std::vector<int> common_levels(const Instance& inst, const std::vector<int>& ids);

struct FlAssignment {
  std::vector<int> fl;  ///< chosen level per aircraft
  int objective = 0;    ///< sum |fl - base level|
};

/// Assignment MILP: rho binaries per reachable level, sum rho = 1, drho
/// linearising |level - base|, and for every set in the family and every
/// common level at most |set| - 1 members on it. Objective sum drho.
MixedIntegerModel build_fl_assignment_model(const Instance& inst, const NonSeparableFamily& family);

/// Optimal assignment, ties broken towards the lexicographically smallest
/// level vector. nullopt when infeasible. Throws MissingFLData.
std::optional<FlAssignment> solve_fl_assignment(const Instance& inst, const NonSeparableFamily& family,
                                                double time_limit = 600.0);

struct FlParams {
  SolveParams solve;              ///< per-level 2D solve; time_limit applies per level
  int max_iterations = 50;
  double assignment_time_limit = 600.0;
};

struct FlSolution {
  SolveStatus status = SolveStatus::Infeasible;
  FlAssignment assignment;
  std::map<int, SolveOutcome> per_level;  ///< levels with two or more aircraft
  std::map<int, std::vector<int>> members;  ///< level -> aircraft ids (original numbering)
  std::vector<Controls> controls;           ///< per aircraft (original numbering)
  double objective_2d = 0.0;                ///< sum of per-level upper bounds
  int iterations = 0;
  NonSeparableFamily family;
  std::string witness;
  double seconds = 0.0;
};

/// Throws MissingFLData when an aircraft has no level data.
FlSolution solve_2dfl(const Instance& inst, const FlParams& params = {});

/// Pairs on a common chosen level whose controls still conflict (empty when
/// the aggregated solution is valid), checked with the closed-form oracle.
std::vector<std::pair<int, int>> fl_conflicts(const Instance& inst, const FlSolution& sol,
                                              double tol = 1e-6);

}  // namespace acrp
