#pragma once

// Branch-and-bound over a MixedIntegerModel with QP node relaxations.
//
// Binaries that appear only as indicator keys form disjunction groups: a
// toggle (one binary, constraints for value 0 and/or 1) or a choice (a set of
// binaries tied by sum >= 1 or sum = 1, each keying its own constraints).
// Unfixed groups are left out of the node relaxation and branched on
// directly; every other binary is relaxed to [0, 1] with big-M rows.
// Continuous variables defined by an equality row and absent from the
// objective and quadratic constraints are substituted out before solving.
// Convex quadratic constraints enter the node QPs as outer-approximation cuts.

#include <chrono>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "acrp/model.hpp"
#include "acrp/qp.hpp"

namespace acrp {

class EventLog;

enum class SolveStatus : std::uint8_t { Optimal, Feasible, Infeasible, TimeOut };

const char* to_string(SolveStatus s);

/// Sparse row over compiled columns: sum coef * x[col] (sense) rhs.
struct CompiledRow {
  std::vector<std::pair<int, double>> coefs;
  Sense sense = Sense::LessEqual;
  double rhs = 0.0;

  double lhs(std::span<const double> x) const;
  /// Violation divided by the coefficient norm.
  double scaled_violation(std::span<const double> x) const;
};

struct CompiledQuad {
  std::vector<std::tuple<int, int, double>> quad;  ///< over compiled columns
  std::vector<std::pair<int, double>> lin;
  double rhs = 0.0;

  double lhs(std::span<const double> x) const;
  /// Gradient cut  g(x0) + grad g(x0) (x - x0) <= rhs.
  CompiledRow tangent(std::span<const double> x0) const;
};

struct DisjunctionGroup {
  enum class Kind : std::uint8_t { Toggle, Choice };
  Kind kind = Kind::Toggle;
  /// Model binaries: one for a toggle, the members for a choice.
  std::vector<int> binaries;
  /// Literal k: for a toggle, k is the binary's value; for a choice, k selects
  /// member k (which is set to 1, the rest to 0).
  std::vector<std::vector<CompiledRow>> literals;
  int num_literals() const { return static_cast<int>(literals.size()); }
};

/// Affine expression over compiled columns.
struct Affine {
  double constant = 0.0;
  std::vector<std::pair<int, double>> terms;
};

/// A MixedIntegerModel rewritten over the columns left after substitution.
struct CompiledModel {
  const MixedIntegerModel* model = nullptr;
  int num_cols = 0;
  std::vector<int> col_of_var;     ///< -1 if eliminated or group binary
  std::vector<int> var_of_col;
  std::vector<char> col_is_binary;  ///< general binary relaxed to [0, 1]
  std::vector<double> col_lo, col_hi;
  std::vector<std::optional<Affine>> eliminated;  ///< per model variable
  std::vector<int> group_of_var;                  ///< -1 unless a group binary
  std::vector<double> fixed_value;                ///< NaN unless fixed by CompileOptions
  std::vector<CompiledRow> rows;
  std::vector<CompiledQuad> quads;
  std::vector<DisjunctionGroup> groups;
  Eigen::MatrixXd H;  ///< objective 0.5 x'Hx + c'x + constant over columns
  Eigen::VectorXd c;
  double constant = 0.0;

  /// Full model vector from compiled columns and per-group literal choices
  /// (-1 leaves the group's binaries at 0).
  std::vector<double> expand(std::span<const double> cols, std::span<const int> literal) const;
};

struct CompileOptions {
  /// Model variables whose meaning is in this list are dropped together with
  /// every constraint that mentions them.
  std::vector<Meaning> drop_meanings;
  /// Fixed binary values (model variable index, value); fixed groups become
  /// plain rows.
  std::vector<std::pair<int, int>> fixed;
  bool drop_quadratic = false;
};

CompiledModel compile(const MixedIntegerModel& m, const CompileOptions& opts = {});

/// Node QP: base rows, extra rows, column bounds, objective.
QpProblem make_qp(const CompiledModel& cm, std::span<const CompiledRow> extra,
                  std::span<const double> lo, std::span<const double> hi);

struct BnbOptions {
  double eps = 0.01;          ///< relative gap
  double abs_gap = 1e-10;
  double time_limit = 600.0;  ///< seconds
  std::int64_t node_limit = -1;
  /// Objective cutoff: only solutions strictly better are of interest.
  double cutoff = std::numeric_limits<double>::infinity();
  double feasibility_tol = 1e-9;  ///< scaled row violation accepted at leaves
  double quad_tol = 1e-9;         ///< quadratic constraint violation accepted
  double integrality_tol = 1e-7;
  int max_cut_rounds = 100;
  EventLog* events = nullptr;
  std::string label;
  CompileOptions compile;
};

struct BnbResult {
  SolveStatus status = SolveStatus::Infeasible;
  std::vector<double> x;  ///< full model vector of the incumbent (empty if none)
  double lb = -std::numeric_limits<double>::infinity();
  double ub = std::numeric_limits<double>::infinity();
  std::int64_t nodes = 0;
  int cuts = 0;
  double seconds = 0.0;
  bool has_incumbent() const { return !x.empty(); }
  /// Relative gap (ub - lb) / ub, 0 when ub == 0.
  double gap() const;
};

BnbResult branch_and_bound(const MixedIntegerModel& m, const BnbOptions& opts = {});

}  // namespace acrp
