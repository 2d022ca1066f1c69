#pragma once

// Benchmark instance generators and the instance / solution file formats.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "acrp/instance.hpp"
#include "acrp/solver2d.hpp"

namespace acrp {

struct CircleParams {
  double radius = 200.0;  ///< NM
  double speed = 500.0;   ///< NM/h
};

/// n aircraft evenly spaced on a circle, all heading to its centre.
Instance gen_cp(int n, const CircleParams& p = {});

struct RandomCircleParams {
  double radius = 200.0;
  double speed_lo = 486.0;
  double speed_hi = 594.0;
  double heading_jitter = kPi / 6.0;  ///< heading = radial + U(-jitter, +jitter)
};

/// Circle layout with random speeds and heading deviations, one random stream
/// per aircraft. Throws GenerationFailed when the layout itself is not
/// initially separated.
Instance gen_rcp(int n, std::uint64_t seed, const RandomCircleParams& p = {});

struct FlowParams {
  double axis = kPi;         ///< polar angle of the bisector of the two anchors
  double alpha = kPi / 6.0;  ///< angle between the two streams
  double spacing = 15.0;     ///< in-trail spacing, NM
  double radius = 200.0;
  double speed = 500.0;
};

/// Two streams of n_per_stream aircraft aimed at the circle centre from
/// anchors at polar angles axis - alpha/2 and axis + alpha/2. The last
/// aircraft of each stream sits on the circle; the others are ahead of it,
/// `spacing` apart, towards the crossing point.
Instance gen_fp(int n_per_stream, const FlowParams& p = {});

struct GridParams {
  double axis = 1.25 * kPi;  ///< anchors at pi and 3 pi / 2: eastbound and northbound streams
  double alpha = kPi / 2.0;
  double spacing = 15.0;
  bool trail_outside = true;  ///< in-trail aircraft behind the circle point instead of ahead of it
  double offset_x = 15.0;  ///< translation of the second flow structure, NM
  double offset_y = 15.0;
  double radius = 200.0;
  double speed = 500.0;
};

/// Two flow structures, the second translated by (offset_x, offset_y).
Instance gen_gp(int n_per_stream, const GridParams& p = {});

/// Base level uniform on 1..fl_count (one random stream per aircraft), and
/// reachable set {base - 1, base, base + 1} clipped to 1..fl_count.
Instance assign_fls(Instance inst, int fl_count, std::uint64_t seed);

/// Pairs whose nominal trajectories (q = 1, theta = 0) lose separation.
int count_conflicts(const Instance& inst);

/// Throws InitialLossOfSeparation for the first pair closer than d.
void check_initial_separation(const Instance& inst);

/// Instance by family name: "CP", "RCP", "FP" or "GP" (case-insensitive).
/// For FP and GP, n is the number of aircraft per stream.
Instance generate(const std::string& family, int n, std::uint64_t seed, int fl_count = 0);

/// Display id such as "CP-4", "FP-5" (aircraft per stream) or "RCP-30-s7".
std::string instance_id(const Instance& inst);

/// JSON in the fixed key order, floats with 17 significant digits.
std::string to_json(const Instance& inst);
/// Throws ParseError on malformed input or unknown fields.
Instance instance_from_json(const std::string& text);

Instance load_instance(const std::string& path);
void save_instance(const Instance& inst, const std::string& path);

/// Solution file contents: status, bounds and per-aircraft {q, theta_rad, fl}.
struct SolutionDoc {
  std::string status;
  double objective = 0.0;
  double lb = 0.0;
  double ub = 0.0;
  double gap = 0.0;
  std::vector<Controls> controls;
  std::vector<int> fl;  ///< empty when levels are not part of the solution
  int fl_objective = -1;  ///< level changes, -1 when not applicable
};

SolutionDoc solution_doc(const SolveOutcome& out);
std::string to_json(const SolutionDoc& doc);
/// Throws ParseError.
SolutionDoc solution_from_json(const std::string& text);

}  // namespace acrp
