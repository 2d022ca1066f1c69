#pragma once

#include <string>
#include <utility>
#include <vector>

#include "acrp/instance.hpp"
#include "acrp/model.hpp"

namespace acrp {

enum class PlotMode : std::uint8_t { Trajectories, VelocityPlane };

struct PlotOptions {
  PlotMode mode = PlotMode::Trajectories;
  std::pair<int, int> pair{0, 1};  ///< velocity-plane mode only
  double width = 640.0;
  double height = 640.0;
  double horizon_h = 0.0;  ///< trajectory length in hours; 0 picks one that crosses the scene
};

/// SVG document. `controls` may be empty (nominal motion). Trajectories mode
/// draws initial positions, nominal rays (dashed) and resolved rays.
/// Velocity-plane mode draws, for the pair, the relative-velocity box, the
/// conflict wedge (id "conflict-wedge"), lines P and N, the two root lines,
/// the nominal point and the solution point (id "solution").
/// Output is byte-identical for identical inputs. Throws UnknownPair.
std::string plot_svg(const Instance& inst, const std::vector<Controls>& controls, const PlotOptions& opts = {});

}  // namespace acrp
