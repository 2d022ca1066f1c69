#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "acrp/geometry.hpp"

namespace acrp {

struct Instance {
  std::string family;  ///< "CP", "RCP", "FP", "GP" or free-form for hand-made instances
  std::uint64_t seed = 0;
  double d = 5.0;      ///< separation norm (NM)
  ControlBounds bounds;
  std::vector<AircraftState> aircraft;

  int size() const { return static_cast<int>(aircraft.size()); }
  bool has_fl() const;
  /// One copy of `bounds` per aircraft.
  std::vector<ControlBounds> bounds_per_aircraft() const;
  /// Instance restricted to the listed aircraft, in the given order.
  Instance subset(const std::vector<int>& ids) const;
};

}  // namespace acrp
