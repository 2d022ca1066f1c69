#include "acrp/partition.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace acrp {

PiecewisePartition::PiecewisePartition(double lo, double hi) : knots_{lo, hi} {
  if (!(lo < hi)) throw std::invalid_argument("partition range must satisfy lo < hi");
}

Chord PiecewisePartition::chord(std::size_t k) const {
  const double a = knots_.at(k);
  const double b = knots_.at(k + 1);
  return {a, b, a + b, -a * b};
}

std::size_t PiecewisePartition::segment_of(double x) const {
  const auto it = std::lower_bound(knots_.begin() + 1, knots_.end() - 1, x);
  return static_cast<std::size_t>(it - knots_.begin()) - 1;
}

double PiecewisePartition::envelope(double x) const {
  x = std::clamp(x, knots_.front(), knots_.back());
  return chord(segment_of(x))(x);
}

bool PiecewisePartition::refine(double at, double tol) {
  if (!(at > knots_.front() + tol && at < knots_.back() - tol)) return false;
  const auto it = std::lower_bound(knots_.begin(), knots_.end(), at);
  if (std::abs(*it - at) <= tol || std::abs(*(it - 1) - at) <= tol) return false;
  knots_.insert(it, at);
  return true;
}

}  // namespace acrp
