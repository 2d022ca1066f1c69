#pragma once

// Piecewise-linear upper envelope of t = x^2 over [lo, hi]: on each segment
// [k_a, k_b] the chord t <= (k_a + k_b) x - k_a k_b.

#include <cstddef>
#include <vector>

namespace acrp {

struct Chord {
  double lo = 0.0;
  double hi = 0.0;
  double slope = 0.0;
  double intercept = 0.0;

  double operator()(double x) const { return slope * x + intercept; }
};

class PiecewisePartition {
 public:
  PiecewisePartition() = default;
  /// Single segment [lo, hi] (the McCormick chord). Requires lo < hi.
  PiecewisePartition(double lo, double hi);

  const std::vector<double>& knots() const { return knots_; }
  std::size_t num_segments() const { return knots_.size() - 1; }
  Chord chord(std::size_t k) const;
  /// Segment containing x (the lower one at a knot); x is clamped to the range.
  std::size_t segment_of(double x) const;
  /// Chord value of the segment containing x.
  double envelope(double x) const;

  /// Splits the segment containing `at`. Returns false and leaves the
  /// partition unchanged if `at` is outside (lo, hi) or within `tol` of an
  /// existing knot.
  bool refine(double at, double tol = 1e-9);

 private:
  std::vector<double> knots_;
};

}  // namespace acrp
