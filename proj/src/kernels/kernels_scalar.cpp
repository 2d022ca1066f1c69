#include <algorithm>
#include <cmath>

#include "kernel_impl.hpp"

namespace acrp::kernels::detail {

// Scalar reference. Keep the operation order in sync with kernels_avx2.cpp.

void g_values_scalar(const double* px, const double* py, const double* vx, const double* vy,
                     double d, double* out, std::size_t n) {
  const double d2 = d * d;
  for (std::size_t k = 0; k < n; ++k) {
    const double c = px[k] * vy[k] - py[k] * vx[k];
    const double v2 = vx[k] * vx[k] + vy[k] * vy[k];
    out[k] = c * c - d2 * v2;
  }
}

void conflict_mask_scalar(const double* px, const double* py, const double* vx,
                          const double* vy, double d, double g_rel, double t_tol,
                          std::uint8_t* out, std::size_t n) {
  const double d2 = d * d;
  for (std::size_t k = 0; k < n; ++k) {
    const double c = px[k] * vy[k] - py[k] * vx[k];
    const double v2 = vx[k] * vx[k] + vy[k] * vy[k];
    const double g = c * c - d2 * v2;
    const double dot = px[k] * vx[k] + py[k] * vy[k];
    // t_min > t_tol  <=>  -dot > t_tol * v2  (v2 > 0)
    const bool moving = v2 >= kRestSpeed2;
    const bool closing = -dot > t_tol * v2;
    const bool inside = g < -(g_rel * d2) * v2;
    out[k] = (moving && closing && inside) ? 1 : 0;
  }
}

void min_distance_scalar(const double* px, const double* py, const double* vx,
                         const double* vy, double horizon, double* out, std::size_t n) {
  for (std::size_t k = 0; k < n; ++k) {
    const double v2 = vx[k] * vx[k] + vy[k] * vy[k];
    const double dot = px[k] * vx[k] + py[k] * vy[k];
    double t = v2 > 0.0 ? -dot / v2 : 0.0;
    t = std::min(std::max(t, 0.0), horizon);
    const double rx = px[k] + vx[k] * t;
    const double ry = py[k] + vy[k] * t;
    out[k] = std::sqrt(rx * rx + ry * ry);
  }
}

}  // namespace acrp::kernels::detail
