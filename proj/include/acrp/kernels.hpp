#pragma once

// Batched separation kernels over structure-of-arrays pair data.
//
// Each kernel processes n pairs; entry k has relative position (px[k], py[k])
// and relative velocity (vx[k], vy[k]). A scalar reference implementation is
// always available; an AVX2 variant is compiled on x86-64 and picked at run
// time when the CPU supports it. Both evaluate the same expression trees in
// the same order, so results agree bit for bit.

#include <cstddef>
#include <cstdint>
#include <string_view>

namespace acrp::kernels {

struct KernelTable {
  std::string_view name;

  /// out[k] = g(v) for separation norm d.
  void (*g_values)(const double* px, const double* py, const double* vx, const double* vy,
                   double d, double* out, std::size_t n);

  /// out[k] = 1 if g < -g_rel d^2 |v|^2 and t_min > t_tol, else 0. Pairs with
  /// |v| below the rest threshold are never in conflict. g_rel = t_tol = 0
  /// gives the strict test.
  void (*conflict_mask)(const double* px, const double* py, const double* vx,
                        const double* vy, double d, double g_rel, double t_tol,
                        std::uint8_t* out, std::size_t n);

  /// out[k] = min over t in [0, horizon] of |p + v t|.
  void (*min_distance)(const double* px, const double* py, const double* vx,
                       const double* vy, double horizon, double* out, std::size_t n);
};

const KernelTable& scalar();

/// AVX2 table, or nullptr when not compiled in or not supported by the CPU.
const KernelTable* avx2();

/// Table used by the library: AVX2 when available unless the environment
/// variable ACRP_KERNELS is set to "scalar".
const KernelTable& active();

}  // namespace acrp::kernels
