#pragma once

#include "acrp/kernels.hpp"

namespace acrp::kernels::detail {

void g_values_scalar(const double* px, const double* py, const double* vx, const double* vy,
                     double d, double* out, std::size_t n);
void conflict_mask_scalar(const double* px, const double* py, const double* vx,
                          const double* vy, double d, double g_rel, double t_tol,
                          std::uint8_t* out, std::size_t n);
void min_distance_scalar(const double* px, const double* py, const double* vx,
                         const double* vy, double horizon, double* out, std::size_t n);

#if defined(ACRP_HAS_AVX2)
void g_values_avx2(const double* px, const double* py, const double* vx, const double* vy,
                   double d, double* out, std::size_t n);
void conflict_mask_avx2(const double* px, const double* py, const double* vx,
                        const double* vy, double d, double g_rel, double t_tol,
                        std::uint8_t* out, std::size_t n);
void min_distance_avx2(const double* px, const double* py, const double* vx,
                       const double* vy, double horizon, double* out, std::size_t n);
#endif

inline constexpr double kRestSpeed2 = 1e-18;

}  // namespace acrp::kernels::detail
