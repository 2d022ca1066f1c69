#include <cstdlib>
#include <cstring>

#include "kernel_impl.hpp"

namespace acrp::kernels {

const KernelTable& scalar() {
  static const KernelTable table{"scalar", detail::g_values_scalar, detail::conflict_mask_scalar,
                                 detail::min_distance_scalar};
  return table;
}

const KernelTable* avx2() {
#if defined(ACRP_HAS_AVX2)
  static const bool supported = __builtin_cpu_supports("avx2");
  static const KernelTable table{"avx2", detail::g_values_avx2, detail::conflict_mask_avx2,
                                 detail::min_distance_avx2};
  return supported ? &table : nullptr;
#else
  return nullptr;
#endif
}

const KernelTable& active() {
  static const KernelTable* chosen = [] {
    const char* env = std::getenv("ACRP_KERNELS");
    if (env != nullptr && std::strcmp(env, "scalar") == 0) return &scalar();
    const KernelTable* v = avx2();
    return v != nullptr ? v : &scalar();
  }();
  return *chosen;
}

}  // namespace acrp::kernels
