#include <cstdlib>
#include <string_view>

#include "polarcut/simd/kernels.hpp"

namespace polarcut::simd {

#if defined(POLARCUT_HAVE_AVX2)
const Kernels* avx2_kernels_compiled();
#endif

const Kernels* avx2_kernels() {
#if defined(POLARCUT_HAVE_AVX2)
  static const bool supported = __builtin_cpu_supports("avx2");
  return supported ? avx2_kernels_compiled() : nullptr;
#else
  return nullptr;
#endif
}

const Kernels& active() {
  static const Kernels& chosen = [&]() -> const Kernels& {
    const char* env = std::getenv("POLARCUT_SIMD");
    if (env != nullptr && std::string_view(env) == "scalar") return scalar_kernels();
    if (const Kernels* k = avx2_kernels()) return *k;
    return scalar_kernels();
  }();
  return chosen;
}

}  // namespace polarcut::simd
