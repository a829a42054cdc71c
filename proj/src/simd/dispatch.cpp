#include <cstdlib>
#include <cstring>

#include "entrocurve/kernels.hpp"

namespace entrocurve::simd {

bool isa_available(Isa isa) {
  switch (isa) {
    case Isa::Scalar:
      return true;
    case Isa::Avx2:
#if defined(ENTROCURVE_HAVE_AVX2) && (defined(__x86_64__) || defined(__i386__))
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
  }
  return false;
}

const KernelTable& kernels_for(Isa isa) {
#if defined(ENTROCURVE_HAVE_AVX2)
  if (isa == Isa::Avx2 && isa_available(Isa::Avx2)) return detail::kAvx2Table;
#endif
  (void)isa;
  return detail::kScalarTable;
}

const KernelTable& kernels() {
  static const KernelTable& active = [] () -> const KernelTable& {
    const char* pin = std::getenv("ENTROCURVE_SIMD");
    if (pin != nullptr && std::strcmp(pin, "scalar") == 0) return detail::kScalarTable;
    return kernels_for(Isa::Avx2);
  }();
  return active;
}

const char* isa_name(Isa isa) { return isa == Isa::Avx2 ? "avx2" : "scalar"; }

}  // namespace entrocurve::simd
