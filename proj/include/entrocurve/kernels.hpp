#pragma once
// Dense double-precision kernels used by the heat-kernel series, the IPFP
// sweeps and the semigroup actions. Every kernel has a portable scalar
// reference; an AVX2/FMA variant is picked at runtime when the CPU has it.
// All matrices are row-major and densely packed.

#include <cstddef>

namespace entrocurve::simd {

enum class Isa { Scalar, Avx2 };

struct KernelTable {
  Isa isa;
  // c (n x m) = a (n x k) * b (k x m); c must not alias a or b.
  void (*gemm)(const double* a, const double* b, double* c, std::size_t n,
               std::size_t k, std::size_t m);
  // y (rows) = a (rows x cols) * x (cols)
  void (*gemv)(const double* a, const double* x, double* y, std::size_t rows,
               std::size_t cols);
  double (*dot)(const double* a, const double* b, std::size_t n);
  // y += alpha * x
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
};

bool isa_available(Isa isa);

// Table for a specific instruction set; falls back to scalar when the
// requested set is not compiled in or not supported by the CPU.
const KernelTable& kernels_for(Isa isa);

// Active table. Chosen once from cpuid; ENTROCURVE_SIMD=scalar in the
// environment pins the scalar path.
const KernelTable& kernels();

const char* isa_name(Isa isa);

namespace detail {
extern const KernelTable kScalarTable;
#if defined(ENTROCURVE_HAVE_AVX2)
extern const KernelTable kAvx2Table;
#endif
}  // namespace detail

}  // namespace entrocurve::simd
