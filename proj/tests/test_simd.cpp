#include <vector>

#include "doctest.h"
#include "entrocurve/kernels.hpp"
#include "support.hpp"

using namespace entrocurve::simd;

namespace {

std::vector<double> random_vec(testsupport::Rng& rng, std::size_t n) {
  std::vector<double> v(n);
  for (double& x : v) x = rng.uniform(-1.0, 1.0);
  return v;
}

void check_table(const KernelTable& k, std::uint64_t seed) {
  testsupport::Rng rng(seed);
  // odd sizes exercise the vector tails
  for (std::size_t n : {1u, 3u, 4u, 7u, 17u}) {
    for (std::size_t kk : {1u, 5u, 8u, 13u}) {
      const std::size_t m = n + 2;
      const auto a = random_vec(rng, n * kk), b = random_vec(rng, kk * m);
      std::vector<double> c(n * m, 99.0);
      k.gemm(a.data(), b.data(), c.data(), n, kk, m);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < m; ++j) {
          double ref = 0.0;
          for (std::size_t l = 0; l < kk; ++l) ref += a[i * kk + l] * b[l * m + j];
          CHECK(c[i * m + j] == doctest::Approx(ref).epsilon(1e-13));
        }

      const auto x = random_vec(rng, kk);
      std::vector<double> y(n, 99.0);
      k.gemv(a.data(), x.data(), y.data(), n, kk);
      for (std::size_t i = 0; i < n; ++i) {
        double ref = 0.0;
        for (std::size_t l = 0; l < kk; ++l) ref += a[i * kk + l] * x[l];
        CHECK(y[i] == doctest::Approx(ref).epsilon(1e-13));
      }
    }
    const auto u = random_vec(rng, n), v = random_vec(rng, n);
    double ref = 0.0;
    for (std::size_t i = 0; i < n; ++i) ref += u[i] * v[i];
    CHECK(k.dot(u.data(), v.data(), n) == doctest::Approx(ref).epsilon(1e-13));
    auto w = v;
    k.axpy(0.75, u.data(), w.data(), n);
    for (std::size_t i = 0; i < n; ++i) CHECK(w[i] == doctest::Approx(v[i] + 0.75 * u[i]).epsilon(1e-15));
  }
}

}  // namespace

TEST_SUITE("simd") {

TEST_CASE("scalar kernels match naive loops") { check_table(kernels_for(Isa::Scalar), 11); }

TEST_CASE("active kernels match naive loops") {
  check_table(kernels(), 12);
  MESSAGE("active isa: " << isa_name(kernels().isa));
}

TEST_CASE("AVX2 table when available") {
  if (!isa_available(Isa::Avx2)) {
    CHECK(kernels_for(Isa::Avx2).isa == Isa::Scalar);
    return;
  }
  check_table(kernels_for(Isa::Avx2), 13);
  // the two variants agree closely on the same inputs
  testsupport::Rng rng(5);
  const auto a = random_vec(rng, 33 * 29), b = random_vec(rng, 29 * 31);
  std::vector<double> c1(33 * 31), c2(33 * 31);
  kernels_for(Isa::Scalar).gemm(a.data(), b.data(), c1.data(), 33, 29, 31);
  kernels_for(Isa::Avx2).gemm(a.data(), b.data(), c2.data(), 33, 29, 31);
  for (std::size_t i = 0; i < c1.size(); ++i) CHECK(c1[i] == doctest::Approx(c2[i]).epsilon(1e-13));
}

TEST_CASE("empty sizes are harmless") {
  const auto& k = kernels();
  double d = 1.0;
  CHECK(k.dot(&d, &d, 0) == 0.0);
  k.axpy(2.0, &d, &d, 0);
  CHECK(d == 1.0);
}

}  // TEST_SUITE
