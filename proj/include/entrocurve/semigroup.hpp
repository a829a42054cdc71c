#pragma once
// Heat kernels P_t^gamma = exp(t gamma L).
//
// The default method sums the uniformized series
//   exp(tau L) = e^{-tau S} sum_k (tau S)^k / k! M^k,   M = I + L/S >= 0,
// after scaling tau so that tau S <= 1/2, then squares back. Every term is
// nonnegative, so each entry (including the ~gamma^d entries between distant
// vertices) is obtained to relative precision. A symmetric eigendecomposition
// path is kept for comparison.

#include "entrocurve/graph_space.hpp"

namespace entrocurve {

inline constexpr double kGammaFloor = 1e-4;

enum class HeatMethod { Uniformization, Eigen };

struct HeatKernel {
  double gamma = 0.0;
  double t = 0.0;
  HeatMethod method = HeatMethod::Uniformization;
  Mat P;
  int series_terms = 0;
  int squarings = 0;
  int clamped_entries = 0;   // eigen path: tiny negative entries set to 0
  bool eigen_fallback = false;
};

HeatKernel heat_kernel(const GraphSpace& space, double gamma, double t,
                       HeatMethod method = HeatMethod::Uniformization);

// (P f)(x) = sum_y P(x,y) f(y); throws NegativeInput for negative or non-finite f.
Vec apply_kernel(const HeatKernel& kernel, const Vec& f);

// exp(tau L) f for f >= 0 without forming the matrix, same series as above.
Vec heat_action(const GraphSpace& space, double tau, const Vec& f);

}  // namespace entrocurve
