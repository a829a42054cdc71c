#pragma once
// Schrodinger system f P_1 g = h0, g P_1 f = h1 at fixed gamma, the entropic
// bridge Q_t = P_t f * P_{1-t} g * m, the coupling, and the entropy split
// H(Q_t|m) = phi(t) + psi(t) with closed-form first and second derivatives.

#include <cmath>
#include <utility>
#include <vector>

#include "entrocurve/semigroup.hpp"

namespace entrocurve {

struct MarginalPair {
  Vec nu0, nu1;
  Vec h0, h1;  // densities nu/m
};

// Validates nonnegativity and unit mass (1e-12) and forms the densities.
MarginalPair make_marginals(const GraphSpace& space, const Vec& nu0, const Vec& nu1);

struct SolveOptions {
  double tol = 1e-11;
  long max_iter = 100000;
};

struct SchrodingerSolution {
  SpacePtr space;
  MarginalPair marginals;
  double gamma = 0.0;
  Vec log_f, log_g;  // -inf off supp(nu0) / supp(nu1)
  HeatKernel P1;
  long iterations = 0;
  double residual = 0.0;  // max of both marginal residuals, mass units
  std::vector<std::pair<long, double>> residual_history;  // sampled at powers of two and the end
  int monotonicity_flags = 0;  // sweeps where the residual rose by more than 1e-13

  // std::exp per entry: Eigen's vectorized exp maps -inf to a denormal, not 0
  Vec f() const { return log_f.unaryExpr([](double v) { return std::exp(v); }); }
  Vec g() const { return log_g.unaryExpr([](double v) { return std::exp(v); }); }
  // pi(x,y) = m(x) P_1(x,y) f(x) g(y)
  Mat coupling() const;
  // forward kernel g(y) P_1(x,y) / (P_1 g)(x); rows off supp(nu0) are zero
  Mat forward_kernel() const;
};

// Log-domain IPFP. Residuals are |row/column marginal of the coupling - nu|
// measured in mass, i.e. m(x)|f(x) (P_1 g)(x) - h0(x)|.
SchrodingerSolution solve_schrodinger(SpacePtr space, double gamma, const MarginalPair& marginals,
                                      const SolveOptions& opts = {});

// Rescale f by c and g by 1/c (gauge change; the bridge is unchanged).
SchrodingerSolution regauge(const SchrodingerSolution& sol, double log_c);

// Q_t(z) = P_t f(z) P_{1-t} g(z) m(z)
Vec bridge_marginal(const SchrodingerSolution& sol, double t);

// nu_t^{gamma,x,y}(z) = P_t(x,z) P_{1-t}(z,y) / P_1(x,y)
Vec pair_bridge_gamma(const GraphSpace& space, double gamma, double t, int x, int y);

// H(q|r) = sum q log(q/r), 0 log 0 = 0, +inf if q charges a zero of r.
double relative_entropy(const Vec& q, const Vec& r);

// log P_t f and log P_{1-t} g on all of X (finite for t in (0,1)).
struct Potentials {
  Vec F, G;
  Vec Q;  // exp(F + G) m
};
Potentials schrodinger_potentials(const SchrodingerSolution& sol, double t);

std::pair<double, double> phi_psi(const SchrodingerSolution& sol, double t);
std::pair<double, double> phi_psi_d1(const SchrodingerSolution& sol, double t);
std::pair<double, double> phi_psi_d2(const SchrodingerSolution& sol, double t);

// Building blocks shared with the zero-temperature bounds.
inline double zeta_fn(double s) { return s > 0.0 ? s * std::log(s) - s + 1.0 : 1.0; }
double rho_fn(double a, double b);

}  // namespace entrocurve
