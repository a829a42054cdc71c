#pragma once
// Zero-temperature bridges. The pair bridge nu_t^{0,x,y} puts mass
// r(x,z,z,y) rho_t^{d(x,y)}(d(x,z)) on z in [x,y]; the limit coupling pi^0
// is the gamma -> 0 limit of the entropic couplings, i.e. the KL projection
// of L^d(x,y)/d! onto the face of W1-optimal plans.

#include <string>
#include <utility>
#include <vector>

#include "entrocurve/schrodinger.hpp"
#include "json.hpp"

namespace entrocurve {

// rho_t^d(k) = C(d,k) t^k (1-t)^{d-k}; IndexOutOfRange unless 0 <= k <= d.
double binomial_weight(double t, int d, int k);

// nu_t^{0,x,y}, evaluated over the layers of the geodesic DAG.
Vec pair_bridge_zero(const GraphSpace& space, int x, int y, double t);

inline const std::vector<double>& default_gamma_schedule() {
  static const std::vector<double> s{5e-2, 2.5e-2, 1.25e-2, 6.25e-3};
  return s;
}

struct SlowdownStep {
  double gamma = 0.0;
  long iterations = 0;
  double residual = 0.0;
  double coupling_distance = 0.0;  // max |pi^gamma - pi^0|
  double bridge_distance = 0.0;    // max |Q_1/2^gamma - Q_1/2^0|
};

struct SlowdownDiagnostics {
  std::vector<SlowdownStep> steps;
  std::vector<double> empirical_orders;  // between consecutive steps
  double extrapolation_distance = 0.0;   // Richardson extrapolate vs pi^0
  double last_change = 0.0;              // max |pi^{gamma_K} - pi^{gamma_{K-1}}|
  std::vector<std::string> warnings;
};

struct ZeroTempOptions {
  SolveOptions solve;
  bool run_schedule = true;   // solve the gamma schedule for diagnostics
  double ipf_tol = 1e-15;     // marginal error of the limit coupling, mass units
  long ipf_max_iter = 200000;
  double max_last_change = 0.25;
  double min_order = 0.8;     // below this a warning is recorded
};

struct ZeroTempBridge {
  SpacePtr space;
  MarginalPair marginals;
  Mat coupling;
  std::vector<std::pair<int, int>> support;  // row-major order
  double w1 = 0.0;                           // LP optimum
  double cost = 0.0;                         // sum d pi^0
  std::vector<char> face;                    // pairs charged by some W1-optimal plan
  SlowdownDiagnostics diagnostics;

  // pi^0(w|x) and pi^0(w|y)
  double forward(int x, int w) const { return coupling(x, w) / marginals.nu0[x]; }
  double backward(int w, int y) const { return coupling(w, y) / marginals.nu1[y]; }
};

ZeroTempBridge limit_coupling(SpacePtr space, const MarginalPair& marginals,
                              const std::vector<double>& schedule = default_gamma_schedule(),
                              const ZeroTempOptions& opts = {});

// Wraps an arbitrary coupling (tests and negative controls); w1 is the LP value.
ZeroTempBridge bridge_from_coupling(SpacePtr space, const MarginalPair& marginals, const Mat& coupling);

// Q_t^0 = sum over supp(pi^0) of nu_t^{0,x,y} pi^0(x,y), by direct
// interval tests rather than the DAG path used in pair_bridge_zero.
Vec zero_bridge_marginal(const ZeroTempBridge& bridge, double t);

// |W1(Q_s^0, Q_t^0) - (t - s) W1(nu0, nu1)|
double constant_speed_check(const ZeroTempBridge& bridge, double s, double t);

// Largest value of sum d(x_i,y_i) - sum d(x_i,y_{i+1}) over 2- and 3-cycles of
// support pairs; d-cyclic monotonicity on those cycles means <= 0.
double cyclic_monotonicity_excess(const GraphSpace& space, const std::vector<std::pair<int, int>>& support);

// C_-> as a row-major |X|x|X| mask: (z,w), z != w, ordered on a geodesic of a support pair.
std::vector<char> forward_pairs(const GraphSpace& space, const std::vector<std::pair<int, int>>& support);
bool forward_backward_disjoint(const GraphSpace& space, const std::vector<std::pair<int, int>>& support);

struct Certificate {
  double marginal_error = 0.0;
  double lp_gap = 0.0;
  double cyclic_excess = 0.0;
  bool disjoint = true;
  bool support_constant = true;
  double normalization_error = 0.0;
  double speed_deviation = 0.0;

  bool ok() const {
    return marginal_error <= 1e-9 && lp_gap <= 1e-7 && cyclic_excess <= 0.0 && disjoint &&
           support_constant && normalization_error <= 1e-12 && speed_deviation <= 1e-7;
  }
};
Certificate certify(const ZeroTempBridge& bridge);

enum class Side { Forward, Backward };

struct ConditionalQuantities {
  double base = 0.0;                          // a_t(z,y) or b_t(z,x)
  std::vector<std::pair<int, double>> one;    // z' ~ z
  std::vector<std::pair<int, double>> two;    // d(z,z'') = 2
};

// Backward side: witness y in supp(nu1), quantities a, a', a''. Forward side:
// witness x in supp(nu0), quantities b, b', b''.
ConditionalQuantities conditional_quantities(const ZeroTempBridge& bridge, double t, int z, int witness,
                                             Side side);

struct LimitRatioTable {
  double t = 0.0;
  Mat A, AA, B, BB;           // dense |X|x|X|, zero off the relevant pairs
  std::vector<char> in_support;  // z in supp(Q_t^0)
  std::vector<int> witness_y, witness_x;  // smallest-index witnesses, -1 if none
  double witness_deviation = 0.0;         // largest spread across all witnesses
};
LimitRatioTable limit_ratios(const ZeroTempBridge& bridge, double t);

// Lower bounds for liminf phi''_gamma(t) and liminf psi''_gamma(t).
std::pair<double, double> second_derivative_bounds(const ZeroTempBridge& bridge, double t);
std::pair<double, double> second_derivative_bounds(const ZeroTempBridge& bridge, const LimitRatioTable& table);

nlohmann::json bridge_to_json(const ZeroTempBridge& bridge);

}  // namespace entrocurve
