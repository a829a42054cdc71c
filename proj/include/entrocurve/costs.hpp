#pragma once
// Transport distances, the model cost functionals C_t, and the checkers built
// on them: C-displacement convexity along zero-temperature bridges,
// transport-entropy inequalities, and the Prekopa-Leindler implication.

#include <string>
#include <utility>
#include <vector>

#include "entrocurve/zerotemp.hpp"
#include "json.hpp"

namespace entrocurve {

struct W1Result {
  double value = 0.0;
  Mat plan;
};
W1Result w1(const GraphSpace& space, const Vec& nu0, const Vec& nu1);
// (W2, W2^d): LP optima for the costs d^2 and d(d-1), square-rooted.
std::pair<double, double> w2_w2d(const GraphSpace& space, const Vec& nu0, const Vec& nu1);
// ||nu0 - nu1||_TV = sum |nu0 - nu1|
double total_variation(const Vec& nu0, const Vec& nu1);

// h(u) = 2[(1-u) log(1-u) + u] on [0,1], +inf beyond.
double h_fn(double u);
// h_t(u) = (t h(u) - h(tu)) / (t(1-t)).
double h_t_fn(double t, double u);
// h_t(u) / u^2, extended by 1 at u = 0.
double q_t_fn(double t, double u);
// inf over alpha, beta > 0, alpha + beta <= 1 of alpha h_t(v/alpha) + beta h_{1-t}(v/beta), v in [0, 1/2].
double k_t_fn(double t, double v);
// K_t(u) = 2u/t on [0,t], 2(1-u)/(1-t) on [t,1].
double kernel_Kt(double t, double u);

// Coordinate flip probabilities of pi^0 on bit-labelled models.
struct FlipTables {
  Mat forward;   // forward(x, i) = Pi^i_->(x), rows outside supp(nu0) are zero
  Mat backward;  // backward(y, i) = Pi^i_<-(y)
  Vec overall;   // Pi^i
};
FlipTables flip_tables(const ZeroTempBridge& bridge);

// falling-factorial moments of d under pi^0
double moment_t2(const ZeroTempBridge& bridge);
double moment_t3(const ZeroTempBridge& bridge);

// sum over x of nu0(x) sum_i Pi^i_->(x)^2 plus the backward analogue; the
// Hamming version (complete graph) uses the single indicator w != x.
double weak_cost_at_coupling(const ZeroTempBridge& bridge);

struct CostValue {
  double value = 0.0;
  std::vector<double> branches;
};
CostValue cost_complete(const ZeroTempBridge& bridge, double t);
CostValue cost_hypercube(const ZeroTempBridge& bridge, double t);
CostValue cost_slice(const ZeroTempBridge& bridge, double t);
// Dispatch on the model tag; lattice boxes and circles have C_t = 0.
CostValue model_cost(const ZeroTempBridge& bridge, double t);

// Complete graph: C_t rebuilt from the endpoint potentials
// phi0(t) = 1/2 int h((1-t) Pi_<-) dnu1 and psi0(t) = 1/2 int h(t Pi_->) dnu0.
double cost_complete_from_potentials(const ZeroTempBridge& bridge, double t);

struct CostRow {
  double t = 0.0;
  double entropy = 0.0;  // H(Q_t^0 | m)
  double cost = 0.0;     // C_t (after the test scale)
  double gap = 0.0;
  std::vector<double> branches;
  std::vector<double> branch_gaps;
};

struct CostReport {
  ModelKind model;
  double W1 = 0.0, W2 = 0.0, W2d = 0.0, TV = 0.0;
  double t2 = 0.0, t3 = 0.0;
  double H0 = 0.0, H1 = 0.0;
  FlipTables flips;  // empty for models without bit labels
  std::vector<CostRow> rows;
  bool flat = false;                      // C_t = 0 models: second differences checked
  std::vector<double> second_differences; // on the uniform 21-point grid of [0,1]
  double worst = 0.0;                     // smallest gap / second difference / branch gap

  bool passed(double tol = 1e-8) const { return worst >= -tol; }
};

CostReport convexity_check(const ZeroTempBridge& bridge, const std::vector<double>& t_grid, double ct_scale = 1.0);
CostReport convexity_check(SpacePtr space, const MarginalPair& marginals, const std::vector<double>& t_grid,
                           const ZeroTempOptions& opts = {}, double ct_scale = 1.0);

nlohmann::json report_to_json(const CostReport& report);
// t, entropy, C_t, gap, then one column per branch
std::string report_to_csv(const CostReport& report);

struct InequalityCheck {
  std::string name;
  double lhs = 0.0, rhs = 0.0;
  double slack() const { return rhs - lhs; }
};
// RHS = (sqrt H(nu0|m) + sqrt H(nu1|m))^2; LHS per model.
std::vector<InequalityCheck> transport_entropy_check(const ZeroTempBridge& bridge);

// Pointwise cost c_t(x,y) with C_t >= int c_t dpi^0, used by the
// Prekopa-Leindler implication: (2/n) d(d-1) on the hypercube,
// 2/min(k, n-k) d(d-1) on slices, 0 elsewhere.
double pointwise_cost(const GraphSpace& space, int x, int y);

// h(z) = max over pairs (x,y) with z in [x,y] of (1-t) f(x) + t g(y) - t(1-t)/2 c(x,y);
// satisfies the premise by construction.
Vec sup_convolution_h(const GraphSpace& space, const Vec& f, const Vec& g, double t);

struct PrekopaResult {
  double premise_slack = 0.0;     // min over (x,y) of int h dnu_t^{x,y} + t(1-t)/2 c - (1-t) f(x) - t g(y)
  double conclusion_slack = 0.0;  // int e^h dm - (int e^f dm)^{1-t} (int e^g dm)^t
  int worst_x = -1, worst_y = -1;
};
// Throws PremiseViolated when the premise fails by more than 1e-12.
PrekopaResult prekopa_check(const GraphSpace& space, const Vec& f, const Vec& g, const Vec& h, double t);

}  // namespace entrocurve
