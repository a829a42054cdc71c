#pragma once
// Exact discrete transport with integer costs: successive shortest paths
// (Dijkstra with potentials) on the bipartite graph supp(a) x supp(b).
// Potentials stay integral, so tightness tests on the dual are exact.

#include <vector>

#include "entrocurve/types.hpp"

namespace entrocurve {

struct TransportPlan {
  double cost = 0.0;
  Mat plan;                    // |X| x |X|, zero outside supp(a) x supp(b)
  std::vector<int> sources;    // supp(a)
  std::vector<int> sinks;      // supp(b)
  std::vector<long long> phi;  // dual potential per vertex (meaningful on sources)
  std::vector<long long> psi;  // dual potential per vertex (meaningful on sinks)
};

// Masses below this are treated as zero in supports and plans.
inline constexpr double kMassEps = 1e-14;

// cost is row-major |X|x|X| with nonnegative integer entries. Throws
// InfeasibleMarginals when the masses differ by more than 1e-12.
TransportPlan solve_transport(const Vec& a, const Vec& b, const std::vector<long long>& cost);

// Row-major |X|x|X| mask of the pairs charged by at least one optimal plan.
// Found from one optimal plan and its dual: a tight pair outside the plan is
// in the face iff an alternating residual cycle can route mass through it.
std::vector<char> optimal_face_support(const TransportPlan& tp, const std::vector<long long>& cost);

}  // namespace entrocurve
