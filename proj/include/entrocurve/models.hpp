#pragma once
// Builders for the five model families plus the CLI model-string syntax:
//   hypercube:n=4,alpha=0.5     hypercube:alpha=0.2,0.5,0.9
//   bl:n=6,k=3                  circle:N=9
//   zbox:n=2,lo=0,0,hi=6,6      complete:mu=uniform:5 | complete:mu=0.2,0.3,0.5

#include <string>
#include <vector>

#include "entrocurve/graph_space.hpp"

namespace entrocurve {

// Integer box prod_i [lo_i, hi_i] with unit nearest-neighbour rates and
// counting measure; boundary rows keep zero row sums through the diagonal.
GraphSpace build_lattice_box(const std::vector<int>& lo, const std::vector<int>& hi);

// {0,1}^n with L(z, s_i z) = (1-a_i) z_i + a_i (1-z_i) and product Bernoulli measure.
GraphSpace build_hypercube(const std::vector<double>& alphas);

GraphSpace build_complete(const std::vector<double>& mu);

GraphSpace build_circle(int N);

// Slice {z in {0,1}^n : |z| = kappa} with unit swap rates and uniform measure.
GraphSpace build_bernoulli_laplace(int n, int kappa);

GraphSpace build_model(const ModelKind& kind);

ModelKind parse_model_spec(const std::string& spec);
std::string format_model_spec(const ModelKind& kind);

// Vertex index with the given label, or -1.
int find_vertex(const GraphSpace& space, const Label& label);

// Shortest round-trip decimal form of a double.
std::string format_double(double v);

}  // namespace entrocurve
