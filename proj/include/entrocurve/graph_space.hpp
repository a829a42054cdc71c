#pragma once
// Finite reversible graph spaces (X, d, m, L): BFS distances, geodesic
// intervals stored as layered DAGs, and geodesic weights L^{d(x,y)}(x,y).

#include <cstddef>
#include <vector>

#include "entrocurve/model_kind.hpp"
#include "entrocurve/types.hpp"

namespace entrocurve {

// BFS distances over symmetric adjacency lists; row-major |X|x|X|.
// Throws DisconnectedGraph when some pair is unreachable.
std::vector<int> compute_distances(const std::vector<std::vector<int>>& adjacency);

class GraphSpace {
 public:
  // Validates zero row sums, the sign pattern, symmetric adjacency,
  // reversibility and connectivity; the first violation is thrown.
  GraphSpace(std::vector<Label> labels, Mat generator, Vec measure, ModelKind model = {});

  std::size_t size() const { return labels_.size(); }
  const std::vector<Label>& labels() const { return labels_; }
  const Label& label(int x) const { return labels_[static_cast<std::size_t>(x)]; }
  const Mat& generator() const { return L_; }
  double L(int x, int y) const { return L_(x, y); }
  const Vec& measure() const { return m_; }
  const std::vector<int>& neighbors(int x) const { return adj_[static_cast<std::size_t>(x)]; }
  const std::vector<std::vector<int>>& adjacency() const { return adj_; }
  std::size_t edge_count() const { return edges_; }

  int dist(int x, int y) const { return dist_[index(x, y)]; }
  const std::vector<int>& distance_matrix() const { return dist_; }
  int diameter() const { return diameter_; }

  // S = max |L(x,x)|, I = min rate over edges, K = 2S/I.
  double S() const { return S_; }
  double I() const { return I_; }
  double K() const { return 2.0 * S_ / I_; }

  // L^{d(x,y)}(x,y), tabulated at construction by DAG dynamic programming.
  double geodesic_weight(int x, int y) const { return gw_[index(x, y)]; }

  const ModelKind& model() const { return model_; }

  bool valid_vertex(int x) const { return x >= 0 && static_cast<std::size_t>(x) < size(); }
  void check_vertex(int x) const;

 private:
  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(x) * size() + static_cast<std::size_t>(y);
  }
  void validate();
  void tabulate_geodesic_weights();

  std::vector<Label> labels_;
  Mat L_;
  Vec m_;
  ModelKind model_;
  std::vector<std::vector<int>> adj_;
  std::size_t edges_ = 0;
  std::vector<int> dist_;
  std::vector<double> gw_;
  int diameter_ = 0;
  double S_ = 0.0, I_ = 0.0;
};

// z lies on some geodesic from x to y.
inline bool in_interval(const GraphSpace& s, int x, int z, int y) {
  return s.dist(x, z) + s.dist(z, y) == s.dist(x, y);
}

// z then w appear in this order on some geodesic from x to y.
inline bool ordered_in_interval(const GraphSpace& s, int z, int w, int x, int y) {
  return s.dist(x, z) + s.dist(z, w) + s.dist(w, y) == s.dist(x, y);
}

struct GeodesicDag {
  struct Edge {
    int from, to;
    double rate;
  };
  int source = 0, target = 0;
  std::vector<std::vector<int>> layers;  // layers[k] = {z in [x,y] : d(x,z) = k}
  std::vector<Edge> edges;               // consecutive-layer edges with L(u,v)

  int length() const { return static_cast<int>(layers.size()) - 1; }
  std::size_t vertex_count() const;
};

GeodesicDag geodesic_interval(const GraphSpace& space, int x, int y);

double geodesic_weight(const GraphSpace& space, int x, int y);

// r(x,z,v,y) = L^{d(x,z)}(x,z) L^{d(v,y)}(v,y) / L^{d(x,y)}(x,y)
double ratio_r(const GraphSpace& space, int x, int z, int v, int y);

struct GeodesicPath {
  std::vector<int> vertices;  // x = vertices.front(), y = vertices.back()
  double probability;
};

// All geodesics from x to y with their law L(a0,a1)...L(a_{d-1},a_d)/L^d(x,y).
// Throws TooManyGeodesics when the count exceeds cap.
std::vector<GeodesicPath> enumerate_geodesics(const GraphSpace& space, int x, int y,
                                              std::size_t cap = 1000000);

// Number of geodesics from x to y (as a double; exact below 2^53).
double count_geodesics(const GraphSpace& space, int x, int y);

}  // namespace entrocurve
