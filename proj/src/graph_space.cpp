#include "entrocurve/graph_space.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "entrocurve/error.hpp"

namespace entrocurve {

const char* model_tag_name(ModelTag tag) {
  switch (tag) {
    case ModelTag::Custom: return "custom";
    case ModelTag::LatticeBox: return "zbox";
    case ModelTag::Hypercube: return "hypercube";
    case ModelTag::CompleteGraph: return "complete";
    case ModelTag::Circle: return "circle";
    case ModelTag::BernoulliLaplace: return "bl";
  }
  return "custom";
}

std::vector<int> compute_distances(const std::vector<std::vector<int>>& adjacency) {
  const std::size_t n = adjacency.size();
  std::vector<int> dist(n * n, -1);
  std::vector<int> queue(n);
  for (std::size_t s = 0; s < n; ++s) {
    int* row = dist.data() + s * n;
    row[s] = 0;
    std::size_t head = 0, tail = 0;
    queue[tail++] = static_cast<int>(s);
    while (head < tail) {
      const int u = queue[head++];
      for (int v : adjacency[static_cast<std::size_t>(u)]) {
        if (row[v] < 0) {
          row[v] = row[u] + 1;
          queue[tail++] = v;
        }
      }
    }
    if (tail != n) {
      for (std::size_t y = 0; y < n; ++y) {
        if (row[y] < 0) {
          std::ostringstream os;
          os << "vertex " << y << " unreachable from vertex " << s;
          throw Error(ErrorKind::DisconnectedGraph, os.str());
        }
      }
    }
  }
  return dist;
}

GraphSpace::GraphSpace(std::vector<Label> labels, Mat generator, Vec measure, ModelKind model)
    : labels_(std::move(labels)), L_(std::move(generator)), m_(std::move(measure)),
      model_(std::move(model)) {
  validate();
  dist_ = compute_distances(adj_);
  diameter_ = *std::max_element(dist_.begin(), dist_.end());
  tabulate_geodesic_weights();
}

void GraphSpace::check_vertex(int x) const {
  if (!valid_vertex(x)) {
    std::ostringstream os;
    os << "vertex index " << x << " outside [0," << size() << ")";
    throw Error(ErrorKind::IndexOutOfRange, os.str());
  }
}

void GraphSpace::validate() {
  const std::size_t n = labels_.size();
  if (n == 0) throw Error(ErrorKind::BadParameter, "space has no vertices");
  if (static_cast<std::size_t>(L_.rows()) != n || static_cast<std::size_t>(L_.cols()) != n)
    throw Error(ErrorKind::InvalidGenerator, "generator shape does not match vertex count");
  if (static_cast<std::size_t>(m_.size()) != n)
    throw Error(ErrorKind::BadParameter, "measure length does not match vertex count");
  for (std::size_t x = 0; x < n; ++x) {
    if (!(m_[x] > 0.0) || !std::isfinite(m_[x])) {
      std::ostringstream os;
      os << "reference measure must be positive and finite (vertex " << x << ")";
      throw Error(ErrorKind::BadParameter, os.str());
    }
  }

  adj_.assign(n, {});
  S_ = 0.0;
  I_ = std::numeric_limits<double>::infinity();
  edges_ = 0;
  for (std::size_t x = 0; x < n; ++x) {
    double row = 0.0, scale = 0.0;
    for (std::size_t y = 0; y < n; ++y) {
      const double v = L_(x, y);
      if (!std::isfinite(v)) throw Error(ErrorKind::InvalidGenerator, "non-finite generator entry");
      row += v;
      scale += std::abs(v);
      if (x == y) continue;
      if (v < 0.0) {
        std::ostringstream os;
        os << "negative off-diagonal rate L(" << x << "," << y << ")";
        throw Error(ErrorKind::InvalidGenerator, os.str());
      }
      if ((v > 0.0) != (L_(y, x) > 0.0)) {
        std::ostringstream os;
        os << "asymmetric adjacency between " << x << " and " << y;
        throw Error(ErrorKind::InvalidGenerator, os.str());
      }
      if (v > 0.0) {
        adj_[x].push_back(static_cast<int>(y));
        I_ = std::min(I_, v);
        if (x < y) ++edges_;
      }
    }
    if (std::abs(row) > 1e-10 * std::max(1.0, scale)) {
      std::ostringstream os;
      os << "row " << x << " sums to " << row << ", expected 0";
      throw Error(ErrorKind::InvalidGenerator, os.str());
    }
    S_ = std::max(S_, std::abs(L_(x, x)));
  }
  for (std::size_t x = 0; x < n; ++x) {
    for (int y : adj_[x]) {
      const double a = m_[x] * L_(x, y), b = m_[y] * L_(y, x);
      if (std::abs(a - b) > 1e-10 * std::max(a, b)) {
        std::ostringstream os;
        os << "detailed balance fails on edge (" << x << "," << y << ")";
        throw Error(ErrorKind::NotReversible, os.str());
      }
    }
  }
  if (n == 1) I_ = 1.0;
}

void GraphSpace::tabulate_geodesic_weights() {
  const std::size_t n = size();
  gw_.assign(n * n, 0.0);
  std::vector<int> order(n);
  for (std::size_t x = 0; x < n; ++x) {
    const int* d = dist_.data() + x * n;
    double* w = gw_.data() + x * n;
    for (std::size_t i = 0; i < n; ++i) order[i] = static_cast<int>(i);
    std::stable_sort(order.begin(), order.end(), [d](int a, int b) { return d[a] < d[b]; });
    w[x] = 1.0;
    for (int v : order) {
      if (d[v] == 0) continue;
      double s = 0.0;
      for (int u : adj_[static_cast<std::size_t>(v)])
        if (d[u] == d[v] - 1) s += w[u] * L_(u, v);
      w[v] = s;
    }
  }
}

std::size_t GeodesicDag::vertex_count() const {
  std::size_t c = 0;
  for (const auto& layer : layers) c += layer.size();
  return c;
}

GeodesicDag geodesic_interval(const GraphSpace& space, int x, int y) {
  space.check_vertex(x);
  space.check_vertex(y);
  GeodesicDag dag;
  dag.source = x;
  dag.target = y;
  const int d = space.dist(x, y);
  dag.layers.assign(static_cast<std::size_t>(d) + 1, {});
  for (int z = 0; z < static_cast<int>(space.size()); ++z)
    if (in_interval(space, x, z, y)) dag.layers[static_cast<std::size_t>(space.dist(x, z))].push_back(z);
  for (int k = 0; k < d; ++k) {
    for (int u : dag.layers[static_cast<std::size_t>(k)]) {
      for (int v : space.neighbors(u)) {
        if (space.dist(x, v) == k + 1 && in_interval(space, x, v, y))
          dag.edges.push_back({u, v, space.L(u, v)});
      }
    }
  }
  return dag;
}

double geodesic_weight(const GraphSpace& space, int x, int y) {
  space.check_vertex(x);
  space.check_vertex(y);
  return space.geodesic_weight(x, y);
}

double ratio_r(const GraphSpace& space, int x, int z, int v, int y) {
  for (int a : {x, z, v, y}) space.check_vertex(a);
  return space.geodesic_weight(x, z) * space.geodesic_weight(v, y) / space.geodesic_weight(x, y);
}

double count_geodesics(const GraphSpace& space, int x, int y) {
  space.check_vertex(x);
  space.check_vertex(y);
  const GeodesicDag dag = geodesic_interval(space, x, y);
  std::vector<double> count(space.size(), 0.0);
  count[static_cast<std::size_t>(x)] = 1.0;
  // edges are emitted layer by layer, so one pass in order suffices
  for (const auto& e : dag.edges) count[static_cast<std::size_t>(e.to)] += count[static_cast<std::size_t>(e.from)];
  return count[static_cast<std::size_t>(y)];
}

std::vector<GeodesicPath> enumerate_geodesics(const GraphSpace& space, int x, int y,
                                              std::size_t cap) {
  const double total = count_geodesics(space, x, y);
  if (total > static_cast<double>(cap)) {
    std::ostringstream os;
    os << total << " geodesics between " << x << " and " << y << " exceed the cap " << cap;
    throw Error(ErrorKind::TooManyGeodesics, os.str());
  }
  const GeodesicDag dag = geodesic_interval(space, x, y);
  std::vector<std::vector<int>> next(space.size());
  for (const auto& e : dag.edges) next[static_cast<std::size_t>(e.from)].push_back(e.to);

  const double norm = space.geodesic_weight(x, y);
  std::vector<GeodesicPath> out;
  out.reserve(static_cast<std::size_t>(total));
  std::vector<int> path{x};
  // iterative DFS over the DAG; weight tracked as a running product
  struct Frame {
    int vertex;
    std::size_t child;
    double weight;
  };
  std::vector<Frame> stack{{x, 0, 1.0}};
  while (!stack.empty()) {
    Frame& top = stack.back();
    if (top.vertex == y) {
      out.push_back({path, top.weight / norm});
      stack.pop_back();
      path.pop_back();
      continue;
    }
    const auto& succ = next[static_cast<std::size_t>(top.vertex)];
    if (top.child == succ.size()) {
      stack.pop_back();
      path.pop_back();
      continue;
    }
    const int v = succ[top.child++];
    const double w = top.weight * space.L(top.vertex, v);
    path.push_back(v);
    stack.push_back({v, 0, w});
  }
  return out;
}

}  // namespace entrocurve
