#pragma once
// Shared test helpers: a seeded generator for property tests and small
// brute-force oracles that deliberately avoid the library's own algorithms.

#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include "entrocurve/graph_space.hpp"
#include "entrocurve/models.hpp"

namespace testsupport {

using entrocurve::Mat;
using entrocurve::Vec;

// splitmix64: tiny, portable, and enough for sampling test inputs
struct Rng {
  std::uint64_t state;
  explicit Rng(std::uint64_t seed) : state(seed * 0x9E3779B97F4A7C15ULL + 0x632BE59BD9B4E5CDULL) {}
  std::uint64_t next() {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  double uniform(double a, double b) { return a + (b - a) * uniform(); }
  int below(int n) { return static_cast<int>(next() % static_cast<std::uint64_t>(n)); }
};

// Probability vector with positive weights on k random vertices (all if k <= 0).
inline Vec random_measure(Rng& rng, int n, int k = 0) {
  if (k <= 0 || k > n) k = n;
  std::vector<int> idx(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) idx[static_cast<std::size_t>(i)] = i;
  for (int i = 0; i < k; ++i) std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(i + rng.below(n - i))]);
  Vec v = Vec::Zero(n);
  for (int i = 0; i < k; ++i) v[idx[static_cast<std::size_t>(i)]] = rng.uniform(0.05, 1.0);
  return v / v.sum();
}

inline entrocurve::SpacePtr share(entrocurve::GraphSpace s) {
  return std::make_shared<const entrocurve::GraphSpace>(std::move(s));
}

// Floyd-Warshall on the support of the generator.
inline std::vector<int> floyd_distances(const Mat& L) {
  const int n = static_cast<int>(L.rows());
  const int inf = 1 << 20;
  std::vector<int> d(static_cast<std::size_t>(n * n), inf);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i == j) d[static_cast<std::size_t>(i * n + j)] = 0;
      else if (L(i, j) > 0.0) d[static_cast<std::size_t>(i * n + j)] = 1;
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        auto& dij = d[static_cast<std::size_t>(i * n + j)];
        dij = std::min(dij, d[static_cast<std::size_t>(i * n + k)] + d[static_cast<std::size_t>(k * n + j)]);
      }
  return d;
}

// Depth-first enumeration of every shortest path, using only the rates.
inline void all_shortest_paths(const entrocurve::GraphSpace& s, int x, int y,
                               const std::function<void(const std::vector<int>&)>& visit) {
  const auto d = floyd_distances(s.generator());
  const int n = static_cast<int>(s.size());
  std::vector<int> path{x};
  std::function<void(int)> rec = [&](int u) {
    if (u == y) {
      visit(path);
      return;
    }
    for (int v = 0; v < n; ++v) {
      if (v == u || s.L(u, v) <= 0.0) continue;
      if (d[static_cast<std::size_t>(v * n + y)] + 1 != d[static_cast<std::size_t>(u * n + y)]) continue;
      path.push_back(v);
      rec(v);
      path.pop_back();
    }
  };
  rec(x);
}

inline double path_rate(const entrocurve::GraphSpace& s, const std::vector<int>& p) {
  double r = 1.0;
  for (std::size_t i = 1; i < p.size(); ++i) r *= s.L(p[i - 1], p[i]);
  return r;
}

inline double rel_err(double a, double b) { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300}); }

}  // namespace testsupport
