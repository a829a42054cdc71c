#include "entrocurve/transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "entrocurve/error.hpp"

namespace entrocurve {

TransportPlan solve_transport(const Vec& a, const Vec& b, const std::vector<long long>& cost) {
  const std::size_t N = static_cast<std::size_t>(a.size());
  if (static_cast<std::size_t>(b.size()) != N || cost.size() != N * N)
    throw Error(ErrorKind::BadParameter, "transport inputs have inconsistent sizes");
  double sa = 0.0, sb = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    if (!(a[static_cast<Eigen::Index>(i)] >= 0.0) || !(b[static_cast<Eigen::Index>(i)] >= 0.0))
      throw Error(ErrorKind::InfeasibleMarginals, "masses must be nonnegative");
    sa += a[static_cast<Eigen::Index>(i)];
    sb += b[static_cast<Eigen::Index>(i)];
  }
  if (std::abs(sa - sb) > 1e-12) throw Error(ErrorKind::InfeasibleMarginals, "total masses differ");

  TransportPlan tp;
  for (std::size_t i = 0; i < N; ++i) {
    if (a[static_cast<Eigen::Index>(i)] > kMassEps) tp.sources.push_back(static_cast<int>(i));
    if (b[static_cast<Eigen::Index>(i)] > kMassEps) tp.sinks.push_back(static_cast<int>(i));
  }
  const std::size_t n0 = tp.sources.size(), n1 = tp.sinks.size();
  const std::size_t V = n0 + n1;
  auto c = [&](std::size_t i, std::size_t j) {
    return cost[static_cast<std::size_t>(tp.sources[i]) * N + static_cast<std::size_t>(tp.sinks[j])];
  };

  std::vector<double> supply(n0), demand(n1), flow(n0 * n1, 0.0);
  for (std::size_t i = 0; i < n0; ++i) supply[i] = a[tp.sources[i]];
  for (std::size_t j = 0; j < n1; ++j) demand[j] = b[tp.sinks[j]];
  std::vector<long long> pot(V, 0);

  constexpr long long kInf = std::numeric_limits<long long>::max() / 4;
  std::vector<long long> dist(V);
  std::vector<int> prev(V);
  std::vector<char> done(V);
  const std::size_t max_rounds = 4 * (V + 1) * (V + 1) + 16;

  for (std::size_t round = 0;; ++round) {
    if (round > max_rounds) throw Error(ErrorKind::NoConvergence, "transport solver exceeded its round limit");
    bool active = false;
    for (std::size_t i = 0; i < n0; ++i) active = active || supply[i] > kMassEps;
    if (!active) break;

    std::fill(dist.begin(), dist.end(), kInf);
    std::fill(prev.begin(), prev.end(), -1);
    std::fill(done.begin(), done.end(), 0);
    for (std::size_t i = 0; i < n0; ++i)
      if (supply[i] > kMassEps) dist[i] = 0;

    std::size_t target = V;
    while (true) {
      std::size_t u = V;
      for (std::size_t v = 0; v < V; ++v)
        if (!done[v] && dist[v] < kInf && (u == V || dist[v] < dist[u])) u = v;
      if (u == V) break;
      done[u] = 1;
      if (u >= n0 && demand[u - n0] > kMassEps) {
        target = u;
        break;
      }
      if (u < n0) {
        for (std::size_t j = 0; j < n1; ++j) {
          const long long nd = dist[u] + c(u, j) + pot[u] - pot[n0 + j];
          if (nd < dist[n0 + j]) {
            dist[n0 + j] = nd;
            prev[n0 + j] = static_cast<int>(u);
          }
        }
      } else {
        const std::size_t j = u - n0;
        for (std::size_t i = 0; i < n0; ++i) {
          if (flow[i * n1 + j] <= 0.0) continue;
          const long long nd = dist[u] - c(i, j) + pot[u] - pot[i];
          if (nd < dist[i]) {
            dist[i] = nd;
            prev[i] = static_cast<int>(u);
          }
        }
      }
    }
    if (target == V) break;  // leftover supply is roundoff only

    const long long dt = dist[target];
    for (std::size_t v = 0; v < V; ++v) pot[v] += std::min(dist[v], dt);

    // walk back to the originating source to size the augmentation
    double amount = demand[target - n0];
    std::size_t v = target;
    while (prev[v] >= 0) {
      const auto u = static_cast<std::size_t>(prev[v]);
      if (u >= n0) amount = std::min(amount, flow[v * n1 + (u - n0)]);  // backward edge v<-u
      v = u;
    }
    amount = std::min(amount, supply[v]);
    supply[v] -= amount;
    demand[target - n0] -= amount;
    v = target;
    while (prev[v] >= 0) {
      const auto u = static_cast<std::size_t>(prev[v]);
      if (u < n0) {
        flow[u * n1 + (v - n0)] += amount;
      } else {
        double& f = flow[v * n1 + (u - n0)];
        f -= amount;
        if (f < kMassEps) f = 0.0;
      }
      v = u;
    }
  }

  tp.plan = Mat::Zero(static_cast<Eigen::Index>(N), static_cast<Eigen::Index>(N));
  tp.phi.assign(N, 0);
  tp.psi.assign(N, 0);
  for (std::size_t i = 0; i < n0; ++i) tp.phi[static_cast<std::size_t>(tp.sources[i])] = -pot[i];
  for (std::size_t j = 0; j < n1; ++j) tp.psi[static_cast<std::size_t>(tp.sinks[j])] = pot[n0 + j];
  tp.cost = 0.0;
  for (std::size_t i = 0; i < n0; ++i) {
    for (std::size_t j = 0; j < n1; ++j) {
      const double f = flow[i * n1 + j];
      if (f < kMassEps) continue;
      tp.plan(tp.sources[i], tp.sinks[j]) = f;
      tp.cost += f * static_cast<double>(c(i, j));
    }
  }
  return tp;
}

std::vector<char> optimal_face_support(const TransportPlan& tp, const std::vector<long long>& cost) {
  const auto N = static_cast<std::size_t>(tp.plan.rows());
  const std::size_t n0 = tp.sources.size(), n1 = tp.sinks.size();
  auto tight = [&](std::size_t i, std::size_t j) {
    const auto x = static_cast<std::size_t>(tp.sources[i]), y = static_cast<std::size_t>(tp.sinks[j]);
    return tp.phi[x] + tp.psi[y] == cost[x * N + y];
  };
  auto carries = [&](std::size_t i, std::size_t j) { return tp.plan(tp.sources[i], tp.sinks[j]) > 0.0; };

  std::vector<char> face(N * N, 0);
  std::vector<char> seen_src(n0), seen_snk(n1);
  std::vector<std::size_t> queue;
  for (std::size_t j0 = 0; j0 < n1; ++j0) {
    // sources reachable from sink j0: sink -> source along charged pairs,
    // source -> sink along tight pairs
    std::fill(seen_src.begin(), seen_src.end(), 0);
    std::fill(seen_snk.begin(), seen_snk.end(), 0);
    queue.assign(1, n0 + j0);
    seen_snk[j0] = 1;
    for (std::size_t h = 0; h < queue.size(); ++h) {
      const std::size_t u = queue[h];
      if (u >= n0) {
        const std::size_t j = u - n0;
        for (std::size_t i = 0; i < n0; ++i)
          if (!seen_src[i] && carries(i, j)) {
            seen_src[i] = 1;
            queue.push_back(i);
          }
      } else {
        for (std::size_t j = 0; j < n1; ++j)
          if (!seen_snk[j] && tight(u, j)) {
            seen_snk[j] = 1;
            queue.push_back(n0 + j);
          }
      }
    }
    for (std::size_t i = 0; i < n0; ++i) {
      if (!tight(i, j0)) continue;
      if (carries(i, j0) || seen_src[i])
        face[static_cast<std::size_t>(tp.sources[i]) * N + static_cast<std::size_t>(tp.sinks[j0])] = 1;
    }
  }
  return face;
}

}  // namespace entrocurve
