#include "doctest.h"
#include "entrocurve/error.hpp"
#include "entrocurve/transport.hpp"
#include "support.hpp"

using namespace entrocurve;

namespace {

std::vector<long long> dist_cost(const GraphSpace& s) {
  return std::vector<long long>(s.distance_matrix().begin(), s.distance_matrix().end());
}

// masses k/K with integer k >= 1 on random vertices
Vec rational_measure(testsupport::Rng& rng, int n, int K) {
  Vec v = Vec::Zero(n);
  for (int i = 0; i < K; ++i) v[rng.below(n)] += 1.0;
  return v / K;
}

void check_optimal(const TransportPlan& tp, const Vec& a, const Vec& b, const std::vector<long long>& c) {
  const auto N = a.size();
  CHECK((tp.plan.rowwise().sum() - a).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((tp.plan.colwise().sum().transpose() - b).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(tp.plan.minCoeff() >= 0.0);
  // dual feasibility on supp(a) x supp(b) and a zero duality gap certify optimality
  double dual = 0.0;
  for (int x : tp.sources) dual += static_cast<double>(tp.phi[static_cast<std::size_t>(x)]) * a[x];
  for (int y : tp.sinks) dual += static_cast<double>(tp.psi[static_cast<std::size_t>(y)]) * b[y];
  for (int x : tp.sources)
    for (int y : tp.sinks)
      CHECK(tp.phi[static_cast<std::size_t>(x)] + tp.psi[static_cast<std::size_t>(y)] <=
            c[static_cast<std::size_t>(x * N + y)]);
  CHECK(dual == doctest::Approx(tp.cost).epsilon(1e-12));
}

}  // namespace

TEST_SUITE("transport") {

TEST_CASE("path graph matches the CDF formula") {
  const GraphSpace p = build_lattice_box({0}, {7});
  testsupport::Rng rng(21);
  for (int rep = 0; rep < 40; ++rep) {
    const Vec a = testsupport::random_measure(rng, 8, 1 + rng.below(8));
    const Vec b = testsupport::random_measure(rng, 8, 1 + rng.below(8));
    const TransportPlan tp = solve_transport(a, b, dist_cost(p));
    double w = 0.0, ca = 0.0, cb = 0.0;
    for (int i = 0; i < 8; ++i) {
      ca += a[i];
      cb += b[i];
      w += std::abs(ca - cb);
    }
    CHECK(tp.cost == doctest::Approx(w).epsilon(1e-12));
    check_optimal(tp, a, b, dist_cost(p));
  }
}

TEST_CASE("Dirac to Dirac and identical marginals") {
  const GraphSpace h = build_hypercube({0.5, 0.5, 0.5});
  Vec a = Vec::Zero(8), b = Vec::Zero(8);
  a[0] = 1.0;
  b[7] = 1.0;
  const TransportPlan tp = solve_transport(a, b, dist_cost(h));
  CHECK(tp.cost == 3.0);
  CHECK(tp.plan(0, 7) == 1.0);
  const Vec m = h.measure();
  CHECK(solve_transport(m, m, dist_cost(h)).cost == doctest::Approx(0.0));
}

TEST_CASE("duality certificate on random instances") {
  testsupport::Rng rng(5);
  const std::vector<GraphSpace> spaces{build_circle(9), build_bernoulli_laplace(6, 3), build_lattice_box({0, 0}, {3, 3})};
  for (const GraphSpace& s : spaces)
    for (int rep = 0; rep < 25; ++rep) {
      const int n = static_cast<int>(s.size());
      const Vec a = testsupport::random_measure(rng, n, 1 + rng.below(n));
      const Vec b = testsupport::random_measure(rng, n, 1 + rng.below(n));
      check_optimal(solve_transport(a, b, dist_cost(s)), a, b, dist_cost(s));
    }
}

TEST_CASE("optimal face matches a perturbed-cost oracle") {
  // With masses in (1/K)Z every vertex plan has entries in (1/K)Z, so cost
  // gaps between vertices are >= 1/K. Scaling d by 2K and rewarding one pair
  // by 1 keeps the W1-optimal set and maximizes that pair's mass within it.
  testsupport::Rng rng(8);
  const int K = 6;
  const std::vector<GraphSpace> spaces{build_circle(6), build_hypercube({0.5, 0.5, 0.5}), build_bernoulli_laplace(4, 2)};
  for (const GraphSpace& s : spaces)
    for (int rep = 0; rep < 12; ++rep) {
      const int n = static_cast<int>(s.size());
      const Vec a = rational_measure(rng, n, K), b = rational_measure(rng, n, K);
      const auto c = dist_cost(s);
      const TransportPlan tp = solve_transport(a, b, c);
      const auto face = optimal_face_support(tp, c);
      for (int x : tp.sources)
        for (int y : tp.sinks) {
          std::vector<long long> pert(c.size());
          for (std::size_t i = 0; i < c.size(); ++i) pert[i] = 2 * K * c[i] + 1;
          pert[static_cast<std::size_t>(x * n + y)] -= 1;
          const TransportPlan best = solve_transport(a, b, pert);
          const bool charged = best.plan(x, y) > 1e-12;
          CHECK(static_cast<bool>(face[static_cast<std::size_t>(x * n + y)]) == charged);
        }
      // nothing outside supp(a) x supp(b)
      for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y)
          if (a[x] == 0.0 || b[y] == 0.0) CHECK(face[static_cast<std::size_t>(x * n + y)] == 0);
    }
}

TEST_CASE("input validation") {
  const Vec a = Vec::Constant(3, 1.0 / 3.0);
  Vec b = a;
  const std::vector<long long> c(9, 1);
  b[0] += 1e-6;
  CHECK_THROWS_AS(solve_transport(a, b, c), Error);
  b = a;
  b[0] = -0.1;
  CHECK_THROWS_AS(solve_transport(a, b, c), Error);
  CHECK_THROWS_AS(solve_transport(a, a, std::vector<long long>(4, 1)), Error);
}

}  // TEST_SUITE
