#include <numeric>
#include <sstream>

#include "doctest.h"
#include "entrocurve/costs.hpp"
#include "entrocurve/error.hpp"
#include "support.hpp"

using namespace entrocurve;
using testsupport::Rng;
using testsupport::share;

namespace {

ZeroTempBridge bridge_for(SpacePtr s, const Vec& a, const Vec& b) {
  ZeroTempOptions o;
  o.run_schedule = false;
  return limit_coupling(s, make_marginals(*s, a, b), default_gamma_schedule(), o);
}

ZeroTempBridge random_bridge(SpacePtr s, Rng& rng, int k0 = 0, int k1 = 0) {
  const int n = static_cast<int>(s->size());
  return bridge_for(s, testsupport::random_measure(rng, n, k0), testsupport::random_measure(rng, n, k1));
}

// composite Simpson on [lo, hi] with an even number of panels
double simpson(double lo, double hi, int panels, const std::function<double(double)>& f) {
  const double w = (hi - lo) / panels;
  double acc = f(lo) + f(hi);
  for (int i = 1; i < panels; ++i) acc += (i % 2 ? 4.0 : 2.0) * f(lo + i * w);
  return acc * w / 3.0;
}

double entropy_gap(const ZeroTempBridge& br, double t, double ct) {
  const Vec& m = br.space->measure();
  const double H0 = relative_entropy(br.marginals.nu0, m), H1 = relative_entropy(br.marginals.nu1, m);
  return (1 - t) * H0 + t * H1 - relative_entropy(zero_bridge_marginal(br, t), m) - t * (1 - t) / 2 * ct;
}

const std::vector<double> kGrid{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};

}  // namespace

TEST_SUITE("costs") {

TEST_CASE("W1, W2 and W2d") {
  const GraphSpace h = build_hypercube({0.5, 0.5, 0.5});
  const Vec m = h.measure();
  CHECK(w1(h, m, m).value == doctest::Approx(0.0));
  CHECK(w1(h, Vec::Unit(8, 0), Vec::Unit(8, 7)).value == 3.0);
  const auto [W2, W2d] = w2_w2d(h, Vec::Unit(8, 0), Vec::Unit(8, 7));
  CHECK(W2 == doctest::Approx(3.0));
  CHECK(W2d == doctest::Approx(std::sqrt(6.0)));
  CHECK(w2_w2d(h, Vec::Unit(8, 0), Vec::Unit(8, 1)).second == 0.0);

  const GraphSpace sq = build_hypercube({0.5, 0.5});
  Vec a = Vec::Zero(4), b = Vec::Zero(4);
  a[find_vertex(sq, {0, 0})] = a[find_vertex(sq, {1, 1})] = 0.5;
  b[find_vertex(sq, {0, 1})] = b[find_vertex(sq, {1, 0})] = 0.5;
  CHECK(w1(sq, a, b).value == doctest::Approx(1.0));

  Rng rng(3);
  const GraphSpace s = build_bernoulli_laplace(6, 3);
  for (int rep = 0; rep < 20; ++rep) {
    const Vec p = testsupport::random_measure(rng, 20, 3), q = testsupport::random_measure(rng, 20, 4);
    const double W1 = w1(s, p, q).value;
    const auto [w2, w2d] = w2_w2d(s, p, q);
    CHECK(w2 * w2 - W1 >= w2d * w2d - 1e-12);
    CHECK(w2 * w2 >= W1 - 1e-12);
  }
  CHECK_THROWS_AS(w1(h, Vec::Unit(8, 0), Vec::Constant(8, 0.2)), Error);
}

TEST_CASE("total variation is twice W1 on the complete graph") {
  Rng rng(4);
  const GraphSpace k = build_complete({0.1, 0.2, 0.3, 0.15, 0.25});
  for (int rep = 0; rep < 30; ++rep) {
    const Vec p = testsupport::random_measure(rng, 5, 1 + rng.below(5)), q = testsupport::random_measure(rng, 5);
    CHECK(std::abs(total_variation(p, q) - 2 * w1(k, p, q).value) <= 1e-10);
  }
}

TEST_CASE("h, h_t, q_t") {
  CHECK(h_fn(0.0) == 0.0);
  CHECK(h_fn(1.0) == 2.0);
  CHECK(std::isinf(h_fn(1.0001)));
  CHECK_THROWS_AS(h_fn(-0.1), Error);
  // series branch against the direct formula
  for (double u : {1e-3, 0.1, 0.3, 0.49}) {
    const double direct = 2.0 * ((1 - u) * std::log(1 - u) + u);
    CHECK(testsupport::rel_err(h_fn(u), direct) < 1e-10);
  }
  CHECK(h_fn(1.0 - 1e-12) == doctest::Approx(2.0).epsilon(1e-9));

  for (double t : {0.1, 0.3, 0.5, 0.8}) {
    CHECK(h_t_fn(t, 0.0) == 0.0);
    CHECK(q_t_fn(t, 0.0) == 1.0);
    for (int i = 1; i <= 20; ++i) {
      const double u = i / 20.0;
      CHECK(h_t_fn(t, u) >= u * u - 1e-15);
      CHECK(h_t_fn(t, u) == doctest::Approx((t * h_fn(u) - h_fn(t * u)) / (t * (1 - t))).epsilon(1e-9));
      // h_t(u) = u^2 int_0^1 K_t(v) / (1 - u v) dv
      if (u < 1.0) {
        auto integrand = [&](double v) { return kernel_Kt(t, v) / (1 - u * v); };
        const double q = simpson(0.0, t, 400, integrand) + simpson(t, 1.0, 400, integrand);
        CHECK(q_t_fn(t, u) == doctest::Approx(q).epsilon(1e-8));
      }
    }
    CHECK(q_t_fn(t, 1e-9) == doctest::Approx(1.0).epsilon(1e-8));
  }
}

TEST_CASE("k_t") {
  for (double t : {0.2, 0.5, 0.7}) {
    CHECK(k_t_fn(t, 0.0) == 0.0);
    for (double v : {0.05, 0.15, 0.3, 0.45, 0.5}) {
      const double k = k_t_fn(t, v);
      CHECK(k >= 4 * v * v / (1 - v) - 1e-12);
      // brute force over the open triangle alpha, beta > 0, alpha + beta <= 1
      double best = INFINITY;
      const int N = 300;
      for (int i = 1; i <= N; ++i)
        for (int j = 1; i + j <= N; ++j) {
          const double a = double(i) / N, b = double(j) / N;
          if (v / a > 1.0 || v / b > 1.0) continue;
          best = std::min(best, a * h_t_fn(t, v / a) + b * h_t_fn(1 - t, v / b));
        }
      CHECK(k <= best + 1e-12);
      CHECK(k >= best - 1e-3);
    }
  }
  CHECK_THROWS_AS(k_t_fn(0.5, 0.6), Error);
  CHECK_THROWS_AS(k_t_fn(1.0, 0.1), Error);
}

TEST_CASE("kernel K_t") {
  for (double t : {0.1, 0.5, 0.85}) {
    const int N = 20000;
    double trap = 0.0;
    for (int i = 0; i < N; ++i) trap += 0.5 * (kernel_Kt(t, double(i) / N) + kernel_Kt(t, double(i + 1) / N)) / N;
    CHECK(std::abs(trap - 1.0) < 1e-8);
    CHECK(kernel_Kt(t, t) == doctest::Approx(2.0));
    for (double u : {0.0, 0.2, 0.6, 1.0}) CHECK(kernel_Kt(t, u) == doctest::Approx(kernel_Kt(1 - t, 1 - u)));
  }
  CHECK_THROWS_AS(kernel_Kt(0.5, 1.2), Error);
}

TEST_CASE("complete graph cost") {
  SUBCASE("two-point example by hand") {
    // mu = (1/2,1/2), nu0 = delta_0, nu1 = uniform: half of the mass moves
    const auto k = share(build_complete({0.5, 0.5}));
    const ZeroTempBridge br = bridge_for(k, Vec::Unit(2, 0), Vec::Constant(2, 0.5));
    for (double t : kGrid) {
      const double expect = h_t_fn(t, 0.5) + 0.5 * h_t_fn(1 - t, 1.0);
      CHECK(cost_complete(br, t).value == doctest::Approx(expect).epsilon(1e-13));
      CHECK(std::abs(entropy_gap(br, t, expect)) < 1e-12);
    }
  }
  SUBCASE("bounds and closed loop on random instances") {
    Rng rng(10);
    for (int n = 2; n <= 6; ++n) {
      std::vector<double> mu(static_cast<std::size_t>(n));
      for (double& v : mu) v = rng.uniform(0.1, 1.0);
      const double total = std::accumulate(mu.begin(), mu.end(), 0.0);
      for (double& v : mu) v /= total;
      const auto k = share(build_complete(mu));
      for (int rep = 0; rep < 5; ++rep) {
        const ZeroTempBridge br = random_bridge(k, rng, 1 + rng.below(n), 1 + rng.below(n));
        const double W1 = br.w1;
        for (double t : kGrid) {
          const double c = cost_complete(br, t).value;
          CHECK(c >= (1 + W1) * k_t_fn(t, W1 / (1 + W1)) - 1e-8);
          CHECK(c >= 4 * W1 * W1 - 1e-12);
          CHECK(std::abs(cost_complete_from_potentials(br, t) - c) <= 1e-10);
          CHECK(entropy_gap(br, t, c) >= -1e-8);
        }
      }
    }
  }
  SUBCASE("equal marginals") {
    const auto k = share(build_complete({0.3, 0.3, 0.4}));
    const Vec a = Vec::Constant(3, 1.0 / 3);
    CHECK(cost_complete(bridge_for(k, a, a), 0.4).value == 0.0);
  }
  const auto c = share(build_circle(5));
  CHECK_THROWS_AS(cost_complete(bridge_for(c, Vec::Unit(5, 0), Vec::Unit(5, 2)), 0.5), Error);
}

TEST_CASE("hypercube cost branches") {
  Rng rng(11);
  for (int n = 2; n <= 4; ++n) {
    std::vector<double> alphas(static_cast<std::size_t>(n));
    for (double& a : alphas) a = rng.uniform(0.15, 0.85);
    const auto h = share(build_hypercube(alphas));
    for (int rep = 0; rep < 6; ++rep) {
      const ZeroTempBridge br = random_bridge(h, rng, 1 + rng.below(1 << n), 1 + rng.below(1 << n));
      const FlipTables ft = flip_tables(br);
      // each coordinate flip mass sums to the expected number of flips
      CHECK(ft.overall.sum() == doctest::Approx(br.cost).epsilon(1e-12));
      const double t2 = moment_t2(br);
      for (double t : {0.2, 0.5, 0.7}) {
        const CostValue cv = cost_hypercube(br, t);
        REQUIRE(cv.branches.size() == 3);
        for (double b : cv.branches) CHECK(cv.value >= b);
        CHECK(cv.branches[1] >= 4 * br.w1 * br.w1 / n - 1e-12);
        CHECK(cv.branches[2] >= 2.0 / n * t2 - 1e-12);
        CHECK(entropy_gap(br, t, cv.value) >= -1e-8);
      }
    }
  }
  SUBCASE("equal marginals") {
    const auto h = share(build_hypercube({0.3, 0.6}));
    const Vec a = testsupport::random_measure(rng, 4);
    for (double b : cost_hypercube(bridge_for(h, a, a), 0.5).branches) CHECK(b == 0.0);
  }
  SUBCASE("third branch near t3 = 0") {
    // the q_t form is continuous at u = 0; compare it with the raw expression
    const double t = 0.35, t2 = 0.8, n = 3;
    for (double t3 : {1e-3, 1e-6, 1e-9}) {
      const double u = t3 / (n * t2);
      const double raw = n * t2 * t2 * t2 / (t3 * t3) * (h_t_fn(t, u) + h_t_fn(1 - t, u));
      const double qform = t2 / n * (q_t_fn(t, u) + q_t_fn(1 - t, u));
      CHECK(raw == doctest::Approx(qform).epsilon(1e-9));
    }
    CHECK(t2 / n * (q_t_fn(t, 0.0) + q_t_fn(1 - t, 0.0)) == doctest::Approx(2 * t2 / n));
  }
}

TEST_CASE("slice cost branches") {
  Rng rng(12);
  const std::vector<std::pair<int, int>> shapes{{4, 2}, {5, 2}, {6, 3}, {5, 1}};
  for (auto [n, k] : shapes) {
    const auto s = share(build_bernoulli_laplace(n, k));
    const int N = static_cast<int>(s->size());
    for (int rep = 0; rep < 5; ++rep) {
      const ZeroTempBridge br = random_bridge(s, rng, 1 + rng.below(N), 1 + rng.below(N));
      const int mk = std::min(k, n - k);
      for (double t : {0.25, 0.5, 0.9}) {
        const CostValue cv = cost_slice(br, t);
        CHECK(cv.branches[0] == doctest::Approx(4.0 / mk * br.w1 * br.w1).epsilon(1e-12));
        CHECK(cv.branches[1] >= 0.5 * weak_cost_at_coupling(br) - 1e-12);
        CHECK(cv.branches[2] == doctest::Approx(2.0 / mk * moment_t2(br)).epsilon(1e-12));
        CHECK(entropy_gap(br, t, cv.value) >= -1e-8);
      }
      if (k == 1) CHECK(std::abs(cost_slice(br, 0.5).branches[0] - 4 * br.w1 * br.w1) <= 1e-10);
    }
  }
  const auto s = share(build_bernoulli_laplace(4, 2));
  const Vec a = Vec::Constant(6, 1.0 / 6);
  for (double b : cost_slice(bridge_for(s, a, a), 0.3).branches) CHECK(b == 0.0);
  CHECK_THROWS_AS(cost_hypercube(bridge_for(s, a, a), 0.3), Error);
}

TEST_CASE("convexity check") {
  Rng rng(13);
  SUBCASE("point mass to itself") {
    for (const char* spec : {"hypercube:n=3,alpha=0.3", "circle:N=6", "complete:mu=uniform:4", "bl:n=4,k=2", "zbox:n=2,lo=0,0,hi=2,2"}) {
      const auto s = share(build_model(parse_model_spec(spec)));
      const int n = static_cast<int>(s->size());
      const CostReport rep = convexity_check(s, make_marginals(*s, Vec::Unit(n, 1), Vec::Unit(n, 1)), kGrid);
      for (const CostRow& r : rep.rows) CHECK(std::abs(r.gap) < 1e-14);
      CHECK(rep.passed());
    }
  }
  SUBCASE("hypercube with rational marginals") {
    const auto h = share(build_hypercube({0.5, 0.5, 0.5, 0.5}));
    for (int rep = 0; rep < 5; ++rep) {
      Vec a = Vec::Zero(16), b = Vec::Zero(16);
      for (int i = 0; i < 10; ++i) {
        a[rng.below(16)] += 0.1;
        b[rng.below(16)] += 0.1;
      }
      const CostReport r = convexity_check(h, make_marginals(*h, a, b), kGrid);
      CHECK(r.rows.size() == kGrid.size());
      CHECK(r.worst >= -1e-8);
      for (const CostRow& row : r.rows)
        for (double g : row.branch_gaps) CHECK(g >= -1e-8);
    }
  }
  SUBCASE("circle uses second differences") {
    const auto c = share(build_circle(7));
    for (int rep = 0; rep < 5; ++rep) {
      const ZeroTempBridge br = random_bridge(c, rng, 3, 3);
      const CostReport r = convexity_check(br, kGrid);
      CHECK(r.flat);
      REQUIRE(r.second_differences.size() == 19);
      for (double d : r.second_differences) CHECK(d >= -1e-8);
      // recompute one second difference directly
      const Vec& m = c->measure();
      auto H = [&](double t) { return relative_entropy(zero_bridge_marginal(br, t), m); };
      CHECK(r.second_differences[9] == doctest::Approx(H(0.45) - 2 * H(0.5) + H(0.55)).epsilon(1e-12));
    }
  }
  SUBCASE("scaling C_t up breaks the check") {
    const auto h = share(build_hypercube({0.5, 0.5, 0.5}));
    const ZeroTempBridge br = random_bridge(h, rng, 3, 3);
    CHECK(convexity_check(br, kGrid).passed());
    CHECK_FALSE(convexity_check(br, kGrid, 10.0).passed());
  }
  SUBCASE("serialization") {
    const auto h = share(build_hypercube({0.5, 0.5}));
    const CostReport r = convexity_check(random_bridge(h, rng), {0.25, 0.5});
    const std::string csv = report_to_csv(r);
    std::istringstream in(csv);
    std::string line;
    std::getline(in, line);
    CHECK(line == "t,entropy,C_t,gap,branch1,branch2,branch3");
    int rows = 0;
    while (std::getline(in, line))
      if (!line.empty() && line[0] != '#') ++rows;
    CHECK(rows == 2);
    const nlohmann::json j = report_to_json(r);
    CHECK(j.at("rows").size() == 2);
    CHECK(j.at("W1").get<double>() == r.W1);
  }
  SUBCASE("custom spaces are rejected") {
    const GraphSpace plain(build_circle(4).labels(), build_circle(4).generator(), build_circle(4).measure());
    const auto s = share(plain);
    CHECK_THROWS_AS(convexity_check(s, make_marginals(*s, Vec::Unit(4, 0), Vec::Unit(4, 2)), kGrid), Error);
  }
}

TEST_CASE("transport-entropy inequalities") {
  Rng rng(14);
  SUBCASE("stationary marginals") {
    const auto h = share(build_hypercube({0.3, 0.6}));
    for (const auto& c : transport_entropy_check(bridge_for(h, h->measure(), h->measure()))) {
      CHECK(c.lhs == doctest::Approx(0.0));
      CHECK(c.slack() >= 0.0);
    }
  }
  SUBCASE("hypercube, Dirac against the product measure") {
    const auto h = share(build_hypercube({0.5, 0.4, 0.6, 0.5, 0.3}));
    const auto checks = transport_entropy_check(bridge_for(h, Vec::Unit(32, 5), h->measure()));
    REQUIRE(checks.size() == 4);
    for (const auto& c : checks) CHECK(c.slack() >= -1e-8);
  }
  SUBCASE("complete graph") {
    const auto k = share(build_complete({0.1, 0.1, 0.2, 0.2, 0.15, 0.25}));
    for (int rep = 0; rep < 10; ++rep)
      for (const auto& c : transport_entropy_check(random_bridge(k, rng, 2, 3))) CHECK(c.slack() >= -1e-8);
  }
  SUBCASE("slice") {
    const auto s = share(build_bernoulli_laplace(5, 2));
    for (int rep = 0; rep < 10; ++rep)
      for (const auto& c : transport_entropy_check(random_bridge(s, rng, 2, 3))) CHECK(c.slack() >= -1e-8);
  }
  const auto c = share(build_circle(5));
  CHECK_THROWS_AS(transport_entropy_check(bridge_for(c, Vec::Unit(5, 0), Vec::Unit(5, 2))), Error);
}

TEST_CASE("Prekopa-Leindler implication") {
  const GraphSpace h = build_hypercube({0.3, 0.5, 0.7});
  const Vec zero = Vec::Zero(8);
  const PrekopaResult z = prekopa_check(h, zero, zero, zero, 0.4);
  CHECK(std::abs(z.conclusion_slack) < 1e-15);
  CHECK(std::abs(z.premise_slack) < 1e-15);
  const Vec c = Vec::Constant(8, 1.7);
  CHECK(std::abs(prekopa_check(h, c, c, c, 0.6).conclusion_slack) < 1e-12);

  Rng rng(15);
  for (const char* spec : {"hypercube:n=3,alpha=0.3,0.5,0.7", "bl:n=5,k=2", "circle:N=6", "complete:mu=uniform:4"}) {
    const GraphSpace s = build_model(parse_model_spec(spec));
    const int n = static_cast<int>(s.size());
    for (int rep = 0; rep < 10; ++rep) {
      Vec f(n), g(n);
      for (int i = 0; i < n; ++i) {
        f[i] = rng.uniform(-2.0, 2.0);
        g[i] = rng.uniform(-2.0, 2.0);
      }
      const double t = rng.uniform(0.1, 0.9);
      const Vec hh = sup_convolution_h(s, f, g, t);
      const PrekopaResult r = prekopa_check(s, f, g, hh, t);
      CHECK(r.premise_slack >= -1e-12);
      CHECK(r.conclusion_slack >= -1e-8);
      // lowering h below the premise is reported with the worst pair
      const Vec low = hh - Vec::Constant(n, 0.5);
      CHECK_THROWS_AS(prekopa_check(s, f, g, low, t), Error);
    }
  }
  CHECK(pointwise_cost(h, 0, 7) == doctest::Approx(2.0 / 3.0 * 6.0));
  CHECK(pointwise_cost(build_circle(6), 0, 3) == 0.0);
}

}  // TEST_SUITE
