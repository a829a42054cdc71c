// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.
// Every tolerance, seed count and time budget is a constant in this file.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <limits>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "entrocurve/commands.hpp"
#include "entrocurve/costs.hpp"
#include "entrocurve/models.hpp"
#include "entrocurve/zerotemp.hpp"

using namespace entrocurve;

namespace {

constexpr double kGapTol = 1e-8;
constexpr double kSlackTol = 1e-8;
constexpr double kKappaOneTol = 1e-10;
constexpr double kD1Tol = 1e-5, kD1Step = 1e-4;
constexpr double kD2Tol = 1e-3, kD2Step = 1e-3;
constexpr double kRatioFactor = 1.5;

constexpr double kCertMarginal = 1e-9;
constexpr double kCertLp = 1e-7;
constexpr double kCertNormalization = 1e-12;
constexpr double kCertSpeed = 1e-7;

// splitmix64; seeds are small integers mixed with a per-criterion salt
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : s_(seed) {}
  std::uint64_t next() {
    std::uint64_t z = (s_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  double uniform(double a, double b) { return a + (b - a) * uniform(); }
  int below(int n) { return static_cast<int>(next() % static_cast<std::uint64_t>(n)); }

 private:
  std::uint64_t s_;
};

std::uint64_t salt(int criterion, std::uint64_t seed) { return (static_cast<std::uint64_t>(criterion) << 32) ^ seed; }

// probability vector on `support`, zero elsewhere
Vec weights_on(Rng& rng, int n, const std::vector<int>& support) {
  Vec v = Vec::Zero(n);
  for (int z : support) v[z] = rng.uniform(0.05, 1.0);
  return v / v.sum();
}

// random support of size 1..max_k drawn from `pool`, as a vector of length n
Vec random_measure(Rng& rng, int n, const std::vector<int>& pool, int max_k) {
  std::vector<int> p = pool;
  for (std::size_t i = p.size(); i > 1; --i) std::swap(p[i - 1], p[static_cast<std::size_t>(rng.below(static_cast<int>(i)))]);
  const int k = 1 + rng.below(std::min<int>(max_k, static_cast<int>(p.size())));
  p.resize(static_cast<std::size_t>(k));
  return weights_on(rng, n, p);
}

std::vector<int> all_vertices(const GraphSpace& X) {
  std::vector<int> v(X.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = static_cast<int>(i);
  return v;
}

Vec full_support(Rng& rng, const GraphSpace& X) { return weights_on(rng, static_cast<int>(X.size()), all_vertices(X)); }

std::vector<double> grid_interior() {
  std::vector<double> g;
  for (int k = 1; k <= 9; ++k) g.push_back(k / 10.0);
  return g;
}

ZeroTempOptions no_schedule() {
  ZeroTempOptions o;
  o.run_schedule = false;
  return o;
}

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

// Certificates gathered over every limit coupling computed by criteria 1-5 and 7.
struct CertificateTally {
  long count = 0, failures = 0;
  double marginal = 0.0, lp = 0.0, cyclic = -std::numeric_limits<double>::infinity(), normalization = 0.0,
         speed = 0.0;
  bool disjoint = true, support = true;

  void add(const ZeroTempBridge& br) {
    const Certificate c = certify(br);
    ++count;
    marginal = std::max(marginal, c.marginal_error);
    lp = std::max(lp, c.lp_gap);
    cyclic = std::max(cyclic, c.cyclic_excess);
    normalization = std::max(normalization, c.normalization_error);
    speed = std::max(speed, c.speed_deviation);
    disjoint = disjoint && c.disjoint;
    support = support && c.support_constant;
    if (!accept(c)) ++failures;
  }
  static bool accept(const Certificate& c) {
    return c.marginal_error <= kCertMarginal && c.lp_gap <= kCertLp && c.cyclic_excess <= 0.0 && c.disjoint &&
           c.support_constant && c.normalization_error <= kCertNormalization && c.speed_deviation <= kCertSpeed;
  }
};

CertificateTally g_certs;

// Instances kept for the negative controls of criterion 9.
std::vector<ZeroTempBridge> g_controls;

ZeroTempBridge make_bridge(const SpacePtr& X, const Vec& nu0, const Vec& nu1,
                           const ZeroTempOptions& opts = no_schedule(),
                           const std::vector<double>& schedule = default_gamma_schedule()) {
  ZeroTempBridge br = limit_coupling(X, make_marginals(*X, nu0, nu1), schedule, opts);
  g_certs.add(br);
  return br;
}

struct Outcome {
  bool ok = true;
  std::string detail;
};

struct Criterion {
  int id;
  std::string title;
  double budget_s;
  std::function<Outcome()> run;
};

// 1: flatness on Z^2 boxes. Intervals of a box are those of Z^2 and all edge
// rates are 1, so the zero-temperature bridge does not see the boundary; the
// pad is clipped to what fits in the 9x9 cap.
Outcome lattice_boxes() {
  constexpr int kSeeds = 50;
  double worst = std::numeric_limits<double>::infinity();
  long cases = 0;
  Outcome out;
  for (int side = 3; side <= 9; ++side) {
    for (std::uint64_t seed = 0; seed < kSeeds; ++seed) {
      Rng rng(salt(1, seed * 16 + static_cast<std::uint64_t>(side)));
      const int a = 1 + rng.below(side), b = 1 + rng.below(side);
      const int want_pad = (a - 1) + (b - 1);
      const int pad_x = std::min(want_pad, (side - a) / 2), pad_y = std::min(want_pad, (side - b) / 2);
      const auto X = std::make_shared<const GraphSpace>(build_lattice_box({0, 0}, {side - 1, side - 1}));
      std::vector<int> region;
      for (int i = 0; i < a; ++i)
        for (int j = 0; j < b; ++j) region.push_back(find_vertex(*X, {pad_x + i, pad_y + j}));
      const int cap = std::max(1, static_cast<int>(region.size()) / 2);
      const Vec nu0 = random_measure(rng, static_cast<int>(X->size()), region, cap);
      const Vec nu1 = random_measure(rng, static_cast<int>(X->size()), region, cap);
      const ZeroTempBridge br = make_bridge(X, nu0, nu1);
      const CostReport rep = convexity_check(br, grid_interior());
      worst = std::min(worst, rep.worst);
      ++cases;
      // 19 second differences from the 21-point grid on [0,1]
      if (!rep.passed(kGapTol) || rep.second_differences.size() != 19) out.ok = false;
      if (side == 5 && seed < 3) g_controls.push_back(br);
    }
  }
  out.detail = std::to_string(cases) + " instances, worst second difference " + sci(worst);
  return out;
}

// 2: circles, with antipodal Diracs and antipodal two-point mixtures on even N
Outcome circles() {
  constexpr int kSeeds = 20;
  double worst = std::numeric_limits<double>::infinity();
  long cases = 0, antipodal = 0;
  Outcome out;
  for (int N : {5, 6, 7, 8, 12}) {
    const auto X = std::make_shared<const GraphSpace>(build_circle(N));
    for (std::uint64_t seed = 0; seed < kSeeds; ++seed) {
      Rng rng(salt(2, seed * 64 + static_cast<std::uint64_t>(N)));
      Vec nu0, nu1;
      if (N % 2 == 0 && seed % 4 == 0) {
        const int x = rng.below(N);
        nu0 = Vec::Unit(N, x);
        nu1 = Vec::Unit(N, (x + N / 2) % N);
        ++antipodal;
      } else if (N % 2 == 0 && seed % 4 == 1) {
        const int x = rng.below(N), y = (x + 1 + rng.below(N - 1)) % N;
        nu0 = weights_on(rng, N, {x, y});
        nu1 = Vec::Zero(N);
        nu1[(x + N / 2) % N] = nu0[x];
        nu1[(y + N / 2) % N] += nu0[y];
        ++antipodal;
      } else {
        nu0 = random_measure(rng, N, all_vertices(*X), N);
        nu1 = random_measure(rng, N, all_vertices(*X), N);
      }
      const ZeroTempBridge br = make_bridge(X, nu0, nu1);
      const CostReport rep = convexity_check(br, grid_interior());
      worst = std::min(worst, rep.worst);
      ++cases;
      // 19 second differences from the 21-point grid on [0,1]
      if (!rep.passed(kGapTol) || rep.second_differences.size() != 19) out.ok = false;
    }
  }
  out.detail = std::to_string(cases) + " instances (" + std::to_string(antipodal) +
               " antipodal), worst second difference " + sci(worst);
  return out;
}

// 3: complete graphs: gap, the k_t lower bound on C_t, and Pinsker
Outcome complete_graphs() {
  constexpr int kSeeds = 50;
  double worst_gap = std::numeric_limits<double>::infinity(), worst_zut = worst_gap, worst_ckp = worst_gap;
  long cases = 0;
  Outcome out;
  for (int n = 2; n <= 8; ++n) {
    for (std::uint64_t seed = 0; seed < kSeeds; ++seed) {
      Rng rng(salt(3, seed * 16 + static_cast<std::uint64_t>(n)));
      std::vector<double> mu(static_cast<std::size_t>(n), 1.0 / n);
      if (seed % 2 == 1) {
        double s = 0.0;
        for (double& w : mu) s += (w = rng.uniform(0.1, 1.0));
        for (double& w : mu) w /= s;
      }
      const auto X = std::make_shared<const GraphSpace>(build_complete(mu));
      const Vec nu0 = random_measure(rng, n, all_vertices(*X), n);
      const Vec nu1 = random_measure(rng, n, all_vertices(*X), n);
      const ZeroTempBridge br = make_bridge(X, nu0, nu1);
      const CostReport rep = convexity_check(br, grid_interior());
      worst_gap = std::min(worst_gap, rep.worst);
      const double W1 = br.w1;
      for (const CostRow& row : rep.rows) {
        const double zut = row.cost - (1.0 + W1) * k_t_fn(row.t, W1 / (1.0 + W1));
        worst_zut = std::min(worst_zut, zut);
      }
      for (const InequalityCheck& ic : transport_entropy_check(br))
        if (ic.name == "pinsker") worst_ckp = std::min(worst_ckp, ic.slack());
      ++cases;
      if (n == 4 && seed < 3) g_controls.push_back(br);
    }
  }
  out.ok = worst_gap >= -kGapTol && worst_zut >= -kSlackTol && worst_ckp >= -kSlackTol;
  out.detail = std::to_string(cases) + " instances, worst gap " + sci(worst_gap) + ", k_t bound slack " +
               sci(worst_zut) + ", Pinsker slack " + sci(worst_ckp);
  return out;
}

// 4: hypercubes, each branch separately plus the W1 and W2^d inequalities
Outcome hypercubes() {
  constexpr int kSeeds = 30;
  double worst_branch = std::numeric_limits<double>::infinity(), worst_w1 = worst_branch, worst_w2d = worst_branch;
  long cases = 0;
  Outcome out;
  for (int n = 2; n <= 5; ++n) {
    for (std::uint64_t seed = 0; seed < kSeeds; ++seed) {
      Rng rng(salt(4, seed * 16 + static_cast<std::uint64_t>(n)));
      std::vector<double> alpha(static_cast<std::size_t>(n));
      for (double& a : alpha) a = rng.uniform(0.1, 0.9);
      const auto X = std::make_shared<const GraphSpace>(build_hypercube(alpha));
      const int N = static_cast<int>(X->size());
      const Vec nu0 = random_measure(rng, N, all_vertices(*X), N);
      const Vec nu1 = random_measure(rng, N, all_vertices(*X), N);
      const ZeroTempBridge br = make_bridge(X, nu0, nu1);
      const CostReport rep = convexity_check(br, grid_interior());
      for (const CostRow& row : rep.rows)
        for (double g : row.branch_gaps) worst_branch = std::min(worst_branch, g);
      for (const InequalityCheck& ic : transport_entropy_check(br)) {
        if (ic.name == "w1") worst_w1 = std::min(worst_w1, ic.slack());
        if (ic.name == "w2d") worst_w2d = std::min(worst_w2d, ic.slack());
      }
      ++cases;
      if (n == 3 && seed < 5) g_controls.push_back(br);
    }
  }
  out.ok = worst_branch >= -kGapTol && worst_w1 >= -kSlackTol && worst_w2d >= -kSlackTol;
  out.detail = std::to_string(cases) + " instances, worst branch gap " + sci(worst_branch) + ", W1 slack " +
               sci(worst_w1) + ", W2d slack " + sci(worst_w2d);
  return out;
}

// 5: slices; for kappa = 1 the slice is the complete graph on n points, and
// branch (i) is compared with 4 W1^2 computed there.
Outcome slices() {
  constexpr int kSeeds = 30;
  const std::pair<int, int> shapes[] = {{3, 1}, {4, 2}, {5, 2}, {6, 3}};
  double worst_branch = std::numeric_limits<double>::infinity(), kappa_one = 0.0;
  long cases = 0;
  Outcome out;
  for (auto [n, kappa] : shapes) {
    const auto X = std::make_shared<const GraphSpace>(build_bernoulli_laplace(n, kappa));
    const auto K = std::make_shared<const GraphSpace>(build_complete(std::vector<double>(static_cast<std::size_t>(n), 1.0 / n)));
    const int N = static_cast<int>(X->size());
    for (std::uint64_t seed = 0; seed < kSeeds; ++seed) {
      Rng rng(salt(5, seed * 64 + static_cast<std::uint64_t>(n * 8 + kappa)));
      const Vec nu0 = random_measure(rng, N, all_vertices(*X), N);
      const Vec nu1 = random_measure(rng, N, all_vertices(*X), N);
      const ZeroTempBridge br = make_bridge(X, nu0, nu1);
      const CostReport rep = convexity_check(br, grid_interior());
      for (const CostRow& row : rep.rows)
        for (double g : row.branch_gaps) worst_branch = std::min(worst_branch, g);
      if (kappa == 1) {
        // vertex with its single 1 in position i  <->  point i of K_n
        Vec m0 = Vec::Zero(n), m1 = Vec::Zero(n);
        for (int z = 0; z < N; ++z) {
          const Label& lab = X->label(z);
          const int i = static_cast<int>(std::find(lab.begin(), lab.end(), 1) - lab.begin());
          m0[i] += nu0[z];
          m1[i] += nu1[z];
        }
        const double W1k = w1(*K, m0, m1).value;
        for (const CostRow& row : rep.rows)
          kappa_one = std::max(kappa_one, std::abs(row.branches.at(0) - 4.0 * W1k * W1k));
      }
      ++cases;
      if (n == 5 && seed < 3) g_controls.push_back(br);
    }
  }
  out.ok = worst_branch >= -kGapTol && kappa_one <= kKappaOneTol;
  out.detail = std::to_string(cases) + " instances, worst branch gap " + sci(worst_branch) +
               ", kappa=1 branch (i) vs complete 4 W1^2 " + sci(kappa_one);
  return out;
}

// 6: closed-form phi', psi', phi'', psi'' against central differences
Outcome derivative_audit() {
  constexpr int kSeeds = 4;
  double worst1 = 0.0, worst2 = 0.0;
  long evaluations = 0;
  std::vector<SpacePtr> spaces;
  for (int n = 2; n <= 4; ++n) {
    Rng rng(salt(6, static_cast<std::uint64_t>(n)));
    std::vector<double> mu(static_cast<std::size_t>(n));
    double s = 0.0;
    for (double& w : mu) s += (w = rng.uniform(0.1, 1.0));
    for (double& w : mu) w /= s;
    spaces.push_back(std::make_shared<const GraphSpace>(build_complete(mu)));
  }
  for (int n = 1; n <= 3; ++n) {
    Rng rng(salt(6, 100 + static_cast<std::uint64_t>(n)));
    std::vector<double> alpha(static_cast<std::size_t>(n));
    for (double& a : alpha) a = rng.uniform(0.1, 0.9);
    spaces.push_back(std::make_shared<const GraphSpace>(build_hypercube(alpha)));
  }
  for (std::size_t si = 0; si < spaces.size(); ++si) {
    const SpacePtr& X = spaces[si];
    for (std::uint64_t seed = 0; seed < kSeeds; ++seed) {
      Rng rng(salt(6, 1000 + si * 16 + seed));
      const int N = static_cast<int>(X->size());
      const MarginalPair mp = make_marginals(*X, random_measure(rng, N, all_vertices(*X), N),
                                             random_measure(rng, N, all_vertices(*X), N));
      for (double gamma : {0.1, 0.2}) {
        const SchrodingerSolution sol = solve_schrodinger(X, gamma, mp);
        for (double t : grid_interior()) {
          const auto d1 = phi_psi_d1(sol, t), d2 = phi_psi_d2(sol, t), p0 = phi_psi(sol, t);
          const auto pa = phi_psi(sol, t + kD1Step), pb = phi_psi(sol, t - kD1Step);
          const auto qa = phi_psi(sol, t + kD2Step), qb = phi_psi(sol, t - kD2Step);
          const double h1 = 2.0 * kD1Step, h2 = kD2Step * kD2Step;
          worst1 = std::max({worst1, audit_relative_error(d1.first, (pa.first - pb.first) / h1),
                             audit_relative_error(d1.second, (pa.second - pb.second) / h1)});
          worst2 = std::max({worst2, audit_relative_error(d2.first, (qa.first - 2 * p0.first + qb.first) / h2),
                             audit_relative_error(d2.second, (qa.second - 2 * p0.second + qb.second) / h2)});
          ++evaluations;
        }
      }
    }
  }
  Outcome out;
  out.ok = worst1 <= kD1Tol && worst2 <= kD2Tol;
  out.detail = std::to_string(evaluations) + " (gamma, t) points, worst relative error d1 " + sci(worst1) +
               ", d2 " + sci(worst2);
  return out;
}

// 7: convergence of couplings, bridges and ratios along the default schedule
Outcome slowing_down() {
  constexpr int kSeeds = 5;
  const std::vector<double> ts{0.25, 0.5, 0.75};
  const std::vector<double>& sched = default_gamma_schedule();
  long cases = 0, monotone_fail = 0, ratio_fail = 0;
  double worst_factor = std::numeric_limits<double>::infinity();
  std::vector<SpacePtr> spaces;
  {
    Rng rng(salt(7, 1));
    std::vector<double> alpha(3);
    for (double& a : alpha) a = rng.uniform(0.1, 0.9);
    spaces.push_back(std::make_shared<const GraphSpace>(build_hypercube(alpha)));
    spaces.push_back(std::make_shared<const GraphSpace>(build_complete({0.1, 0.2, 0.3, 0.4})));
  }
  for (std::size_t si = 0; si < spaces.size(); ++si) {
    const SpacePtr& X = spaces[si];
    for (std::uint64_t seed = 0; seed < kSeeds; ++seed) {
      Rng rng(salt(7, 100 + si * 16 + seed));
      const ZeroTempBridge br = make_bridge(X, full_support(rng, *X), full_support(rng, *X));
      std::vector<double> dpi, dq, dratio;
      std::vector<LimitRatioTable> tabs;
      for (double t : ts) tabs.push_back(limit_ratios(br, t));
      for (double gamma : sched) {
        const SchrodingerSolution sol = solve_schrodinger(X, gamma, br.marginals);
        dpi.push_back((sol.coupling() - br.coupling).cwiseAbs().maxCoeff());
        double q = 0.0, r = 0.0;
        for (std::size_t k = 0; k < ts.size(); ++k) {
          q = std::max(q, (bridge_marginal(sol, ts[k]) - zero_bridge_marginal(br, ts[k])).cwiseAbs().maxCoeff());
          const Potentials pot = schrodinger_potentials(sol, ts[k]);
          const LimitRatioTable& tab = tabs[k];
          for (int z = 0; z < static_cast<int>(X->size()); ++z) {
            if (!tab.in_support[static_cast<std::size_t>(z)]) continue;
            for (int zp : X->neighbors(z)) {
              r = std::max(r, std::abs(gamma * std::exp(pot.F[zp] - pot.F[z]) - tab.A(z, zp)));
              r = std::max(r, std::abs(gamma * std::exp(pot.G[zp] - pot.G[z]) - tab.B(z, zp)));
            }
          }
        }
        dq.push_back(q);
        dratio.push_back(r);
      }
      bool mono = true;
      for (std::size_t k = 1; k < sched.size(); ++k) mono = mono && dpi[k] < dpi[k - 1] && dq[k] < dq[k - 1];
      if (!mono) ++monotone_fail;
      const std::size_t K = sched.size();
      const double factor = dratio[K - 2] / dratio[K - 1];
      worst_factor = std::min(worst_factor, factor);
      if (!(factor >= kRatioFactor)) ++ratio_fail;
      ++cases;
    }
  }
  Outcome out;
  out.ok = monotone_fail == 0 && ratio_fail == 0;
  out.detail = std::to_string(cases) + " instances, " + std::to_string(monotone_fail) +
               " non-monotone, smallest ratio-error reduction " + sci(worst_factor) + "x";
  return out;
}

Outcome certificates() {
  Outcome out;
  out.ok = g_certs.count > 0 && g_certs.failures == 0;
  out.detail = std::to_string(g_certs.count) + " couplings, " + std::to_string(g_certs.failures) +
               " rejected; worst marginal " + sci(g_certs.marginal) + ", LP gap " + sci(g_certs.lp) +
               ", cyclic excess " + sci(g_certs.cyclic) + ", normalization " + sci(g_certs.normalization) +
               ", speed " + sci(g_certs.speed) + (g_certs.disjoint ? "" : ", C_-> meets C_<-") +
               (g_certs.support ? "" : ", support varies with t");
  return out;
}

// 9: the checkers must reject a tenfold C_t and a swap that breaks cyclic monotonicity
Outcome negative_controls() {
  long scaled = 0, scaled_caught = 0, swapped = 0, swapped_caught = 0;
  for (const ZeroTempBridge& br : g_controls) {
    const GraphSpace& X = *br.space;
    if (X.model().tag != ModelTag::LatticeBox && br.w1 > 1e-9) {
      ++scaled;
      if (!convexity_check(br, grid_interior(), 10.0).passed(kGapTol)) ++scaled_caught;
    }
    // first pair of support entries whose swap lengthens the plan
    bool done = false;
    for (std::size_t a = 0; a < br.support.size() && !done; ++a) {
      for (std::size_t b = a + 1; b < br.support.size() && !done; ++b) {
        const auto [x1, y1] = br.support[a];
        const auto [x2, y2] = br.support[b];
        if (x1 == x2 || y1 == y2) continue;
        if (X.dist(x1, y2) + X.dist(x2, y1) <= X.dist(x1, y1) + X.dist(x2, y2)) continue;
        const double eps = std::min(br.coupling(x1, y1), br.coupling(x2, y2));
        Mat bad = br.coupling;
        bad(x1, y1) -= eps;
        bad(x2, y2) -= eps;
        bad(x1, y2) += eps;
        bad(x2, y1) += eps;
        ++swapped;
        if (!CertificateTally::accept(certify(bridge_from_coupling(br.space, br.marginals, bad)))) ++swapped_caught;
        done = true;
      }
    }
  }
  Outcome out;
  out.ok = scaled > 0 && swapped > 0 && scaled_caught == scaled && swapped_caught == swapped;
  out.detail = "C_t x10 rejected " + std::to_string(scaled_caught) + "/" + std::to_string(scaled) +
               ", swapped couplings rejected " + std::to_string(swapped_caught) + "/" + std::to_string(swapped);
  return out;
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "lattice box flatness", 120, lattice_boxes},
      {2, "circle flatness", 60, circles},
      {3, "complete graph", 120, complete_graphs},
      {4, "hypercube", 600, hypercubes},
      {5, "Bernoulli-Laplace slices", 300, slices},
      {6, "derivative audit", 60, derivative_audit},
      {7, "slowing down", 120, slowing_down},
      {8, "structural certificates", 0, certificates},
      {9, "negative controls", 0, negative_controls},
  };
  bool all = true;
  for (const Criterion& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = c.budget_s <= 0 || secs <= c.budget_s;
    const bool ok = o.ok && in_time;
    all = all && ok;
    std::ostringstream line;
    line << (ok ? "PASS" : "FAIL") << ' ' << c.id << ' ' << c.title << ": " << o.detail << "; " << sci(secs) << " s";
    if (c.budget_s > 0) line << " (budget " << c.budget_s << " s)";
    std::puts(line.str().c_str());
    std::fflush(stdout);
  }
  return all ? 0 : 1;
}
