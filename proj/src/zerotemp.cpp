#include "entrocurve/zerotemp.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "entrocurve/error.hpp"
#include "entrocurve/transport.hpp"

namespace entrocurve {

namespace {

std::vector<long long> distance_costs(const GraphSpace& space) {
  const auto& d = space.distance_matrix();
  return {d.begin(), d.end()};
}

double factorial(int d) {
  double f = 1.0;
  for (int i = 2; i <= d; ++i) f *= i;
  return f;
}

double max_abs_diff(const Mat& a, const Mat& b) { return (a - b).cwiseAbs().maxCoeff(); }

std::vector<std::pair<int, int>> support_pairs(const Mat& pi) {
  std::vector<std::pair<int, int>> s;
  for (Eigen::Index x = 0; x < pi.rows(); ++x)
    for (Eigen::Index y = 0; y < pi.cols(); ++y)
      if (pi(x, y) > 0.0) s.emplace_back(static_cast<int>(x), static_cast<int>(y));
  return s;
}

// Sinkhorn scaling of a nonnegative kernel to marginals (a, b); the kernel
// must admit a feasible plan with the same zero pattern.
Mat scale_to_marginals(const Mat& K, const Vec& a, const Vec& b, double tol, long max_iter) {
  const Eigen::Index n = K.rows();
  Vec u = Vec::Ones(n), v = Vec::Ones(n);
  double err = 0.0, best = std::numeric_limits<double>::infinity();
  long stall = 0;
  for (long it = 0; it < max_iter; ++it) {
    const Vec row = K * v;
    for (Eigen::Index i = 0; i < n; ++i) u[i] = a[i] > 0.0 ? a[i] / row[i] : 0.0;
    const Vec col = K.transpose() * u;
    for (Eigen::Index j = 0; j < n; ++j) v[j] = b[j] > 0.0 ? b[j] / col[j] : 0.0;
    const Vec rows_now = u.cwiseProduct(K * v);
    err = (rows_now - a).cwiseAbs().maxCoeff();
    if (err <= tol) return u.asDiagonal() * K * v.asDiagonal();
    // roundoff floor: accept once progress stops well below any tolerance used downstream
    if (err < best * (1.0 - 1e-3)) {
      best = err;
      stall = 0;
    } else if (++stall > 50 && err <= 1e-13) {
      return u.asDiagonal() * K * v.asDiagonal();
    }
  }
  std::ostringstream os;
  os << "proportional fitting on the optimal face stopped with marginal error " << err;
  throw Error(ErrorKind::NotConverged, os.str());
}

void check_unit_t(double t) {
  if (!(t >= 0.0 && t <= 1.0)) throw Error(ErrorKind::DomainError, "t must lie in [0,1]");
}

}  // namespace

double binomial_weight(double t, int d, int k) {
  if (d < 0 || k < 0 || k > d) {
    std::ostringstream os;
    os << "binomial index k=" << k << " outside 0.." << d;
    throw Error(ErrorKind::IndexOutOfRange, os.str());
  }
  double c = 1.0;
  for (int i = 1; i <= k; ++i) c = c * (d - k + i) / i;
  return c * std::pow(t, k) * std::pow(1.0 - t, d - k);
}

Vec pair_bridge_zero(const GraphSpace& space, int x, int y, double t) {
  check_unit_t(t);
  const GeodesicDag dag = geodesic_interval(space, x, y);
  const int d = dag.length();
  const double gxy = space.geodesic_weight(x, y);
  Vec nu = Vec::Zero(static_cast<Eigen::Index>(space.size()));
  for (int k = 0; k <= d; ++k) {
    const double rho = binomial_weight(t, d, k);
    for (int z : dag.layers[static_cast<std::size_t>(k)])
      nu[z] = space.geodesic_weight(x, z) * space.geodesic_weight(z, y) / gxy * rho;
  }
  return nu;
}

ZeroTempBridge bridge_from_coupling(SpacePtr space, const MarginalPair& marginals, const Mat& coupling) {
  ZeroTempBridge br;
  br.space = space;
  br.marginals = marginals;
  br.coupling = coupling;
  br.support = support_pairs(coupling);
  br.w1 = solve_transport(marginals.nu0, marginals.nu1, distance_costs(*space)).cost;
  for (auto [x, y] : br.support) br.cost += space->dist(x, y) * coupling(x, y);
  return br;
}

ZeroTempBridge limit_coupling(SpacePtr space, const MarginalPair& mp, const std::vector<double>& schedule,
                              const ZeroTempOptions& opts) {
  if (schedule.size() < 3) throw Error(ErrorKind::BadParameter, "gamma schedule needs at least 3 values");
  for (std::size_t k = 0; k < schedule.size(); ++k) {
    if (!(schedule[k] >= kGammaFloor && schedule[k] < 1.0))
      throw Error(ErrorKind::BadParameter, "gamma schedule entries must lie in [1e-4, 1)");
    if (k > 0 && !(schedule[k] < schedule[k - 1]))
      throw Error(ErrorKind::BadParameter, "gamma schedule must be strictly decreasing");
  }
  const GraphSpace& X = *space;
  const auto n = static_cast<Eigen::Index>(X.size());
  const auto cost = distance_costs(X);
  const TransportPlan tp = solve_transport(mp.nu0, mp.nu1, cost);

  ZeroTempBridge br;
  br.space = space;
  br.marginals = mp;
  br.w1 = tp.cost;
  br.face = optimal_face_support(tp, cost);

  // Entropic couplings satisfy H(pi | R^gamma) = log(1/gamma) sum d pi + H(pi | c) + O(gamma)
  // with c(x,y) = m(x) L^d(x,y) / d!; the limit is the c-projection onto the optimal face.
  Mat K = Mat::Zero(n, n);
  for (Eigen::Index x = 0; x < n; ++x)
    for (Eigen::Index y = 0; y < n; ++y)
      if (br.face[static_cast<std::size_t>(x * n + y)])
        K(x, y) = X.measure()[x] * X.geodesic_weight(static_cast<int>(x), static_cast<int>(y)) /
                  factorial(X.dist(static_cast<int>(x), static_cast<int>(y)));
  br.coupling = scale_to_marginals(K, mp.nu0, mp.nu1, opts.ipf_tol, opts.ipf_max_iter);
  br.support = support_pairs(br.coupling);
  for (auto [x, y] : br.support) br.cost += X.dist(x, y) * br.coupling(x, y);
  if (std::abs(br.cost - br.w1) > 1e-5) {
    std::ostringstream os;
    os << "limit coupling cost " << br.cost << " differs from the LP value " << br.w1;
    throw Error(ErrorKind::NotConverged, os.str());
  }
  if (!opts.run_schedule) return br;

  SlowdownDiagnostics& diag = br.diagnostics;
  const Vec q_half = zero_bridge_marginal(br, 0.5);
  std::vector<Mat> couplings;
  for (double gamma : schedule) {
    const SchrodingerSolution sol = solve_schrodinger(space, gamma, mp, opts.solve);
    couplings.push_back(sol.coupling());
    SlowdownStep step;
    step.gamma = gamma;
    step.iterations = sol.iterations;
    step.residual = sol.residual;
    step.coupling_distance = max_abs_diff(couplings.back(), br.coupling);
    step.bridge_distance = (bridge_marginal(sol, 0.5) - q_half).cwiseAbs().maxCoeff();
    diag.steps.push_back(step);
  }
  const std::size_t K_last = schedule.size() - 1;
  // distances at roundoff level carry no rate information
  constexpr double kNoise = 1e-12;
  for (std::size_t k = 1; k <= K_last; ++k) {
    const double e0 = diag.steps[k - 1].coupling_distance, e1 = diag.steps[k].coupling_distance;
    if (e0 <= kNoise || e1 <= kNoise) {
      diag.empirical_orders.push_back(std::numeric_limits<double>::quiet_NaN());
      continue;
    }
    diag.empirical_orders.push_back(std::log(e0 / e1) / std::log(schedule[k - 1] / schedule[k]));
    if (e1 > e0) {
      std::ostringstream os;
      os << "coupling distance rose from " << e0 << " to " << e1 << " at gamma " << schedule[k];
      diag.warnings.push_back(os.str());
    }
  }
  const double last_order = diag.empirical_orders.back();
  if (std::isfinite(last_order) && last_order < opts.min_order) {
    std::ostringstream os;
    os << "empirical order " << last_order << " below " << opts.min_order;
    diag.warnings.push_back(os.str());
  }
  const double r = schedule[K_last - 1] / schedule[K_last];
  const Mat extrapolated = (r * couplings[K_last] - couplings[K_last - 1]) / (r - 1.0);
  diag.extrapolation_distance = max_abs_diff(extrapolated, br.coupling);
  diag.last_change = max_abs_diff(couplings[K_last], couplings[K_last - 1]);
  if (diag.last_change > opts.max_last_change) {
    std::ostringstream os;
    os << "successive couplings differ by " << diag.last_change << " at the end of the schedule";
    throw Error(ErrorKind::ScheduleTooCoarse, os.str());
  }
  return br;
}

Vec zero_bridge_marginal(const ZeroTempBridge& br, double t) {
  check_unit_t(t);
  const GraphSpace& X = *br.space;
  const int n = static_cast<int>(X.size());
  Vec q = Vec::Zero(n);
  for (int z = 0; z < n; ++z) {
    double s = 0.0;
    for (auto [x, y] : br.support) {
      if (!in_interval(X, x, z, y)) continue;
      s += br.coupling(x, y) * ratio_r(X, x, z, z, y) * binomial_weight(t, X.dist(x, y), X.dist(x, z));
    }
    q[z] = s;
  }
  return q;
}

double constant_speed_check(const ZeroTempBridge& br, double s, double t) {
  if (!(s >= 0.0 && s <= t && t <= 1.0)) throw Error(ErrorKind::DomainError, "need 0 <= s <= t <= 1");
  if (s == t) return 0.0;
  const Vec qs = zero_bridge_marginal(br, s), qt = zero_bridge_marginal(br, t);
  const double w = solve_transport(qs, qt, distance_costs(*br.space)).cost;
  return std::abs(w - (t - s) * br.w1);
}

double cyclic_monotonicity_excess(const GraphSpace& X, const std::vector<std::pair<int, int>>& sup) {
  double worst = -std::numeric_limits<double>::infinity();
  const std::size_t k = sup.size();
  if (k < 2) return 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    const auto [x1, y1] = sup[i];
    for (std::size_t j = i + 1; j < k; ++j) {
      const auto [x2, y2] = sup[j];
      const int base2 = X.dist(x1, y1) + X.dist(x2, y2);
      worst = std::max(worst, double(base2 - X.dist(x1, y2) - X.dist(x2, y1)));
      for (std::size_t l = j + 1; l < k; ++l) {
        const auto [x3, y3] = sup[l];
        const int base3 = base2 + X.dist(x3, y3);
        worst = std::max(worst, double(base3 - X.dist(x1, y2) - X.dist(x2, y3) - X.dist(x3, y1)));
        worst = std::max(worst, double(base3 - X.dist(x1, y3) - X.dist(x3, y2) - X.dist(x2, y1)));
      }
    }
  }
  return worst;
}

std::vector<char> forward_pairs(const GraphSpace& X, const std::vector<std::pair<int, int>>& sup) {
  const int n = static_cast<int>(X.size());
  std::vector<char> c(static_cast<std::size_t>(n) * n, 0);
  for (auto [x, y] : sup) {
    std::vector<int> hull;
    for (int z = 0; z < n; ++z)
      if (in_interval(X, x, z, y)) hull.push_back(z);
    for (int z : hull)
      for (int w : hull)
        if (z != w && ordered_in_interval(X, z, w, x, y)) c[static_cast<std::size_t>(z) * n + w] = 1;
  }
  return c;
}

bool forward_backward_disjoint(const GraphSpace& X, const std::vector<std::pair<int, int>>& sup) {
  const auto c = forward_pairs(X, sup);
  const std::size_t n = X.size();
  for (std::size_t z = 0; z < n; ++z)
    for (std::size_t w = z + 1; w < n; ++w)
      if (c[z * n + w] && c[w * n + z]) return false;
  return true;
}

Certificate certify(const ZeroTempBridge& br) {
  const GraphSpace& X = *br.space;
  Certificate c;
  c.marginal_error = std::max((br.coupling.rowwise().sum() - br.marginals.nu0).cwiseAbs().maxCoeff(),
                              (br.coupling.colwise().sum().transpose() - br.marginals.nu1).cwiseAbs().maxCoeff());
  c.lp_gap = std::abs(br.cost - br.w1);
  c.cyclic_excess = cyclic_monotonicity_excess(X, br.support);
  c.disjoint = forward_backward_disjoint(X, br.support);

  std::vector<char> hull(X.size(), 0);
  for (auto [x, y] : br.support)
    for (int z = 0; z < static_cast<int>(X.size()); ++z)
      if (in_interval(X, x, z, y)) hull[static_cast<std::size_t>(z)] = 1;
  for (int k = 1; k <= 9; ++k) {
    const double t = 0.1 * k;
    const Vec q = zero_bridge_marginal(br, t);
    for (Eigen::Index z = 0; z < q.size(); ++z)
      if ((q[z] > 0.0) != static_cast<bool>(hull[static_cast<std::size_t>(z)])) c.support_constant = false;
    for (auto [x, y] : br.support)
      c.normalization_error = std::max(c.normalization_error, std::abs(pair_bridge_zero(X, x, y, t).sum() - 1.0));
  }
  c.speed_deviation = std::max(constant_speed_check(br, 0.0, 0.5), constant_speed_check(br, 0.25, 0.75));
  return c;
}

ConditionalQuantities conditional_quantities(const ZeroTempBridge& br, double t, int z, int witness, Side side) {
  if (!(t > 0.0 && t < 1.0)) throw Error(ErrorKind::DomainError, "t must lie in (0,1)");
  const GraphSpace& X = *br.space;
  X.check_vertex(z);
  X.check_vertex(witness);
  const bool backward = side == Side::Backward;
  const Vec& nu = backward ? br.marginals.nu1 : br.marginals.nu0;
  if (!(nu[witness] > 0.0)) {
    std::ostringstream os;
    os << "witness " << witness << " is outside supp(" << (backward ? "nu1" : "nu0") << ")";
    throw Error(ErrorKind::WitnessOutsideSupport, os.str());
  }
  const int n = static_cast<int>(X.size());
  // conditional law of the other endpoint given the witness
  auto cond = [&](int w) { return backward ? br.backward(w, witness) : br.forward(witness, w); };

  ConditionalQuantities out;
  std::vector<double> one(static_cast<std::size_t>(n), 0.0), two(static_cast<std::size_t>(n), 0.0);
  for (int w = 0; w < n; ++w) {
    const double p = cond(w);
    if (!(p > 0.0)) continue;
    const int v = witness;  // the pair is (w, v) backward and (v, w) forward
    const int d = X.dist(v, w);
    if (!in_interval(X, v, z, w)) continue;
    // nu_t^{0,w,v} on the backward side, nu_t^{0,v,w} on the forward side
    const int from_start = backward ? X.dist(w, z) : X.dist(v, z);
    out.base += p * ratio_r(X, v, z, z, w) * binomial_weight(t, d, from_start);
    for (int u = 0; u < n; ++u) {
      const int k = X.dist(z, u);
      if ((k != 1 && k != 2) || k > d || !ordered_in_interval(X, z, u, v, w)) continue;
      const double r = ratio_r(X, v, z, u, w);
      if (k == 1) {
        const double rho = backward ? binomial_weight(t, d - 1, X.dist(z, w) - 1) : binomial_weight(t, d - 1, X.dist(v, z));
        one[static_cast<std::size_t>(u)] += r * d * rho * p;
      } else {
        const double rho = backward ? binomial_weight(t, d - 2, X.dist(z, w) - 2) : binomial_weight(t, d - 2, X.dist(v, z));
        two[static_cast<std::size_t>(u)] += r * d * (d - 1) * rho * p;
      }
    }
  }
  for (int u = 0; u < n; ++u) {
    if (X.dist(z, u) == 1) out.one.emplace_back(u, one[static_cast<std::size_t>(u)]);
    if (X.dist(z, u) == 2) out.two.emplace_back(u, two[static_cast<std::size_t>(u)]);
  }
  return out;
}

LimitRatioTable limit_ratios(const ZeroTempBridge& br, double t) {
  if (!(t > 0.0 && t < 1.0)) throw Error(ErrorKind::DomainError, "t must lie in (0,1)");
  const GraphSpace& X = *br.space;
  const int n = static_cast<int>(X.size());
  LimitRatioTable tab;
  tab.t = t;
  tab.A = tab.AA = tab.B = tab.BB = Mat::Zero(n, n);
  tab.witness_x.assign(static_cast<std::size_t>(n), -1);
  tab.witness_y = tab.witness_x;
  const Vec q = zero_bridge_marginal(br, t);
  tab.in_support.assign(static_cast<std::size_t>(n), 0);

  auto fill = [&](int z, Side side, Mat& R1, Mat& R2, int& first) {
    const Vec& nu = side == Side::Backward ? br.marginals.nu1 : br.marginals.nu0;
    for (int v = 0; v < n; ++v) {
      if (!(nu[v] > 0.0)) continue;
      const ConditionalQuantities cq = conditional_quantities(br, t, z, v, side);
      if (!(cq.base > 0.0)) continue;
      for (const auto& [u, val] : cq.one) {
        const double ratio = val / cq.base;
        if (first < 0) R1(z, u) = ratio;
        else tab.witness_deviation = std::max(tab.witness_deviation, std::abs(ratio - R1(z, u)) / std::max(1.0, std::abs(R1(z, u))));
      }
      for (const auto& [u, val] : cq.two) {
        const double ratio = val / cq.base;
        if (first < 0) R2(z, u) = ratio;
        else tab.witness_deviation = std::max(tab.witness_deviation, std::abs(ratio - R2(z, u)) / std::max(1.0, std::abs(R2(z, u))));
      }
      if (first < 0) first = v;
    }
  };
  for (int z = 0; z < n; ++z) {
    if (!(q[z] > 0.0)) continue;
    tab.in_support[static_cast<std::size_t>(z)] = 1;
    fill(z, Side::Backward, tab.A, tab.AA, tab.witness_y[static_cast<std::size_t>(z)]);
    fill(z, Side::Forward, tab.B, tab.BB, tab.witness_x[static_cast<std::size_t>(z)]);
  }
  return tab;
}

std::pair<double, double> second_derivative_bounds(const ZeroTempBridge& br, const LimitRatioTable& tab) {
  const GraphSpace& X = *br.space;
  const Vec q = zero_bridge_marginal(br, tab.t);
  auto bound = [&](const Mat& R1, const Mat& R2) {
    double total = 0.0;
    for (int z = 0; z < static_cast<int>(X.size()); ++z) {
      if (!(q[z] > 0.0)) continue;
      double lin = 0.0, two = 0.0;
      for (int w : X.neighbors(z)) {
        lin += R1(z, w) * X.L(z, w);
        for (int u : X.neighbors(w))
          if (X.dist(z, u) == 2) two += rho_fn(R1(z, w), R2(z, u)) * X.L(w, u) * X.L(z, w);
      }
      total += q[z] * (lin * lin + two);
    }
    return total;
  };
  return {bound(tab.A, tab.AA), bound(tab.B, tab.BB)};
}

std::pair<double, double> second_derivative_bounds(const ZeroTempBridge& br, double t) {
  return second_derivative_bounds(br, limit_ratios(br, t));
}

nlohmann::json bridge_to_json(const ZeroTempBridge& br) {
  nlohmann::json j;
  nlohmann::json pairs = nlohmann::json::array();
  for (auto [x, y] : br.support) pairs.push_back({{"x", x}, {"y", y}, {"weight", br.coupling(x, y)}});
  j["support"] = pairs;
  j["W1"] = br.w1;
  j["cost"] = br.cost;
  nlohmann::json steps = nlohmann::json::array();
  for (const auto& s : br.diagnostics.steps)
    steps.push_back({{"gamma", s.gamma},
                     {"iterations", s.iterations},
                     {"residual", s.residual},
                     {"coupling_distance", s.coupling_distance},
                     {"bridge_distance", s.bridge_distance}});
  nlohmann::json orders = nlohmann::json::array();
  for (double o : br.diagnostics.empirical_orders) orders.push_back(std::isfinite(o) ? nlohmann::json(o) : nlohmann::json(nullptr));
  j["diagnostics"] = {{"steps", steps},
                      {"empirical_orders", orders},
                      {"extrapolation_distance", br.diagnostics.extrapolation_distance},
                      {"last_change", br.diagnostics.last_change},
                      {"warnings", br.diagnostics.warnings}};
  return j;
}

}  // namespace entrocurve
