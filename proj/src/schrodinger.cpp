#include "entrocurve/schrodinger.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "entrocurve/error.hpp"
#include "entrocurve/kernels.hpp"

namespace entrocurve {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

std::vector<int> support_of(const Vec& v) {
  std::vector<int> s;
  for (Eigen::Index i = 0; i < v.size(); ++i)
    if (v[i] > 0.0) s.push_back(static_cast<int>(i));
  return s;
}

// log sum_i exp(v_i) over a list of finite entries
double log_sum_exp(const std::vector<double>& v) {
  double mx = kNegInf;
  for (double x : v) mx = std::max(mx, x);
  if (mx == kNegInf) return kNegInf;
  double s = 0.0;
  for (double x : v) s += std::exp(x - mx);
  return mx + std::log(s);
}

// out_i = log sum_j K(i,j) exp(lv_j), K dense rows x cols, all K > 0
void log_matvec(const std::vector<double>& K, const std::vector<double>& lv, std::size_t rows,
                std::size_t cols, std::vector<double>& scratch, std::vector<double>& out) {
  double mx = kNegInf;
  for (double x : lv) mx = std::max(mx, x);
  scratch.resize(cols);
  for (std::size_t j = 0; j < cols; ++j) scratch[j] = std::exp(lv[j] - mx);
  out.resize(rows);
  simd::kernels().gemv(K.data(), scratch.data(), out.data(), rows, cols);
  for (std::size_t i = 0; i < rows; ++i) out[i] = mx + std::log(out[i]);
}

// log P_tau h for h = exp(lh) >= 0 (lh may be -inf)
Vec log_heat(const GraphSpace& space, double tau, const Vec& lh) {
  const double mx = lh.maxCoeff();
  Vec h(lh.size());
  for (Eigen::Index i = 0; i < lh.size(); ++i) h[i] = lh[i] == kNegInf ? 0.0 : std::exp(lh[i] - mx);
  if (tau == 0.0) return lh;
  Vec out = heat_action(space, tau, h);
  for (Eigen::Index i = 0; i < out.size(); ++i) out[i] = out[i] > 0.0 ? mx + std::log(out[i]) : kNegInf;
  return out;
}

void check_t(double t, bool open) {
  const bool ok = open ? (t > 0.0 && t < 1.0) : (t >= 0.0 && t <= 1.0);
  if (!ok) throw Error(ErrorKind::DomainError, open ? "t must lie in (0,1)" : "t must lie in [0,1]");
}

}  // namespace

MarginalPair make_marginals(const GraphSpace& space, const Vec& nu0, const Vec& nu1) {
  const auto n = static_cast<Eigen::Index>(space.size());
  if (nu0.size() != n || nu1.size() != n)
    throw Error(ErrorKind::BadParameter, "marginal length differs from |X|");
  for (const Vec* v : {&nu0, &nu1}) {
    for (Eigen::Index i = 0; i < n; ++i)
      if (!((*v)[i] >= 0.0) || !std::isfinite((*v)[i]))
        throw Error(ErrorKind::InfeasibleMarginals, "marginals must be finite and nonnegative");
    if (std::abs(v->sum() - 1.0) > 1e-12)
      throw Error(ErrorKind::InfeasibleMarginals, "marginals must have unit mass");
  }
  MarginalPair mp;
  mp.nu0 = nu0;
  mp.nu1 = nu1;
  mp.h0 = nu0.cwiseQuotient(space.measure());
  mp.h1 = nu1.cwiseQuotient(space.measure());
  return mp;
}

SchrodingerSolution solve_schrodinger(SpacePtr space, double gamma, const MarginalPair& mp,
                                      const SolveOptions& opts) {
  if (!(gamma >= kGammaFloor)) {
    std::ostringstream os;
    os << "gamma " << gamma << " below the supported floor " << kGammaFloor;
    throw Error(ErrorKind::DomainError, os.str());
  }
  if (!(opts.tol > 0.0) || opts.max_iter < 1) throw Error(ErrorKind::BadParameter, "tol and max_iter must be positive");
  const GraphSpace& X = *space;
  SchrodingerSolution sol;
  sol.space = space;
  sol.marginals = mp;
  sol.gamma = gamma;
  sol.P1 = heat_kernel(X, gamma, 1.0);

  const auto S0 = support_of(mp.nu0), S1 = support_of(mp.nu1);
  const std::size_t n0 = S0.size(), n1 = S1.size();
  std::vector<double> K01(n0 * n1), K10(n1 * n0);
  for (std::size_t i = 0; i < n0; ++i) {
    for (std::size_t j = 0; j < n1; ++j) {
      K01[i * n1 + j] = sol.P1.P(S0[i], S1[j]);
      K10[j * n0 + i] = sol.P1.P(S1[j], S0[i]);
      if (!(K01[i * n1 + j] >= std::numeric_limits<double>::min()) ||
          !(K10[j * n0 + i] >= std::numeric_limits<double>::min())) {
        std::ostringstream os;
        os << "kernel entry between " << S0[i] << " and " << S1[j] << " is subnormal at gamma " << gamma;
        throw Error(ErrorKind::NumericalUnderflow, os.str());
      }
    }
  }
  std::vector<double> lh0(n0), lh1(n1), nu0(n0), nu1(n1), lm0(n0), lm1(n1);
  for (std::size_t i = 0; i < n0; ++i) {
    lh0[i] = std::log(mp.h0[S0[i]]);
    nu0[i] = mp.nu0[S0[i]];
    lm0[i] = std::log(X.measure()[S0[i]]);
  }
  for (std::size_t j = 0; j < n1; ++j) {
    lh1[j] = std::log(mp.h1[S1[j]]);
    nu1[j] = mp.nu1[S1[j]];
    lm1[j] = std::log(X.measure()[S1[j]]);
  }

  std::vector<double> lf(n0, 0.0), lg(n1, 0.0), lpg, lpf, scratch, tmp0(n0), tmp1(n1);
  auto residual_of = [](const std::vector<double>& lpot, const std::vector<double>& lprod,
                        const std::vector<double>& lh, const std::vector<double>& nu) {
    double r = 0.0;
    for (std::size_t i = 0; i < lpot.size(); ++i)
      r = std::max(r, nu[i] * std::abs(std::expm1(lpot[i] + lprod[i] - lh[i])));
    return r;
  };

  long it = 0;
  double res = std::numeric_limits<double>::infinity(), prev = res;
  bool converged = false;
  long next_record = 1;
  for (; it < opts.max_iter; ++it) {
    log_matvec(K01, lg, n0, n1, scratch, lpg);
    res = residual_of(lf, lpg, lh0, nu0);
    if (it >= 2 && res > prev + 1e-13) ++sol.monotonicity_flags;
    if (it + 1 == next_record) {
      sol.residual_history.emplace_back(it, res);
      next_record *= 2;
    }
    prev = res;
    if (it >= 1 && res <= opts.tol) {
      converged = true;
      break;
    }
    for (std::size_t i = 0; i < n0; ++i) lf[i] = lh0[i] - lpg[i];
    log_matvec(K10, lf, n1, n0, scratch, lpf);
    for (std::size_t j = 0; j < n1; ++j) lg[j] = lh1[j] - lpf[j];
    // gauge: sum f m = sum g m
    for (std::size_t i = 0; i < n0; ++i) tmp0[i] = lf[i] + lm0[i];
    for (std::size_t j = 0; j < n1; ++j) tmp1[j] = lg[j] + lm1[j];
    const double c = 0.5 * (log_sum_exp(tmp0) - log_sum_exp(tmp1));
    for (double& v : lf) v -= c;
    for (double& v : lg) v += c;
  }
  if (!converged) {
    std::ostringstream os;
    os << "IPFP stopped after " << opts.max_iter << " sweeps with residual " << res;
    throw Error(ErrorKind::NoConvergence, os.str());
  }
  log_matvec(K10, lf, n1, n0, scratch, lpf);
  const double res_g = residual_of(lg, lpf, lh1, nu1);
  sol.iterations = it;
  sol.residual = std::max(res, res_g);
  if (sol.residual_history.empty() || sol.residual_history.back().first != it)
    sol.residual_history.emplace_back(it, sol.residual);

  sol.log_f = Vec::Constant(static_cast<Eigen::Index>(X.size()), kNegInf);
  sol.log_g = sol.log_f;
  for (std::size_t i = 0; i < n0; ++i) sol.log_f[S0[i]] = lf[i];
  for (std::size_t j = 0; j < n1; ++j) sol.log_g[S1[j]] = lg[j];
  return sol;
}

SchrodingerSolution regauge(const SchrodingerSolution& sol, double log_c) {
  SchrodingerSolution out = sol;
  out.log_f.array() += log_c;
  out.log_g.array() -= log_c;
  return out;
}

Mat SchrodingerSolution::coupling() const {
  const auto n = static_cast<Eigen::Index>(space->size());
  Mat pi = Mat::Zero(n, n);
  const Vec& m = space->measure();
  for (Eigen::Index x = 0; x < n; ++x) {
    if (log_f[x] == kNegInf) continue;
    for (Eigen::Index y = 0; y < n; ++y) {
      if (log_g[y] == kNegInf) continue;
      pi(x, y) = m[x] * P1.P(x, y) * std::exp(log_f[x] + log_g[y]);
    }
  }
  return pi;
}

Mat SchrodingerSolution::forward_kernel() const {
  const auto n = static_cast<Eigen::Index>(space->size());
  Mat k = Mat::Zero(n, n);
  for (Eigen::Index x = 0; x < n; ++x) {
    if (log_f[x] == kNegInf) continue;
    std::vector<double> terms;
    for (Eigen::Index y = 0; y < n; ++y)
      if (log_g[y] != kNegInf) terms.push_back(log_g[y] + std::log(P1.P(x, y)));
    const double lpg = log_sum_exp(terms);
    for (Eigen::Index y = 0; y < n; ++y)
      if (log_g[y] != kNegInf) k(x, y) = std::exp(log_g[y] + std::log(P1.P(x, y)) - lpg);
  }
  return k;
}

Potentials schrodinger_potentials(const SchrodingerSolution& sol, double t) {
  check_t(t, false);
  const GraphSpace& X = *sol.space;
  Potentials p;
  p.F = log_heat(X, sol.gamma * t, sol.log_f);
  p.G = log_heat(X, sol.gamma * (1.0 - t), sol.log_g);
  p.Q.resize(p.F.size());
  for (Eigen::Index z = 0; z < p.F.size(); ++z) {
    const double s = p.F[z] + p.G[z];
    p.Q[z] = std::isfinite(s) ? std::exp(s) * X.measure()[z] : 0.0;
  }
  return p;
}

Vec bridge_marginal(const SchrodingerSolution& sol, double t) { return schrodinger_potentials(sol, t).Q; }

Vec pair_bridge_gamma(const GraphSpace& space, double gamma, double t, int x, int y) {
  check_t(t, false);
  space.check_vertex(x);
  space.check_vertex(y);
  const auto n = static_cast<Eigen::Index>(space.size());
  Vec dx = Vec::Zero(n), dy = Vec::Zero(n);
  dx[x] = 1.0;
  dy[y] = 1.0;
  const Vec& m = space.measure();
  // P_t(x,z) = m(z) P_t(z,x) / m(x) by reversibility
  const Vec from_x = heat_action(space, gamma * t, dx).cwiseProduct(m) / m[x];
  const Vec to_y = heat_action(space, gamma * (1.0 - t), dy);
  const double norm = heat_action(space, gamma, dy)[x];
  return from_x.cwiseProduct(to_y) / norm;
}

double relative_entropy(const Vec& q, const Vec& r) {
  double h = 0.0;
  for (Eigen::Index i = 0; i < q.size(); ++i) {
    if (q[i] <= 0.0) continue;
    if (!(r[i] > 0.0)) return std::numeric_limits<double>::infinity();
    h += q[i] * std::log(q[i] / r[i]);
  }
  return h;
}

std::pair<double, double> phi_psi(const SchrodingerSolution& sol, double t) {
  const Potentials p = schrodinger_potentials(sol, t);
  double phi = 0.0, psi = 0.0;
  for (Eigen::Index z = 0; z < p.Q.size(); ++z) {
    if (p.Q[z] <= 0.0) continue;
    phi += p.F[z] * p.Q[z];
    psi += p.G[z] * p.Q[z];
  }
  return {phi, psi};
}

std::pair<double, double> phi_psi_d1(const SchrodingerSolution& sol, double t) {
  check_t(t, true);
  const Potentials p = schrodinger_potentials(sol, t);
  const GraphSpace& X = *sol.space;
  const double gamma = sol.gamma;
  double d_phi = 0.0, d_psi = 0.0;
  for (int z = 0; z < static_cast<int>(X.size()); ++z) {
    double sf = 0.0, sg = 0.0;
    for (int w : X.neighbors(z)) {
      const double rate = gamma * X.L(z, w);
      sf += zeta_fn(std::exp(p.F[w] - p.F[z])) * rate;
      sg += zeta_fn(std::exp(p.G[w] - p.G[z])) * rate;
    }
    d_phi -= p.Q[z] * sf;
    d_psi += p.Q[z] * sg;
  }
  return {d_phi, d_psi};
}

double rho_fn(double a, double b) {
  if (a == 0.0 || b == 0.0) return 0.0;
  return (std::log(b) - 2.0 * std::log(a) - 1.0) * b;
}

namespace {

// second derivative of t -> sum_z H(z) Q_t(z) where H is the log potential
// whose gradient drives the bridge (F for phi, G for psi)
double second_derivative(const GraphSpace& X, double gamma, const Vec& H, const Vec& Q) {
  double total = 0.0;
  for (int z = 0; z < static_cast<int>(X.size()); ++z) {
    if (Q[z] <= 0.0) continue;
    const double lzz = gamma * X.L(z, z);
    double one = 0.0, diag = 0.0, two = 0.0;
    for (int w : X.neighbors(z)) {
      const double grad = H[w] - H[z];
      const double e = std::exp(grad);
      const double rate = gamma * X.L(z, w);
      one += e * rate;
      diag += (1.0 + grad) * e * (lzz - gamma * X.L(w, w)) * rate;
      for (int u : X.neighbors(w)) {
        const double gu = H[u] - H[z];
        two += (gu - 2.0 * grad - 1.0) * std::exp(gu) * rate * gamma * X.L(w, u);
      }
    }
    total += Q[z] * (one * one + diag + two);
  }
  return total;
}

}  // namespace

std::pair<double, double> phi_psi_d2(const SchrodingerSolution& sol, double t) {
  check_t(t, true);
  const Potentials p = schrodinger_potentials(sol, t);
  const GraphSpace& X = *sol.space;
  return {second_derivative(X, sol.gamma, p.F, p.Q), second_derivative(X, sol.gamma, p.G, p.Q)};
}

}  // namespace entrocurve
