#include "entrocurve/costs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <tuple>

#include "entrocurve/error.hpp"
#include "entrocurve/models.hpp"
#include "entrocurve/transport.hpp"

namespace entrocurve {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<long long> cost_table(const GraphSpace& space, int kind) {
  const auto& d = space.distance_matrix();
  std::vector<long long> c(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) {
    const long long v = d[i];
    c[i] = kind == 1 ? v : kind == 2 ? v * v : v * (v - 1);
  }
  return c;
}

void check_open_t(double t) {
  if (!(t > 0.0 && t < 1.0)) throw Error(ErrorKind::DomainError, "t must lie in (0,1)");
}

// sum_{k>=2} c_k u^k with c_k = 2/(k(k-1)) * sum_{j<k-1} t^j; all terms positive
double h_t_series(double t, double u) {
  double sum = 0.0, pw = u * u, geo = 1.0, tj = 1.0;
  for (int k = 2; k < 400; ++k) {
    const double term = 2.0 / (k * (k - 1.0)) * geo * pw;
    sum += term;
    if (term < 1e-18 * sum) break;
    pw *= u;
    tj *= t;
    geo += tj;
  }
  return sum;
}

bool is_bit_model(ModelTag tag) { return tag == ModelTag::Hypercube || tag == ModelTag::BernoulliLaplace; }

void require_model(const ZeroTempBridge& br, ModelTag tag, const char* what) {
  if (br.space->model().tag != tag) {
    std::ostringstream os;
    os << what << " needs a " << model_tag_name(tag) << " space, got " << model_tag_name(br.space->model().tag);
    throw Error(ErrorKind::WrongModel, os.str());
  }
}

int slice_min(const ModelKind& k) { return std::min(k.kappa, k.n - k.kappa); }

}  // namespace

W1Result w1(const GraphSpace& space, const Vec& nu0, const Vec& nu1) {
  const TransportPlan tp = solve_transport(nu0, nu1, cost_table(space, 1));
  return {tp.cost, tp.plan};
}

std::pair<double, double> w2_w2d(const GraphSpace& space, const Vec& nu0, const Vec& nu1) {
  const double sq = solve_transport(nu0, nu1, cost_table(space, 2)).cost;
  const double dd = solve_transport(nu0, nu1, cost_table(space, 3)).cost;
  return {std::sqrt(std::max(sq, 0.0)), std::sqrt(std::max(dd, 0.0))};
}

double total_variation(const Vec& nu0, const Vec& nu1) { return (nu0 - nu1).cwiseAbs().sum(); }

double h_fn(double u) {
  if (!(u >= 0.0)) throw Error(ErrorKind::DomainError, "h needs u >= 0");
  if (u > 1.0) return kInf;
  if (u == 1.0) return 2.0;
  if (u <= 0.5) {
    double sum = 0.0, pw = u * u;
    for (int k = 2; k < 400; ++k) {
      const double term = 2.0 * pw / (k * (k - 1.0));
      sum += term;
      if (term < 1e-18 * sum) break;
      pw *= u;
    }
    return sum;
  }
  return 2.0 * ((1.0 - u) * std::log1p(-u) + u);
}

double h_t_fn(double t, double u) {
  check_open_t(t);
  if (!(u >= 0.0)) throw Error(ErrorKind::DomainError, "h_t needs u >= 0");
  if (u > 1.0) return kInf;
  if (u <= 0.5) return h_t_series(t, u);
  return (t * h_fn(u) - h_fn(t * u)) / (t * (1.0 - t));
}

double q_t_fn(double t, double u) {
  check_open_t(t);
  if (u == 0.0) return 1.0;
  if (u <= 0.5) return h_t_series(t, u) / (u * u);
  return h_t_fn(t, u) / (u * u);
}

double k_t_fn(double t, double v) {
  check_open_t(t);
  if (!(v >= 0.0 && v <= 0.5)) throw Error(ErrorKind::DomainError, "k_t needs v in [0, 1/2]");
  if (v == 0.0) return 0.0;
  // alpha h(v/alpha) is nonincreasing in alpha, so the infimum sits on alpha + beta = 1;
  // what remains is convex in alpha on [v, 1 - v].
  auto F = [&](double a) { return a * h_t_fn(t, v / a) + (1.0 - a) * h_t_fn(1.0 - t, v / (1.0 - a)); };
  double lo = v, hi = 1.0 - v;
  if (hi - lo <= 0.0) return F(0.5);
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = hi - g * (hi - lo), b = lo + g * (hi - lo);
  double fa = F(a), fb = F(b);
  for (int it = 0; it < 200 && hi - lo > 1e-13; ++it) {
    if (fa <= fb) {
      hi = b;
      b = a;
      fb = fa;
      a = hi - g * (hi - lo);
      fa = F(a);
    } else {
      lo = a;
      a = b;
      fa = fb;
      b = lo + g * (hi - lo);
      fb = F(b);
    }
  }
  return std::min({fa, fb, F(v), F(1.0 - v)});
}

double kernel_Kt(double t, double u) {
  check_open_t(t);
  if (!(u >= 0.0 && u <= 1.0)) throw Error(ErrorKind::DomainError, "K_t needs u in [0,1]");
  return u <= t ? 2.0 * u / t : 2.0 * (1.0 - u) / (1.0 - t);
}

FlipTables flip_tables(const ZeroTempBridge& br) {
  const GraphSpace& X = *br.space;
  if (!is_bit_model(X.model().tag)) throw Error(ErrorKind::WrongModel, "flip tables need bit-labelled vertices");
  const int n = static_cast<int>(X.size());
  const int dim = static_cast<int>(X.label(0).size());
  FlipTables ft;
  ft.forward = Mat::Zero(n, dim);
  ft.backward = Mat::Zero(n, dim);
  ft.overall = Vec::Zero(dim);
  for (auto [x, y] : br.support) {
    const double p = br.coupling(x, y);
    for (int i = 0; i < dim; ++i) {
      if (X.label(x)[static_cast<std::size_t>(i)] == X.label(y)[static_cast<std::size_t>(i)]) continue;
      ft.forward(x, i) += p / br.marginals.nu0[x];
      ft.backward(y, i) += p / br.marginals.nu1[y];
      ft.overall[i] += p;
    }
  }
  // conditional probabilities: clip the roundoff that would push h_t past its domain
  ft.forward = ft.forward.cwiseMin(1.0);
  ft.backward = ft.backward.cwiseMin(1.0);
  return ft;
}

double moment_t2(const ZeroTempBridge& br) {
  double s = 0.0;
  for (auto [x, y] : br.support) {
    const double d = br.space->dist(x, y);
    s += d * (d - 1.0) * br.coupling(x, y);
  }
  return s;
}

double moment_t3(const ZeroTempBridge& br) {
  double s = 0.0;
  for (auto [x, y] : br.support) {
    const double d = br.space->dist(x, y);
    s += d * (d - 1.0) * (d - 2.0) * br.coupling(x, y);
  }
  return s;
}

namespace {

// Pi_->(x) = pi^0(w != x | x), Pi_<-(y) = pi^0(w != y | y)
std::pair<Vec, Vec> hamming_flips(const ZeroTempBridge& br) {
  const auto n = static_cast<Eigen::Index>(br.space->size());
  Vec fwd = Vec::Zero(n), bwd = Vec::Zero(n);
  for (auto [x, y] : br.support) {
    if (x == y) continue;
    fwd[x] += br.forward(x, y);
    bwd[y] += br.backward(x, y);
  }
  return {fwd.cwiseMin(1.0), bwd.cwiseMin(1.0)};
}

}  // namespace

double weak_cost_at_coupling(const ZeroTempBridge& br) {
  const Vec& nu0 = br.marginals.nu0;
  const Vec& nu1 = br.marginals.nu1;
  if (br.space->model().tag == ModelTag::CompleteGraph) {
    const auto [fwd, bwd] = hamming_flips(br);
    return nu0.dot(fwd.cwiseAbs2()) + nu1.dot(bwd.cwiseAbs2());
  }
  const FlipTables ft = flip_tables(br);
  return nu0.dot(ft.forward.cwiseAbs2().rowwise().sum()) + nu1.dot(ft.backward.cwiseAbs2().rowwise().sum());
}

CostValue cost_complete(const ZeroTempBridge& br, double t) {
  require_model(br, ModelTag::CompleteGraph, "cost_complete");
  check_open_t(t);
  const auto [fwd, bwd] = hamming_flips(br);
  double c = 0.0;
  for (Eigen::Index x = 0; x < fwd.size(); ++x) {
    if (br.marginals.nu0[x] > 0.0) c += br.marginals.nu0[x] * h_t_fn(t, fwd[x]);
    if (br.marginals.nu1[x] > 0.0) c += br.marginals.nu1[x] * h_t_fn(1.0 - t, bwd[x]);
  }
  return {c, {c}};
}

double cost_complete_from_potentials(const ZeroTempBridge& br, double t) {
  require_model(br, ModelTag::CompleteGraph, "cost_complete_from_potentials");
  check_open_t(t);
  const auto [fwd, bwd] = hamming_flips(br);
  auto phi0 = [&](double s) {
    double v = 0.0;
    for (Eigen::Index y = 0; y < bwd.size(); ++y)
      if (br.marginals.nu1[y] > 0.0) v += 0.5 * br.marginals.nu1[y] * h_fn((1.0 - s) * bwd[y]);
    return v;
  };
  auto psi0 = [&](double s) {
    double v = 0.0;
    for (Eigen::Index x = 0; x < fwd.size(); ++x)
      if (br.marginals.nu0[x] > 0.0) v += 0.5 * br.marginals.nu0[x] * h_fn(s * fwd[x]);
    return v;
  };
  auto total = [&](double s) { return phi0(s) + psi0(s); };
  return 2.0 / (t * (1.0 - t)) * ((1.0 - t) * total(0.0) + t * total(1.0) - total(t));
}

CostValue cost_hypercube(const ZeroTempBridge& br, double t) {
  require_model(br, ModelTag::Hypercube, "cost_hypercube");
  check_open_t(t);
  const FlipTables ft = flip_tables(br);
  const int dim = static_cast<int>(ft.overall.size());
  const Vec& nu0 = br.marginals.nu0;
  const Vec& nu1 = br.marginals.nu1;
  double b1 = 0.0;
  for (Eigen::Index x = 0; x < nu0.size(); ++x) {
    for (int i = 0; i < dim; ++i) {
      if (nu0[x] > 0.0) b1 += nu0[x] * h_t_fn(t, ft.forward(x, i));
      if (nu1[x] > 0.0) b1 += nu1[x] * h_t_fn(1.0 - t, ft.backward(x, i));
    }
  }
  const double b2 = 4.0 * ft.overall.squaredNorm();
  // n t2^3 / t3^2 [h_t(u) + h_{1-t}(u)] with u = t3 / (n t2) equals
  // (t2 / n)(q_t(u) + q_{1-t}(u)); this form is also the t3 -> 0 limit.
  const double t2 = moment_t2(br), t3 = moment_t3(br);
  double b3 = 0.0;
  if (t2 > 0.0) {
    const double u = t3 / (dim * t2);
    b3 = t2 / dim * (q_t_fn(t, u) + q_t_fn(1.0 - t, u));
  }
  return {std::max({b1, b2, b3}), {b1, b2, b3}};
}

CostValue cost_slice(const ZeroTempBridge& br, double t) {
  require_model(br, ModelTag::BernoulliLaplace, "cost_slice");
  check_open_t(t);
  const GraphSpace& X = *br.space;
  const int mk = slice_min(X.model());
  const double b1 = 4.0 / mk * br.w1 * br.w1;
  const FlipTables ft = flip_tables(br);
  const int dim = static_cast<int>(ft.overall.size());
  const Vec& nu0 = br.marginals.nu0;
  const Vec& nu1 = br.marginals.nu1;
  double f0 = 0.0, f1 = 0.0, g0 = 0.0, g1 = 0.0;  // J_0 / J_1 sums, forward and backward
  for (int x = 0; x < static_cast<int>(X.size()); ++x) {
    for (int i = 0; i < dim; ++i) {
      const bool zero = X.label(x)[static_cast<std::size_t>(i)] == 0;
      if (nu0[x] > 0.0) (zero ? f0 : f1) += nu0[x] * h_t_fn(t, ft.forward(x, i));
      if (nu1[x] > 0.0) (zero ? g0 : g1) += nu1[x] * h_t_fn(1.0 - t, ft.backward(x, i));
    }
  }
  const double b2 = std::max(f0, f1) + std::max(g0, g1);
  const double b3 = 2.0 / mk * moment_t2(br);
  return {std::max({b1, b2, b3}), {b1, b2, b3}};
}

CostValue model_cost(const ZeroTempBridge& br, double t) {
  switch (br.space->model().tag) {
    case ModelTag::CompleteGraph: return cost_complete(br, t);
    case ModelTag::Hypercube: return cost_hypercube(br, t);
    case ModelTag::BernoulliLaplace: return cost_slice(br, t);
    case ModelTag::LatticeBox:
    case ModelTag::Circle: return {0.0, {}};
    default: break;
  }
  throw Error(ErrorKind::WrongModel, "no cost functional for custom spaces");
}

CostReport convexity_check(const ZeroTempBridge& br, const std::vector<double>& t_grid, double ct_scale) {
  const GraphSpace& X = *br.space;
  const ModelTag tag = X.model().tag;
  if (tag == ModelTag::Custom) throw Error(ErrorKind::WrongModel, "convexity check needs one of the five models");
  for (double t : t_grid) check_open_t(t);
  CostReport rep;
  rep.model = X.model();
  const Vec& m = X.measure();
  const Vec& nu0 = br.marginals.nu0;
  const Vec& nu1 = br.marginals.nu1;
  rep.W1 = br.w1;
  std::tie(rep.W2, rep.W2d) = w2_w2d(X, nu0, nu1);
  rep.TV = total_variation(nu0, nu1);
  rep.t2 = moment_t2(br);
  rep.t3 = moment_t3(br);
  rep.H0 = relative_entropy(nu0, m);
  rep.H1 = relative_entropy(nu1, m);
  if (is_bit_model(tag)) rep.flips = flip_tables(br);
  rep.flat = tag == ModelTag::LatticeBox || tag == ModelTag::Circle;
  rep.worst = kInf;

  for (double t : t_grid) {
    CostRow row;
    row.t = t;
    row.entropy = relative_entropy(zero_bridge_marginal(br, t), m);
    const CostValue cv = model_cost(br, t);
    const double base = (1.0 - t) * rep.H0 + t * rep.H1 - row.entropy;
    const double w = t * (1.0 - t) / 2.0;
    row.cost = ct_scale * cv.value;
    row.gap = base - w * row.cost;
    for (double b : cv.branches) {
      row.branches.push_back(ct_scale * b);
      row.branch_gaps.push_back(base - w * ct_scale * b);
      rep.worst = std::min(rep.worst, row.branch_gaps.back());
    }
    rep.worst = std::min(rep.worst, row.gap);
    rep.rows.push_back(std::move(row));
  }
  if (rep.flat) {
    constexpr int kPoints = 21;
    std::vector<double> H(kPoints);
    for (int k = 0; k < kPoints; ++k) H[k] = relative_entropy(zero_bridge_marginal(br, k / 20.0), m);
    for (int k = 1; k + 1 < kPoints; ++k) {
      rep.second_differences.push_back(H[k - 1] - 2.0 * H[k] + H[k + 1]);
      rep.worst = std::min(rep.worst, rep.second_differences.back());
    }
  }
  if (rep.worst == kInf) rep.worst = 0.0;
  return rep;
}

CostReport convexity_check(SpacePtr space, const MarginalPair& marginals, const std::vector<double>& t_grid,
                           const ZeroTempOptions& opts, double ct_scale) {
  if (space->model().tag == ModelTag::Custom) throw Error(ErrorKind::WrongModel, "convexity check needs one of the five models");
  const ZeroTempBridge br = limit_coupling(space, marginals, default_gamma_schedule(), opts);
  return convexity_check(br, t_grid, ct_scale);
}

nlohmann::json report_to_json(const CostReport& rep) {
  nlohmann::json j;
  j["model"] = format_model_spec(rep.model);
  j["W1"] = rep.W1;
  j["W2"] = rep.W2;
  j["W2d"] = rep.W2d;
  j["TV"] = rep.TV;
  j["t2"] = rep.t2;
  j["t3"] = rep.t3;
  j["H0"] = rep.H0;
  j["H1"] = rep.H1;
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : rep.rows)
    rows.push_back({{"t", r.t}, {"entropy", r.entropy}, {"C_t", r.cost}, {"gap", r.gap},
                    {"branches", r.branches}, {"branch_gaps", r.branch_gaps}});
  j["rows"] = rows;
  if (rep.flat) j["second_differences"] = rep.second_differences;
  if (rep.flips.overall.size() > 0) {
    std::vector<double> overall(rep.flips.overall.data(), rep.flips.overall.data() + rep.flips.overall.size());
    j["Pi"] = overall;
  }
  j["worst"] = rep.worst;
  j["passed"] = rep.passed();
  return j;
}

std::string report_to_csv(const CostReport& rep) {
  std::ostringstream os;
  std::size_t nb = rep.rows.empty() ? 0 : rep.rows.front().branches.size();
  os << "t,entropy,C_t,gap";
  for (std::size_t b = 0; b < nb; ++b) os << ",branch" << (b + 1);
  os << "\n";
  for (const auto& r : rep.rows) {
    os << format_double(r.t) << ',' << format_double(r.entropy) << ',' << format_double(r.cost) << ','
       << format_double(r.gap);
    for (double b : r.branches) os << ',' << format_double(b);
    os << "\n";
  }
  return os.str();
}

std::vector<InequalityCheck> transport_entropy_check(const ZeroTempBridge& br) {
  const GraphSpace& X = *br.space;
  const Vec& nu0 = br.marginals.nu0;
  const Vec& nu1 = br.marginals.nu1;
  const double H0 = relative_entropy(nu0, X.measure()), H1 = relative_entropy(nu1, X.measure());
  const double rhs = std::pow(std::sqrt(std::max(H0, 0.0)) + std::sqrt(std::max(H1, 0.0)), 2);
  std::vector<InequalityCheck> out;
  const double W1 = br.w1;
  switch (X.model().tag) {
    case ModelTag::CompleteGraph: {
      const double tv = total_variation(nu0, nu1);
      out.push_back({"pinsker", 0.5 * tv * tv, rhs});
      out.push_back({"weak_cost_at_coupling", 0.5 * weak_cost_at_coupling(br), rhs});
      break;
    }
    case ModelTag::Hypercube: {
      const double n = static_cast<double>(X.model().alphas.size());
      const auto [W2, W2d] = w2_w2d(X, nu0, nu1);
      out.push_back({"w1", 2.0 / n * W1 * W1, rhs});
      out.push_back({"w2d", W2d * W2d / n, rhs});
      out.push_back({"w2_minus_w1", (W2 * W2 - W1) / n, rhs});
      out.push_back({"weak_cost_at_coupling", 0.5 * weak_cost_at_coupling(br), rhs});
      break;
    }
    case ModelTag::BernoulliLaplace: {
      const double mk = slice_min(X.model());
      const auto [W2, W2d] = w2_w2d(X, nu0, nu1);
      out.push_back({"w1", 2.0 / mk * W1 * W1, rhs});
      out.push_back({"w2_minus_w1", (W2 * W2 - W1) / mk, rhs});
      out.push_back({"weak_cost_at_coupling", 0.25 * weak_cost_at_coupling(br), rhs});
      break;
    }
    default:
      throw Error(ErrorKind::WrongModel, "no transport-entropy inequality for this model");
  }
  return out;
}

double pointwise_cost(const GraphSpace& space, int x, int y) {
  const double d = space.dist(x, y);
  switch (space.model().tag) {
    case ModelTag::Hypercube: return 2.0 / space.model().alphas.size() * d * (d - 1.0);
    case ModelTag::BernoulliLaplace: return 2.0 / slice_min(space.model()) * d * (d - 1.0);
    default: return 0.0;
  }
}

Vec sup_convolution_h(const GraphSpace& space, const Vec& f, const Vec& g, double t) {
  check_open_t(t);
  const int n = static_cast<int>(space.size());
  Vec h = Vec::Constant(n, -kInf);
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y) {
      const double v = (1.0 - t) * f[x] + t * g[y] - 0.5 * t * (1.0 - t) * pointwise_cost(space, x, y);
      for (int z = 0; z < n; ++z)
        if (in_interval(space, x, z, y)) h[z] = std::max(h[z], v);
    }
  return h;
}

PrekopaResult prekopa_check(const GraphSpace& space, const Vec& f, const Vec& g, const Vec& h, double t) {
  check_open_t(t);
  const int n = static_cast<int>(space.size());
  if (f.size() != n || g.size() != n || h.size() != n) throw Error(ErrorKind::BadParameter, "f, g, h must have length |X|");
  if (!f.allFinite() || !g.allFinite() || !h.allFinite()) throw Error(ErrorKind::BadParameter, "f, g, h must be finite");
  PrekopaResult res;
  res.premise_slack = kInf;
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y) {
      const double s = pair_bridge_zero(space, x, y, t).dot(h) + 0.5 * t * (1.0 - t) * pointwise_cost(space, x, y) -
                       (1.0 - t) * f[x] - t * g[y];
      if (s < res.premise_slack) {
        res.premise_slack = s;
        res.worst_x = x;
        res.worst_y = y;
      }
    }
  if (res.premise_slack < -1e-12) {
    std::ostringstream os;
    os << "premise fails by " << -res.premise_slack << " at (x,y) = (" << res.worst_x << "," << res.worst_y << ")";
    throw Error(ErrorKind::PremiseViolated, os.str());
  }
  const Vec& m = space.measure();
  auto integral_exp = [&](const Vec& v) { return m.dot(v.unaryExpr([](double a) { return std::exp(a); })); };
  const double ef = integral_exp(f), eg = integral_exp(g), eh = integral_exp(h);
  res.conclusion_slack = eh - std::pow(ef, 1.0 - t) * std::pow(eg, t);
  return res;
}

}  // namespace entrocurve
