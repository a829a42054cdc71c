#include "entrocurve/semigroup.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "entrocurve/error.hpp"
#include "entrocurve/kernels.hpp"

namespace entrocurve {

namespace {

constexpr double kTailRel = 1e-17;
constexpr int kMaxTerms = 2000;

// M = I + L/S, entrywise nonnegative
Mat uniformized(const GraphSpace& space, double S) {
  Mat M = space.generator() / S;
  for (Eigen::Index i = 0; i < M.rows(); ++i) M(i, i) = std::max(0.0, 1.0 + M(i, i));
  return M;
}

double min_entry(const double* p, std::size_t n) {
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) m = std::min(m, p[i]);
  return m;
}

void check_args(double gamma, double t) {
  if (!(gamma > 0.0) || !std::isfinite(gamma))
    throw Error(ErrorKind::BadParameter, "gamma must be positive and finite");
  if (!(t >= 0.0 && t <= 1.0)) throw Error(ErrorKind::DomainError, "t must lie in [0,1]");
}

HeatKernel uniformization_kernel(const GraphSpace& space, double gamma, double t) {
  const auto n = static_cast<Eigen::Index>(space.size());
  HeatKernel hk;
  hk.gamma = gamma;
  hk.t = t;
  hk.method = HeatMethod::Uniformization;
  const double tau = gamma * t;
  const double S = space.S();
  if (tau == 0.0 || S == 0.0) {
    hk.P = Mat::Identity(n, n);
    return hk;
  }
  double lam = tau * S;
  int squarings = 0;
  while (lam > 0.5) {
    lam *= 0.5;
    ++squarings;
  }
  const auto& kern = simd::kernels();
  const Mat M = uniformized(space, S);
  const std::size_t un = static_cast<std::size_t>(n);
  Mat term = Mat::Identity(n, n), next(n, n);
  double w = std::exp(-lam);
  Mat sum = w * term;
  int k = 0;
  while (true) {
    ++k;
    kern.gemm(term.data(), M.data(), next.data(), un, un, un);
    term.swap(next);
    w *= lam / k;
    kern.axpy(w, term.data(), sum.data(), un * un);
    // entries below DBL_MIN have no relative precision to protect; callers
    // that need them (the IPFP) detect the underflow themselves
    const double floor = std::max(min_entry(sum.data(), un * un), std::numeric_limits<double>::min());
    if (k >= space.diameter() && (w == 0.0 || w < kTailRel * floor)) break;
    if (k >= kMaxTerms) throw Error(ErrorKind::NoConvergence, "heat-kernel series did not settle");
  }
  for (int s = 0; s < squarings; ++s) {
    kern.gemm(sum.data(), sum.data(), next.data(), un, un, un);
    sum.swap(next);
  }
  hk.P = std::move(sum);
  hk.series_terms = k + 1;
  hk.squarings = squarings;
  return hk;
}

}  // namespace

HeatKernel heat_kernel(const GraphSpace& space, double gamma, double t, HeatMethod method) {
  check_args(gamma, t);
  if (method == HeatMethod::Uniformization) return uniformization_kernel(space, gamma, t);

  const auto n = static_cast<Eigen::Index>(space.size());
  const Vec sq = space.measure().array().sqrt();
  // D^{1/2} L D^{-1/2} is symmetric by detailed balance
  Eigen::MatrixXd A = sq.asDiagonal() * space.generator() * sq.cwiseInverse().asDiagonal();
  A = 0.5 * (A + A.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A);
  if (es.info() != Eigen::Success) {
    HeatKernel hk = uniformization_kernel(space, gamma, t);
    hk.eigen_fallback = true;
    return hk;
  }
  const Vec ex = (gamma * t * es.eigenvalues().array()).exp();
  const Eigen::MatrixXd E = es.eigenvectors() * ex.asDiagonal() * es.eigenvectors().transpose();
  HeatKernel hk;
  hk.gamma = gamma;
  hk.t = t;
  hk.method = HeatMethod::Eigen;
  hk.P = sq.cwiseInverse().asDiagonal() * E * sq.asDiagonal();
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      double& v = hk.P(i, j);
      if (v < 0.0 && v > -1e-14) {
        v = 0.0;
        ++hk.clamped_entries;
      }
    }
  }
  return hk;
}

Vec apply_kernel(const HeatKernel& kernel, const Vec& f) {
  if (f.size() != kernel.P.cols()) throw Error(ErrorKind::BadParameter, "vector length mismatch");
  for (Eigen::Index i = 0; i < f.size(); ++i)
    if (!(f[i] >= 0.0) || !std::isfinite(f[i]))
      throw Error(ErrorKind::NegativeInput, "kernel input must be finite and nonnegative");
  Vec out(kernel.P.rows());
  simd::kernels().gemv(kernel.P.data(), f.data(), out.data(), static_cast<std::size_t>(kernel.P.rows()),
                       static_cast<std::size_t>(kernel.P.cols()));
  return out;
}

Vec heat_action(const GraphSpace& space, double tau, const Vec& f) {
  if (!(tau >= 0.0)) throw Error(ErrorKind::DomainError, "time must be nonnegative");
  if (static_cast<std::size_t>(f.size()) != space.size())
    throw Error(ErrorKind::BadParameter, "vector length mismatch");
  double fmax = 0.0;
  for (Eigen::Index i = 0; i < f.size(); ++i) {
    if (!(f[i] >= 0.0) || !std::isfinite(f[i]))
      throw Error(ErrorKind::NegativeInput, "heat action input must be finite and nonnegative");
    fmax = std::max(fmax, f[i]);
  }
  const double S = space.S();
  if (tau == 0.0 || S == 0.0 || fmax == 0.0) return f;

  const auto& kern = simd::kernels();
  const std::size_t n = space.size();
  const Mat M = uniformized(space, S);
  const int steps = std::max(1, static_cast<int>(std::ceil(tau * S / 8.0)));
  const double lam = tau * S / steps;
  Vec cur = f, term(f.size()), next(f.size()), sum(f.size());
  for (int s = 0; s < steps; ++s) {
    double w = std::exp(-lam);
    term = cur;
    sum = w * term;
    const double bound = cur.maxCoeff();
    for (int k = 1;; ++k) {
      kern.gemv(M.data(), term.data(), next.data(), n, n);
      term.swap(next);
      w *= lam / k;
      kern.axpy(w, term.data(), sum.data(), n);
      if (k >= space.diameter() && w * bound < kTailRel * sum.minCoeff()) break;
      if (k >= kMaxTerms) throw Error(ErrorKind::NoConvergence, "heat action series did not settle");
    }
    cur.swap(sum);
  }
  return cur;
}

}  // namespace entrocurve
