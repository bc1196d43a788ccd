#include "wcs/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "wcs/error.hpp"
#include "wcs/linalg.hpp"

namespace wcs {

CVector complex_soft_threshold(const CVector& z, const RVector& tau) {
  require(z.size() == tau.size(), ErrorCode::DimensionMismatch, "threshold length differs from vector length");
  CVector out(z.size());
  for (Index i = 0; i < z.size(); ++i) {
    require(tau(i) >= 0.0, ErrorCode::InvalidArgument, "thresholds must be nonnegative");
    const double mag = std::abs(z(i));
    out(i) = mag > tau(i) ? z(i) * ((mag - tau(i)) / mag) : std::complex<double>(0.0, 0.0);
  }
  return out;
}

namespace {

using cd = std::complex<double>;

// Euclidean projection onto {z : ||Az - y|| <= eps} through a thin SVD of A.
class BallProjector {
public:
  BallProjector(const CMatrix& a, const CVector& y, double eps) : eps_(eps) {
    Eigen::JacobiSVD<CMatrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Index r = numerical_rank(svd.singularValues(), a.rows(), a.cols());
    u_ = svd.matrixU().leftCols(r);
    v_ = svd.matrixV().leftCols(r);
    sig_ = svd.singularValues().head(r);
    b_ = u_.adjoint() * y;
    yperp_ = (y - u_ * b_).norm();
  }

  double range_residual() const { return yperp_; }

  CVector min_norm_solution() const { return v_ * (b_.array() / sig_.array().cast<cd>()).matrix(); }

  /// Least-norm lambda with A^H lambda closest to g.
  CVector adjoint_least_squares(const CVector& g) const {
    const CVector c = v_.adjoint() * g;
    return u_ * (c.array() / sig_.array().cast<cd>()).matrix();
  }

  CVector project(const CVector& p) const {
    const CVector a = v_.adjoint() * p;
    const Index r = a.size();
    RVector res2(r);
    double total = yperp_ * yperp_;
    for (Index i = 0; i < r; ++i) {
      res2(i) = std::norm(sig_(i) * a(i) - b_(i));
      total += res2(i);
    }
    if (total <= eps_ * eps_) return p;

    const double t = eps_ * eps_ - yperp_ * yperp_;
    CVector c(r);
    if (t <= 0.0 || eps_ == 0.0) {
      for (Index i = 0; i < r; ++i) c(i) = b_(i) / sig_(i);
    } else {
      const double mu = solve_multiplier(res2, t);
      for (Index i = 0; i < r; ++i) {
        const double s2 = sig_(i) * sig_(i);
        c(i) = (a(i) + mu * sig_(i) * b_(i)) / (1.0 + mu * s2);
      }
    }
    return p + v_ * (c - a);
  }

private:
  // Root of 1/||r(mu)|| = 1/sqrt(t), ||r(mu)||^2 = sum res2_i / (1 + mu s_i^2)^2,
  // by safeguarded Newton; the function is nearly linear in mu.
  double solve_multiplier(const RVector& res2, double t) const {
    const double target = 1.0 / std::sqrt(t);
    auto eval = [&](double mu, double& g, double& dg) {
      double n2 = 0.0, d = 0.0;
      for (Index i = 0; i < res2.size(); ++i) {
        const double s2 = sig_(i) * sig_(i);
        const double q = 1.0 + mu * s2;
        n2 += res2(i) / (q * q);
        d += res2(i) * s2 / (q * q * q);
      }
      const double n = std::sqrt(n2);
      g = 1.0 / n - target;
      dg = d / (n2 * n);
    };
    double lo = 0.0, hi = std::numeric_limits<double>::infinity();
    double mu = 0.0;
    for (int it = 0; it < 200; ++it) {
      double g, dg;
      eval(mu, g, dg);
      if (std::abs(g) <= 1e-15 * target) break;
      if (g < 0.0) {
        lo = mu;
      } else {
        hi = mu;
      }
      double next = dg > 0.0 ? mu - g / dg : std::numeric_limits<double>::quiet_NaN();
      if (!(next > lo && next < hi)) next = std::isfinite(hi) ? 0.5 * (lo + hi) : std::max(1.0, 2.0 * lo);
      if (next == mu) break;
      mu = next;
    }
    return mu;
  }

  double eps_;
  CMatrix u_, v_;
  RVector sig_;
  CVector b_;
  double yperp_ = 0.0;
};

double weighted_norm(const CVector& x, const RVector& w) {
  double s = 0.0;
  for (Index i = 0; i < x.size(); ++i) s += w(i) * std::abs(x(i));
  return s;
}

// Dual value Re<lam, y> - eps ||lam|| after scaling lam into |A^H lam| <= w.
double dual_value(const CMatrix& a, const CVector& y, const RVector& w, double eps, const CVector& lam) {
  if (lam.size() == 0 || !lam.allFinite()) return -std::numeric_limits<double>::infinity();
  const CVector g = a.adjoint() * lam;
  double scale = 1.0;
  for (Index i = 0; i < g.size(); ++i) scale = std::max(scale, std::abs(g(i)) / w(i));
  const double val = (lam.dot(y)).real() - eps * lam.norm();
  return val / scale;
}

// Along the ray lam = nu * r the dual is linear in nu; take the largest
// feasible nu when the slope is positive.
double dual_along_residual(const CMatrix& a, const CVector& y, const RVector& w, double eps,
                           const CVector& r) {
  const double slope = r.dot(y).real() - eps * r.norm();
  if (!(slope > 0.0)) return -std::numeric_limits<double>::infinity();
  const CVector g = a.adjoint() * r;
  double nu = std::numeric_limits<double>::infinity();
  for (Index i = 0; i < g.size(); ++i) {
    const double m = std::abs(g(i));
    if (m > 0.0) nu = std::min(nu, w(i) / m);
  }
  if (!std::isfinite(nu)) return -std::numeric_limits<double>::infinity();
  return nu * slope;
}

struct Polished {
  CVector x;
  double lower = -std::numeric_limits<double>::infinity();
  bool ok = false;
};

// Refit on the support of x by least squares and build the matching dual
// certificate from A_T^H lam = w_T * phase(x_T).
Polished polish_equality(const CMatrix& a, const CVector& y, const RVector& w, const CVector& x,
                         double feas_tol) {
  Polished out;
  const double xmax = x.cwiseAbs().maxCoeff();
  if (xmax == 0.0) return out;
  std::vector<Index> t;
  for (Index i = 0; i < x.size(); ++i)
    if (std::abs(x(i)) > 1e-9 * xmax) t.push_back(i);
  if (static_cast<Index>(t.size()) > a.rows()) return out;
  CMatrix at(a.rows(), static_cast<Index>(t.size()));
  for (std::size_t k = 0; k < t.size(); ++k) at.col(static_cast<Index>(k)) = a.col(t[k]);
  Eigen::CompleteOrthogonalDecomposition<CMatrix> cod(at);
  if (cod.rank() < at.cols()) return out;
  const CVector xt = cod.solve(y);
  if ((at * xt - y).norm() > feas_tol) return out;
  out.x = CVector::Zero(x.size());
  CVector sgn(xt.size());
  for (Index k = 0; k < xt.size(); ++k) {
    const double m = std::abs(xt(k));
    if (m == 0.0) return Polished{};
    out.x(t[static_cast<std::size_t>(k)]) = xt(k);
    sgn(k) = xt(k) / m * w(t[static_cast<std::size_t>(k)]);
  }
  out.ok = true;
  Eigen::CompleteOrthogonalDecomposition<CMatrix> cod_h(at.adjoint());
  const CVector lam = cod_h.solve(sgn);
  out.lower = dual_value(a, y, w, 0.0, lam);
  return out;
}

}  // namespace

SolverOutcome solve_weighted_bpdn(const CMatrix& a, const CVector& y, const WeightProfile& wp,
                                  double epsilon, const SolverOptions& opts) {
  const Index m = a.rows();
  const Index n = a.cols();
  require(y.size() == m, ErrorCode::DimensionMismatch,
          "measurement length " + std::to_string(y.size()) + " differs from row count " + std::to_string(m));
  require(wp.size() == n, ErrorCode::DimensionMismatch,
          "weight length " + std::to_string(wp.size()) + " differs from column count " + std::to_string(n));
  require(std::isfinite(epsilon) && epsilon >= 0.0, ErrorCode::InvalidArgument,
          "noise radius must be finite and nonnegative");
  require(a.allFinite() && y.allFinite(), ErrorCode::InvalidArgument, "non-finite problem data");
  require(opts.max_iterations > 0 && opts.check_every > 0, ErrorCode::InvalidArgument,
          "iteration limits must be positive");

  RVector w(n);
  for (Index i = 0; i < n; ++i) w(i) = wp[i];

  SolverOutcome out;
  out.epsilon = epsilon;
  const double ynorm = y.norm();
  const double feas = opts.feasibility_tol * std::max(1.0, ynorm);

  if (epsilon >= ynorm) {
    out.x = CVector::Zero(n);
    out.residual = ynorm;
    out.zero_solution = true;
    out.converged = true;
    if (opts.record_trace) out.objective_trace.push_back(0.0);
    return out;
  }

  const BallProjector proj(a, y, epsilon);
  if (proj.range_residual() > epsilon + feas) {
    fail(ErrorCode::Infeasible, "measurements are not reachable: distance to range(A) is " +
                                    std::to_string(proj.range_residual()) + " > eps " + std::to_string(epsilon));
  }

  const CVector x_ln = proj.min_norm_solution();
  const double scale = std::max(x_ln.norm(), std::numeric_limits<double>::min());
  double rho = w.norm() / scale;

  CVector x = CVector::Zero(n);
  CVector z = proj.project(x);
  CVector u = CVector::Zero(n);

  CVector best = z;
  double best_obj = weighted_norm(z, w);
  double lower = -std::numeric_limits<double>::infinity();
  bool polished = false;

  auto residual_of = [&](const CVector& v) { return (a * v - y).norm(); };
  auto offer = [&](const CVector& v, bool is_polished) {
    if (residual_of(v) > epsilon + feas) return;
    const double obj = weighted_norm(v, w);
    if (obj < best_obj) {
      best_obj = obj;
      best = v;
      polished = is_polished;
    }
  };

  Index it = 0;
  bool done = false;
  while (it < opts.max_iterations && !done) {
    ++it;
    x = complex_soft_threshold(z - u, w / rho);
    const CVector z_old = z;
    z = proj.project(x + u);
    u += x - z;

    if (it % opts.check_every != 0 && it != opts.max_iterations) continue;

    offer(z, false);
    offer(x, false);
    if (opts.polish && epsilon == 0.0) {
      const Polished p = polish_equality(a, y, w, x, feas);
      if (p.ok) {
        offer(p.x, true);
        lower = std::max(lower, p.lower);
      }
    }
    lower = std::max(lower, dual_value(a, y, w, epsilon, proj.adjoint_least_squares(-rho * u)));
    lower = std::max(lower, dual_along_residual(a, y, w, epsilon, y - a * best));
    if (opts.record_trace) out.objective_trace.push_back(best_obj);

    if (best_obj - lower <= opts.objective_tol * std::max(1.0, best_obj)) {
      done = true;
      break;
    }

    const double r_norm = (x - z).norm();
    const double s_norm = rho * (z - z_old).norm();
    if (r_norm > 10.0 * s_norm) {
      rho *= 2.0;
      u *= 0.5;
    } else if (s_norm > 10.0 * r_norm) {
      rho *= 0.5;
      u *= 2.0;
    }
  }

  out.x = best;
  out.objective = best_obj;
  out.residual = residual_of(best);
  out.dual_bound = lower;
  out.gap = best_obj - lower;
  out.iterations = it;
  out.penalty = rho;
  out.polished = polished;
  out.converged = done;
  return out;
}

SolverOutcome solve_weighted_bp(const CMatrix& a, const CVector& y, const WeightProfile& w,
                                const SolverOptions& opts) {
  return solve_weighted_bpdn(a, y, w, 0.0, opts);
}

}  // namespace wcs
