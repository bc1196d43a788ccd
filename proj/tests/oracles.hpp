// Brute-force reference computations, written independently of the library
// internals. Subsets are bitmasks over at most 20 indices.
#ifndef WCS_TESTS_ORACLES_HPP
#define WCS_TESTS_ORACLES_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;
using RVec = Eigen::VectorXd;
using RMat = Eigen::MatrixXd;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

inline double measure(std::uint32_t mask, const std::vector<double>& w, bool weighted) {
  double m = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i)
    if (mask >> i & 1u) m += weighted ? w[i] * w[i] : 1.0;
  return m;
}

inline bool admissible(std::uint32_t mask, const std::vector<double>& w, bool weighted, double s) {
  return measure(mask, w, weighted) <= s * (1.0 + 1e-12) + 1e-12;
}

inline std::vector<int> indices(std::uint32_t mask) {
  std::vector<int> out;
  for (int i = 0; mask; ++i, mask >>= 1)
    if (mask & 1u) out.push_back(i);
  return out;
}

struct Best {
  std::uint32_t mask = 0;
  double kept = 0.0;
  double sigma = 0.0;
};

// max over admissible S of sum_{i in S} w_i |x_i|, by visiting every subset
inline Best best_term(const CVec& x, const std::vector<double>& w, bool weighted, double s) {
  const int n = static_cast<int>(w.size());
  double total = 0.0;
  for (int i = 0; i < n; ++i) total += w[i] * std::abs(x[i]);
  Best b;
  b.sigma = total;
  for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
    if (!admissible(mask, w, weighted, s)) continue;
    double kept = 0.0;
    for (int i : indices(mask)) kept += w[i] * std::abs(x[i]);
    if (kept > b.kept) {
      b.kept = kept;
      b.mask = mask;
    }
  }
  b.sigma = total - b.kept;
  return b;
}

// max over admissible S of the spectral deviation of A_S^H A_S from I
inline double rip(const CMat& a, const std::vector<double>& w, bool weighted, double s) {
  const int n = static_cast<int>(a.cols());
  double delta = 0.0;
  for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
    if (!admissible(mask, w, weighted, s)) continue;
    const std::vector<int> idx = indices(mask);
    CMat g(idx.size(), idx.size());
    for (std::size_t p = 0; p < idx.size(); ++p)
      for (std::size_t q = 0; q < idx.size(); ++q) g(p, q) = a.col(idx[p]).dot(a.col(idx[q]));
    Eigen::SelfAdjointEigenSolver<CMat> es(g, Eigen::EigenvaluesOnly);
    const RVec ev = es.eigenvalues();
    delta = std::max({delta, ev.maxCoeff() - 1.0, 1.0 - ev.minCoeff()});
  }
  return delta;
}

// ||v_S||_{w,1} / ||v_Sc||_{w,1} maximized over admissible S
inline double ratio(const CVec& v, const std::vector<double>& w, bool weighted, double s) {
  const Best b = best_term(v, w, weighted, s);
  if (b.sigma <= 1e-300) return b.kept > 0.0 ? kInf : 0.0;
  return b.kept / b.sigma;
}

// Real kernel of dimension 2 spanned by b0, b1: sweep v(t) = cos t b0 + sin t b1
// over a fine grid, then refine around the best angle by golden section.
inline double nsp_two_dim_kernel(const RVec& b0, const RVec& b1, const std::vector<double>& w, bool weighted,
                                 double s, int grid = 20000) {
  auto f = [&](double t) {
    const RVec v = std::cos(t) * b0 + std::sin(t) * b1;
    return ratio(v.cast<std::complex<double>>(), w, weighted, s);
  };
  double best = 0.0, best_t = 0.0;
  for (int i = 0; i < grid; ++i) {
    const double t = std::numbers::pi * i / grid;
    const double r = f(t);
    if (r > best) {
      best = r;
      best_t = t;
    }
  }
  double lo = best_t - std::numbers::pi / grid, hi = best_t + std::numbers::pi / grid;
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  for (int it = 0; it < 100; ++it) {
    const double c = hi - g * (hi - lo), d = lo + g * (hi - lo);
    if (f(c) > f(d))
      hi = d;
    else
      lo = c;
  }
  return std::max(best, f(0.5 * (lo + hi)));
}

// min sum w_i |x_i| s.t. Ax = y for real data: the optimum sits at a basic
// solution, so try every column subset of size <= rank with independent columns.
struct BpResult {
  RVec x;
  double objective = kInf;
  bool feasible = false;
};

inline BpResult basis_pursuit(const RMat& a, const RVec& y, const std::vector<double>& w) {
  const int n = static_cast<int>(a.cols());
  const int m = static_cast<int>(a.rows());
  BpResult r;
  r.x = RVec::Zero(n);
  const double ytol = 1e-9 * std::max(1.0, y.norm());
  if (y.norm() <= ytol) {
    r.objective = 0.0;
    r.feasible = true;
    return r;
  }
  for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
    const std::vector<int> idx = indices(mask);
    if (static_cast<int>(idx.size()) > m) continue;
    RMat as(m, idx.size());
    for (std::size_t p = 0; p < idx.size(); ++p) as.col(p) = a.col(idx[p]);
    Eigen::ColPivHouseholderQR<RMat> qr(as);
    if (qr.rank() < static_cast<Eigen::Index>(idx.size())) continue;
    const RVec xs = qr.solve(y);
    if ((as * xs - y).norm() > ytol) continue;
    double obj = 0.0;
    for (std::size_t p = 0; p < idx.size(); ++p) obj += w[idx[p]] * std::abs(xs[p]);
    if (obj < r.objective) {
      r.objective = obj;
      r.feasible = true;
      r.x.setZero();
      for (std::size_t p = 0; p < idx.size(); ++p) r.x[idx[p]] = xs[p];
    }
  }
  return r;
}

// min sum w_i |x_i| s.t. ||x - y||_2 <= eps (identity operator), by projected
// subgradient with a diminishing step; returns the best objective seen.
inline double bpdn_identity_subgradient(const CVec& y, const std::vector<double>& w, double eps,
                                        int iterations = 200000) {
  const int n = static_cast<int>(y.size());
  auto project = [&](CVec x) {
    const CVec r = x - y;
    const double nr = r.norm();
    if (nr > eps) x = y + r * (eps / nr);
    return x;
  };
  auto objective = [&](const CVec& x) {
    double o = 0.0;
    for (int i = 0; i < n; ++i) o += w[i] * std::abs(x[i]);
    return o;
  };
  CVec x = y;
  double best = objective(x);
  for (int k = 1; k <= iterations; ++k) {
    CVec g(n);
    for (int i = 0; i < n; ++i) {
      const double ax = std::abs(x[i]);
      g[i] = ax > 0.0 ? w[i] * x[i] / ax : std::complex<double>(0.0, 0.0);
    }
    const double gn = g.norm();
    if (gn == 0.0) break;
    x = project(x - (0.5 * eps / std::sqrt(static_cast<double>(k))) * g / gn);
    best = std::min(best, objective(x));
  }
  return best;
}

}  // namespace oracle

#endif  // WCS_TESTS_ORACLES_HPP
