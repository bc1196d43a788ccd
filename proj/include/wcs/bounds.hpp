#ifndef WCS_BOUNDS_HPP
#define WCS_BOUNDS_HPP

#include <optional>
#include <string>

#include "wcs/core.hpp"

namespace wcs {

/// sqrt(N_nu * (1 + delta)); requires 0 <= delta < 1 and N_nu >= 1.
double operator_norm_bound(double delta, Index n_nu);

/// Constants of the RIP-of-order-2s error bounds for weights in [gamma_w, 1].
struct Theorem37Constants {
  double delta = 0.0;
  double gamma_w = 1.0;
  double denominator = 0.0;  ///< gamma_w (1 - delta) - 2 delta
  double a1 = 0.0, b1 = 0.0, a2 = 0.0, b2 = 0.0;
  double nsp_bound = 0.0;    ///< delta / (gamma_w - (gamma_w + 1) delta)
};

/// Throws Precondition unless 0 <= delta < gamma_w / (gamma_w + 2) and
/// gamma_w in (0, 1].
Theorem37Constants theorem37_constants(double delta_2s, double gamma_w);

/// Robust-NSP constants implied by delta_{w,3s} < 1/3.
struct Case1Constants {
  double delta = 0.0;
  double rho = 0.0;    ///< 2 delta / (1 - delta), also the NSP constant bound
  double gamma = 0.0;  ///< sqrt(1 + delta) / (1 - delta)
  double d2 = 0.0;     ///< 6 sqrt(1 + delta) / (1 - delta)
};

Case1Constants case1_constants(double delta_w3s);

/// Coefficients of the stable/robust bounds. Missing entries are constants
/// with no explicit value.
struct ErrorConstants {
  std::optional<double> c1, d1, c2, d2;
  std::string source;
};

ErrorConstants error_constants(const Theorem37Constants& t);
ErrorConstants error_constants(const Case1Constants& c);

struct ErrorBudget {
  // inputs
  double sigma_s = 0.0, s = 0.0, delta = 0.0, lambda_phi = 0.0, epsilon = 0.0;
  Index n_nu = 0;
  ErrorConstants constants;
  // sqrt(1 + delta) sqrt(N_nu) eps / lambda
  double noise_scale = 0.0;
  std::optional<double> l1_noise_term, l2_noise_term;
  std::optional<double> l1_sigma_term, l2_sigma_term;
  /// Present only when every term entering the bound is known.
  std::optional<double> l1_bound, l2_bound;
};

/// l1 = C1 sigma + D1 sqrt(s) sqrt(1+delta) sqrt(N_nu) eps / lambda
/// l2 = C2 sigma / sqrt(s) + D2 sqrt(1+delta) sqrt(N_nu) eps / lambda
/// A term with a zero factor counts as known even when its constant is not.
ErrorBudget ripnsp_error_budget(double sigma_s, double s, double delta, Index n_nu,
                                double lambda_phi, double epsilon, const ErrorConstants& constants);

double largest_singular_value(const CMatrix& m);

/// Smallest singular value above the numerical-rank threshold; 0 for the
/// zero matrix.
double smallest_positive_singular_value(const CMatrix& m, double tol = -1.0);

}  // namespace wcs

#endif  // WCS_BOUNDS_HPP
