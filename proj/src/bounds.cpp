#include "wcs/bounds.hpp"

#include <cmath>
#include <sstream>

#include "wcs/error.hpp"
#include "wcs/linalg.hpp"

namespace wcs {

namespace {

void require_finite_nonneg(double v, const char* name) {
  if (!std::isfinite(v) || v < 0.0) {
    std::ostringstream os;
    os << name << " must be finite and nonnegative, got " << v;
    fail(ErrorCode::InvalidArgument, os.str());
  }
}

}  // namespace

double operator_norm_bound(double delta, Index n_nu) {
  require_finite_nonneg(delta, "delta");
  require(delta < 1.0, ErrorCode::Precondition, "operator norm bound needs delta < 1");
  require(n_nu >= 1, ErrorCode::InvalidArgument, "N_nu must be at least 1");
  return std::sqrt(static_cast<double>(n_nu) * (1.0 + delta));
}

Theorem37Constants theorem37_constants(double delta_2s, double gamma_w) {
  require_finite_nonneg(delta_2s, "delta_2s");
  require(std::isfinite(gamma_w) && gamma_w > 0.0 && gamma_w <= 1.0, ErrorCode::InvalidArgument,
          "weight floor gamma_w must lie in (0, 1]");
  const double limit = gamma_w / (gamma_w + 2.0);
  if (!(delta_2s < limit)) {
    std::ostringstream os;
    os << "premise violated: delta_2s = " << delta_2s << " is not below gamma_w/(gamma_w+2) = " << limit;
    fail(ErrorCode::Precondition, os.str());
  }
  Theorem37Constants c;
  const double d = delta_2s;
  const double g = gamma_w;
  c.delta = d;
  c.gamma_w = g;
  c.denominator = g * (1.0 - d) - 2.0 * d;
  require(c.denominator > 0.0, ErrorCode::Precondition, "premise violated: nonpositive denominator");
  const double root = std::sqrt(1.0 + d);
  c.a1 = 2.0 * g * (1.0 - d) / c.denominator;
  c.b1 = 4.0 * g * root / c.denominator;
  c.a2 = 2.0 / c.denominator;
  c.b2 = 2.0 * root * (c.denominator + 2.0) / ((1.0 - d) * c.denominator);
  c.nsp_bound = d / (g - (g + 1.0) * d);
  return c;
}

Case1Constants case1_constants(double delta_w3s) {
  require_finite_nonneg(delta_w3s, "delta_w3s");
  if (!(delta_w3s < 1.0 / 3.0)) {
    std::ostringstream os;
    os << "premise violated: delta_w3s = " << delta_w3s << " is not below 1/3";
    fail(ErrorCode::Precondition, os.str());
  }
  const double d = delta_w3s;
  Case1Constants c;
  c.delta = d;
  c.rho = 2.0 * d / (1.0 - d);
  c.gamma = std::sqrt(1.0 + d) / (1.0 - d);
  c.d2 = 6.0 * std::sqrt(1.0 + d) / (1.0 - d);
  return c;
}

ErrorConstants error_constants(const Theorem37Constants& t) {
  return ErrorConstants{t.a1, t.b1, t.a2, t.b2, "rip_order_2s"};
}

ErrorConstants error_constants(const Case1Constants& c) {
  return ErrorConstants{std::nullopt, std::nullopt, std::nullopt, c.d2, "weighted_rip_order_3s"};
}

ErrorBudget ripnsp_error_budget(double sigma_s, double s, double delta, Index n_nu, double lambda_phi,
                                double epsilon, const ErrorConstants& constants) {
  require_finite_nonneg(sigma_s, "sigma_s");
  require_finite_nonneg(delta, "delta");
  require_finite_nonneg(epsilon, "epsilon");
  require(std::isfinite(s) && s > 0.0, ErrorCode::InvalidArgument, "s must be positive");
  require(n_nu >= 1, ErrorCode::InvalidArgument, "N_nu must be at least 1");
  require(std::isfinite(lambda_phi) && lambda_phi > 0.0, ErrorCode::InvalidArgument,
          "lambda(Phi) must be positive");

  ErrorBudget b;
  b.sigma_s = sigma_s;
  b.s = s;
  b.delta = delta;
  b.n_nu = n_nu;
  b.lambda_phi = lambda_phi;
  b.epsilon = epsilon;
  b.constants = constants;
  b.noise_scale = std::sqrt(1.0 + delta) * std::sqrt(static_cast<double>(n_nu)) * epsilon / lambda_phi;

  auto term = [](std::optional<double> c, double factor) -> std::optional<double> {
    if (factor == 0.0) return 0.0;
    if (!c) return std::nullopt;
    return *c * factor;
  };
  const double rs = std::sqrt(s);
  b.l1_sigma_term = term(constants.c1, sigma_s);
  b.l1_noise_term = term(constants.d1, rs * b.noise_scale);
  b.l2_sigma_term = term(constants.c2, sigma_s / rs);
  b.l2_noise_term = term(constants.d2, b.noise_scale);
  if (b.l1_sigma_term && b.l1_noise_term) b.l1_bound = *b.l1_sigma_term + *b.l1_noise_term;
  if (b.l2_sigma_term && b.l2_noise_term) b.l2_bound = *b.l2_sigma_term + *b.l2_noise_term;
  return b;
}

double largest_singular_value(const CMatrix& m) {
  const RVector sv = singular_values(m);
  return sv.size() ? sv(0) : 0.0;
}

double smallest_positive_singular_value(const CMatrix& m, double tol) {
  const RVector sv = singular_values(m);
  const Index r = numerical_rank(sv, m.rows(), m.cols(), tol);
  return r ? sv(r - 1) : 0.0;
}

}  // namespace wcs
