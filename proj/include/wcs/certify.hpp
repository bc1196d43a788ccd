#ifndef WCS_CERTIFY_HPP
#define WCS_CERTIFY_HPP

#include <cstdint>
#include <optional>
#include <string_view>

#include "wcs/core.hpp"

namespace wcs {

enum class Property { NSP, RIP, RobustNSP };

enum class ReportStatus {
  Satisfied,
  Violated,
  CertifiedOnKernel,   ///< kernel restriction certified exactly, no off-kernel violation found
  UndecidedOffKernel,  ///< kernel check not exact (complex kernel), no violation found
};

std::string_view to_string(Property p);
std::string_view to_string(ReportStatus s);
Property parse_property(std::string_view text);

struct CertifyOptions {
  Index cap = -1;              ///< enumeration cap, <0 means enumeration_cap()
  double margin = 1e-9;        ///< NSP holds iff gamma < 1 - margin
  double null_tol = -1.0;      ///< kernel rank threshold, <0 for the default
  Index workers = 1;
  std::uint64_t seed = 0x5eed;
  Index random_starts = 16;    ///< complex kernels and off-kernel search
  Index ascent_iterations = 500;
  Index circuit_seeds = 8;     ///< top circuits refined by ascent (complex kernels)
};

struct CertificationReport {
  Property property = Property::NSP;
  double order = 0.0;
  SparseModel model = SparseModel::Cardinality;
  double constant = 0.0;    ///< gamma (NSP), delta (RIP), sqrt(s) max ||v_S||_2/||v_Sc||_{w,1} (robust, kernel)
  double threshold = 1.0;   ///< NSP: 1, RIP: requested delta bound, robust: rho
  bool satisfied = true;
  bool exact = true;        ///< constant is the exact optimum, not a lower bound
  ReportStatus status = ReportStatus::Satisfied;
  std::optional<Support> witness_support;
  CVector witness_vector;   ///< kernel vector (NSP, robust) or unit test vector (RIP)
  bool witness_in_kernel = true;
  Index kernel_dim = 0;
  std::size_t supports_examined = 0;
  std::size_t candidates_examined = 0;  ///< kernel circuits / ascent runs
  // RIP extremes over the attaining support
  double sigma_max_sq = 0.0, sigma_min_sq = 0.0;
  // robust NSP
  double rho = 0.0, gamma = 0.0;
  double off_kernel_best = 0.0;  ///< best ||v_S||_2 - rho/sqrt(s)||v_Sc|| - gamma||Av|| on the unit sphere
};

/// delta = max over admissible S of max(sigma_max(A_S)^2 - 1, 1 - sigma_min(A_S)^2).
/// satisfied iff delta < delta_bound.
CertificationReport rip_constant(const CMatrix& a, const WeightProfile& w, SparseModel model, double s,
                                 const CertifyOptions& opts = {}, double delta_bound = 1.0);

/// Smallest gamma with ||v_S||_{w,1} <= gamma ||v_Sc||_{w,1} on ker(A) for all
/// admissible S. Real matrices: exact, from the kernel circuits. Complex
/// matrices: circuits refined by a monotone ascent, a lower bound.
CertificationReport nsp_constant(const CMatrix& a, const WeightProfile& w, SparseModel model, double s,
                                 const CertifyOptions& opts = {});

/// Best-support ratio ||v_S||_{w,1}/||v_Sc||_{w,1} of one vector (infinity when
/// the complement vanishes); `support` receives the maximizing S.
double nsp_ratio(const CVector& v, const WeightProfile& w, SparseModel model, double s,
                 Support* support = nullptr, Index cap = -1);

/// max over maximal admissible S of ||v_S||_2 / ||v_Sc||_{w,1}.
double robust_kernel_ratio(const CVector& v, const WeightProfile& w, SparseModel model, double s,
                           Support* support = nullptr, Index cap = -1);

/// Value of ||v_S||_2 - rho/sqrt(s) ||v_Sc||_{w,1} - gamma ||Av||_2 at S.
double robust_nsp_slack(const CMatrix& a, const CVector& v, const WeightProfile& w, const Support& s_set,
                        double s, double rho, double gamma);

/// Weighted robust NSP (WeightedCardinality): exact kernel restriction plus a
/// randomized off-kernel falsification search.
CertificationReport check_robust_nsp_kernel(const CMatrix& a, const WeightProfile& w, double s, double rho,
                                            double gamma, const CertifyOptions& opts = {});

struct InnerProductCheck {
  double max_ratio = 0.0;  ///< max |<Au,Av>| / (||u|| ||v||) over disjoint supports
  double delta = 0.0;      ///< measured delta_{s+t}
  double violation = 0.0;  ///< max_ratio - delta
  Support s_set, t_set;
  std::size_t pairs_examined = 0;
};

/// Cardinality model: compares max sigma_max(A_S^H A_T) over disjoint |S|<=s,
/// |T|<=t with delta_{s+t}.
InnerProductCheck disjoint_inner_product_bound_check(const CMatrix& a, Index s, Index t,
                                                     const CertifyOptions& opts = {});

struct EquivalenceVerdict {
  CertificationReport nsp;
  bool nsp_holds = false;
  std::size_t supports_tested = 0;
  std::size_t vectors_tested = 0;
  std::size_t recovered = 0;
  double max_relative_error = 0.0;
  // non-uniqueness competitor from the NSP witness (nsp_holds == false)
  bool competitor_found = false;
  double planted_objective = 0.0;
  double competitor_objective = 0.0;
  bool witness_recovered = false;
  bool consistent = false;
};

/// Plants vectors on every admissible support and checks that weighted basis
/// pursuit recovery agrees with the NSP verdict. Throws NotConverged if the
/// solver stalls.
EquivalenceVerdict exact_recovery_equivalence_test(const CMatrix& a, const WeightProfile& w, SparseModel model,
                                                   double s, Index trials, std::uint64_t seed,
                                                   const CertifyOptions& opts = {});

}  // namespace wcs

#endif  // WCS_CERTIFY_HPP
