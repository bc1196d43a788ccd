#ifndef WCS_CONSTRUCT_HPP
#define WCS_CONSTRUCT_HPP

#include <cstdint>
#include <optional>
#include <string>

#include "wcs/certify.hpp"
#include "wcs/core.hpp"
#include "wcs/linalg.hpp"

namespace wcs {

/// Unitary DFT, U(t,k) = exp(2 pi i t k / N) / sqrt(N).
CMatrix dft_unitary(Index n);

/// Orthonormal DCT-II (real); row 0 is constant.
CMatrix dct_unitary(Index n);

struct SamplingOptions {
  bool exclude_first_row = false;
  bool with_replacement = false;
};

/// m rows of the N x N unitary `base`, sorted, scaled by sqrt(N/m). For the
/// DFT base the entries are exp(2 pi i t k / N) / sqrt(m).
SenseMatrix sample_partial_unitary(const CMatrix& base, Index m, std::uint64_t seed, SamplingOptions opts = {},
                                   MatrixSource source = MatrixSource::UnitaryRows);

SenseMatrix sample_partial_dft(Index n, Index m, std::uint64_t seed, SamplingOptions opts = {});
SenseMatrix sample_partial_dct(Index n, Index m, std::uint64_t seed, SamplingOptions opts = {});

/// i.i.d. N(0, 1/m) entries (complex entries split the variance).
SenseMatrix gaussian_matrix(Index m, Index n, std::uint64_t seed, bool complex_entries = false);

enum class InnerBase { DFT, DCT };

struct CounterexampleOptions {
  InnerBase base = InnerBase::DFT;
  std::optional<CMatrix> inner_unitary;  ///< overrides `base`, (N-k) x (N-k)
  bool certify_inner = true;             ///< certify the inner NSP when N-k is within the cap
  Index max_resamples = 20;
  double hypothetical_delta = 0.0;       ///< delta plugged into C' for the upper bound
  CertifyOptions certify;
};

struct InnerNspStatus {
  std::string status = "skipped";  ///< certified | lower_bound_only | skipped_above_cap | skipped
  double gamma = 0.0;
  double target = 0.0;
  Index resamples = 0;
};

struct CounterexampleDiagnostics {
  // construction identities
  double rows_orthonormal_error = 0.0;  ///< max |Phi Phi^H - I|
  double d_kernel_residual = 0.0;       ///< ||Phi d||_2
  double phi1_d_inner = 0.0;            ///< |<phi1, d>|
  double phi1_norm_error = 0.0;         ///< | ||phi1|| - 1 |
  double phi1_row_error = 0.0;          ///< ||Phi phi1 - e1||_2
  double xhat_closed_form_error = 0.0;  ///< max |xhat - (-alpha,..,-alpha,0,..)|
  double rho_residual = 0.0;            ///< ||Phi xhat - Phi x0||_2
  double rho_residual_rel_error = 0.0;
  Index kernel_dim = 0, kernel_dim_expected = 0;
  Index ne_dim = 0, ne_dim_expected = 0;
  // norm comparison
  double xhat_weighted_norm = 0.0, x0_weighted_norm = 0.0;
  bool norm_condition_applies = false;  ///< N >= 24 ||w||_inf^2 s
  bool norm_inequality_holds = false;   ///< ||xhat||_{w,1} <= ||x0||_{w,1}
  // alpha bracket
  double alpha_lower = 0.0, alpha_upper = 0.0;
  bool alpha_in_bracket = false;
  // error bounds
  double error_sq = 0.0;       ///< ||xhat - x0||_2^2
  double lower_bound = 0.0;    ///< (N-4k)^2/(16||w||^2) or (N-4s)^2/16
  bool lower_bound_holds = false;
  std::optional<double> c_prime;      ///< empty when the hypothetical delta violates the premise
  std::optional<double> upper_bound;  ///< 2 C' N (N ||w||^2/k + 1) or 2 C' N (N/s + 1)
  bool bounds_contradict = false;  ///< lower bound exceeds the RIP-NSP upper bound
  // premises stated with large absolute constants: reported only
  bool premise_sparsity = false;   ///< s > 23040 ||w||^6 (case 1) or s >= 3717120 (case 2)
  bool premise_dimension = false;  ///< N >= 24 ||w||^2 s (case 1) or N >= 24 s (case 2)
  bool premise_rows = false;       ///< m <= N/2
  bool premise_weights = false;    ///< w >= 1 (case 1) or w in [gamma, 1], gamma in (3/4, 1) (case 2)
  InnerNspStatus inner_nsp;
};

struct CounterexampleBundle {
  SparseModel model = SparseModel::WeightedCardinality;
  double s = 0.0;
  Index m = 0, n = 0, k = 0;
  std::vector<double> weights;
  SenseMatrix phi;
  SenseMatrix inner;
  CMatrix ne_basis;  ///< lifted basis of N_e' (N x (N-m-1))
  CVector d, phi1, x0, xhat, z, y;
  double alpha = 0.0;
  double phi_normalizer = 0.0;
  CounterexampleDiagnostics diagnostics;
};

/// Prefix length: longest k with sum_{i<k} w_i^2 <= s (WeightedCardinality),
/// or k = s (Cardinality).
Index counterexample_prefix(const WeightProfile& w, SparseModel model, double s);

CounterexampleBundle build_counterexample(const WeightProfile& w, double s, Index m, Index n, SparseModel model,
                                          std::uint64_t seed, const CounterexampleOptions& opts = {});

struct CounterexampleNspCheck {
  std::string mode;                ///< exact | sampled
  std::optional<CertificationReport> exact;
  std::size_t samples = 0;
  double max_sampled_ratio = 0.0;  ///< max over samples of max_T ||b_T||/||b_Tc||
  double d_i_norm = 0.0;           ///< ||d_I||_{w,1}
  double half_d_ic_sum = 0.0;      ///< (1/2) sum_{i in I^c} (-d_i)
  bool key_inequality = false;     ///< d_i_norm < half_d_ic_sum
  bool nsp_holds = false;
};

/// Exact NSP certification of Phi when N is within the cap (unless
/// force_sampled), otherwise random b = h + t d with h in N_e'.
CounterexampleNspCheck verify_nsp_of_counterexample(const CounterexampleBundle& bundle, Index samples,
                                                    std::uint64_t seed, bool force_sampled = false,
                                                    const CertifyOptions& opts = {});

struct ShrinkResult {
  CMatrix scaled;
  double c = 0.0;
  double c_max = 0.0;          ///< (||x_S||_2 - rho/sqrt(s)||x_Sc||_{w,1}) / (gamma ||Psi x||_2)
  Support support;
  double margin = 0.0;         ///< ||x_S||_2 - rho/sqrt(s)||x_Sc||_{w,1}
  double slack_original = 0.0; ///< robust slack of Psi at (x, S)
  double slack_scaled = 0.0;   ///< robust slack of c Psi at (x, S), > 0 means violated
  bool replay_violates = false;
};

/// Scales Psi by c = fraction * c_max so that (x_witness, S) violates the
/// weighted robust NSP with (rho, gamma); S is the admissible support with
/// the largest margin.
ShrinkResult shrink_to_break_robust_nsp(const CMatrix& psi, const WeightProfile& w, double s, double rho, double gamma,
                                        const CVector& x_witness, double fraction = 0.5, Index cap = -1);

}  // namespace wcs

#endif  // WCS_CONSTRUCT_HPP
