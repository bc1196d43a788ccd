#include "wcs/construct.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "wcs/bounds.hpp"
#include "wcs/error.hpp"
#include "wcs/rng.hpp"

namespace wcs {

using cd = std::complex<double>;

CMatrix dft_unitary(Index n) {
  require(n >= 1, ErrorCode::InvalidArgument, "DFT size must be positive");
  CMatrix u(n, n);
  const double norm = 1.0 / std::sqrt(static_cast<double>(n));
  for (Index t = 0; t < n; ++t)
    for (Index k = 0; k < n; ++k) {
      // reduce t*k mod n first so large sizes keep full phase accuracy
      const double ang = 2.0 * std::numbers::pi * static_cast<double>((t * k) % n) / static_cast<double>(n);
      u(t, k) = std::polar(norm, ang);
    }
  return u;
}

CMatrix dct_unitary(Index n) {
  require(n >= 1, ErrorCode::InvalidArgument, "DCT size must be positive");
  CMatrix u(n, n);
  const double nd = static_cast<double>(n);
  for (Index t = 0; t < n; ++t) {
    const double c = t == 0 ? std::sqrt(1.0 / nd) : std::sqrt(2.0 / nd);
    for (Index k = 0; k < n; ++k)
      u(t, k) = c * std::cos(std::numbers::pi * static_cast<double>(t) * (2.0 * static_cast<double>(k) + 1.0) / (2.0 * nd));
  }
  return u;
}

SenseMatrix sample_partial_unitary(const CMatrix& base, Index m, std::uint64_t seed, SamplingOptions opts,
                                   MatrixSource source) {
  const Index n = base.rows();
  require(n >= 1 && base.cols() == n, ErrorCode::DimensionMismatch, "base matrix must be square");
  require(base.allFinite(), ErrorCode::InvalidArgument, "base matrix has non-finite entries");
  const double dev = (base.adjoint() * base - CMatrix::Identity(n, n)).cwiseAbs().maxCoeff();
  require(dev <= 1e-9, ErrorCode::Precondition, "base matrix is not unitary (max |U^H U - I| = " + std::to_string(dev) + ")");
  const Index first = opts.exclude_first_row ? 1 : 0;
  const Index avail = n - first;
  require(m >= 1, ErrorCode::InvalidArgument, "row count must be positive");
  require(m <= n, ErrorCode::InvalidArgument,
          "row count " + std::to_string(m) + " exceeds the base dimension " + std::to_string(n));
  require(opts.with_replacement || m <= avail, ErrorCode::InvalidArgument,
          "only " + std::to_string(avail) + " rows available after excluding the first row, " + std::to_string(m) +
              " requested");

  Rng rng(seed);
  std::vector<Index> rows;
  if (opts.with_replacement) {
    for (Index i = 0; i < m; ++i) rows.push_back(first + static_cast<Index>(rng.below(static_cast<std::uint64_t>(avail))));
  } else {
    std::vector<Index> pool(static_cast<std::size_t>(avail));
    std::iota(pool.begin(), pool.end(), first);
    for (Index i = 0; i < m; ++i) {  // partial Fisher-Yates
      const auto j = static_cast<std::size_t>(i) + rng.below(static_cast<std::uint64_t>(avail - i));
      std::swap(pool[static_cast<std::size_t>(i)], pool[j]);
    }
    rows.assign(pool.begin(), pool.begin() + m);
  }
  std::sort(rows.begin(), rows.end());

  CMatrix a(m, n);
  const double scale = std::sqrt(static_cast<double>(n) / static_cast<double>(m));
  for (Index i = 0; i < m; ++i) a.row(i) = scale * base.row(rows[static_cast<std::size_t>(i)]);
  Provenance p;
  p.source = source;
  p.rows = rows;
  p.seed = seed;
  if (opts.exclude_first_row) p.note = "first row excluded";
  if (opts.with_replacement) p.note += p.note.empty() ? "with replacement" : ", with replacement";
  return SenseMatrix(std::move(a), std::move(p));
}

SenseMatrix sample_partial_dft(Index n, Index m, std::uint64_t seed, SamplingOptions opts) {
  return sample_partial_unitary(dft_unitary(n), m, seed, opts, MatrixSource::DftRows);
}

SenseMatrix sample_partial_dct(Index n, Index m, std::uint64_t seed, SamplingOptions opts) {
  return sample_partial_unitary(dct_unitary(n), m, seed, opts, MatrixSource::DctRows);
}

SenseMatrix gaussian_matrix(Index m, Index n, std::uint64_t seed, bool complex_entries) {
  require(m >= 1 && n >= 1, ErrorCode::InvalidArgument, "matrix dimensions must be positive");
  Rng rng(seed);
  CMatrix a(m, n);
  const double sd = 1.0 / std::sqrt(static_cast<double>(m) * (complex_entries ? 2.0 : 1.0));
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < m; ++i) {
      const double re = rng.normal();
      const double im = complex_entries ? rng.normal() : 0.0;
      a(i, j) = cd(sd * re, sd * im);
    }
  Provenance p;
  p.source = MatrixSource::Gaussian;
  p.seed = seed;
  if (complex_entries) p.note = "complex";
  return SenseMatrix(std::move(a), std::move(p));
}

Index counterexample_prefix(const WeightProfile& w, SparseModel model, double s) {
  validate_budget(s, model);
  if (model == SparseModel::Cardinality) return static_cast<Index>(std::llround(s));
  Index k = 0;
  double acc = 0.0;
  while (k < w.size() && fits_budget(acc + w[k] * w[k], s)) {
    acc += w[k] * w[k];
    ++k;
  }
  return k;
}

namespace {

// Orthonormal basis of the column span of v with singular values above tol.
CMatrix range_basis(const CMatrix& v, double tol) {
  if (v.cols() == 0) return CMatrix(v.rows(), 0);
  Eigen::JacobiSVD<CMatrix> svd(v, Eigen::ComputeThinU);
  const RVector& sv = svd.singularValues();
  Index r = 0;
  while (r < sv.size() && sv(r) > tol) ++r;
  return svd.matrixU().leftCols(r);
}

// Modified Gram-Schmidt with one re-orthogonalization pass; candidates whose
// residual drops below tol are skipped.
CMatrix complete_basis(const CVector& first, const CMatrix& candidates, Index count, double tol) {
  CMatrix q(first.size(), count);
  q.col(0) = first / first.norm();
  Index have = 1;
  for (Index j = 0; j < candidates.cols() && have < count; ++j) {
    CVector c = candidates.col(j);
    const double before = c.norm();
    for (int pass = 0; pass < 2; ++pass)
      for (Index i = 0; i < have; ++i) c -= q.col(i) * q.col(i).dot(c);
    const double after = c.norm();
    if (after <= tol * std::max(1.0, before)) continue;
    q.col(have++) = c / after;
  }
  require(have == count, ErrorCode::Internal,
          "orthonormal completion produced " + std::to_string(have) + " of " + std::to_string(count) + " vectors");
  return q;
}

SenseMatrix sample_inner(const CounterexampleOptions& opts, Index nk, Index mk, std::uint64_t seed) {
  SamplingOptions so;
  so.exclude_first_row = true;
  if (opts.inner_unitary) {
    require(opts.inner_unitary->rows() == nk, ErrorCode::DimensionMismatch,
            "inner unitary must be " + std::to_string(nk) + " x " + std::to_string(nk));
    return sample_partial_unitary(*opts.inner_unitary, mk, seed, so, MatrixSource::UnitaryRows);
  }
  return opts.base == InnerBase::DFT ? sample_partial_dft(nk, mk, seed, so) : sample_partial_dct(nk, mk, seed, so);
}

}  // namespace

CounterexampleBundle build_counterexample(const WeightProfile& w, double s, Index m, Index n, SparseModel model,
                                          std::uint64_t seed, const CounterexampleOptions& opts) {
  require(w.size() == n, ErrorCode::DimensionMismatch,
          "weight length " + std::to_string(w.size()) + " differs from N = " + std::to_string(n));
  validate_budget(s, model);
  const Index k = counterexample_prefix(w, model, s);
  require(k >= 1, ErrorCode::Precondition, "prefix length k is zero: the first weight alone exceeds s");
  require(n > 4 * k, ErrorCode::Precondition,
          "degenerate dimensions: need N > 4k (N = " + std::to_string(n) + ", k = " + std::to_string(k) + ")");
  require(m - k >= 1, ErrorCode::Precondition,
          "degenerate dimensions: need m - k >= 1 (m = " + std::to_string(m) + ", k = " + std::to_string(k) + ")");
  require(m < n, ErrorCode::Precondition, "degenerate dimensions: need m < N");
  const bool case1 = model == SparseModel::WeightedCardinality;
  const Index nk = n - k;
  const Index mk = m - k;

  CounterexampleBundle b;
  b.model = model;
  b.s = s;
  b.m = m;
  b.n = n;
  b.k = k;
  b.weights = w.values();
  auto& dg = b.diagnostics;

  // inner matrix with e in its kernel, certified when small enough
  const WeightProfile tail = w.tail(k);
  dg.inner_nsp.target = case1 ? 1.0 / 3.0 : 1.0 / 5.0;
  const Index cap = opts.certify.cap < 0 ? enumeration_cap() : opts.certify.cap;
  const bool certify = opts.certify_inner && nk <= cap;
  dg.inner_nsp.status = !opts.certify_inner ? "skipped" : (certify ? "failed" : "skipped_above_cap");
  for (Index r = 0;; ++r) {
    b.inner = sample_inner(opts, nk, mk, r == 0 ? seed : mix_seed(seed, static_cast<std::uint64_t>(r)));
    if (!certify) break;
    const CertificationReport rep = nsp_constant(b.inner.values, tail, model, s, opts.certify);
    dg.inner_nsp.gamma = rep.constant;
    dg.inner_nsp.resamples = r;
    if (rep.constant <= dg.inner_nsp.target) {
      dg.inner_nsp.status = rep.exact ? "certified" : "lower_bound_only";
      break;
    }
    if (r >= opts.max_resamples)
      fail(ErrorCode::Precondition, "inner matrix failed the NSP target " + std::to_string(dg.inner_nsp.target) +
                                        " after " + std::to_string(r + 1) + " samples (last gamma " +
                                        std::to_string(rep.constant) + ")");
  }

  // N_e' = ker(inner) with e projected out, lifted by k zeros
  const CMatrix ker = null_space_basis(b.inner.values);
  const CVector e_hat = CVector::Ones(nk) / std::sqrt(static_cast<double>(nk));
  const CMatrix proj = ker - e_hat * (e_hat.adjoint() * ker);
  const CMatrix ne = range_basis(proj, 1e-10);
  dg.ne_dim = ne.cols();
  dg.ne_dim_expected = nk - mk - 1;
  b.ne_basis = CMatrix::Zero(n, ne.cols());
  b.ne_basis.bottomRows(nk) = ne;

  // d, alpha, phi1
  const double gap = static_cast<double>(n - 4 * k);
  b.d = CVector::Constant(n, cd(-1.0, 0.0));
  double geo = 0.0;
  for (Index i = 0; i < k; ++i) {
    const double p = std::ldexp(1.0, -static_cast<int>(i + 2));  // 2^{-(i+1)} for 1-based i
    b.d(i) = gap * p / w[i];
    geo += p / w[i];
  }
  b.alpha = static_cast<double>(nk) / (gap * geo);
  b.phi_normalizer = std::sqrt(static_cast<double>(n) + (b.alpha * b.alpha - 1.0) * static_cast<double>(k));
  b.phi1 = CVector::Constant(n, cd(1.0 / b.phi_normalizer, 0.0));
  b.phi1.head(k).setConstant(cd(b.alpha / b.phi_normalizer, 0.0));

  // Phi rows: orthonormal basis of N^perp with phi1 first
  CMatrix span(n, b.ne_basis.cols() + 1);
  span << b.ne_basis, b.d;
  const CMatrix comp = orthogonal_complement(span);
  const CMatrix complement = comp - b.phi1 * (b.phi1.adjoint() * comp);
  const CMatrix q = complete_basis(b.phi1, complement, m, 1e-12);
  Provenance pv;
  pv.source = MatrixSource::Counterexample;
  pv.seed = seed;
  pv.note = std::string(case1 ? "weighted_cardinality" : "cardinality") + " k=" + std::to_string(k);
  b.phi = SenseMatrix(q.adjoint(), pv);
  const CMatrix& phi = b.phi.values;

  b.x0 = CVector::Zero(n);
  b.x0.head(k) = b.d.head(k);
  b.xhat = b.x0 - b.phi_normalizer * b.phi1 - b.d;
  b.z = CVector::Zero(m);
  b.z(0) = b.phi_normalizer;
  b.y = phi * b.x0 - b.z;

  // identities
  dg.rows_orthonormal_error = (phi * phi.adjoint() - CMatrix::Identity(m, m)).cwiseAbs().maxCoeff();
  dg.d_kernel_residual = (phi * b.d).norm();
  dg.phi1_d_inner = std::abs(b.phi1.dot(b.d));
  dg.phi1_norm_error = std::abs(b.phi1.norm() - 1.0);
  CVector e1 = CVector::Zero(m);
  e1(0) = 1.0;
  dg.phi1_row_error = (phi * b.phi1 - e1).norm();
  CVector closed = CVector::Zero(n);
  closed.head(k).setConstant(cd(-b.alpha, 0.0));
  dg.xhat_closed_form_error = (b.xhat - closed).cwiseAbs().maxCoeff();
  dg.rho_residual = (phi * b.xhat - phi * b.x0).norm();
  dg.rho_residual_rel_error = std::abs(dg.rho_residual - b.phi_normalizer) / b.phi_normalizer;
  dg.kernel_dim = null_space_basis(phi).cols();
  dg.kernel_dim_expected = n - m;

  // weighted norms
  const double wmax = w.max();
  dg.xhat_weighted_norm = weighted_l1_norm(b.xhat, w);
  dg.x0_weighted_norm = weighted_l1_norm(b.x0, w);
  dg.norm_condition_applies = static_cast<double>(n) >= 24.0 * wmax * wmax * s;
  dg.norm_inequality_holds = dg.xhat_weighted_norm <= dg.x0_weighted_norm * (1.0 + 1e-12);

  const double dprime = gap * (1.0 - std::ldexp(1.0, -static_cast<int>(k)));
  dg.alpha_lower = 2.0 * static_cast<double>(nk) * w.min() / dprime;
  dg.alpha_upper = 2.0 * static_cast<double>(nk) * wmax / dprime;
  dg.alpha_in_bracket = b.alpha >= dg.alpha_lower * (1.0 - 1e-12) && b.alpha <= dg.alpha_upper * (1.0 + 1e-12);

  // error bounds
  dg.error_sq = (b.xhat - b.x0).squaredNorm();
  const double nd = static_cast<double>(n);
  if (case1) {
    dg.lower_bound = gap * gap / (16.0 * wmax * wmax);
  } else {
    const double g4 = nd - 4.0 * s;
    dg.lower_bound = g4 * g4 / 16.0;
  }
  dg.lower_bound_holds = dg.error_sq >= dg.lower_bound * (1.0 - 1e-12);
  const double delta = opts.hypothetical_delta;
  try {
    if (case1) {
      const Case1Constants c = case1_constants(delta);
      dg.c_prime = c.d2 * c.d2 * (1.0 + delta);
      dg.upper_bound = 2.0 * *dg.c_prime * nd * (nd * wmax * wmax / static_cast<double>(k) + 1.0);
    } else {
      const Theorem37Constants c = theorem37_constants(delta, w.min());
      dg.c_prime = c.b2 * c.b2 * (1.0 + delta);
      dg.upper_bound = 2.0 * *dg.c_prime * nd * (nd / s + 1.0);
    }
  } catch (const Error& err) {
    if (err.code() != ErrorCode::Precondition && err.code() != ErrorCode::InvalidArgument) throw;
  }
  dg.bounds_contradict = dg.upper_bound && dg.lower_bound > *dg.upper_bound;

  // premises
  const double md = static_cast<double>(m);
  dg.premise_rows = md <= nd / 2.0;
  if (case1) {
    dg.premise_sparsity = s > 23040.0 * std::pow(wmax, 6);
    dg.premise_dimension = nd >= 24.0 * wmax * wmax * s;
    dg.premise_weights = w.min() >= 1.0;
  } else {
    dg.premise_sparsity = s >= 3717120.0;
    dg.premise_dimension = nd >= 24.0 * s;
    dg.premise_weights = wmax <= 1.0 && w.min() > 0.75;
  }
  return b;
}

CounterexampleNspCheck verify_nsp_of_counterexample(const CounterexampleBundle& bundle, Index samples,
                                                    std::uint64_t seed, bool force_sampled,
                                                    const CertifyOptions& opts) {
  require(samples >= 0, ErrorCode::InvalidArgument, "sample count must be nonnegative");
  const WeightProfile w(bundle.weights);
  const Index n = bundle.n;
  const Index k = bundle.k;
  CounterexampleNspCheck out;

  for (Index i = 0; i < n; ++i) {
    if (i < k) {
      out.d_i_norm += w[i] * std::abs(bundle.d(i));
    } else {
      out.half_d_ic_sum += -0.5 * bundle.d(i).real();
    }
  }
  out.key_inequality = out.d_i_norm < out.half_d_ic_sum;

  const Index cap = opts.cap < 0 ? enumeration_cap() : opts.cap;
  if (!force_sampled && n <= cap) {
    out.mode = "exact";
    out.exact = nsp_constant(bundle.phi.values, w, bundle.model, bundle.s, opts);
    out.nsp_holds = out.exact->satisfied;
    return out;
  }

  // Sampled mode: exact best-term search per vector (branch and bound, no cap).
  out.mode = "sampled";
  Rng rng(seed);
  const CMatrix& h = bundle.ne_basis;
  const double dnorm = bundle.d.norm();
  double worst = nsp_ratio(bundle.d, w, bundle.model, bundle.s, nullptr, n);
  out.samples = 1;
  for (Index t = 0; t < samples; ++t) {
    CVector c(h.cols());
    for (Index j = 0; j < c.size(); ++j) c(j) = cd(rng.normal(), rng.normal());
    CVector v = h * c;
    const double vn = v.norm();
    if (vn > 0.0) v *= dnorm * std::pow(10.0, rng.uniform(-2.0, 1.0)) / vn;
    const bool with_d = !(v.size() > 0 && rng.uniform() < 0.1);
    if (with_d) v += bundle.d * rng.sign();
    if (v.norm() == 0.0) continue;
    worst = std::max(worst, nsp_ratio(v, w, bundle.model, bundle.s, nullptr, n));
    ++out.samples;
  }
  out.max_sampled_ratio = worst;
  out.nsp_holds = worst < 1.0 - opts.margin && out.key_inequality;
  return out;
}

ShrinkResult shrink_to_break_robust_nsp(const CMatrix& psi, const WeightProfile& w, double s, double rho, double gamma,
                                        const CVector& x_witness, double fraction, Index cap) {
  require(psi.cols() == w.size() && x_witness.size() == w.size(), ErrorCode::DimensionMismatch,
          "matrix, weights and witness must share the dimension N");
  require(psi.allFinite() && x_witness.allFinite(), ErrorCode::InvalidArgument, "non-finite input");
  require(rho >= 0.0 && gamma > 0.0 && std::isfinite(rho) && std::isfinite(gamma), ErrorCode::InvalidArgument,
          "need rho >= 0 and gamma > 0");
  require(fraction > 0.0 && fraction < 1.0, ErrorCode::InvalidArgument, "fraction must lie in (0, 1)");
  const double img = (psi * x_witness).norm();
  require(img > 1e-12 * psi.norm() * x_witness.norm(), ErrorCode::Precondition,
          "witness lies in the kernel of Psi");

  ShrinkResult out;
  const double coef = rho / std::sqrt(s);
  bool found = false;
  enumerate_admissible_supports(
      w.size(), w, SparseModel::WeightedCardinality, s,
      [&](const Support& S) {
        const double margin = x_witness(S.indices()).norm() - coef * weighted_l1_norm(x_witness, w, S.complement());
        if (!found || margin > out.margin) {
          out.margin = margin;
          out.support = S;
          found = true;
        }
        return true;
      },
      {cap, true});
  if (!found || !(out.margin > 0.0))
    fail(ErrorCode::Precondition, "no admissible support S with ||x_S||_2 > rho/sqrt(s) ||x_Sc||_{w,1}");

  out.c_max = out.margin / (gamma * img);
  out.c = fraction * out.c_max;
  out.scaled = out.c * psi;
  out.slack_original = robust_nsp_slack(psi, x_witness, w, out.support, s, rho, gamma);
  out.slack_scaled = robust_nsp_slack(out.scaled, x_witness, w, out.support, s, rho, gamma);
  out.replay_violates = out.slack_scaled > 0.0;
  return out;
}

}  // namespace wcs
