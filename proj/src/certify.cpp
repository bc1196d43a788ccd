#include "wcs/certify.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>
#include <unordered_set>

#include "wcs/error.hpp"
#include "wcs/linalg.hpp"
#include "wcs/rng.hpp"
#include "wcs/solver.hpp"

namespace wcs {

using cd = std::complex<double>;

std::string_view to_string(Property p) {
  switch (p) {
    case Property::NSP: return "nsp";
    case Property::RIP: return "rip";
    case Property::RobustNSP: return "robust_nsp";
  }
  return "?";
}

std::string_view to_string(ReportStatus s) {
  switch (s) {
    case ReportStatus::Satisfied: return "SATISFIED";
    case ReportStatus::Violated: return "VIOLATED";
    case ReportStatus::CertifiedOnKernel: return "CERTIFIED_ON_KERNEL";
    case ReportStatus::UndecidedOffKernel: return "UNDECIDED_OFF_KERNEL";
  }
  return "?";
}

Property parse_property(std::string_view text) {
  if (text == "nsp") return Property::NSP;
  if (text == "rip") return Property::RIP;
  if (text == "robust_nsp") return Property::RobustNSP;
  fail(ErrorCode::InvalidArgument, "unknown property '" + std::string(text) + "' (expected nsp, rip or robust_nsp)");
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Index resolve_workers(Index w) {
  if (w > 0) return w;
  const unsigned hc = std::thread::hardware_concurrency();
  return hc ? static_cast<Index>(hc) : 1;
}

// Runs fn(worker, workers) on `workers` threads and rethrows the first error.
template <class F>
void run_workers(Index workers, F&& fn) {
  if (workers <= 1) {
    fn(Index{0}, Index{1});
    return;
  }
  std::exception_ptr first;
  std::mutex mu;
  std::vector<std::thread> pool;
  for (Index k = 0; k < workers; ++k) {
    pool.emplace_back([&, k] {
      try {
        fn(k, workers);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (!first) first = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first) std::rethrow_exception(first);
}

void check_inputs(const CMatrix& a, const WeightProfile& w, SparseModel model, double s, Index cap) {
  require(a.cols() >= 1, ErrorCode::InvalidArgument, "matrix has no columns");
  require(w.size() == a.cols(), ErrorCode::DimensionMismatch,
          "weight length " + std::to_string(w.size()) + " differs from column count " + std::to_string(a.cols()));
  require(a.allFinite(), ErrorCode::InvalidArgument, "matrix has non-finite entries");
  validate_budget(s, model);
  const Index c = cap < 0 ? enumeration_cap() : cap;
  if (a.cols() > c) {
    fail(ErrorCode::CapExceeded, "dimension " + std::to_string(a.cols()) + " exceeds the enumeration cap " +
                                     std::to_string(c) + " (raise WCS_ENUM_CAP to override)");
  }
}

// Candidate ordering shared by every max-reduction: larger value first, then
// the lexicographically smaller support, then the smaller zero mask.
struct Candidate {
  double value = -kInf;
  Support support;
  std::uint64_t mask = 0;
  CVector vector;
  bool set = false;

  bool beats(double v, const Support& s, std::uint64_t m) const {
    if (!set) return true;
    const double tol = 1e-12 * std::max(1.0, std::abs(value));
    if (v == kInf && value != kInf) return true;
    if (value == kInf && v != kInf) return false;
    if (v > value + tol) return true;
    if (v < value - tol) return false;
    if (s.indices() != support.indices()) return s.indices() < support.indices();
    return m < mask;
  }

  void offer(double v, const Support& s, std::uint64_t m, const CVector& vec) {
    if (beats(v, s, m)) {
      value = v;
      support = s;
      mask = m;
      vector = vec;
      set = true;
    }
  }

  void merge(const Candidate& o) {
    if (o.set) offer(o.value, o.support, o.mask, o.vector);
  }
};

std::uint64_t zero_mask(const CVector& v) {
  std::uint64_t m = 0;
  for (Index i = 0; i < v.size(); ++i)
    if (v(i) != cd(0.0, 0.0)) m |= (std::uint64_t{1} << i);
  return m;
}

// Canonical scaling: unit l2 norm, largest-modulus entry real positive.
void normalize_phase(CVector& v) {
  Index k = 0;
  double best = -1.0;
  for (Index i = 0; i < v.size(); ++i) {
    const double m = std::abs(v(i));
    if (m > best * (1.0 + 1e-12)) {
      best = m;
      k = i;
    }
  }
  if (best <= 0.0) return;
  const cd ph = v(k) / std::abs(v(k));
  v *= std::conj(ph) / v.norm();
}

// Null vectors of B_J for every (d-1)-subset J of rows with rank d-1. These
// include every vertex direction of {z : ||(Bz)_T||_{w,1} <= 1}. Each circuit is
// reported once per worker, tiny entries flushed to zero.
template <class Scalar, class Visit>
std::size_t for_each_circuit(const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& b, Index worker,
                             Index workers, Visit&& visit) {
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  const Index n = b.rows();
  const Index d = b.cols();
  std::size_t visited = 0;
  if (d == 0) return 0;

  auto emit = [&](const Vec& raw) {
    CVector v = raw.template cast<cd>();
    const double vmax = v.cwiseAbs().maxCoeff();
    if (!(vmax > 0.0)) return false;
    for (Index i = 0; i < n; ++i)
      if (std::abs(v(i)) <= 1e-10 * vmax) v(i) = cd(0.0, 0.0);
    visit(v);
    return true;
  };

  if (d == 1) {
    if (worker == 0 && emit(b.col(0))) ++visited;
    return visited;
  }

  const Index k = d - 1;
  if (k > n) return 0;
  std::vector<Index> j(static_cast<std::size_t>(k));
  for (Index i = 0; i < k; ++i) j[static_cast<std::size_t>(i)] = i;
  std::unordered_set<std::uint64_t> seen;
  std::uint64_t counter = 0;
  Mat bjt(d, k);
  while (true) {
    if (static_cast<Index>(counter++ % static_cast<std::uint64_t>(workers)) == worker) {
      for (Index c = 0; c < k; ++c) bjt.col(c) = b.row(j[static_cast<std::size_t>(c)]).adjoint();
      Eigen::ColPivHouseholderQR<Mat> qr(bjt);
      qr.setThreshold(1e-10);
      if (qr.rank() == k) {
        Vec e = Vec::Zero(d);
        e(d - 1) = Scalar(1);
        const Vec z = qr.householderQ() * e;
        const Vec v = b * z;
        CVector probe = v.template cast<cd>();
        const double vmax = probe.cwiseAbs().maxCoeff();
        std::uint64_t mask = 0;
        for (Index i = 0; i < n; ++i)
          if (std::abs(probe(i)) > 1e-10 * vmax) mask |= (std::uint64_t{1} << i);
        if (seen.insert(mask).second && emit(v)) ++visited;
      }
    }
    // next combination in lexicographic order
    Index pos = k - 1;
    while (pos >= 0 && j[static_cast<std::size_t>(pos)] == n - k + pos) --pos;
    if (pos < 0) break;
    ++j[static_cast<std::size_t>(pos)];
    for (Index q = pos + 1; q < k; ++q) j[static_cast<std::size_t>(q)] = j[static_cast<std::size_t>(q - 1)] + 1;
  }
  return visited;
}

double ratio_from_parts(double kept, double total) {
  const double rest = total - kept;
  if (rest <= 1e-12 * total) return kInf;
  return kept / rest;
}

// Maximal supports with per-vector evaluation of ||v_S||_2 / ||v_Sc||_{w,1}.
struct RobustEvaluator {
  const WeightProfile& w;
  std::vector<Support> supports;

  RobustEvaluator(const WeightProfile& wp, SparseModel model, double s, Index cap)
      : w(wp), supports(admissible_supports(wp.size(), wp, model, s, {cap, true})) {}

  double ratio(const CVector& v, Support* best) const {
    const Index n = v.size();
    std::vector<double> sq(static_cast<std::size_t>(n)), wl(static_cast<std::size_t>(n));
    double total = 0.0;
    for (Index i = 0; i < n; ++i) {
      const double m = std::abs(v(i));
      sq[static_cast<std::size_t>(i)] = m * m;
      wl[static_cast<std::size_t>(i)] = w[i] * m;
      total += wl[static_cast<std::size_t>(i)];
    }
    double best_val = -1.0;
    const Support* arg = nullptr;
    for (const Support& s : supports) {
      double num = 0.0, kept = 0.0;
      for (Index i : s) {
        num += sq[static_cast<std::size_t>(i)];
        kept += wl[static_cast<std::size_t>(i)];
      }
      const double rest = total - kept;
      const double r = rest <= 1e-12 * total ? (num > 0.0 ? kInf : 0.0) : std::sqrt(num) / rest;
      if (r > best_val) {
        best_val = r;
        arg = &s;
      }
    }
    if (best && arg) *best = *arg;
    return std::max(best_val, 0.0);
  }

  // argmax over S of ||v_S||_2 + c ||v_S||_{w,1}
  const Support& off_kernel_support(const CVector& v, double c) const {
    const Support* arg = &supports.front();
    double best_val = -1.0;
    for (const Support& s : supports) {
      double num = 0.0, kept = 0.0;
      for (Index i : s) {
        const double m = std::abs(v(i));
        num += m * m;
        kept += w[i] * m;
      }
      const double val = std::sqrt(num) + c * kept;
      if (val > best_val) {
        best_val = val;
        arg = &s;
      }
    }
    return *arg;
  }
};

// Ratio maximization over complex kernel vectors v = Bz by the
// minorize-maximize step z <- Q^{-1} g, where g linearizes the numerator and
// Q = B_P^H diag(w/|v|) B_P bounds the weighted l1 denominator (Cauchy-Schwarz).
// Entries already at zero stay pinned. The ratio never decreases.
struct Ascent {
  const CMatrix& b;
  const WeightProfile& w;
  bool l2_numerator;
  std::function<double(const CVector&, Support*)> evaluate;
  Index iterations;

  double run(CVector z, CVector& v_out, Support& s_out) const {
    const Index n = b.rows();
    const Index d = b.cols();
    CVector v = b * z;
    Support s;
    double f = evaluate(v, &s);
    for (Index it = 0; it < iterations && f < kInf; ++it) {
      const std::vector<char> in_s = s.mask();
      const double vmax = v.cwiseAbs().maxCoeff();
      CVector u = CVector::Zero(n);
      double num2 = 0.0;
      for (Index i : s) num2 += std::norm(v(i));
      for (Index i : s) {
        const double m = std::abs(v(i));
        if (m == 0.0) continue;
        u(i) = l2_numerator ? v(i) / std::sqrt(num2) : w[i] * v(i) / m;
      }
      const CVector g = b.adjoint() * u;

      std::vector<Index> zero, pos;
      for (Index i = 0; i < n; ++i) {
        if (in_s[static_cast<std::size_t>(i)]) continue;
        (std::abs(v(i)) <= 1e-12 * vmax ? zero : pos).push_back(i);
      }
      CMatrix k;
      if (zero.empty()) {
        k = CMatrix::Identity(d, d);
      } else {
        CMatrix bz(static_cast<Index>(zero.size()), d);
        for (std::size_t r = 0; r < zero.size(); ++r) bz.row(static_cast<Index>(r)) = b.row(zero[r]);
        k = null_space_basis(bz, 1e-10);
      }
      if (k.cols() == 0) break;
      CMatrix q = CMatrix::Zero(d, d);
      for (Index i : pos) {
        const double eta = w[i] / std::abs(v(i));
        q.noalias() += eta * b.row(i).adjoint() * b.row(i);
      }
      const CMatrix qr = k.adjoint() * q * k;
      const CVector gr = k.adjoint() * g;
      Eigen::SelfAdjointEigenSolver<CMatrix> es(qr);
      const RVector ev = es.eigenvalues();
      CVector z_new;
      if (ev(ev.size() - 1) <= 0.0 || ev(0) <= 1e-14 * ev(ev.size() - 1)) {
        // A direction with vanishing denominator: the ratio may be unbounded.
        z_new = k * es.eigenvectors().col(0);
      } else {
        const CVector t = es.eigenvectors() *
                          ((es.eigenvectors().adjoint() * gr).array() / ev.array().cast<cd>()).matrix();
        z_new = k * t;
      }
      if (!(z_new.norm() > 0.0) || !z_new.allFinite()) break;
      z_new /= z_new.norm();
      const CVector v_new = b * z_new;
      Support s_new;
      const double f_new = evaluate(v_new, &s_new);
      if (!(f_new > f * (1.0 + 1e-14))) break;
      v = v_new;
      s = s_new;
      f = f_new;
    }
    v_out = v;
    s_out = s;
    return f;
  }
};

CVector random_complex(Rng& rng, Index n) {
  CVector z(n);
  for (Index i = 0; i < n; ++i) z(i) = cd(rng.normal(), rng.normal());
  return z;
}

CVector random_real(Rng& rng, Index n) {
  CVector z(n);
  for (Index i = 0; i < n; ++i) z(i) = cd(rng.normal(), 0.0);
  return z;
}

}  // namespace

double nsp_ratio(const CVector& v, const WeightProfile& w, SparseModel model, double s, Support* support,
                 Index cap) {
  BestTermOptions bo;
  bo.cap = cap;
  const BestTerm bt = best_weighted_s_term(v, w, model, s, bo);
  if (support) *support = bt.support;
  return ratio_from_parts(bt.kept, bt.kept + bt.sigma);
}

double robust_kernel_ratio(const CVector& v, const WeightProfile& w, SparseModel model, double s, Support* support,
                           Index cap) {
  require(v.size() == w.size(), ErrorCode::DimensionMismatch, "vector and weights differ in length");
  const RobustEvaluator ev(w, model, s, cap);
  return ev.ratio(v, support);
}

double robust_nsp_slack(const CMatrix& a, const CVector& v, const WeightProfile& w, const Support& s_set, double s,
                        double rho, double gamma) {
  require(v.size() == a.cols() && w.size() == a.cols() && s_set.dim() == a.cols(), ErrorCode::DimensionMismatch,
          "robust slack inputs differ in length");
  double num = 0.0;
  for (Index i : s_set) num += std::norm(v(i));
  const double rest = weighted_l1_norm(v, w, s_set.complement());
  return std::sqrt(num) - rho / std::sqrt(s) * rest - gamma * (a * v).norm();
}

CertificationReport rip_constant(const CMatrix& a, const WeightProfile& w, SparseModel model, double s,
                                 const CertifyOptions& opts, double delta_bound) {
  check_inputs(a, w, model, s, opts.cap);
  const Index n = a.cols();
  const CMatrix gram = a.adjoint() * a;
  const Index workers = resolve_workers(opts.workers);

  struct Local {
    Candidate best;
    double smax2 = 0.0, smin2 = 0.0;
    std::size_t count = 0;
  };
  std::vector<Local> locals(static_cast<std::size_t>(workers));

  run_workers(workers, [&](Index k, Index wk) {
    Local& loc = locals[static_cast<std::size_t>(k)];
    std::uint64_t counter = 0;
    EnumerationOptions eo;
    eo.cap = opts.cap;
    eo.maximal_only = true;
    enumerate_admissible_supports(
        n, w, model, s,
        [&](const Support& S) {
          if (static_cast<Index>(counter++ % static_cast<std::uint64_t>(wk)) != k) return true;
          ++loc.count;
          const Index sz = S.size();
          CMatrix g(sz, sz);
          for (Index r = 0; r < sz; ++r)
            for (Index c = 0; c < sz; ++c) g(r, c) = gram(S.indices()[static_cast<std::size_t>(r)],
                                                          S.indices()[static_cast<std::size_t>(c)]);
          Eigen::SelfAdjointEigenSolver<CMatrix> es(g);
          const double lo = es.eigenvalues()(0);
          const double hi = es.eigenvalues()(sz - 1);
          const double up = hi - 1.0, down = 1.0 - lo;
          const double d = std::max(up, down);
          if (loc.best.beats(d, S, 0)) {
            CVector x = CVector::Zero(n);
            const CVector e = up >= down ? CVector(es.eigenvectors().col(sz - 1)) : CVector(es.eigenvectors().col(0));
            for (Index r = 0; r < sz; ++r) x(S.indices()[static_cast<std::size_t>(r)]) = e(r);
            loc.best.offer(d, S, 0, x);
            loc.smax2 = hi;
            loc.smin2 = lo;
          }
          return true;
        },
        eo);
  });

  CertificationReport rep;
  rep.property = Property::RIP;
  rep.order = s;
  rep.model = model;
  rep.threshold = delta_bound;
  Candidate best;
  const Local* owner = nullptr;
  for (const Local& loc : locals) {
    rep.supports_examined += loc.count;
    if (loc.best.set && best.beats(loc.best.value, loc.best.support, 0)) {
      best.offer(loc.best.value, loc.best.support, 0, loc.best.vector);
      owner = &loc;
    }
  }
  if (!best.set) {
    // No index fits the budget: the property is vacuous.
    rep.constant = 0.0;
    return rep;
  }
  rep.constant = std::max(0.0, best.value);
  rep.sigma_max_sq = owner->smax2;
  rep.sigma_min_sq = owner->smin2;
  rep.satisfied = rep.constant < delta_bound;
  rep.status = rep.satisfied ? ReportStatus::Satisfied : ReportStatus::Violated;
  if (!rep.satisfied) {
    rep.witness_support = best.support;
    rep.witness_vector = best.vector;
  }
  return rep;
}

namespace {

struct KernelData {
  bool real = true;
  RMatrix br;
  CMatrix bc;
  Index dim = 0;
};

KernelData kernel_of(const CMatrix& a, double tol) {
  KernelData k;
  k.real = is_real(a);
  if (k.real) {
    k.br = null_space_basis_real(a.real(), tol);
    k.bc = k.br.cast<cd>();
  } else {
    k.bc = null_space_basis(a, tol);
  }
  k.dim = k.bc.cols();
  return k;
}

// Enumerates circuits of the kernel across workers and keeps the best value
// of `score` plus (complex case) the top `keep` circuits for refinement.
template <class Score>
std::pair<Candidate, std::size_t> scan_circuits(const KernelData& k, Index workers, Score&& score,
                                                std::vector<Candidate>* top, Index keep) {
  std::vector<Candidate> best(static_cast<std::size_t>(workers));
  std::vector<std::vector<Candidate>> tops(static_cast<std::size_t>(workers));
  std::vector<std::size_t> counts(static_cast<std::size_t>(workers), 0);
  run_workers(workers, [&](Index wi, Index wk) {
    auto visit = [&](const CVector& v) {
      Support S;
      const double r = score(v, &S);
      const std::uint64_t mask = zero_mask(v);
      best[static_cast<std::size_t>(wi)].offer(r, S, mask, v);
      if (top && keep > 0) {
        auto& t = tops[static_cast<std::size_t>(wi)];
        Candidate c;
        c.offer(r, S, mask, v);
        t.push_back(std::move(c));
        if (static_cast<Index>(t.size()) > 4 * keep) {
          std::sort(t.begin(), t.end(), [](const Candidate& x, const Candidate& y) {
            return x.beats(y.value, y.support, y.mask) && !(y.beats(x.value, x.support, x.mask));
          });
          t.resize(static_cast<std::size_t>(keep));
        }
      }
    };
    if (k.real) {
      counts[static_cast<std::size_t>(wi)] = for_each_circuit<double>(k.br, wi, wk, visit);
    } else {
      counts[static_cast<std::size_t>(wi)] = for_each_circuit<cd>(k.bc, wi, wk, visit);
    }
  });
  Candidate all;
  std::size_t total = 0;
  for (std::size_t i = 0; i < best.size(); ++i) {
    all.merge(best[i]);
    total += counts[i];
  }
  if (top) {
    for (auto& t : tops) top->insert(top->end(), t.begin(), t.end());
    std::sort(top->begin(), top->end(), [](const Candidate& x, const Candidate& y) {
      return x.beats(y.value, y.support, y.mask) && !(y.beats(x.value, x.support, x.mask));
    });
    if (static_cast<Index>(top->size()) > keep) top->resize(static_cast<std::size_t>(keep));
  }
  return {all, total};
}

// Recomputes a winning circuit from its zero pattern alone so the reported
// witness does not depend on how the scan was split across workers.
CVector canonical_circuit(const KernelData& k, const CVector& v) {
  std::vector<Index> zero;
  for (Index i = 0; i < v.size(); ++i)
    if (v(i) == cd(0.0, 0.0)) zero.push_back(i);
  CVector out = v;
  if (!zero.empty() && k.dim > 1) {
    CMatrix bz(static_cast<Index>(zero.size()), k.dim);
    for (std::size_t r = 0; r < zero.size(); ++r) bz.row(static_cast<Index>(r)) = k.bc.row(zero[r]);
    const CMatrix nz = null_space_basis(bz, 1e-10);
    if (nz.cols() == 1) {
      out = k.bc * nz.col(0);
      const double vmax = out.cwiseAbs().maxCoeff();
      for (Index i = 0; i < out.size(); ++i)
        if (std::abs(out(i)) <= 1e-10 * vmax) out(i) = cd(0.0, 0.0);
    }
  }
  normalize_phase(out);
  if (k.real) out = out.real().cast<cd>();
  return out;
}

}  // namespace

CertificationReport nsp_constant(const CMatrix& a, const WeightProfile& w, SparseModel model, double s,
                                 const CertifyOptions& opts) {
  check_inputs(a, w, model, s, opts.cap);
  CertificationReport rep;
  rep.property = Property::NSP;
  rep.order = s;
  rep.model = model;
  rep.threshold = 1.0;

  const KernelData k = kernel_of(a, opts.null_tol);
  rep.kernel_dim = k.dim;
  if (k.dim == 0) {
    rep.constant = 0.0;
    rep.satisfied = true;
    rep.status = ReportStatus::Satisfied;
    return rep;
  }
  rep.supports_examined = admissible_supports(a.cols(), w, model, s, {opts.cap, true}).size();

  auto score = [&](const CVector& v, Support* S) { return nsp_ratio(v, w, model, s, S, opts.cap); };
  const Index workers = resolve_workers(opts.workers);
  std::vector<Candidate> top;
  auto [best, count] = scan_circuits(k, workers, score, k.real ? nullptr : &top, opts.circuit_seeds);
  rep.candidates_examined = count;
  rep.exact = k.real;

  if (!k.real) {
    Ascent asc{k.bc, w, false, score, opts.ascent_iterations};
    std::vector<CVector> starts;
    for (const Candidate& c : top) starts.push_back(k.bc.adjoint() * c.vector);
    for (Index r = 0; r < opts.random_starts; ++r) {
      Rng rng(mix_seed(opts.seed, static_cast<std::uint64_t>(r)));
      starts.push_back(random_complex(rng, k.dim));
    }
    std::vector<Candidate> found(starts.size());
    run_workers(std::min<Index>(workers, static_cast<Index>(starts.size())), [&](Index wi, Index wk) {
      for (std::size_t i = static_cast<std::size_t>(wi); i < starts.size(); i += static_cast<std::size_t>(wk)) {
        CVector v;
        Support S;
        const double f = asc.run(starts[i], v, S);
        const double vmax = v.cwiseAbs().maxCoeff();
        for (Index j = 0; j < v.size(); ++j)
          if (std::abs(v(j)) <= 1e-13 * vmax) v(j) = cd(0.0, 0.0);
        normalize_phase(v);
        found[i].offer(f, S, zero_mask(v), v);
      }
    });
    for (const Candidate& c : found) best.merge(c);
    rep.candidates_examined += starts.size();
  }

  CVector witness = k.real ? canonical_circuit(k, best.vector) : best.vector;
  Support S;
  double gamma = nsp_ratio(witness, w, model, s, &S, opts.cap);
  if (!(gamma >= best.value * (1.0 - 1e-9))) {
    witness = best.vector;
    gamma = nsp_ratio(witness, w, model, s, &S, opts.cap);
  }
  rep.constant = gamma;
  rep.satisfied = gamma < 1.0 - opts.margin;
  rep.status = rep.satisfied ? ReportStatus::Satisfied : ReportStatus::Violated;
  // extremal kernel vector, kept even when the property holds
  rep.witness_support = S;
  rep.witness_vector = witness;
  return rep;
}

CertificationReport check_robust_nsp_kernel(const CMatrix& a, const WeightProfile& w, double s, double rho,
                                            double gamma, const CertifyOptions& opts) {
  const SparseModel model = SparseModel::WeightedCardinality;
  check_inputs(a, w, model, s, opts.cap);
  require(std::isfinite(rho) && rho >= 0.0, ErrorCode::InvalidArgument, "rho must be finite and nonnegative");
  require(std::isfinite(gamma) && gamma >= 0.0, ErrorCode::InvalidArgument, "gamma must be finite and nonnegative");

  CertificationReport rep;
  rep.property = Property::RobustNSP;
  rep.order = s;
  rep.model = model;
  rep.threshold = rho;
  rep.rho = rho;
  rep.gamma = gamma;

  const RobustEvaluator ev(w, model, s, opts.cap);
  rep.supports_examined = ev.supports.size();
  if (ev.supports.empty()) {
    rep.status = ReportStatus::CertifiedOnKernel;
    return rep;
  }
  const double rs = std::sqrt(s);
  const KernelData k = kernel_of(a, opts.null_tol);
  rep.kernel_dim = k.dim;
  rep.exact = k.real;
  const Index workers = resolve_workers(opts.workers);

  Candidate kernel_best;
  if (k.dim > 0) {
    auto score = [&](const CVector& v, Support* S) { return ev.ratio(v, S); };
    std::vector<Candidate> top;
    auto [best, count] = scan_circuits(k, workers, score, k.real ? nullptr : &top, opts.circuit_seeds);
    rep.candidates_examined = count;
    if (!k.real) {
      Ascent asc{k.bc, w, true, score, opts.ascent_iterations};
      for (std::size_t i = 0; i < top.size() + static_cast<std::size_t>(opts.random_starts); ++i) {
        CVector z;
        if (i < top.size()) {
          z = k.bc.adjoint() * top[i].vector;
        } else {
          Rng rng(mix_seed(opts.seed, i));
          z = random_complex(rng, k.dim);
        }
        CVector v;
        Support S;
        const double f = asc.run(z, v, S);
        normalize_phase(v);
        best.offer(f, S, zero_mask(v), v);
        ++rep.candidates_examined;
      }
    }
    kernel_best = best;
    if (k.real && best.set) {
      const CVector c = canonical_circuit(k, best.vector);
      Support S;
      const double r = ev.ratio(c, &S);
      if (r >= best.value * (1.0 - 1e-9)) {
        kernel_best.value = r;
        kernel_best.support = S;
        kernel_best.vector = c;
        kernel_best.mask = zero_mask(c);
      }
    }
  }
  rep.constant = kernel_best.set ? rs * kernel_best.value : 0.0;

  if (kernel_best.set && rep.constant > rho + opts.margin) {
    rep.satisfied = false;
    rep.status = ReportStatus::Violated;
    rep.witness_support = kernel_best.support;
    rep.witness_vector = kernel_best.vector;
    rep.witness_in_kernel = true;
    return rep;
  }

  // Off-kernel falsification: projected subgradient ascent of the slack on the
  // unit sphere, started from random points and every coordinate vector.
  const Index n = a.cols();
  const bool real = is_real(a);
  const double c = rho / rs;
  std::vector<CVector> starts;
  for (Index i = 0; i < n; ++i) starts.push_back(CVector::Unit(n, i));
  for (Index r = 0; r < opts.random_starts; ++r) {
    Rng rng(mix_seed(opts.seed ^ 0x0ff0ff0ffULL, static_cast<std::uint64_t>(r)));
    starts.push_back(real ? random_real(rng, n) : random_complex(rng, n));
  }
  std::vector<Candidate> found(starts.size());
  run_workers(std::min<Index>(workers, static_cast<Index>(starts.size())), [&](Index wi, Index wk) {
    for (std::size_t i = static_cast<std::size_t>(wi); i < starts.size(); i += static_cast<std::size_t>(wk)) {
      CVector v = starts[i] / starts[i].norm();
      Candidate& best = found[i];
      for (Index it = 0; it <= opts.ascent_iterations; ++it) {
        const Support& S = ev.off_kernel_support(v, c);
        const double h = robust_nsp_slack(a, v, w, S, s, rho, gamma);
        best.offer(h, S, 0, v);
        if (it == opts.ascent_iterations) break;
        const std::vector<char> in_s = S.mask();
        double num = 0.0;
        for (Index j : S) num += std::norm(v(j));
        num = std::sqrt(num);
        CVector g = CVector::Zero(n);
        for (Index j = 0; j < n; ++j) {
          const double m = std::abs(v(j));
          if (in_s[static_cast<std::size_t>(j)]) {
            if (num > 0.0) g(j) = v(j) / num;
          } else if (m > 0.0) {
            g(j) = -c * w[j] * v(j) / m;
          }
        }
        const CVector av = a * v;
        const double avn = av.norm();
        if (avn > 0.0) g -= gamma * (a.adjoint() * av) / avn;
        g -= v * v.dot(g).real();  // tangent component
        const double gn = g.norm();
        if (!(gn > 1e-14)) break;
        v += (0.2 / std::sqrt(static_cast<double>(it) + 1.0)) * g / gn;
        if (real) v = v.real().cast<cd>();
        v /= v.norm();
      }
    }
  });
  Candidate off;
  for (const Candidate& f : found) off.merge(f);
  rep.candidates_examined += starts.size();
  rep.off_kernel_best = off.value;

  if (off.set && off.value > 1e-10) {
    rep.satisfied = false;
    rep.status = ReportStatus::Violated;
    rep.witness_support = off.support;
    rep.witness_vector = off.vector;
    rep.witness_in_kernel = (a * off.vector).norm() <= 1e-10;
    return rep;
  }
  rep.satisfied = true;
  rep.status = k.real ? ReportStatus::CertifiedOnKernel : ReportStatus::UndecidedOffKernel;
  return rep;
}

InnerProductCheck disjoint_inner_product_bound_check(const CMatrix& a, Index s, Index t, const CertifyOptions& opts) {
  const Index n = a.cols();
  require(s >= 1 && t >= 1, ErrorCode::InvalidArgument, "orders s and t must be positive");
  const WeightProfile ones = WeightProfile::uniform(n, 1.0);
  check_inputs(a, ones, SparseModel::Cardinality, static_cast<double>(s + t), opts.cap);
  const Index s_eff = std::min(s, n);
  const Index t_eff = std::min(t, n - s_eff);

  InnerProductCheck out;
  out.delta = rip_constant(a, ones, SparseModel::Cardinality, static_cast<double>(std::min(s + t, n)), opts).constant;
  if (t_eff == 0) return out;

  Candidate best;
  const auto left = admissible_supports(n, ones, SparseModel::Cardinality, static_cast<double>(s_eff), {opts.cap, true});
  for (const Support& S : left) {
    const Support rest = S.complement();
    const auto& ri = rest.indices();
    const Index rn = rest.size();
    // subsets of the complement of size t_eff, lexicographic
    std::vector<Index> j(static_cast<std::size_t>(t_eff));
    for (Index i = 0; i < t_eff; ++i) j[static_cast<std::size_t>(i)] = i;
    const CMatrix as = columns(a, S);
    while (true) {
      std::vector<Index> tv;
      for (Index q : j) tv.push_back(ri[static_cast<std::size_t>(q)]);
      const Support T(tv, n);
      const CMatrix m = as.adjoint() * columns(a, T);
      const double r = singular_values(m)(0);
      ++out.pairs_examined;
      if (best.beats(r, S, 0)) {
        best.offer(r, S, 0, CVector());
        out.s_set = S;
        out.t_set = T;
      }
      Index pos = t_eff - 1;
      while (pos >= 0 && j[static_cast<std::size_t>(pos)] == rn - t_eff + pos) --pos;
      if (pos < 0) break;
      ++j[static_cast<std::size_t>(pos)];
      for (Index q = pos + 1; q < t_eff; ++q) j[static_cast<std::size_t>(q)] = j[static_cast<std::size_t>(q - 1)] + 1;
    }
  }
  out.max_ratio = best.set ? best.value : 0.0;
  out.violation = out.max_ratio - out.delta;
  return out;
}

EquivalenceVerdict exact_recovery_equivalence_test(const CMatrix& a, const WeightProfile& w, SparseModel model,
                                                   double s, Index trials, std::uint64_t seed,
                                                   const CertifyOptions& opts) {
  require(trials >= 0, ErrorCode::InvalidArgument, "trials must be nonnegative");
  EquivalenceVerdict out;
  out.nsp = nsp_constant(a, w, model, s, opts);
  out.nsp_holds = out.nsp.satisfied;
  const Index n = a.cols();
  const bool real = is_real(a);

  SolverOptions so;
  auto solve = [&](const CVector& x) {
    const SolverOutcome r = solve_weighted_bp(a, a * x, w, so);
    if (!r.converged) {
      fail(ErrorCode::NotConverged, "weighted basis pursuit did not converge within " +
                                        std::to_string(so.max_iterations) + " iterations (gap " +
                                        std::to_string(r.gap) + ")");
    }
    return r;
  };
  auto record = [&](const CVector& x) {
    const SolverOutcome r = solve(x);
    const double err = (r.x - x).norm() / x.norm();
    ++out.vectors_tested;
    out.max_relative_error = std::max(out.max_relative_error, err);
    const bool ok = err <= 1e-6;
    if (ok) ++out.recovered;
    return ok;
  };

  // Sign pattern of the extremal kernel vector, for adversarial plants.
  CVector pattern;
  if (out.nsp.kernel_dim > 0) {
    if (out.nsp.witness_vector.size() == n) {
      pattern = out.nsp.witness_vector;
    } else {
      const KernelData k = kernel_of(a, opts.null_tol);
      pattern = k.bc.col(0);
    }
  }

  Rng rng(seed);
  std::vector<Support> supports = admissible_supports(n, w, model, s, {opts.cap, false});
  out.supports_tested = supports.size();
  for (const Support& S : supports) {
    for (Index t = 0; t < trials; ++t) {
      CVector x = CVector::Zero(n);
      for (Index i : S) x(i) = real ? cd(rng.normal(), 0.0) : cd(rng.normal(), rng.normal());
      record(x);
    }
    if (pattern.size() == n) {
      CVector x = CVector::Zero(n);
      for (Index i : S) {
        const double m = std::abs(pattern(i));
        x(i) = m > 0.0 ? -pattern(i) / m : cd(1.0, 0.0);
      }
      record(x);
    }
  }

  if (!out.nsp_holds && out.nsp.witness_support) {
    const Support& S = *out.nsp.witness_support;
    const CVector& v = out.nsp.witness_vector;
    CVector x = CVector::Zero(n), z = CVector::Zero(n);
    const std::vector<char> in_s = S.mask();
    for (Index i = 0; i < n; ++i) {
      if (in_s[static_cast<std::size_t>(i)]) {
        x(i) = v(i);
      } else {
        z(i) = -v(i);
      }
    }
    out.planted_objective = weighted_l1_norm(x, w);
    out.competitor_objective = weighted_l1_norm(z, w);
    const double scale = std::max(1.0, out.planted_objective);
    const bool same_data = (a * x - a * z).norm() <= 1e-9 * std::max(1.0, (a * x).norm());
    out.competitor_found = same_data && out.competitor_objective <= out.planted_objective + 1e-9 * scale;
    if (x.norm() > 0.0) out.witness_recovered = record(x);
  }

  const bool all_recovered = out.recovered == out.vectors_tested;
  if (out.nsp_holds) {
    out.consistent = all_recovered;
  } else {
    // At gamma == 1 minimizers tie, so recovery may go either way; beyond it
    // the witness plant itself must fail.
    const bool strictly = out.nsp.constant > 1.0 + 1e-6;
    out.consistent = out.competitor_found && (!strictly || !out.witness_recovered);
  }
  return out;
}

}  // namespace wcs
