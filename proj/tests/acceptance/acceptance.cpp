// One PASS/FAIL line per acceptance criterion. Exit status is the number of
// failed criteria.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "wcs/bounds.hpp"
#include "wcs/certify.hpp"
#include "wcs/construct.hpp"
#include "wcs/core.hpp"
#include "wcs/rng.hpp"
#include "wcs/solver.hpp"

using namespace wcs;

namespace {

// tolerances
constexpr double kRipOracleTol = 1e-10;
constexpr double kChainTol = 1e-8;
constexpr double kRecoveryRelTol = 1e-6;
constexpr double kRowsTol = 1e-10;
constexpr double kKernelTol = 1e-9;
constexpr double kPhi1DTol = 1e-10;
constexpr double kRhoRelTol = 1e-8;
constexpr double kScaledNspTol = 1e-10;
constexpr double kKnapsackTol = 1e-12;
constexpr double kNormBoundTol = 1e-10;

// sample sizes
constexpr int kEquivalenceMatrices = 56;
constexpr int kRipInstances = 20;
constexpr int kChainTrials = 100;
constexpr int kThirdTrials = 50;
constexpr int kNormInstances = 60;
constexpr int kCounterexampleSeeds = 10;
constexpr int kScalingInstances = 12;
constexpr int kKnapsackInstances = 100;

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::vector<double> random_weights(Rng& rng, Index n, double lo, double hi) {
  std::vector<double> w(static_cast<std::size_t>(n));
  for (auto& v : w) v = rng.uniform(lo, hi);
  return w;
}

SenseMatrix signed_dct(Index n, Index m, std::uint64_t seed) {
  SenseMatrix a = sample_partial_dct(n, m, seed);
  Rng rng(mix_seed(seed, 99));
  for (Index j = 0; j < n; ++j) a.values.col(j) *= rng.sign();
  return a;
}

Outcome nsp_recovery_equivalence() {
  struct Shape {
    Index m, n;
  };
  const Shape shapes[] = {{4, 8}, {6, 8}, {7, 10}, {6, 12}, {8, 12}, {8, 14}, {7, 9}};
  Outcome o;
  int agree = 0, holds = 0, fails = 0, competitors = 0, total = 0;
  double worst = 0.0;
  for (int i = 0; i < kEquivalenceMatrices; ++i) {
    const std::uint64_t seed = mix_seed(2024, static_cast<std::uint64_t>(i));
    const Shape sh = shapes[i % 7];
    const bool weighted = (i / 7) % 2 == 1;
    Rng rng(mix_seed(seed, 1));
    const WeightProfile w(random_weights(rng, sh.n, 0.7, 1.3));
    const SparseModel model = weighted ? SparseModel::WeightedCardinality : SparseModel::Cardinality;
    const double s = weighted ? (i % 3 == 0 ? 2.5 : 1.7) : (i % 7 == 3 ? 3.0 : 2.0);
    const SenseMatrix a = gaussian_matrix(sh.m, sh.n, seed);
    ++total;
    try {
      const EquivalenceVerdict v = exact_recovery_equivalence_test(a.values, w, model, s, 1, seed);
      bool ok = v.consistent && v.nsp.exact;
      if (v.nsp_holds) {
        ++holds;
        ok = ok && v.recovered == v.vectors_tested && v.max_relative_error <= kRecoveryRelTol;
        worst = std::max(worst, v.max_relative_error);
      } else {
        ++fails;
        ok = ok && v.competitor_found;
        if (v.competitor_found) ++competitors;
      }
      if (ok) ++agree;
    } catch (const std::exception& e) {
      std::printf("  equivalence matrix %d: %s\n", i, e.what());
    }
  }
  o.pass = agree == total && total >= 50;
  o.detail = std::to_string(agree) + "/" + std::to_string(total) + " agree (nsp holds " + std::to_string(holds) +
             ", fails " + std::to_string(fails) + " with " + std::to_string(competitors) +
             " competitors), worst planted error " + fmt("%.2e", worst);
  return o;
}

Outcome rip_oracle() {
  Outcome o;
  double worst = 0.0;
  for (int i = 0; i < kRipInstances; ++i) {
    const std::uint64_t seed = mix_seed(77, static_cast<std::uint64_t>(i));
    Rng rng(seed);
    const Index n = 8 + static_cast<Index>(i % 7);
    const Index m = 3 + static_cast<Index>(rng.below(static_cast<std::uint64_t>(n - 4)));
    const bool weighted = i % 2 == 0;
    const std::vector<double> wv = random_weights(rng, n, 0.6, 1.4);
    const double s = weighted ? rng.uniform(1.0, 4.0) : static_cast<double>(1 + rng.below(3));
    const SenseMatrix a = gaussian_matrix(m, n, seed, i % 3 == 0);
    const double got =
        rip_constant(a.values, WeightProfile(wv), weighted ? SparseModel::WeightedCardinality : SparseModel::Cardinality,
                     s)
            .constant;
    const double ref = oracle::rip(a.values, wv, weighted, s);
    worst = std::max(worst, std::abs(got - ref));
  }
  o.pass = worst <= kRipOracleTol;
  o.detail = std::to_string(kRipInstances) + " instances, max |delta - oracle| = " + fmt("%.2e", worst);
  return o;
}

Outcome rip_2s_error_chain() {
  Outcome o;
  const double gammas[] = {0.8, 0.9, 1.0};
  const double noises[] = {0.0, 1e-3, 1e-2};
  const Index n = 12;
  int premise = 0, attempts = 0, violations = 0, checks = 0;
  double worst_nsp = -1e300, worst_err = -1e300;
  for (int t = 0; premise < kChainTrials && attempts < 20 * kChainTrials; ++t) {
    ++attempts;
    const std::uint64_t seed = mix_seed(3707, static_cast<std::uint64_t>(t));
    const double gw = gammas[t % 3];
    const Index s = 1 + (t / 3) % 2;
    const Index m = n - 1 - (t / 6) % 3;
    Rng rng(mix_seed(seed, 1));
    const SenseMatrix a = signed_dct(n, m, seed);
    const WeightProfile w(random_weights(rng, n, gw, 1.0));
    const double sd = static_cast<double>(s);
    const double delta = rip_constant(a.values, w, SparseModel::Cardinality, 2.0 * sd).constant;
    if (!(delta < gw / (gw + 2.0))) continue;
    ++premise;
    const Theorem37Constants c = theorem37_constants(delta, gw);
    const double nsp = nsp_constant(a.values, w, SparseModel::Cardinality, sd).constant;
    ++checks;
    worst_nsp = std::max(worst_nsp, nsp - c.nsp_bound);
    if (nsp > c.nsp_bound + kChainTol) ++violations;
    for (int q = 0; q < 3; ++q) {
      const double eps = noises[q];
      Rng xr(mix_seed(seed, 10 + static_cast<std::uint64_t>(q)));
      CVector x(n);
      for (Index i = 0; i < n; ++i) x(i) = 1e-3 * xr.normal();
      for (Index i = 0; i < s; ++i) x(static_cast<Index>(xr.below(static_cast<std::uint64_t>(n)))) = xr.sign() * (1 + xr.uniform());
      CVector y = a.values * x;
      if (eps > 0.0) {
        CVector e(m);
        for (Index i = 0; i < m; ++i) e(i) = xr.normal();
        y += e * (eps / e.norm());
      }
      const SolverOutcome out = solve_weighted_bpdn(a.values, y, w, eps);
      const double sigma = oracle::best_term(x, w.values(), false, sd).sigma;
      const double bound = c.a2 * sigma / std::sqrt(sd) + c.b2 * eps;
      const double err = (out.x - x).norm();
      ++checks;
      worst_err = std::max(worst_err, err - bound);
      if (!out.converged || err > bound + kChainTol * std::max(1.0, x.norm())) ++violations;
    }
  }
  o.pass = violations == 0 && premise >= kChainTrials;
  o.detail = std::to_string(premise) + " trials meeting the premise (of " + std::to_string(attempts) + "), " +
             std::to_string(violations) + " violations in " + std::to_string(checks) + " checks; max nsp - bound " +
             fmt("%.2e", worst_nsp) + ", max error - bound " + fmt("%.2e", worst_err);
  return o;
}

Outcome rip_3s_nsp_chain() {
  Outcome o;
  const Index sizes[] = {16, 20, 24};
  const double orders[] = {0.7, 1.0, 1.3};
  int premise = 0, attempts = 0, violations = 0;
  double worst = -1e300;
  for (int t = 0; premise < kThirdTrials && attempts < 20 * kThirdTrials; ++t) {
    ++attempts;
    const std::uint64_t seed = mix_seed(1313, static_cast<std::uint64_t>(t));
    Rng rng(mix_seed(seed, 1));
    const Index n = sizes[t % 3];
    const Index m = n - 1 - (t / 3) % 2;
    const double s = orders[(t / 6) % 3];
    const SenseMatrix a = signed_dct(n, m, seed);
    const WeightProfile w(random_weights(rng, n, 0.8, 1.1));
    const double delta = rip_constant(a.values, w, SparseModel::WeightedCardinality, 3.0 * s).constant;
    if (!(delta < 1.0 / 3.0)) continue;
    ++premise;
    const double bound = 2.0 * delta / (1.0 - delta);
    const double nsp = nsp_constant(a.values, w, SparseModel::WeightedCardinality, s).constant;
    worst = std::max(worst, nsp - bound);
    if (nsp > bound + kChainTol) ++violations;
  }
  o.pass = violations == 0 && premise >= kThirdTrials;
  o.detail = std::to_string(premise) + " trials meeting the premise (of " + std::to_string(attempts) + "), " +
             std::to_string(violations) + " violations; max nsp - bound " + fmt("%.2e", worst);
  return o;
}

Outcome operator_norm_partition() {
  Outcome o;
  int certified = 0, norm_viol = 0, est_viol = 0, weighted_cases = 0;
  double worst = -1e300;
  std::string example;
  for (int i = 0; i < kNormInstances; ++i) {
    const std::uint64_t seed = mix_seed(35, static_cast<std::uint64_t>(i));
    Rng rng(mix_seed(seed, 1));
    const Index n = 8 + static_cast<Index>(i % 5);
    const Index m = n - 1 - static_cast<Index>(i % 3);
    const bool weighted = i % 2 == 0;
    const SparseModel model = weighted ? SparseModel::WeightedCardinality : SparseModel::Cardinality;
    const WeightProfile w(random_weights(rng, n, 0.8, 1.25));
    const double wmax2 = w.max() * w.max();
    const double s = weighted ? rng.uniform(wmax2, 3.0 * wmax2) : static_cast<double>(1 + i % 3);
    const SenseMatrix a = i % 4 < 2 ? signed_dct(n, m, seed) : sample_partial_dft(n, m, seed);
    const double delta = rip_constant(a.values, w, model, s).constant;
    const Partition p = build_partition(w, model, s, n);
    if (weighted) {
      ++weighted_cases;
      if (!p.estimate_holds) {
        ++est_viol;
        if (example.empty())
          example = " (e.g. N=" + std::to_string(n) + " s=" + fmt("%.3f", s) + " N_nu=" + std::to_string(p.count()) +
                    " estimate " + fmt("%.3f", *p.estimate) + ")";
      }
    }
    if (!(delta < 1.0)) continue;
    ++certified;
    const double lhs = largest_singular_value(a.values);
    const double rhs = operator_norm_bound(delta, p.count());
    worst = std::max(worst, lhs - rhs);
    if (lhs > rhs + kNormBoundTol) ++norm_viol;
  }
  o.pass = norm_viol == 0 && est_viol == 0;
  o.detail = "operator norm violations " + std::to_string(norm_viol) + "/" + std::to_string(certified) +
             " (max excess " + fmt("%.2e", worst) + "); N_nu estimate violations " + std::to_string(est_viol) + "/" +
             std::to_string(weighted_cases) + example;
  return o;
}

Outcome counterexample_identities() {
  Outcome o;
  int builds = 0, bad = 0, norm_applicable = 0, norm_bad = 0, exact_runs = 0, exact_bad = 0;
  double rows = 0, ker = 0, ip = 0, rho = 0;
  auto check = [&](const CounterexampleBundle& b) {
    ++builds;
    const Index m = b.m;
    const double r = (b.phi.values * b.phi.values.adjoint() - CMatrix::Identity(m, m)).cwiseAbs().maxCoeff();
    const double k = (b.phi.values * b.d).norm();
    const double p = std::abs(b.phi1.dot(b.d));
    const double res = (b.phi.values * b.xhat - b.phi.values * b.x0).norm();
    const double rr = std::abs(res - b.phi_normalizer) / b.phi_normalizer;
    rows = std::max(rows, r);
    ker = std::max(ker, k);
    ip = std::max(ip, p);
    rho = std::max(rho, rr);
    if (r > kRowsTol || k > kKernelTol || p > kPhi1DTol || rr > kRhoRelTol) ++bad;
    const WeightProfile w(b.weights);
    if (static_cast<double>(b.n) >= 24.0 * w.max() * w.max() * b.s) {
      ++norm_applicable;
      if (weighted_l1_norm(b.xhat, w) > weighted_l1_norm(b.x0, w) * (1 + 1e-12)) ++norm_bad;
    }
  };

  for (int i = 0; i < kCounterexampleSeeds; ++i) {
    const std::uint64_t seed = mix_seed(64, static_cast<std::uint64_t>(i));
    Rng rng(mix_seed(seed, 1));
    const WeightProfile w1(random_weights(rng, 64, 1.0, 1.2));
    check(build_counterexample(w1, 4, 20, 64, SparseModel::WeightedCardinality, seed));
    const WeightProfile w2(random_weights(rng, 64, 0.8, 1.0));
    check(build_counterexample(w2, 4, 20, 64, SparseModel::Cardinality, seed));
  }
  // instances large enough for the norm comparison to apply
  for (int i = 0; i < 4; ++i) {
    const std::uint64_t seed = mix_seed(96, static_cast<std::uint64_t>(i));
    Rng rng(mix_seed(seed, 1));
    if (i % 2 == 0) {
      const WeightProfile w(random_weights(rng, 96, 1.0, 1.2));
      check(build_counterexample(w, 2, 30, 96, SparseModel::WeightedCardinality, seed));
    } else {
      const WeightProfile w(random_weights(rng, 96, 0.8, 1.0));
      check(build_counterexample(w, 2, 30, 96, SparseModel::Cardinality, seed));
    }
  }
  // exact certification within the enumeration cap
  struct Small {
    Index n, m;
    bool weighted;
  };
  const Small small[] = {{20, 17, true}, {20, 18, true}, {20, 19, true}, {22, 19, true},
                         {22, 20, true}, {22, 21, true}, {20, 19, false}, {22, 21, false}};
  for (std::size_t i = 0; i < std::size(small); ++i) {
    const Small& c = small[i];
    const std::uint64_t seed = mix_seed(2022, i);
    Rng rng(mix_seed(seed, 1));
    CounterexampleOptions opts;
    opts.base = InnerBase::DCT;
    const WeightProfile w(c.weighted ? random_weights(rng, c.n, 1.0, 1.2) : random_weights(rng, c.n, 0.8, 1.0));
    const SparseModel model = c.weighted ? SparseModel::WeightedCardinality : SparseModel::Cardinality;
    try {
      const CounterexampleBundle b = build_counterexample(w, c.weighted ? 2.5 : 2.0, c.m, c.n, model, seed, opts);
      check(b);
      const CounterexampleNspCheck v = verify_nsp_of_counterexample(b, 0, seed);
      ++exact_runs;
      if (v.mode != "exact" || !v.exact || !v.exact->exact || !v.nsp_holds) ++exact_bad;
    } catch (const std::exception& e) {
      ++exact_runs;
      ++exact_bad;
      std::printf("  small counterexample N=%ld m=%ld: %s\n", static_cast<long>(c.n), static_cast<long>(c.m), e.what());
    }
  }
  o.pass = bad == 0 && norm_bad == 0 && norm_applicable > 0 && exact_bad == 0;
  o.detail = std::to_string(builds) + " builds, identity failures " + std::to_string(bad) + " (rows " +
             fmt("%.1e", rows) + ", kernel " + fmt("%.1e", ker) + ", <phi1,d> " + fmt("%.1e", ip) + ", rho rel " +
             fmt("%.1e", rho) + "); norm comparison " + std::to_string(norm_applicable - norm_bad) + "/" +
             std::to_string(norm_applicable) + "; exact nsp certified " + std::to_string(exact_runs - exact_bad) + "/" +
             std::to_string(exact_runs);
  return o;
}

Outcome scaling_invariance() {
  Outcome o;
  int bad = 0, shrink_bad = 0;
  double worst_nsp = 0.0;
  for (int i = 0; i < kScalingInstances; ++i) {
    const std::uint64_t seed = mix_seed(41, static_cast<std::uint64_t>(i));
    Rng rng(mix_seed(seed, 1));
    const Index n = 10, m = 6 + static_cast<Index>(i % 3);
    const bool weighted = i % 2 == 0;
    const SparseModel model = weighted ? SparseModel::WeightedCardinality : SparseModel::Cardinality;
    const WeightProfile w(random_weights(rng, n, 0.8, 1.2));
    const double s = weighted ? 1.8 : 2.0;
    const SenseMatrix a = i % 3 == 0 ? gaussian_matrix(m, n, seed) : signed_dct(n, m, seed);
    const double delta = rip_constant(a.values, w, model, s).constant;
    const double nsp = nsp_constant(a.values, w, model, s).constant;
    if (delta < 1.0) {
      const double c = 0.9 * std::sqrt((1.0 - delta) / (1.0 + delta));
      const CMatrix ca = c * a.values;
      const double delta_c = rip_constant(ca, w, model, s).constant;
      const double nsp_c = nsp_constant(ca, w, model, s).constant;
      const double diff = std::isinf(nsp) && std::isinf(nsp_c) ? 0.0 : std::abs(nsp - nsp_c);
      worst_nsp = std::max(worst_nsp, diff);
      if (!(delta_c > delta) || diff > kScaledNspTol) ++bad;
    }
    CVector x = CVector::Zero(n);
    x(i % n) = 1.0;
    const ShrinkResult r = shrink_to_break_robust_nsp(a.values, w, weighted ? s : 2.0, 0.5, 2.0, x);
    const bool replay = robust_nsp_slack(r.scaled, x, w, r.support, weighted ? s : 2.0, 0.5, 2.0) > 0.0;
    if (!r.replay_violates || !replay) ++shrink_bad;
  }
  o.pass = bad == 0 && shrink_bad == 0;
  o.detail = std::to_string(kScalingInstances) + " matrices, scaling failures " + std::to_string(bad) +
             " (max |nsp(cA) - nsp(A)| " + fmt("%.1e", worst_nsp) + "), shrink replay failures " +
             std::to_string(shrink_bad);
  return o;
}

Outcome best_term_knapsack() {
  Outcome o;
  int mismatch = 0;
  for (int i = 0; i < kKnapsackInstances; ++i) {
    Rng rng(mix_seed(4242, static_cast<std::uint64_t>(i)));
    const Index n = 4 + static_cast<Index>(rng.below(11));
    const std::vector<double> wv = random_weights(rng, n, 0.3, 2.0);
    CVector x(n);
    for (Index j = 0; j < n; ++j) x(j) = rng.uniform() < 0.2 ? std::complex<double>(0.0, 0.0)
                                                           : std::complex<double>(rng.normal(), rng.normal());
    const double s = rng.uniform(0.5, 6.0);
    const WeightProfile w(wv);
    const BestTerm b = best_weighted_s_term(x, w, SparseModel::WeightedCardinality, s);
    const oracle::Best ref = oracle::best_term(x, wv, true, s);
    const bool admissible = sparse_measure(b.support, w, SparseModel::WeightedCardinality) <= s * (1 + 1e-12);
    if (!admissible || std::abs(b.sigma - ref.sigma) > kKnapsackTol * std::max(1.0, ref.sigma + ref.kept)) ++mismatch;
  }
  o.pass = mismatch == 0;
  o.detail = std::to_string(kKnapsackInstances) + " instances, " + std::to_string(mismatch) + " mismatches";
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<Outcome()> run;
  };
  const Criterion criteria[] = {
      {"nsp_recovery_equivalence", nsp_recovery_equivalence},
      {"rip_oracle", rip_oracle},
      {"rip_2s_error_chain", rip_2s_error_chain},
      {"rip_3s_nsp_chain", rip_3s_nsp_chain},
      {"operator_norm_partition", operator_norm_partition},
      {"counterexample_identities", counterexample_identities},
      {"scaling_invariance", scaling_invariance},
      {"best_term_knapsack", best_term_knapsack},
  };
  int failed = 0;
  for (const Criterion& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("error: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s %s: %s [%.1fs]\n", o.pass ? "PASS" : "FAIL", c.name, o.detail.c_str(), secs);
    std::fflush(stdout);
    if (!o.pass) ++failed;
  }
  return failed;
}
