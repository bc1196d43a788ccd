#include <doctest.h>

#include "oracles.hpp"
#include "wcs/bounds.hpp"
#include "wcs/certify.hpp"
#include "wcs/construct.hpp"
#include "wcs/error.hpp"
#include "wcs/linalg.hpp"
#include "wcs/rng.hpp"

using namespace wcs;

namespace {

CMatrix ones_row(Index n) { return CMatrix::Ones(1, n); }

}  // namespace

TEST_CASE("null space basis") {
  CHECK(null_space_basis(CMatrix::Identity(4, 4)).cols() == 0);
  const CMatrix b = null_space_basis(ones_row(3));
  REQUIRE(b.cols() == 2);
  CHECK((ones_row(3) * b).norm() < 1e-12);
  CHECK((b.adjoint() * b - CMatrix::Identity(2, 2)).norm() < 1e-12);
  const SenseMatrix g = gaussian_matrix(3, 5, 12);
  const CMatrix k = null_space_basis(g.values);
  REQUIRE(k.cols() == 2);
  for (Index j = 0; j < 2; ++j) CHECK((g.values * k.col(j)).norm() <= 1e-10);
}

TEST_CASE("rip of scaled identities") {
  const WeightProfile w = WeightProfile::uniform(4);
  CHECK(rip_constant(CMatrix::Identity(4, 4), w, SparseModel::Cardinality, 2).constant == doctest::Approx(0.0));
  const CertificationReport r = rip_constant(2.0 * CMatrix::Identity(4, 4), w, SparseModel::Cardinality, 2);
  CHECK(r.constant == doctest::Approx(3.0));
  CHECK_FALSE(r.satisfied);
}

TEST_CASE("rip agrees with per-support eigenvalues") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const SenseMatrix a = gaussian_matrix(5, 9, seed, seed % 2 == 0);
    Rng rng(seed);
    std::vector<double> wv(9);
    for (auto& v : wv) v = rng.uniform(0.8, 1.3);
    const double s = 2.6;
    const CertificationReport r = rip_constant(a.values, WeightProfile(wv), SparseModel::WeightedCardinality, s);
    CHECK(std::abs(r.constant - oracle::rip(a.values, wv, true, s)) <= 1e-10);
  }
}

TEST_CASE("nsp of a full rank square matrix is zero") {
  const SenseMatrix a = gaussian_matrix(4, 4, 3);
  const CertificationReport r = nsp_constant(a.values, WeightProfile::uniform(4), SparseModel::Cardinality, 2);
  CHECK(r.constant == 0.0);
  CHECK(r.satisfied);
  CHECK(r.kernel_dim == 0);
}

TEST_CASE("nsp of the all-ones row sits at the threshold") {
  const CertificationReport r = nsp_constant(ones_row(3), WeightProfile::uniform(3), SparseModel::Cardinality, 1);
  CHECK(r.constant == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_FALSE(r.satisfied);
  CHECK(r.status == ReportStatus::Violated);
  REQUIRE(r.witness_support);
  CHECK((ones_row(3) * r.witness_vector).norm() < 1e-12);
  const CMatrix b = null_space_basis(ones_row(3));
  const double sweep = oracle::nsp_two_dim_kernel(b.col(0).real(), b.col(1).real(), {1, 1, 1}, false, 1);
  CHECK(r.constant == doctest::Approx(sweep).epsilon(1e-9));
}

TEST_CASE("real nsp constant matches a kernel angle sweep") {
  Rng rng(31);
  for (std::uint64_t seed = 20; seed < 26; ++seed) {
    const SenseMatrix a = gaussian_matrix(4, 6, seed);
    std::vector<double> wv(6);
    for (auto& v : wv) v = rng.uniform(0.7, 1.3);
    const bool weighted = seed % 2 == 0;
    const SparseModel model = weighted ? SparseModel::WeightedCardinality : SparseModel::Cardinality;
    const double s = weighted ? 1.8 : 2.0;
    const CertificationReport r = nsp_constant(a.values, WeightProfile(wv), model, s);
    CHECK(r.exact);
    const CMatrix b = null_space_basis(a.values);
    REQUIRE(b.cols() == 2);
    // the basis may carry a common complex phase; rotate it away
    const std::complex<double> ph = b(0, 0) / std::abs(b(0, 0));
    const CMatrix br = b / ph;
    oracle::RMat rb = br.real();
    if (br.imag().norm() > 1e-9) rb = null_space_basis_real(a.values.real());
    const double sweep = oracle::nsp_two_dim_kernel(rb.col(0), rb.col(1), wv, weighted, s);
    CHECK(r.constant == doctest::Approx(sweep).epsilon(1e-7));
    CHECK(r.constant >= sweep - 1e-12);
  }
}

TEST_CASE("complex nsp is a certified lower bound with a kernel witness") {
  const SenseMatrix a = sample_partial_dft(8, 5, 4);
  const WeightProfile w = WeightProfile::uniform(8);
  const CertificationReport r = nsp_constant(a.values, w, SparseModel::Cardinality, 1);
  CHECK_FALSE(r.exact);
  REQUIRE(r.witness_vector.size() == 8);
  CHECK((a.values * r.witness_vector).norm() <= 1e-9 * r.witness_vector.norm());
  CHECK(nsp_ratio(r.witness_vector, w, SparseModel::Cardinality, 1) == doctest::Approx(r.constant).epsilon(1e-9));
}

TEST_CASE("nsp ratio of a single vector") {
  CVector v(3);
  v << 1.0, 0.0, -1.0;
  Support S;
  CHECK(nsp_ratio(v, WeightProfile::uniform(3), SparseModel::Cardinality, 1, &S) == doctest::Approx(1.0));
  CHECK(S.size() == 1);
  CHECK(std::isinf(nsp_ratio(v, WeightProfile::uniform(3), SparseModel::Cardinality, 2)));
}

TEST_CASE("robust nsp") {
  SUBCASE("vacuous on an injective matrix") {
    const CertificationReport r = check_robust_nsp_kernel(CMatrix::Identity(5, 5), WeightProfile::uniform(5), 2, 0.5, 2.0);
    CHECK(r.status == ReportStatus::CertifiedOnKernel);
    CHECK(r.satisfied);
  }
  SUBCASE("kernel witness replays the definition") {
    const CertificationReport r = check_robust_nsp_kernel(ones_row(3), WeightProfile::uniform(3), 1, 0.5, 1.0);
    CHECK(r.status == ReportStatus::Violated);
    REQUIRE(r.witness_support);
    CHECK(robust_nsp_slack(ones_row(3), r.witness_vector, WeightProfile::uniform(3), *r.witness_support, 1, 0.5,
                           1.0) > 0.0);
  }
  SUBCASE("small delta_3s implies the robust property on the kernel") {
    const SenseMatrix a = sample_partial_dct(20, 19, 2);
    const WeightProfile w = WeightProfile::uniform(20);
    const double s = 1;
    const double delta = rip_constant(a.values, w, SparseModel::WeightedCardinality, 3 * s).constant;
    REQUIRE(delta < 1.0 / 3.0);
    const Case1Constants c = case1_constants(delta);
    const CertificationReport r = check_robust_nsp_kernel(a.values, w, s, c.rho, c.gamma);
    CHECK(r.status == ReportStatus::CertifiedOnKernel);
  }
}

TEST_CASE("disjoint inner product bound") {
  CHECK(disjoint_inner_product_bound_check(CMatrix::Identity(5, 5), 1, 1).max_ratio == doctest::Approx(0.0));
  const SenseMatrix a = gaussian_matrix(4, 8, 17);
  const InnerProductCheck c = disjoint_inner_product_bound_check(a.values, 1, 1);
  double pair = 0.0;
  for (Index j = 0; j < 8; ++j)
    for (Index k = j + 1; k < 8; ++k)
      pair = std::max(pair, std::abs(a.values.col(j).dot(a.values.col(k))) /
                                (a.values.col(j).norm() * a.values.col(k).norm()));
  CHECK(c.max_ratio >= pair - 1e-12);
  CHECK(c.violation <= 1e-12);
  CHECK(c.delta == doctest::Approx(oracle::rip(a.values, std::vector<double>(8, 1.0), false, 2)).epsilon(1e-10));
}

TEST_CASE("recovery equivalence") {
  SUBCASE("identity") {
    const EquivalenceVerdict v = exact_recovery_equivalence_test(CMatrix::Identity(4, 4), WeightProfile::uniform(4),
                                                                 SparseModel::Cardinality, 2, 1, 3);
    CHECK(v.nsp_holds);
    CHECK(v.recovered == v.vectors_tested);
    CHECK(v.consistent);
  }
  SUBCASE("all-ones row has a competitor") {
    const EquivalenceVerdict v =
        exact_recovery_equivalence_test(ones_row(3), WeightProfile::uniform(3), SparseModel::Cardinality, 1, 1, 3);
    CHECK_FALSE(v.nsp_holds);
    CHECK(v.competitor_found);
    CHECK(v.competitor_objective <= v.planted_objective + 1e-9);
    CHECK(v.consistent);
  }
  SUBCASE("partial dft of order two") {
    const SenseMatrix a = sample_partial_dft(12, 6, 1);
    const EquivalenceVerdict v =
        exact_recovery_equivalence_test(a.values, WeightProfile::uniform(12), SparseModel::Cardinality, 2, 1, 8);
    CHECK(v.supports_tested == 78);
    if (v.nsp_holds) {
      CHECK(v.recovered == v.vectors_tested);
      CHECK(v.max_relative_error <= 1e-6);
    }
    CHECK(v.consistent);
  }
}
