#include <doctest.h>

#include <cstdlib>
#include <set>

#include "oracles.hpp"
#include "wcs/core.hpp"
#include "wcs/error.hpp"
#include "wcs/rng.hpp"

using namespace wcs;

namespace {

Support sup(std::vector<Index> idx, Index dim) { return Support(std::move(idx), dim); }

CVector cvec(std::initializer_list<std::complex<double>> v) {
  CVector x(static_cast<Index>(v.size()));
  Index i = 0;
  for (auto z : v) x[i++] = z;
  return x;
}

}  // namespace

TEST_CASE("weight profile validation") {
  CHECK_THROWS_AS(WeightProfile({}), Error);
  CHECK_THROWS_AS(WeightProfile({1.0, 0.0}), Error);
  CHECK_THROWS_AS(WeightProfile({1.0, -2.0}), Error);
  CHECK_THROWS_AS(WeightProfile({1.0, std::nan("")}), Error);
  const WeightProfile w({0.5, 2.0, 1.0});
  CHECK(w.max() == 2.0);
  CHECK(w.min() == 0.5);
  CHECK(w.tail(1).size() == 2);
  CHECK(w.tail(1)[0] == 2.0);
}

TEST_CASE("support normalizes and rejects bad indices") {
  const Support s = sup({3, 1}, 5);
  CHECK(s.indices() == std::vector<Index>{1, 3});
  CHECK(s.complement().indices() == std::vector<Index>{0, 2, 4});
  CHECK(s.contains(3));
  CHECK_FALSE(s.contains(2));
  CHECK(to_string(s) == "{1,3}");
  CHECK_THROWS_AS(sup({1, 1}, 3), Error);
  CHECK_THROWS_AS(sup({3}, 3), Error);
}

TEST_CASE("weighted l1 norm") {
  CHECK(weighted_l1_norm(CVector::Zero(3), WeightProfile({1.0, 2.0, 3.0})) == 0.0);
  CHECK(weighted_l1_norm(cvec({1.0, -2.0, 3.0}), WeightProfile::uniform(3)) == doctest::Approx(6.0));
  CHECK(weighted_l1_norm(cvec({{0.0, 3.0}, 4.0}), WeightProfile({2.0, 0.5})) == doctest::Approx(8.0));
  CHECK_THROWS_AS(weighted_l1_norm(cvec({1.0}), WeightProfile::uniform(2)), Error);
}

TEST_CASE("sparse measure") {
  const WeightProfile w({2.0, 1.0, 1.0});
  CHECK(sparse_measure(Support({}, 3), w, SparseModel::WeightedCardinality) == 0.0);
  CHECK(sparse_measure(sup({0, 2}, 3), w, SparseModel::WeightedCardinality) == doctest::Approx(5.0));
  CHECK(sparse_measure(sup({0, 2}, 3), w, SparseModel::Cardinality) == 2.0);
}

TEST_CASE("budget validation") {
  CHECK_THROWS_AS(validate_budget(0.0, SparseModel::Cardinality), Error);
  CHECK_THROWS_AS(validate_budget(1.5, SparseModel::Cardinality), Error);
  CHECK_NOTHROW(validate_budget(1.5, SparseModel::WeightedCardinality));
}

TEST_CASE("enumerate admissible supports") {
  SUBCASE("singletons") {
    const auto all = admissible_supports(3, WeightProfile::uniform(3), SparseModel::Cardinality, 1);
    REQUIRE(all.size() == 3);
    for (Index i = 0; i < 3; ++i) CHECK(all[static_cast<std::size_t>(i)] == sup({i}, 3));
  }
  SUBCASE("weighted budget excludes the heavy index") {
    const auto all = admissible_supports(3, WeightProfile({2.0, 1.0, 1.0}), SparseModel::WeightedCardinality, 2);
    const std::set<Support> got(all.begin(), all.end());
    const std::set<Support> want{sup({1}, 3), sup({2}, 3), sup({1, 2}, 3)};
    CHECK(got == want);
    CHECK(all.size() == 3);
    // depth-first lexicographic order
    CHECK(all[0] == sup({1}, 3));
    CHECK(all[1] == sup({1, 2}, 3));
    CHECK(all[2] == sup({2}, 3));
  }
  SUBCASE("full power set") {
    CHECK(admissible_supports(3, WeightProfile::uniform(3), SparseModel::Cardinality, 3).size() == 7);
  }
  SUBCASE("maximal only") {
    EnumerationOptions o;
    o.maximal_only = true;
    const auto all = admissible_supports(4, WeightProfile::uniform(4), SparseModel::Cardinality, 2, o);
    CHECK(all.size() == 6);
    for (const auto& s : all) CHECK(s.size() == 2);
  }
  SUBCASE("cap refusal names the cap") {
    EnumerationOptions o;
    o.cap = 5;
    try {
      admissible_supports(6, WeightProfile::uniform(6), SparseModel::Cardinality, 1, o);
      FAIL("expected a cap refusal");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::CapExceeded);
      CHECK(std::string(e.what()).find('5') != std::string::npos);
    }
  }
  SUBCASE("early stop") {
    int seen = 0;
    enumerate_admissible_supports(5, WeightProfile::uniform(5), SparseModel::Cardinality, 2, [&](const Support&) {
      return ++seen < 3;
    });
    CHECK(seen == 3);
  }
}

TEST_CASE("enumeration cap follows the environment") {
  const char* old = std::getenv("WCS_ENUM_CAP");
  const std::string saved = old ? old : "";
  setenv("WCS_ENUM_CAP", "11", 1);
  CHECK(enumeration_cap() == 11);
  if (old)
    setenv("WCS_ENUM_CAP", saved.c_str(), 1);
  else
    unsetenv("WCS_ENUM_CAP");
  if (!old) CHECK(enumeration_cap() == 24);
}

TEST_CASE("best weighted s-term") {
  const CVector x = cvec({3.0, 2.0, 1.0});
  SUBCASE("top-2 selection") {
    const BestTerm b = best_weighted_s_term(x, WeightProfile::uniform(3), SparseModel::Cardinality, 2);
    CHECK(b.support == sup({0, 1}, 3));
    CHECK(b.sigma == doctest::Approx(1.0));
  }
  SUBCASE("knapsack avoids the heavy index") {
    const BestTerm b = best_weighted_s_term(x, WeightProfile({2.0, 1.0, 1.0}), SparseModel::WeightedCardinality, 2);
    CHECK(b.support == sup({1, 2}, 3));
    CHECK(b.kept == doctest::Approx(3.0));
    CHECK(b.sigma == doctest::Approx(6.0));
    CHECK_FALSE(b.approximate);
  }
  SUBCASE("sparse vector is its own approximant") {
    const CVector y = cvec({0.0, 5.0, 0.0, -1.0});
    const BestTerm b = best_weighted_s_term(y, WeightProfile({1.0, 1.0, 1.0, 1.2}), SparseModel::WeightedCardinality, 2.5);
    CHECK(b.sigma == 0.0);
  }
  SUBCASE("matches exhaustive search") {
    Rng rng(77);
    for (int t = 0; t < 40; ++t) {
      const int n = 3 + static_cast<int>(rng.below(8));
      std::vector<double> wv(static_cast<std::size_t>(n));
      for (auto& v : wv) v = rng.uniform(0.5, 1.8);
      CVector v(n);
      for (int i = 0; i < n; ++i) v[i] = {rng.normal(), rng.normal()};
      const double s = rng.uniform(1.0, 4.0);
      const BestTerm b = best_weighted_s_term(v, WeightProfile(wv), SparseModel::WeightedCardinality, s);
      const oracle::Best o = oracle::best_term(v, wv, true, s);
      CHECK(b.sigma == doctest::Approx(o.sigma).epsilon(1e-12));
    }
  }
  SUBCASE("cap and greedy fallback") {
    BestTermOptions o;
    o.cap = 4;
    const CVector y = CVector::Ones(6);
    CHECK_THROWS_AS(best_weighted_s_term(y, WeightProfile::uniform(6), SparseModel::WeightedCardinality, 2, o), Error);
    o.allow_greedy_fallback = true;
    const BestTerm b = best_weighted_s_term(y, WeightProfile::uniform(6), SparseModel::WeightedCardinality, 2, o);
    CHECK(b.approximate);
    CHECK(b.support.size() == 2);
  }
}

TEST_CASE("greedy partition") {
  SUBCASE("unit weights in pairs") {
    const Partition p = build_partition(WeightProfile::uniform(4), SparseModel::WeightedCardinality, 2, 4);
    REQUIRE(p.count() == 2);
    CHECK(p.blocks[0] == std::vector<Index>{0, 1});
    CHECK(p.blocks[1] == std::vector<Index>{2, 3});
    REQUIRE(p.estimate);
    CHECK(*p.estimate == doctest::Approx(3.0));
    CHECK(p.estimate_holds);
  }
  SUBCASE("everything fits") {
    CHECK(build_partition(WeightProfile::uniform(5), SparseModel::Cardinality, 5, 5).count() == 1);
  }
  SUBCASE("heavy middle index") {
    const Partition p = build_partition(WeightProfile({1.0, 2.0, 1.0}), SparseModel::WeightedCardinality, 4, 3);
    REQUIRE(p.count() == 3);
    CHECK(p.blocks[0] == std::vector<Index>{0});
    CHECK(p.blocks[1] == std::vector<Index>{1});
    CHECK(p.blocks[2] == std::vector<Index>{2});
  }
  SUBCASE("estimate can fail, packing bound cannot") {
    const Partition p = build_partition(WeightProfile::uniform(10, 1.2), SparseModel::WeightedCardinality, 4, 10);
    CHECK(p.count() == 5);
    CHECK_FALSE(p.estimate_holds);
    REQUIRE(p.packing_bound);
    CHECK(static_cast<double>(p.count()) <= *p.packing_bound);
  }
  SUBCASE("index heavier than the budget") {
    CHECK_THROWS_AS(build_partition(WeightProfile({1.0, 3.0}), SparseModel::WeightedCardinality, 4, 2), Error);
  }
}
