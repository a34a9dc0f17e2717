#include <gtest/gtest.h>

#include <map>
#include <random>

#include "cdgakit/cdga.hpp"
#include "cdgakit/polyforms.hpp"
#include "oracles.hpp"

using namespace cdgakit;

namespace {

FreeCDGA torus() { return FreeCDGA::from_strings({{"t1", 1}, {"t2", 1}}, {}); }
FreeCDGA cp(int n) {
  return FreeCDGA::from_strings({{"x", 2}, {"y", 2 * n + 1}}, {{"y", "x^" + std::to_string(n + 1)}});
}

DGAPtr share(TruncatedDGA a) { return std::make_shared<const TruncatedDGA>(std::move(a)); }

// Sends each basis monomial to the target monomial with the same label, or 0.
DGMorphism by_labels(DGAPtr s, DGAPtr t) {
  std::vector<QMatrix> maps;
  for (int k = 0; k <= std::min(s->cutoff(), t->cutoff()); ++k) {
    std::map<std::string, std::size_t> idx;
    for (std::size_t i = 0; i < t->dim(k); ++i) idx[t->labels(k)[i]] = i;
    QMatrix m(t->dim(k), s->dim(k));
    for (std::size_t j = 0; j < s->dim(k); ++j) {
      auto it = idx.find(s->labels(k)[j]);
      if (it != idx.end()) m.set(it->second, j, 1);
    }
    maps.push_back(std::move(m));
  }
  return DGMorphism(s, t, std::move(maps));
}

Monomial mono(const FreeGCA& alg, const std::string& name) { return alg.generator_monomial(alg.index_of(name)); }

}  // namespace

TEST(Truncate, TorusBases) {
  const auto t = truncate(torus(), 2);
  EXPECT_EQ(t.labels(0), (std::vector<std::string>{"1"}));
  EXPECT_EQ(t.labels(1), (std::vector<std::string>{"t2", "t1"}));
  EXPECT_EQ(t.labels(2), (std::vector<std::string>{"t1*t2"}));
}

TEST(Truncate, CutoffZeroIsUnitOnly) {
  const auto t = truncate(cp(1), 0);
  EXPECT_EQ(t.dim(0), 1u);
  EXPECT_EQ(t.cutoff(), 0);
}

TEST(Truncate, CP1Dimensions) {
  const auto t = truncate(cp(1), 6);
  std::vector<std::size_t> dims;
  for (int k = 0; k <= 6; ++k) dims.push_back(t.dim(k));
  EXPECT_EQ(dims, (std::vector<std::size_t>{1, 0, 1, 1, 1, 1, 1}));
  EXPECT_TRUE(t.validate().empty());
}

TEST(DSquared, Examples) {
  EXPECT_FALSE(check_d_squared(torus()).has_value());
  EXPECT_FALSE(check_d_squared(cp(1)).has_value());
  const auto bad = FreeCDGA::from_strings({{"u", 2}, {"v", 3}, {"w", 4}}, {{"v", "u^2"}, {"w", "u*v"}});
  const auto r = check_d_squared(bad);
  ASSERT_TRUE(r.has_value());
  EXPECT_EQ(bad.algebra().generator(r->generator).name, "w");
  EXPECT_EQ(bad.algebra().format(r->residue), "u^3");
}

TEST(DSquared, RejectsInhomogeneousDifferential) {
  EXPECT_THROW(FreeCDGA::from_strings({{"x", 2}, {"y", 3}}, {{"y", "x"}}), InputError);
}

TEST(Cohomology, TorusIsExterior) {
  const auto h = cohomology(truncate(torus(), 3), 2);
  EXPECT_EQ(h.dims(), (std::vector<std::size_t>{1, 2, 1}));
  const auto p = h.product(1, 0, 1, 1);
  ASSERT_TRUE(p.has_value());
  EXPECT_FALSE(is_zero(*p));
}

TEST(Cohomology, CP1) {
  const auto a = truncate(cp(1), 7);
  const auto h = cohomology(a, 6);
  EXPECT_EQ(h.dims(), (std::vector<std::size_t>{1, 0, 1, 0, 0, 0, 0}));
  EXPECT_EQ(a.format(2, h.representatives(2)[0]), "x");
}

TEST(Cohomology, IntervalFormsAreAcyclic) {
  const auto a = simplex_forms_dga(1, 3, 2);
  EXPECT_EQ(cohomology(a, 1).dims(), (std::vector<std::size_t>{1, 0}));
}

TEST(Cohomology, RequiresUptoBelowCutoff) {
  EXPECT_THROW(cohomology(truncate(torus(), 2), 2), CutoffTooSmall);
}

TEST(InducedMap, IdentityIsIdentity) {
  const auto a = share(truncate(torus(), 3));
  for (const auto& m : induced_map(DGMorphism::identity(a), 2)) EXPECT_EQ(m, QMatrix::identity(m.rows()));
}

TEST(InducedMap, UnitInclusionIntoIntervalForms) {
  const auto q = share(point_dga(2));
  const auto f = share(simplex_forms_dga(1, 2, 2));
  QMatrix m0 = QMatrix::from_columns({f->unit()}, f->dim(0));
  const auto h = DGMorphism(q, f, {m0, QMatrix(f->dim(1), 0), QMatrix(f->dim(2), 0)});
  EXPECT_TRUE(h.validate().empty());
  const auto maps = induced_map(h, 1);
  EXPECT_EQ(maps[0], QMatrix::identity(1));
  EXPECT_TRUE(is_quasi_iso(h, 1).ok);
}

TEST(InducedMap, QuotientKillsX) {
  const auto f = cp(1);
  const auto s = share(truncate(f, 6));
  const auto t = share(monomial_quotient(f, {mono(f.algebra(), "x")}, 6));
  const auto h = by_labels(s, t);
  EXPECT_TRUE(h.validate().empty());
  const auto maps = induced_map(h, 5);
  ASSERT_EQ(maps[2].cols(), 1u);
  EXPECT_TRUE(maps[2].is_zero());
}

TEST(InducedMap, RejectsNonChainMaps) {
  const auto s = share(truncate(cp(1), 5));
  std::vector<QMatrix> maps;
  for (int k = 0; k <= 5; ++k) maps.push_back(QMatrix::identity(s->dim(k)));
  maps[3] = QMatrix(1, 1);  // y -> 0 but x^2 -> x^2
  EXPECT_THROW(induced_map(DGMorphism(s, s, maps), 4), InputError);
}

TEST(QuasiIso, ZeroTargetFailsAtDegreeOne) {
  const auto a = share(truncate(torus(), 3));
  const auto pt = share(point_dga(3));
  const auto h = DGMorphism::augmentation_like(a, pt, QMatrix::identity(1));
  EXPECT_TRUE(h.validate().empty());
  const auto r = is_quasi_iso(h, 2);
  EXPECT_FALSE(r.ok);
  EXPECT_EQ(r.first_failing_degree, 1);
  EXPECT_TRUE(is_quasi_iso(DGMorphism::identity(a), 2).ok);
}

TEST(MonomialQuotient, RejectsUnstableIdeal) {
  const auto f = cp(1);
  EXPECT_THROW(monomial_quotient(f, {mono(f.algebra(), "y")}, 4), InputError);
}

TEST(TensorProduct, TorusFromCircles) {
  const auto s1 = truncate(FreeCDGA::from_strings({{"a", 1}}, {}), 3);
  const auto s2 = truncate(FreeCDGA::from_strings({{"b", 1}}, {}), 3);
  const auto t = tensor_product(s1, s2, 3);
  EXPECT_TRUE(t.dga.validate().empty());
  EXPECT_TRUE(t.dga.check_associativity().empty());
  EXPECT_EQ(cohomology(t.dga, 2).dims(), (std::vector<std::size_t>{1, 2, 1}));
}

TEST(DirectProduct, CohomologyAdds) {
  const auto a = truncate(torus(), 4);
  const auto b = truncate(cp(1), 4);
  const auto p = direct_product(a, b);
  EXPECT_TRUE(p.validate().empty());
  const auto ha = cohomology(a, 3).dims(), hb = cohomology(b, 3).dims(), hp = cohomology(p, 3).dims();
  for (int k = 0; k <= 3; ++k) EXPECT_EQ(hp[k], ha[k] + hb[k]);
}

TEST(CdgaProperties, RandomModelsAreValid) {
  std::mt19937_64 rng(1234);
  for (int t = 0; t < 100; ++t) {
    const auto f = oracle::random_koszul_model(rng);
    ASSERT_FALSE(check_d_squared(f).has_value());
    const auto a = truncate(f, 7);
    EXPECT_TRUE(a.validate().empty()) << "case " << t;
    EXPECT_TRUE(a.check_associativity(400).empty()) << "case " << t;
  }
}

TEST(CdgaProperties, CohomologyAgreesWithRankOracleAndEuler) {
  std::mt19937_64 rng(4321);
  for (int t = 0; t < 100; ++t) {
    const auto a = truncate(oracle::random_koszul_model(rng), 8);
    const int upto = 7;
    const auto h = cohomology(a, upto);
    EXPECT_EQ(h.dims(), oracle::cohomology_dims(a, upto)) << "case " << t;
    // Σ (-1)^k dim C^k = Σ (-1)^k dim H^k + (-1)^n rank d_n over k <= n.
    long long chi_c = 0, chi_h = 0;
    for (int k = 0; k <= upto; ++k) {
      const long long s = k % 2 == 0 ? 1 : -1;
      chi_c += s * static_cast<long long>(a.dim(k));
      chi_h += s * static_cast<long long>(h.dim(k));
    }
    const long long tail = (upto % 2 == 0 ? 1 : -1) * static_cast<long long>(rank(a.differential(upto)));
    EXPECT_EQ(chi_c, chi_h + tail);
    for (int k = 0; k <= upto; ++k)
      for (const auto& r : h.representatives(k)) EXPECT_TRUE(is_zero(a.d(k, r)));
  }
}

TEST(CdgaProperties, ProductCohomologyIsSum) {
  std::mt19937_64 rng(999);
  for (int t = 0; t < 100; ++t) {
    const auto a = truncate(oracle::random_koszul_model(rng), 6);
    const auto b = truncate(oracle::random_koszul_model(rng), 6);
    const auto p = direct_product(a, b);
    const auto ha = cohomology(a, 5).dims(), hb = cohomology(b, 5).dims(), hp = cohomology(p, 5).dims();
    for (int k = 0; k <= 5; ++k) EXPECT_EQ(hp[k], ha[k] + hb[k]);
  }
}

TEST(CdgaProperties, InducedMapsCompose) {
  std::mt19937_64 rng(77);
  for (int t = 0; t < 100; ++t) {
    const auto f = oracle::random_koszul_model(rng);
    const auto& alg = f.algebra();
    const auto x1 = mono(alg, "x1");
    std::vector<Monomial> second{x1};
    if (alg.size() > 1 && alg.index_of("y1") != 1) second.push_back(alg.generator_monomial(1));
    const auto a = share(truncate(f, 6));
    const auto b = share(monomial_quotient(f, {x1}, 6));
    const auto c = share(monomial_quotient(f, second, 6));
    const auto g1 = by_labels(a, b);
    const auto g2 = by_labels(b, c);
    ASSERT_TRUE(g1.validate().empty());
    ASSERT_TRUE(g2.validate().empty());
    const auto m1 = induced_map(g1, 5), m2 = induced_map(g2, 5), m = induced_map(compose(g2, g1), 5);
    for (int k = 0; k <= 5; ++k) EXPECT_EQ(m[k], m2[k] * m1[k]);
  }
}
