#include <gtest/gtest.h>

#include <chrono>
#include <random>

#include "cdgakit/errors.hpp"
#include "cdgakit/localsys.hpp"
#include "oracles.hpp"

using namespace cdgakit;

namespace {

DGAPtr share(TruncatedDGA a) { return std::make_shared<const TruncatedDGA>(std::move(a)); }

// ∧(e) for odd q, Q[e]/(e^2) for even q.
DGAPtr square_zero(int q, int cutoff) {
  const auto f = FreeCDGA::from_strings({{"e", q}}, {});
  Monomial sq = f.algebra().unit_monomial();
  sq.exponents[0] = 2;
  return share(q % 2 == 0 ? monomial_quotient(f, {sq}, cutoff) : truncate(f, cutoff));
}

DGMorphism scale_degree(DGAPtr a, int q, const Rational& c) {
  std::vector<QMatrix> maps;
  for (int k = 0; k <= a->cutoff(); ++k) maps.push_back(k == q ? c * QMatrix::identity(a->dim(k)) : QMatrix::identity(a->dim(k)));
  return DGMorphism(a, a, std::move(maps));
}

// The unit Q -> F and the augmentation F -> Q for a connected fiber.
DGMorphism augmentation(DGAPtr f, DGAPtr pt) {
  return DGMorphism::augmentation_like(f, pt, QMatrix::from_rows({f->unit()}, f->dim(0)));
}

// Transport of L^q around a closed vertex path, from products of edge maps.
Rational holonomy(const LocalCoefficients& c, const std::vector<int>& path, int q) {
  Rational h = 1;
  for (std::size_t i = 0; i < path.size(); ++i) {
    const int a = path[i], b = path[(i + 1) % path.size()];
    // M_uv maps L_v -> L_u; going from a to b uses M_ba or the inverse of M_ab.
    const Rational m = a < b ? c.edge_maps.at({a, b})[static_cast<std::size_t>(q)].at(0, 0)
                             : c.edge_maps.at({b, a})[static_cast<std::size_t>(q)].at(0, 0);
    h *= a < b ? Rational(1) / m : m;
  }
  return h;
}

// Six-vertex circle 0-1-3-2-4-5-0 and its monotone double cover of C3.
SimplicialComplexK hexagon() { return SimplicialComplexK({{0, 1}, {1, 3}, {2, 3}, {2, 4}, {4, 5}, {0, 5}}); }
const std::map<int, int> kDoubleCover{{0, 0}, {1, 1}, {2, 0}, {3, 2}, {4, 1}, {5, 2}};

}  // namespace

TEST(LocalSystem, ConstantAndTwistedValidate) {
  const auto k = SimplicialComplexK::cycle(3);
  EXPECT_TRUE(validate(*constant_system(k, square_zero(2, 4))).empty());
  EXPECT_TRUE(validate(*sign_twisted_system(k, 1, {0, 2}, 3)).empty());
  // On a filled triangle a single twisted edge breaks the square at [0].
  EXPECT_FALSE(validate(*sign_twisted_system(SimplicialComplexK::full_simplex(2), 2, {0, 1}, 4)).empty());
}

TEST(LocalSystem, NonMultiplicativeRestrictionIsReported) {
  const auto k = SimplicialComplexK::full_simplex(1);
  const auto f = square_zero(2, 4);
  std::vector<QMatrix> maps;
  for (int d = 0; d <= 4; ++d) maps.push_back(QMatrix::identity(f->dim(d)));
  maps[0] = Rational(2) * maps[0];  // 1 -> 2
  const DGMorphism bad(f, f, maps);
  const auto id = DGMorphism::identity(f);
  const FiniteLocalSystem e(k, {{{0}, f}, {{1}, f}, {{0, 1}, f}}, {{{0, 1}, {id, bad}}});
  const auto report = validate(e);
  ASSERT_FALSE(report.empty());
  EXPECT_NE(report.front().find("[0,1] -> [0]"), std::string::npos) << report.front();
}

TEST(LocalSystem, NonCommutingSquareIsReported) {
  const auto k = SimplicialComplexK::full_simplex(2);
  const auto f = square_zero(1, 3);
  const auto id = DGMorphism::identity(f);
  const auto flip = scale_degree(f, 1, -1);
  std::map<Simplex, DGAPtr> fibers;
  std::map<Simplex, std::vector<DGMorphism>> res;
  for (const auto& s : k.all_simplices()) {
    fibers[s] = f;
    if (s.size() > 1) res[s] = std::vector<DGMorphism>(s.size(), id);
  }
  res[{0, 1, 2}][0] = flip;
  EXPECT_FALSE(validate(FiniteLocalSystem(k, fibers, res)).empty());
}

TEST(LocalSystem, RejectsMissingPieces) {
  const auto k = SimplicialComplexK::full_simplex(1);
  const auto f = share(point_dga(2));
  EXPECT_THROW(FiniteLocalSystem(k, {{{0}, f}, {{1}, f}}, {}), InputError);
  EXPECT_THROW(FiniteLocalSystem(k, {{{0}, f}, {{1}, f}, {{0, 1}, f}}, {}), InputError);
}

TEST(LocalSystem, CompositeRestrictions) {
  const auto fs = forms_system(SimplicialComplexK::full_simplex(2), 2, square_zero(1, 3), 3);
  const auto& e = *fs.system;
  const auto direct = e.restriction({0, 1, 2}, Simplex{1});
  const auto step = compose(e.restriction({1, 2}, 1), e.restriction({0, 1, 2}, 0));
  for (int k = 0; k <= 3; ++k) EXPECT_EQ(direct.matrix(k), step.matrix(k));
  EXPECT_EQ(e.restriction({0, 1}, Simplex{0, 1}).matrix(0), QMatrix::identity(e.fiber({0, 1})->dim(0)));
}

TEST(LocallyConstant, ConstantAndKilledCocycle) {
  const auto k = SimplicialComplexK::cycle(3);
  EXPECT_TRUE(is_locally_constant(*constant_system(k, square_zero(3, 4)), 3).ok);
  EXPECT_TRUE(is_locally_constant(*forms_system(k, 2, square_zero(2, 4), 4).system, 3).ok);
  // e -> 0 on the way to vertex 0 is a DG morphism that kills the class.
  const auto f = square_zero(1, 3);
  const auto kill = scale_degree(f, 1, 0);
  const auto id = DGMorphism::identity(f);
  const FiniteLocalSystem e(SimplicialComplexK::full_simplex(1), {{{0}, f}, {{1}, f}, {{0, 1}, f}},
                            {{{0, 1}, {id, kill}}});
  EXPECT_TRUE(validate(e).empty());
  const auto r = is_locally_constant(e, 2);
  EXPECT_FALSE(r.ok);
  EXPECT_EQ(r.failing_face->second, Simplex{0});
  EXPECT_EQ(*r.degree, 1);
}

TEST(Extendable, FormsSystemsExtendPlainConstantDoesNot) {
  EXPECT_TRUE(is_extendable(*forms_system(SimplicialComplexK::full_simplex(2), 2, share(point_dga(3)), 3).system).ok);
  EXPECT_TRUE(is_extendable(*forms_system(SimplicialComplexK::full_simplex(2), 2, square_zero(2, 3), 3).system).ok);
  EXPECT_TRUE(is_extendable(*forms_system(SimplicialComplexK::cycle(3), 2, square_zero(1, 3), 3).system).ok);
  // Q on every simplex: the two vertex values of a boundary section can differ.
  const auto r = is_extendable(*constant_system(SimplicialComplexK::full_simplex(1), share(point_dga(2))));
  EXPECT_FALSE(r.ok);
  EXPECT_EQ(*r.witness, (Simplex{0, 1}));
  EXPECT_EQ(*r.degree, 0);
}

TEST(GlobalSections, ConstantOverFullSimplexIsTheFiber) {
  const auto f = square_zero(2, 5);
  const auto g = global_sections(*constant_system(SimplicialComplexK::full_simplex(2), f), 5, true);
  for (int k = 0; k <= 5; ++k) EXPECT_EQ(g.dga->dim(k), f->dim(k));
  EXPECT_TRUE(g.dga->validate().empty());
  const auto fs = forms_system(SimplicialComplexK::full_simplex(2), 2, f, 5);
  const auto gf = global_sections(*fs.system, 5, true);
  EXPECT_EQ(cohomology(*gf.dga, 4).dims(), cohomology(*f, 4).dims());
}

TEST(GlobalSections, TwistedPartVanishes) {
  const auto e = sign_twisted_system(SimplicialComplexK::cycle(3), 2, {0, 1}, 4);
  const auto g = global_sections(*e, 4, true);
  EXPECT_EQ(g.dga->dim(0), 1u);
  EXPECT_EQ(g.dga->dim(2), 0u);
  const auto plain = global_sections(*constant_system(SimplicialComplexK::cycle(3), e->fiber({0})), 4);
  EXPECT_EQ(plain.dga->dim(2), 1u);
}

TEST(GlobalSections, ComponentsRestrictCompatibly) {
  const auto fs = forms_system(SimplicialComplexK::cycle(3), 2, square_zero(1, 3), 3);
  const auto g = global_sections(*fs.system, 3);
  for (int k = 0; k <= 3; ++k) {
    for (std::size_t b = 0; b < g.dga->dim(k); ++b) {
      const auto x = unit_vector(g.dga->dim(k), b);
      for (const auto& s : fs.system->base().simplices(1)) {
        const auto xs = g.component(k, x, s);
        for (std::size_t i = 0; i < 2; ++i) EXPECT_EQ(fs.system->restriction(s, i).apply(k, xs), g.component(k, x, face(s, i)));
      }
    }
  }
}

TEST(GlobalSections, ProductSystemMatchesFormsOnTheProduct) {
  const auto start = std::chrono::steady_clock::now();
  const auto base = SimplicialComplexK::full_simplex(2);
  const auto fiber = SimplicialComplexK::cycle(3);
  const auto e = product_forms_system(base, fiber, 3, 3, false);
  EXPECT_TRUE(validate(*e).empty());
  const auto g = global_sections(*e, 3);
  const auto x = forms_dga(product_complex(base, fiber).complex, 3, 3, false);
  for (int k = 0; k <= 3; ++k) EXPECT_EQ(g.dga->dim(k), x.dga->dim(k)) << "degree " << k;
  EXPECT_EQ(cohomology(*g.dga, 2).dims(), (std::vector<std::size_t>{1, 1, 0}));
  EXPECT_LT(std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count(), 10.0);
}

TEST(Pullback, IdentityAndConstantMaps) {
  const auto k = SimplicialComplexK::cycle(3);
  // The transport must live on the fiber itself.
  EXPECT_THROW(forms_system(k, 1, square_zero(1, 3), 3, {{{0, 2}, scale_degree(square_zero(1, 3), 1, -1)}}), InputError);
  const auto f = square_zero(1, 3);
  const auto fs = forms_system(k, 1, f, 3, {{{0, 2}, scale_degree(f, 1, -1)}});
  const auto same = pullback(fs.system, k, {{0, 0}, {1, 1}, {2, 2}});
  for (const auto& s : k.all_simplices()) {
    EXPECT_EQ(same->fiber(s), fs.system->fiber(s));
    for (std::size_t i = 0; s.size() > 1 && i < s.size(); ++i)
      for (int d = 0; d <= 3; ++d) EXPECT_EQ(same->restriction(s, i).matrix(d), fs.system->restriction(s, i).matrix(d));
  }
  const auto flat = pullback(fs.system, SimplicialComplexK::full_simplex(2), {{0, 1}, {1, 1}, {2, 1}});
  EXPECT_TRUE(validate(*flat).empty());
  for (const auto& s : flat->base().all_simplices()) {
    EXPECT_EQ(flat->fiber(s), fs.system->fiber({1}));
    for (std::size_t i = 0; s.size() > 1 && i < s.size(); ++i)
      EXPECT_EQ(flat->restriction(s, i).matrix(1), QMatrix::identity(flat->fiber(s)->dim(1)));
  }
}

TEST(Pullback, RejectsNonSimplicialMaps) {
  const auto e = sign_twisted_system(SimplicialComplexK::cycle(3), 1, {0, 1}, 2);
  // Order reversing on an edge.
  EXPECT_THROW(pullback(e, SimplicialComplexK::full_simplex(1), {{0, 1}, {1, 0}}), InputError);
  // A triangle onto the hollow triangle.
  EXPECT_THROW(pullback(e, SimplicialComplexK::full_simplex(2), {{0, 0}, {1, 1}, {2, 2}}), InputError);
  EXPECT_THROW(pullback(e, SimplicialComplexK::full_simplex(1), {{0, 0}}), InputError);
}

TEST(Pullback, DoubleCoverSquaresTheHolonomy) {
  const auto e = sign_twisted_system(SimplicialComplexK::cycle(3), 1, {0, 2}, 2);
  const auto c = cohomology_local_system(*e, 1);
  EXPECT_EQ(holonomy(c, {0, 1, 2}, 1), -1);
  EXPECT_EQ(h_local_coefficients(c, 1, 1), (std::vector<std::vector<std::size_t>>{{1, 0}, {1, 0}}));
  const auto up = pullback(e, hexagon(), kDoubleCover);
  EXPECT_TRUE(validate(*up).empty());
  const auto cu = cohomology_local_system(*up, 1);
  EXPECT_EQ(holonomy(cu, {0, 1, 3, 2, 4, 5}, 1), 1);
  EXPECT_EQ(h_local_coefficients(cu, 1, 1), (std::vector<std::vector<std::size_t>>{{1, 1}, {1, 1}}));
}

TEST(FiberProductSystem, IdentityLegsGiveTheDiagonal) {
  const auto k = SimplicialComplexK::cycle(3);
  const auto e = constant_system(k, square_zero(2, 4));
  const auto id = identity_morphism(e);
  const auto p = fiber_product_system(id, id, 3);
  EXPECT_TRUE(validate(*p.system).empty());
  for (const auto& s : k.all_simplices())
    for (int d = 0; d <= 4; ++d) EXPECT_EQ(p.system->fiber(s)->dim(d), e->fiber(s)->dim(d));
  EXPECT_TRUE(p.pr1.validate().empty());
  EXPECT_TRUE(p.pr2.validate().empty());
}

TEST(FiberProductSystem, SuspensionTripleFibers) {
  const auto k = SimplicialComplexK::cycle(3);
  const auto m = square_zero(2, 5);
  const auto t = suspension_triple(m, 1, 5);
  const auto e1 = forms_system(k, 1, t.legs.f.source(), 5);
  const auto e0 = forms_system(k, 1, t.legs.f.target(), 5);
  const auto e2 = forms_system(k, 1, t.legs.g.source(), 5);
  const auto f = forms_morphism(e1, e0, t.legs.f);
  const auto g = forms_morphism(e2, e0, t.legs.g);
  EXPECT_TRUE(f.validate().empty());
  const auto p = fiber_product_system(f, g, 4);
  EXPECT_TRUE(validate(*p.system).empty());
  EXPECT_TRUE(is_locally_constant(*p.system, 4).ok);
  for (const auto& s : k.all_simplices())
    EXPECT_EQ(cohomology(*p.system->fiber(s), 4).dims(), (std::vector<std::size_t>{1, 0, 0, 1, 0})) << format_simplex(s);
  // The other way round the leg is not surjective.
  EXPECT_THROW(fiber_product_system(g, f, 4), PreconditionError);
}

TEST(FiberProductSystem, TwistedFirstLegStaysLocallyConstant) {
  const auto k = SimplicialComplexK::cycle(3);
  const auto fib = square_zero(1, 4);
  const auto pt = share(point_dga(4));
  const auto e1 = forms_system(k, 2, fib, 4, {{{1, 2}, scale_degree(fib, 1, -1)}});
  const auto e0 = forms_system(k, 2, pt, 4);
  const auto f = forms_morphism(e1, e0, augmentation(fib, pt));
  ASSERT_TRUE(f.validate().empty());
  const auto p = fiber_product_system(f, identity_morphism(e0.system), 3);
  EXPECT_TRUE(validate(*p.system).empty());
  EXPECT_TRUE(is_locally_constant(*p.system, 3).ok);
  const auto c = cohomology_local_system(*p.system, 3);
  EXPECT_EQ(holonomy(c, {0, 1, 2}, 1), -1);
  EXPECT_EQ(holonomy(c, {0, 1, 2}, 0), 1);
}

TEST(LocalCoefficients, EdgeMaps) {
  const auto k = SimplicialComplexK::cycle(3);
  const auto c = cohomology_local_system(*forms_system(k, 2, square_zero(2, 4), 4).system, 3);
  for (const auto& [edge, maps] : c.edge_maps)
    for (int q = 0; q <= 3; ++q) EXPECT_EQ(maps[static_cast<std::size_t>(q)], QMatrix::identity(c.dims.at(edge.first)[static_cast<std::size_t>(q)]));
  const auto t = cohomology_local_system(*sign_twisted_system(k, 2, {1, 2}, 3), 2);
  EXPECT_EQ(t.edge_maps.at({1, 2})[2], QMatrix::from_rows({{-1}}, 1));
  EXPECT_EQ(t.edge_maps.at({0, 1})[2], QMatrix::from_rows({{1}}, 1));
  EXPECT_EQ(t.edge_maps.at({1, 2})[0], QMatrix::from_rows({{1}}, 1));
}

TEST(LocalCoefficients, NeedsLocalConstancy) {
  const auto f = square_zero(1, 3);
  const auto id = DGMorphism::identity(f);
  const FiniteLocalSystem e(SimplicialComplexK::full_simplex(1), {{{0}, f}, {{1}, f}, {{0, 1}, f}},
                            {{{0, 1}, {scale_degree(f, 1, 0), id}}});
  EXPECT_THROW(cohomology_local_system(e, 2), PreconditionError);
}

TEST(LocalCoefficients, CircleAndSphere) {
  const auto circle = SimplicialComplexK::cycle(3);
  const auto triv = cohomology_local_system(*constant_system(circle, square_zero(1, 2)), 1);
  EXPECT_EQ(h_local_coefficients(triv, 1, 1), (std::vector<std::vector<std::size_t>>{{1, 1}, {1, 1}}));
  const auto tw = cohomology_local_system(*sign_twisted_system(circle, 1, {0, 1}, 2), 1);
  EXPECT_EQ(h_local_coefficients(tw, 2, 1), (std::vector<std::vector<std::size_t>>{{1, 0}, {1, 0}, {0, 0}}));
  const auto sphere = cohomology_local_system(*constant_system(SimplicialComplexK::boundary_of_simplex(3), share(point_dga(1))), 0);
  EXPECT_EQ(h_local_coefficients(sphere, 2, 0), (std::vector<std::vector<std::size_t>>{{1}, {0}, {1}}));
  // Independent count on trivial coefficients.
  for (const auto& k : {circle, SimplicialComplexK::boundary_of_simplex(3), SimplicialComplexK::full_simplex(3)}) {
    std::vector<std::size_t> dims;
    std::vector<QMatrix> d;
    for (int p = 0; p <= k.dim(); ++p) dims.push_back(k.simplices(p).size());
    for (int p = 0; p < k.dim(); ++p) {
      QMatrix m(dims[static_cast<std::size_t>(p) + 1], dims[static_cast<std::size_t>(p)]);
      for (const auto& s : k.simplices(p + 1))
        for (std::size_t i = 0; i < s.size(); ++i) m.add(k.index(s), k.index(face(s, i)), i % 2 ? -1 : 1);
      d.push_back(m);
    }
    d.push_back(QMatrix(0, dims.back()));
    dims.push_back(0);
    const auto expected = oracle::complex_dims(dims, d);
    const auto c = cohomology_local_system(*constant_system(k, share(point_dga(1))), 0);
    const auto h = h_local_coefficients(c, k.dim(), 0);
    for (int p = 0; p <= k.dim(); ++p) EXPECT_EQ(h[static_cast<std::size_t>(p)][0], expected[static_cast<std::size_t>(p)]);
  }
}

TEST(LocalCoefficients, CocycleFailureIsAnInputError) {
  LocalCoefficients c;
  c.base = SimplicialComplexK::full_simplex(2);
  c.upto = 0;
  for (int v = 0; v < 3; ++v) c.dims[v] = {1};
  const auto one = QMatrix::from_rows({{1}}, 1);
  c.edge_maps[{0, 1}] = {one};
  c.edge_maps[{1, 2}] = {one};
  c.edge_maps[{0, 2}] = {Rational(-1) * one};
  EXPECT_FALSE(c.check_cocycle().empty());
  EXPECT_THROW(h_local_coefficients(c, 1, 0), InputError);
}

TEST(LocalCoefficients, SubdivisionAndRelabelingInvariance) {
  // Twisted Q^q over m-gons: the answer depends only on the holonomy.
  for (int m = 3; m <= 7; ++m) {
    const auto k = SimplicialComplexK::cycle(m);
    for (const auto& edge : k.simplices(1)) {
      const auto c = cohomology_local_system(*sign_twisted_system(k, 1, edge, 2), 1);
      EXPECT_EQ(h_local_coefficients(c, 1, 1), (std::vector<std::vector<std::size_t>>{{1, 0}, {1, 0}}));
    }
  }
}

TEST(Cylinder, EndEvaluationsRetract) {
  const auto fs = forms_system(SimplicialComplexK::cycle(3), 1, square_zero(1, 3), 3);
  const auto cyl = cylinder(fs.system, 2);
  EXPECT_TRUE(validate(*cyl.system).empty());
  for (const auto* m : {&cyl.inclusion, &cyl.epsilon0, &cyl.epsilon1}) EXPECT_TRUE(m->validate().empty());
  for (const auto* eps : {&cyl.epsilon0, &cyl.epsilon1}) {
    const auto r = compose(*eps, cyl.inclusion);
    for (const auto& [s, map] : r.maps)
      for (int k = 0; k <= 3; ++k) EXPECT_EQ(map.matrix(k), QMatrix::identity(fs.system->fiber(s)->dim(k)));
  }
  EXPECT_TRUE(is_locally_constant(*cyl.system, 2).ok);
}

TEST(CheckAAlgebra, UnitMapsAndMisfits) {
  const auto k = SimplicialComplexK::cycle(3);
  const auto pt = share(point_dga(3));
  const auto fs = forms_system(k, 1, square_zero(1, 3), 3);
  std::map<Simplex, DGMorphism> units;
  for (const auto& s : k.all_simplices()) {
    const auto& f = fs.system->fiber(s);
    units.emplace(s, DGMorphism::augmentation_like(pt, f, QMatrix::from_columns({f->unit()}, f->dim(0))));
  }
  EXPECT_TRUE(check_a_algebra(*fs.system, units).empty());
  units.erase(Simplex{0});
  EXPECT_FALSE(check_a_algebra(*fs.system, units).empty());
}

TEST(LocalSystemProperties, PullbackCommutesWithFiberProducts) {
  const auto k = SimplicialComplexK::cycle(3);
  const auto fib = square_zero(1, 3);
  const auto pt = share(point_dga(3));
  const auto e1 = forms_system(k, 1, fib, 3, {{{0, 2}, scale_degree(fib, 1, -1)}});
  const auto e0 = forms_system(k, 1, pt, 3);
  const auto f = forms_morphism(e1, e0, augmentation(fib, pt));
  const auto g = identity_morphism(e0.system);
  const auto p = fiber_product_system(f, g, 2);

  std::mt19937_64 rng(404);
  for (int t = 0; t < 100; ++t) {
    // A monotone vertex map from a random subcomplex of Δ[n] onto vertices of K.
    const int n = 2 + static_cast<int>(rng() % 4);
    std::vector<int> values;
    for (int v = 0; v <= n; ++v) values.push_back(static_cast<int>(rng() % 3));
    std::sort(values.begin(), values.end());
    std::map<int, int> u;
    for (int v = 0; v <= n; ++v) u[v] = values[static_cast<std::size_t>(v)];
    std::vector<Simplex> gens;
    for (const auto& s : SimplicialComplexK::full_simplex(n).all_simplices()) {
      if (s.size() > 3) continue;
      Simplex img;
      for (int v : s)
        if (img.empty() || img.back() != u[v]) img.push_back(u[v]);
      if (k.contains(img) && (s.size() == 1 || rng() % 3 != 0)) gens.push_back(s);
    }
    const SimplicialComplexK l(gens);
    const auto pl = pullback(p.system, l, u);
    ASSERT_TRUE(validate(*pl).empty()) << "case " << t;
    EXPECT_TRUE(is_locally_constant(*pl, 1).ok) << "case " << t;

    const auto e1u = pullback(e1.system, l, u);
    const auto e0u = pullback(e0.system, l, u);
    const auto fu = pullback(f, e1u, e0u, u);
    const auto gu = pullback(g, e0u, e0u, u);
    ASSERT_TRUE(fu.validate().empty()) << "case " << t;
    const auto q = fiber_product_system(fu, gu, 2);
    for (const auto& s : l.all_simplices()) {
      for (int d = 0; d <= 3; ++d) ASSERT_EQ(q.system->fiber(s)->dim(d), pl->fiber(s)->dim(d)) << "case " << t;
      for (std::size_t i = 0; s.size() > 1 && i < s.size(); ++i)
        for (int d = 0; d <= 3; ++d)
          EXPECT_EQ(q.system->restriction(s, i).matrix(d), pl->restriction(s, i).matrix(d)) << "case " << t;
    }
  }
}

TEST(LocalSystemProperties, PullbackPreservesValidationAndExtendability) {
  const auto k = SimplicialComplexK::full_simplex(2);
  const auto fs = forms_system(k, 2, square_zero(2, 3), 3);
  ASSERT_TRUE(is_extendable(*fs.system).ok);
  std::mt19937_64 rng(99);
  for (int t = 0; t < 100; ++t) {
    const int n = 1 + static_cast<int>(rng() % 3);
    std::vector<int> values;
    for (int v = 0; v <= n; ++v) values.push_back(static_cast<int>(rng() % 3));
    std::sort(values.begin(), values.end());
    std::map<int, int> u;
    for (int v = 0; v <= n; ++v) u[v] = values[static_cast<std::size_t>(v)];
    const auto l = SimplicialComplexK::full_simplex(std::min(n, 2));
    const auto e = pullback(fs.system, l, u);
    EXPECT_TRUE(validate(*e).empty()) << "case " << t;
    EXPECT_TRUE(is_locally_constant(*e, 2).ok) << "case " << t;
    // Collapsed simplices carry the fiber of their image, so only injective
    // maps keep extendability.
    const bool injective = std::adjacent_find(values.begin(), values.begin() + std::min(n, 2) + 1) ==
                           values.begin() + std::min(n, 2) + 1;
    EXPECT_EQ(is_extendable(*e).ok, injective) << "case " << t;
  }
}
