#include <gtest/gtest.h>

#include <map>
#include <random>

#include "cdgakit/polyforms.hpp"
#include "oracles.hpp"

using namespace cdgakit;

namespace {

PolyForm t(int n, int i) { return PolyForm::coordinate(n, i); }
PolyForm dt(int n, int i) { return PolyForm::differential(n, i); }

PolyForm random_form(std::mt19937_64& rng, int n, int k, int max_poly_degree) {
  std::uniform_int_distribution<int> coef(-3, 3), keep(0, 2);
  PolyForm f(n);
  for (const auto& key : form_basis(n, k, max_poly_degree + k).keys)
    if (keep(rng) == 0) f.add_term(key, coef(rng));
  return f;
}

// Iterated-integral oracle over {t_i >= 0, Σ t_i <= 1}.
using Poly = std::map<std::vector<int>, Rational>;

Poly poly_mul(const Poly& a, const Poly& b) {
  Poly out;
  for (const auto& [ea, ca] : a)
    for (const auto& [eb, cb] : b) {
      auto e = ea;
      for (std::size_t i = 0; i < e.size(); ++i) e[i] += eb[i];
      out[e] += ca * cb;
    }
  return out;
}

Rational iterated_integral(Poly p, int n) {
  // Integrate out t_n, t_{n-1}, ..., t_1 in turn.
  for (int v = n; v >= 1; --v) {
    const auto vi = static_cast<std::size_t>(v - 1);
    // upper limit u = 1 - t_1 - ... - t_{v-1}
    Poly u;
    std::vector<int> zero(static_cast<std::size_t>(n), 0);
    u[zero] = 1;
    for (int j = 1; j < v; ++j) {
      auto e = zero;
      e[static_cast<std::size_t>(j - 1)] = 1;
      u[e] = -1;
    }
    Poly next;
    for (const auto& [e, c] : p) {
      const int a = e[vi];
      auto rest = e;
      rest[vi] = 0;
      Poly term{{rest, c / Rational(a + 1)}};
      for (int k = 0; k < a + 1; ++k) term = poly_mul(term, u);
      for (const auto& [e2, c2] : term) next[e2] += c2;
    }
    p = next;
  }
  Rational total = 0;
  for (const auto& [e, c] : p) total += c;
  return total;
}

Rational oracle_integrate(const PolyForm& w) {
  Poly p;
  for (const auto& [key, c] : w.terms()) p[key.exponents] += c;
  return iterated_integral(p, w.dim());
}

}  // namespace

TEST(PolyForm, DifferentialExamples) {
  EXPECT_EQ(d(t(1, 1)), dt(1, 1));
  EXPECT_EQ(d(wedge(t(2, 1), t(2, 2))), wedge(t(2, 2), dt(2, 1)) + wedge(t(2, 1), dt(2, 2)));
  const auto w = PolyForm::term(2, {2, 0}, 0b10);  // t1^2 dt2
  EXPECT_EQ(d(w), PolyForm::term(2, {1, 0}, 0b11, 2));
}

TEST(PolyForm, DSquaredAndLeibniz) {
  std::mt19937_64 rng(1);
  for (int s = 0; s < 100; ++s) {
    const int n = 1 + s % 3;
    const int p = static_cast<int>(rng() % static_cast<unsigned>(n + 1));
    const auto a = random_form(rng, n, p, 3);
    const auto b = random_form(rng, n, static_cast<int>(rng() % static_cast<unsigned>(n + 1)), 3);
    EXPECT_TRUE(d(d(a)).is_zero());
    EXPECT_EQ(d(wedge(a, b)), wedge(d(a), b) + Rational(p % 2 == 0 ? 1 : -1) * wedge(a, d(b)));
  }
}

TEST(PolyForm, FaceRestrictionExamples) {
  EXPECT_TRUE(restrict_to_face(dt(1, 1), {0}).is_zero());
  EXPECT_EQ(restrict_to_face(t(1, 1), {1}), PolyForm::constant(0, 1));
  EXPECT_EQ(restrict_to_face(t(1, 1), {0}), PolyForm(0));
  // Face 0 of Δ[2] is the edge [1,2]; t1 restricts to s0 = 1 - s1.
  EXPECT_EQ(face_restrict(t(2, 1), 0), t(1, 0));
}

TEST(PolyForm, SimplicialIdentities) {
  std::mt19937_64 rng(2);
  for (int s = 0; s < 100; ++s) {
    const int k = static_cast<int>(rng() % 3);
    const auto w = random_form(rng, 3, k, 3);
    for (int j = 1; j <= 3; ++j)
      for (int i = 0; i < j; ++i)
        EXPECT_EQ(face_restrict(face_restrict(w, j), i), face_restrict(face_restrict(w, i), j - 1));
  }
}

TEST(PolyForm, RestrictionIsMultiplicativeAndCommutesWithD) {
  std::mt19937_64 rng(3);
  for (int s = 0; s < 100; ++s) {
    const auto a = random_form(rng, 3, static_cast<int>(rng() % 2), 2);
    const auto b = random_form(rng, 3, static_cast<int>(rng() % 2), 2);
    const std::vector<std::size_t> pos{0, 2, 3};
    EXPECT_EQ(restrict_to_face(wedge(a, b), pos), wedge(restrict_to_face(a, pos), restrict_to_face(b, pos)));
    EXPECT_EQ(restrict_to_face(d(a), pos), d(restrict_to_face(a, pos)));
  }
}

TEST(Integrate, Examples) {
  EXPECT_EQ(integrate(dt(1, 1)), 1);
  EXPECT_EQ(integrate(wedge(t(1, 1), dt(1, 1))), ratio(1, 2));
  const auto w = PolyForm::term(2, {1, 1}, 0b11);
  EXPECT_EQ(integrate(w), ratio(1, 24));
  EXPECT_EQ(oracle_integrate(w), ratio(1, 24));
  EXPECT_THROW(integrate(t(1, 1)), InputError);
}

TEST(Integrate, MatchesIteratedIntegralOracle) {
  std::mt19937_64 rng(4);
  for (int s = 0; s < 100; ++s) {
    const int n = 1 + s % 3;
    const auto w = random_form(rng, n, n, 4);
    EXPECT_EQ(integrate(w), oracle_integrate(w));
  }
}

TEST(Integrate, Stokes) {
  std::mt19937_64 rng(5);
  for (int s = 0; s < 120; ++s) {
    const int n = 1 + s % 3;
    const auto w = random_form(rng, n, n - 1, 4);
    Rational boundary = 0;
    for (int i = 0; i <= n; ++i) {
      const Rational v = integrate(face_restrict(w, i));
      boundary += i % 2 == 0 ? v : Rational(-v);
    }
    EXPECT_EQ(integrate(d(w)), boundary);
  }
}

TEST(Contraction, Examples) {
  EXPECT_EQ(contraction(dt(1, 1)), t(1, 1));
  EXPECT_TRUE(contraction(PolyForm::constant(2, 1)).is_zero());
  const auto w = dt(1, 1);
  EXPECT_EQ(d(contraction(w)) + contraction(d(w)), w);
}

TEST(Contraction, HomotopyIdentity) {
  std::mt19937_64 rng(6);
  for (int s = 0; s < 120; ++s) {
    const int n = 1 + s % 3;
    const int k = static_cast<int>(rng() % static_cast<unsigned>(n + 1));
    const auto w = random_form(rng, n, k, 4);
    const auto eps = k == 0 ? evaluate_at_vertex0(w) : PolyForm(n);
    EXPECT_EQ(d(contraction(w)) + contraction(d(w)), w - eps);
    if (k >= 1) {
      const auto closed = d(random_form(rng, n, k - 1, 4));
      EXPECT_EQ(d(contraction(closed)), closed);
    }
  }
}

TEST(Extend, ConstantOne) {
  const auto K = SimplicialComplexK::full_simplex(2);
  const auto L = K.subcomplex({{0, 1}});
  SimplicialForm one{L, {{{0}, PolyForm::constant(0, 1)}, {{1}, PolyForm::constant(0, 1)},
                         {{0, 1}, PolyForm::constant(1, 1)}}};
  const auto e = extend(one, K);
  for (const auto& s : K.all_simplices())
    EXPECT_EQ(e.on(s), PolyForm::constant(static_cast<int>(s.size()) - 1, 1)) << format_simplex(s);
}

TEST(Extend, EndpointValues) {
  const auto K = SimplicialComplexK::full_simplex(1);
  const auto L = SimplicialComplexK::boundary_of_simplex(1);
  SimplicialForm f{L, {{{1}, PolyForm::constant(0, 1)}}};
  const auto e = extend(f, K);
  EXPECT_EQ(e.restricted_to(L).forms, f.forms);
  EXPECT_TRUE(e.clashes().empty());
  EXPECT_EQ(e.on({0, 1}), t(1, 1));
}

TEST(Extend, OneFormOnTriangleBoundary) {
  const auto K = SimplicialComplexK::full_simplex(2);
  const auto L = SimplicialComplexK::boundary_of_simplex(2);
  SimplicialForm f{L, {{{0, 1}, wedge(t(1, 1), dt(1, 1))}, {{1, 2}, dt(1, 1)}, {{0, 2}, PolyForm::term(1, {2}, 1, 3)}}};
  const auto e = extend(f, K);
  EXPECT_EQ(e.restricted_to(L).forms, f.forms);
  EXPECT_TRUE(e.clashes().empty());
}

TEST(Extend, RejectsIncompatibleFamilies) {
  const auto K = SimplicialComplexK::full_simplex(1);
  SimplicialForm f{K.subcomplex({{0, 1}}), {{{0, 1}, t(1, 1)}}};  // vertex 1 should be 1
  EXPECT_THROW(extend(f, K), InputError);
}

TEST(Extend, RandomFamiliesOnSubcomplexes) {
  std::mt19937_64 rng(8);
  const auto K = SimplicialComplexK::full_simplex(3);
  const std::vector<SimplicialComplexK> subs{SimplicialComplexK::boundary_of_simplex(3),
                                             K.subcomplex({{0, 1, 2}, {2, 3}}), K.subcomplex({{1, 3}})};
  for (const auto& L : subs) {
    const auto fl = forms_dga(L, 3, 2, false);
    for (int s = 0; s < 10; ++s) {
      const int k = s % 3;
      std::uniform_int_distribution<int> c(-2, 2);
      QVector coords(fl.carriers[static_cast<std::size_t>(k)].dim());
      for (auto& x : coords) x = c(rng);
      const auto fam = fl.form(k, coords);
      const auto e = extend(fam, K);
      EXPECT_TRUE(e.clashes().empty());
      EXPECT_EQ(e.restricted_to(L).forms, fam.forms);
    }
  }
}

TEST(IntegrationCochain, Examples) {
  const auto K = SimplicialComplexK::full_simplex(1);
  SimplicialForm one{K, {{{0}, PolyForm::constant(0, 1)}, {{1}, PolyForm::constant(0, 1)},
                         {{0, 1}, PolyForm::constant(1, 1)}}};
  for (const auto& [s, v] : integration_cochain(one, 0)) EXPECT_EQ(v, 1);
  SimplicialForm w{K, {{{0, 1}, dt(1, 1)}}};
  EXPECT_EQ(integration_cochain(w, 1).at({0, 1}), 1);
}

TEST(IntegrationCochain, StokesInFamilyForm) {
  std::mt19937_64 rng(9);
  const auto K = SimplicialComplexK::boundary_of_simplex(3);
  const auto fd = forms_dga(K, 3, 2, false);
  for (int s = 0; s < 100; ++s) {
    const int k = s % 2;
    std::uniform_int_distribution<int> c(-3, 3);
    QVector coords(fd.carriers[static_cast<std::size_t>(k)].dim());
    for (auto& x : coords) x = c(rng);
    const auto w = fd.form(k, coords);
    SimplicialForm dw{K, {}};
    for (const auto& [sim, f] : w.forms) dw.forms[sim] = d(f);
    EXPECT_EQ(integration_cochain(dw, k + 1), coboundary(K, integration_cochain(w, k), k + 1));
  }
}

TEST(FormsDGA, SingleSimplexMatchesSimplexForms) {
  const auto fd = forms_dga(SimplicialComplexK::full_simplex(2), 2, 3);
  const auto direct = simplex_forms_dga(2, 2, 3);
  for (int k = 0; k <= 3; ++k) EXPECT_EQ(fd.dga->dim(k), direct.dim(k));
  EXPECT_TRUE(fd.dga->validate().empty());
  EXPECT_EQ(cohomology(*fd.dga, 2).dims(), (std::vector<std::size_t>{1, 0, 0}));
}

TEST(FormsDGA, CircleHasCircleCohomology) {
  const auto fd = forms_dga(SimplicialComplexK::cycle(3), 2, 2);
  EXPECT_TRUE(fd.dga->validate().empty());
  EXPECT_TRUE(fd.dga->check_associativity(500).empty());
  EXPECT_EQ(cohomology(*fd.dga, 1).dims(), (std::vector<std::size_t>{1, 1}));
  EXPECT_EQ(oracle::cohomology_dims(*fd.dga, 1), (std::vector<std::size_t>{1, 1}));
}

TEST(FormsDGA, SphereCohomologyAndRestriction) {
  const auto big = forms_dga(SimplicialComplexK::boundary_of_simplex(3), 2, 3, false);
  EXPECT_EQ(cohomology(*big.dga, 2).dims(), (std::vector<std::size_t>{1, 0, 1}));
  const auto small = forms_dga(big.complex.subcomplex({{0, 1, 2}}), 2, 3, false);
  const auto r = forms_restriction(big, small);
  EXPECT_TRUE(r.validate().empty());
}

TEST(Admissible, AllAxiomsPassUpToDimensionTwo) {
  const auto rep = check_admissible_axioms(2, 20);
  EXPECT_TRUE(rep.all_passed()) << rep.format();
  EXPECT_GE(rep.axioms[4].cases, 20u);
}

TEST(Admissible, ZeroDivisorConditionForT1) {
  // t1 dt... : no polynomial w with dt1 = t1 w.
  const auto& wb = form_basis(1, 0, 3);
  const auto& rb = form_basis(1, 0, 4);
  QMatrix sys(rb.size(), wb.size());
  for (std::size_t c = 0; c < wb.size(); ++c) {
    const auto prod = wedge(t(1, 1), PolyForm::term(1, wb.keys[c].exponents, 0));
    for (const auto& [key, v] : prod.terms()) sys.set(rb.index.at(key), c, v);
  }
  EXPECT_FALSE(solve(sys, rb.coordinates(PolyForm::constant(1, 1))).has_value());
}
