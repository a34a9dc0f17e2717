// Acceptance run: one PASS/FAIL line per criterion, each with its time bound.
// With a criterion number as the only argument, runs just that one.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cdgakit/errors.hpp"
#include "cdgakit/gluing.hpp"
#include "cdgakit/polyforms.hpp"
#include "cdgakit/specseq.hpp"
#include "cdgakit/sullivan.hpp"
#include "oracles.hpp"

using namespace cdgakit;

namespace {

struct Failures {
  std::vector<std::string> items;
  void expect(bool ok, const std::string& what) {
    if (!ok) items.push_back(what);
  }
};

DGAPtr share(TruncatedDGA a) { return std::make_shared<const TruncatedDGA>(std::move(a)); }

DGAPtr truncated_polynomial(int n, int cutoff) {
  const auto f = FreeCDGA::from_strings({{"x", 2}}, {});
  Monomial m = f.algebra().unit_monomial();
  m.exponents[0] = n + 1;
  return share(monomial_quotient(f, {m}, cutoff));
}

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

std::string dims_text(const std::vector<std::size_t>& d) {
  std::string s;
  for (std::size_t i = 0; i < d.size(); ++i) s += (i ? "," : "") + std::to_string(d[i]);
  return "(" + s + ")";
}

Element random_homogeneous(std::mt19937_64& rng, const FreeGCA& alg, int degree) {
  std::uniform_int_distribution<int> coef(-3, 3);
  Element e;
  for (const auto& m : alg.basis_in_degree(degree)) e.add_term(m, coef(rng));
  return e;
}

QMatrix random_matrix(std::mt19937_64& rng, std::size_t r, std::size_t c, int density = 2) {
  std::uniform_int_distribution<int> num(-4, 4), den(1, 3), keep(0, density);
  QMatrix m(r, c);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j)
      if (keep(rng) != 0) m.set(i, j, ratio(num(rng), den(rng)));
  return m;
}

PolyForm random_form(std::mt19937_64& rng, int n, int k, int max_poly_degree) {
  std::uniform_int_distribution<int> coef(-3, 3), keep(0, 2);
  PolyForm f(n);
  for (const auto& key : form_basis(n, k, max_poly_degree + k).keys)
    if (keep(rng) == 0) f.add_term(key, coef(rng));
  return f;
}

// ---- Criteria -----------------------------------------------------------

void torus_cohomology(Failures& f) {
  const auto t = truncate(FreeCDGA::from_strings({{"t1", 1}, {"t2", 1}}, {}), 3);
  const auto h = cohomology(t, 2);
  f.expect(h.dims() == std::vector<std::size_t>{1, 2, 1}, "torus dims " + dims_text(h.dims()));
  const auto& alg = FreeGCA({{"t1", 1}, {"t2", 1}});
  QVector t1(t.dim(1)), t2(t.dim(1));
  const auto b1 = alg.basis_in_degree(1);
  for (std::size_t i = 0; i < b1.size(); ++i) (alg.format(b1[i]) == "t1" ? t1 : t2)[i] = 1;
  const auto prod = t.multiply(1, t1, 1, t2);
  f.expect(!is_zero(h.class_of(2, prod)), "[t1][t2] = 0");
}

void cp_minimal_models(Failures& f) {
  for (int n = 1; n <= 3; ++n) {
    const auto r = minimal_model(truncated_polynomial(n, 2 * n + 3), 2 * n + 2);
    const auto& alg = r.model.algebra();
    const std::string tag = "CP^" + std::to_string(n) + ": ";
    if (alg.size() != 2) {
      f.expect(false, tag + std::to_string(alg.size()) + " generators");
      continue;
    }
    f.expect(alg.generator(0).degree == 2 && alg.generator(1).degree == 2 * n + 1, tag + "generator degrees");
    f.expect(r.model.d_of_generator(0).is_zero(), tag + "dx != 0");
    f.expect(r.model.d_of_generator(1) == alg.power(alg.gen(0), n + 1), tag + "dy != x^" + std::to_string(n + 1));
    f.expect(is_quasi_iso(r.comparison, 2 * n + 1).ok, tag + "comparison is not a quasi-isomorphism");
  }
}

void cp_loop_models(Failures& f) {
  for (int n = 1; n <= 2; ++n) {
    const auto base = FreeCDGA::from_strings({{"x", 2}, {"y", 2 * n + 1}}, {{"y", "x^" + std::to_string(n + 1)}});
    const auto loop = loop_model(base);
    const auto& alg = loop.algebra();
    const std::string tag = "n=" + std::to_string(n) + ": ";
    if (alg.size() != 4) {
      f.expect(false, tag + "expected four generators");
      continue;
    }
    f.expect(alg.generator(alg.index_of("x")).degree == 2 && alg.generator(alg.index_of("y")).degree == 2 * n + 1 &&
                 alg.generator(alg.index_of("xbar")).degree == 1 && alg.generator(alg.index_of("ybar")).degree == 2 * n,
             tag + "degrees");
    f.expect(loop.d(alg.gen("y")) == alg.power(alg.gen("x"), n + 1), tag + "dy");
    f.expect(loop.d(alg.gen("x")).is_zero() && loop.d(alg.gen("xbar")).is_zero(), tag + "dx or dxbar nonzero");
    const Element expected = Rational(n + 1) * alg.multiply(alg.power(alg.gen("x"), n), alg.gen("xbar"));
    f.expect(loop.d(alg.gen("ybar")) == expected, tag + "dybar = " + alg.format(loop.d(alg.gen("ybar"))));
  }
  const auto loop = loop_model(FreeCDGA::from_strings({{"x", 2}, {"y", 3}}, {{"y", "x^2"}}));
  const auto h = cohomology(truncate(loop, 5), 4).dims();
  f.expect(h == std::vector<std::size_t>{1, 1, 1, 1, 1}, "CP^1 loop dims " + dims_text(h));
  // Brute force on x(2), y(3), xbar(1), ybar(2) with dy = x^2, dybar = 2 x xbar.
  oracle::BruteForceFree bf({2, 3, 1, 2}, {{}, {{{0, 0}, 1}}, {}, {{{0, 2}, 2}}});
  f.expect(bf.cohomology_dims(4) == h, "brute force disagrees: " + dims_text(bf.cohomology_dims(4)));
}

void suspensions(Failures& f) {
  const std::vector<std::pair<std::string, DGAPtr>> cases{
      {"S^2", truncated_polynomial(1, 7)},
      {"T^2", share(truncate(FreeCDGA::from_strings({{"t1", 1}, {"t2", 1}}, {}), 7))},
      {"CP^2", truncated_polynomial(2, 7)},
  };
  for (const auto& [name, m] : cases) {
    const auto s = suspension_model(m, 6);
    const auto h = cohomology(*s.carrier, 6);
    const auto hm = cohomology(*m, 5);
    for (int k = 0; k <= 5; ++k) {
      const std::size_t reduced = hm.dim(k) - (k == 0 ? 1 : 0);
      f.expect(h.dim(k + 1) == reduced, name + ": H^" + std::to_string(k + 1) + " of the suspension");
    }
    for (int i = 1; i <= 6; ++i)
      for (int j = 1; i + j <= 6; ++j)
        for (std::size_t a = 0; a < h.dim(i); ++a)
          for (std::size_t b = 0; b < h.dim(j); ++b) {
            const auto p = h.product(i, a, j, b);
            f.expect(p && is_zero(*p), name + ": nonzero product in degrees " + std::to_string(i) + "+" + std::to_string(j));
          }
  }
}

void suspension_fiber_product(Failures& f) {
  const auto m = truncated_polynomial(1, 7);
  const auto s = suspension_model(m, 6);
  const auto t = suspension_triple(m, 2, 7);
  const auto fp = fiber_product(t.legs.f, t.legs.g, 6);
  const auto xi = suspension_inclusion(s, t, fp);
  f.expect(xi.validate().empty(), "inclusion is not a DG morphism");
  const auto r = theta_equivalence_check(fp, xi, 6);
  f.expect(r.ok, "not a quasi-isomorphism in degree " + std::to_string(r.first_failing_degree.value_or(-1)));
}

void mayer_vietoris_exactness(Failures& f) {
  const auto legs = circle_from_interval(1, 4);
  const auto circle = mayer_vietoris(fiber_product(legs.f, legs.g, 3), 3);
  f.expect(circle.exact(), "circle: " + (circle.failures.empty() ? std::string() : circle.failures.front()));
  f.expect(!circle.connecting_ranks.empty() && circle.connecting_ranks[0] == 1, "circle: connecting rank is not 1");
  const auto t = suspension_triple(truncated_polynomial(1, 7), 2, 7);
  const auto susp = mayer_vietoris(fiber_product(t.legs.f, t.legs.g, 6), 6);
  f.expect(susp.exact(), "suspension: " + (susp.failures.empty() ? std::string() : susp.failures.front()));
}

void admissibility(Failures& f) {
  const auto rep = check_admissible_axioms(3, 20, 1);
  static const char* names[5] = {"(i)", "(ii)", "(iii)", "(iv)", "(v)"};
  for (std::size_t i = 0; i < 5; ++i) f.expect(rep.axioms[i].passed, std::string("axiom ") + names[i]);
  f.expect(rep.axioms[4].cases >= 20, "axiom (v) sampled only " + std::to_string(rep.axioms[4].cases) + " maps");
  std::mt19937_64 rng(5);
  int stokes = 0;
  for (int s = 0; s < 120; ++s) {
    const int n = 1 + s % 3;
    const auto w = random_form(rng, n, n - 1, 4);
    Rational boundary = 0;
    for (int i = 0; i <= n; ++i) {
      const Rational v = integrate(face_restrict(w, i));
      boundary += i % 2 == 0 ? v : Rational(-v);
    }
    if (integrate(d(w)) == boundary) ++stokes;
  }
  f.expect(stokes == 120, "Stokes held on " + std::to_string(stokes) + "/120 forms");
}

void gamma_forms(Failures& f) {
  const auto base = SimplicialComplexK::full_simplex(2);
  const auto fiber = SimplicialComplexK::cycle(3);
  const auto e = product_forms_system(base, fiber, 3, 3, false);
  const auto g = global_sections(*e, 3);
  const auto x = forms_dga(product_complex(base, fiber).complex, 3, 3, false);
  for (int k = 0; k <= 3; ++k) {
    f.expect(g.dga->dim(k) == x.dga->dim(k), "degree " + std::to_string(k) + ": " + std::to_string(g.dga->dim(k)) +
                                                 " vs " + std::to_string(x.dga->dim(k)));
  }
}

void e2_theorem(Failures& f) {
  const auto c3 = SimplicialComplexK::cycle(3);
  auto check = [&](const std::string& name, const FiniteLocalSystem& e) {
    const auto rep = e2_check(e, 2, 4);
    if (!rep.ok()) {
      f.expect(false, name + ": E2 mismatch at (" + std::to_string(rep.first_mismatch->first) + "," +
                          std::to_string(rep.first_mismatch->second) + ")");
    }
    const auto inf = einfty_vs_target(e, e.cutoff() - 1);
    f.expect(inf.ok(), name + ": " + (inf.failures.empty() ? std::string() : inf.failures.front()));
  };
  check("constant", *forms_system(c3, 1, square_zero(2, 7), 7).system);

  const auto q = square_zero(2, 7);
  const auto twisted = forms_system(c3, 1, q, 7, {{{0, 1}, scale_degree(q, 2, -1)}});
  for (const auto& c : e2_check(*twisted.system, 2, 4).entries)
    if (c.q == 2) f.expect(c.spectral == 0 && c.expected == 0, "twisted: nonzero entry at q = 2");
  check("sign-twisted", *twisted.system);

  const auto k = SimplicialComplexK::boundary_of_simplex(3);
  const auto m = truncated_polynomial(1, 8);
  const auto t = suspension_triple(m, 2, 8);
  const auto e1 = forms_system(k, 2, t.legs.f.source(), 8);
  const auto e0 = forms_system(k, 2, t.legs.f.target(), 8);
  const auto e2 = forms_system(k, 2, t.legs.g.source(), 8);
  const auto p = fiber_product_system(forms_morphism(e1, e0, t.legs.f), forms_morphism(e2, e0, t.legs.g), 7);
  check("suspension triple", *p.system);
}

void naturality(Failures& f) {
  const auto k = SimplicialComplexK::cycle(3);
  const int cutoff = 8, weight = 1;
  const auto m = truncated_polynomial(1, cutoff);
  const auto t = suspension_triple(m, weight, cutoff);
  const auto e1 = forms_system(k, weight, t.legs.f.source(), cutoff);
  const auto e0 = forms_system(k, weight, t.legs.f.target(), cutoff);
  const auto e2 = forms_system(k, weight, t.legs.g.source(), cutoff);
  const auto src = fiber_product_system(forms_morphism(e1, e0, t.legs.f), forms_morphism(e2, e0, t.legs.g), cutoff - 1);

  // Replace Q x Q by ∧(w0) x ∧(w1), |w| = 5, with w0 -> -w0 along [0,1].
  const auto w = truncate(FreeCDGA::from_strings({{"w", 5}}, {}), cutoff);
  const auto bs = share(direct_product(w, w));
  const auto two = t.legs.g.source();
  std::vector<QMatrix> twist, kill, units;
  for (int d = 0; d <= cutoff; ++d) {
    QMatrix tw = QMatrix::identity(bs->dim(d));
    if (d == 5) tw.set(0, 0, -1);
    twist.push_back(tw);
    kill.push_back(d == 0 ? QMatrix::identity(2) : QMatrix(two->dim(d), bs->dim(d)));
    units.push_back(d == 0 ? QMatrix::identity(2) : QMatrix(bs->dim(d), two->dim(d)));
  }
  const auto e2t = forms_system(k, weight, bs, cutoff, {{{0, 1}, DGMorphism(bs, bs, twist)}});
  const auto gt = forms_morphism(e2t, e0, compose(t.legs.g, DGMorphism(bs, two, kill)));
  const auto tgt = fiber_product_system(forms_morphism(e1, e0, t.legs.f), gt, cutoff - 1);
  const auto mor = fiber_product_morphism(src, tgt, identity_morphism(e1.system), forms_morphism(e2, e2t, DGMorphism(two, bs, units)));

  const auto res = triple_morphism_pages(mor, 7, 3);
  f.expect(res.pages.ok(), res.pages.failures.empty() ? "" : res.pages.failures.front());
  const auto it = res.pages.psi[2].find({0, 3});
  f.expect(res.pages.source.page(2).dim(0, 3) == 1, "source E2^{0,3} is not one-dimensional");
  f.expect(it != res.pages.psi[2].end() && !it->second.is_zero(), "Psi_2 vanishes on E2^{0,3}");

  const auto id = triple_morphism_pages(identity_morphism(src.system), 5, 3);
  f.expect(id.pages.ok(), "identity: Psi_r does not commute with d_r");
}

void property_suites(Failures& f) {
  std::mt19937_64 rng(2026);
  const FreeGCA alg({{"a", 1}, {"b", 1}, {"x", 2}, {"c", 3}, {"y", 2}, {"e", 1}});
  std::uniform_int_distribution<int> deg(0, 4);
  int bad = 0;
  for (int t = 0; t < 120; ++t) {
    const int p = deg(rng), q = deg(rng);
    const auto a = random_homogeneous(rng, alg, p), b = random_homogeneous(rng, alg, q);
    const auto c = random_homogeneous(rng, alg, deg(rng));
    const Rational sign = (p * q) % 2 == 0 ? 1 : -1;
    if (alg.multiply(a, b) != sign * alg.multiply(b, a)) ++bad;
    if (alg.multiply(alg.multiply(a, b), c) != alg.multiply(a, alg.multiply(b, c))) ++bad;
  }
  f.expect(bad == 0, "graded: " + std::to_string(bad) + " Koszul failures");

  bad = 0;
  for (int t = 0; t < 120; ++t) {
    std::uniform_int_distribution<std::size_t> dim(1, 8);
    const auto m = random_matrix(rng, dim(rng), dim(rng));
    const auto ker = kernel_basis(m);
    if (rank(m) + ker.size() != m.cols()) ++bad;
    for (const auto& v : ker)
      if (!is_zero(m.apply(v))) ++bad;
    const auto r = rref(m);
    const auto r2 = rref(r.reduced);
    if (!(r2.reduced == r.reduced) || r2.pivots != r.pivots) ++bad;
  }
  f.expect(bad == 0, "exactlin: " + std::to_string(bad) + " rank-nullity or RREF failures");

  bad = 0;
  for (int t = 0; t < 100; ++t) {
    const auto model = oracle::random_koszul_model(rng);
    if (check_d_squared(model)) ++bad;
    const auto a = truncate(model, 7);
    if (!a.validate().empty()) ++bad;  // d^2, Leibniz, unit, commutativity
    const auto h = cohomology(a, 6);
    long long chi_c = 0, chi_h = 0;
    for (int k = 0; k <= 6; ++k) {
      const long long s = k % 2 == 0 ? 1 : -1;
      chi_c += s * static_cast<long long>(a.dim(k));
      chi_h += s * static_cast<long long>(h.dim(k));
    }
    if (chi_c != chi_h + static_cast<long long>(rank(a.differential(6)))) ++bad;
  }
  f.expect(bad == 0, "cdga: " + std::to_string(bad) + " d^2, Leibniz or Euler failures");

  // Pullback along monotone vertex maps commutes with fiber products.
  const auto k = SimplicialComplexK::cycle(3);
  const auto fib = square_zero(1, 3);
  const auto pt = share(point_dga(3));
  const auto e1 = forms_system(k, 1, fib, 3, {{{0, 2}, scale_degree(fib, 1, -1)}});
  const auto e0 = forms_system(k, 1, pt, 3);
  const auto aug = DGMorphism::augmentation_like(fib, pt, QMatrix::from_rows({fib->unit()}, fib->dim(0)));
  const auto fm = forms_morphism(e1, e0, aug);
  const auto gm = identity_morphism(e0.system);
  const auto p = fiber_product_system(fm, gm, 2);
  bad = 0;
  for (int t = 0; t < 100; ++t) {
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
    const auto e1u = pullback(e1.system, l, u);
    const auto e0u = pullback(e0.system, l, u);
    const auto q = fiber_product_system(pullback(fm, e1u, e0u, u), pullback(gm, e0u, e0u, u), 2);
    bool same = validate(*pl).empty();
    for (const auto& s : l.all_simplices()) {
      for (int dg = 0; dg <= 3; ++dg) same = same && q.system->fiber(s)->dim(dg) == pl->fiber(s)->dim(dg);
      for (std::size_t i = 0; same && s.size() > 1 && i < s.size(); ++i)
        for (int dg = 0; dg <= 3; ++dg) same = same && q.system->restriction(s, i).matrix(dg) == pl->restriction(s, i).matrix(dg);
    }
    if (!same) ++bad;
  }
  f.expect(bad == 0, "localsys: " + std::to_string(bad) + " pullback/fiber-product failures");
}

struct Criterion {
  int id;
  const char* name;
  double bound_seconds;
  std::function<void(Failures&)> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria{
      {1, "torus cohomology", 1, torus_cohomology},
      {2, "CP^n minimal models", 5, cp_minimal_models},
      {3, "CP^n loop models", 10, cp_loop_models},
      {4, "suspension dimensions and products", 5, suspensions},
      {5, "suspension via fiber product", 5, suspension_fiber_product},
      {6, "Mayer-Vietoris exactness", 2, mayer_vietoris_exactness},
      {7, "admissibility and Stokes", 30, admissibility},
      {8, "global sections of forms", 10, gamma_forms},
      {9, "E2 and E-infinity", 60, e2_theorem},
      {10, "naturality of pages", 30, naturality},
      {11, "property suites", 60, property_suites},
  };
  const int only = argc > 1 ? std::atoi(argv[1]) : 0;
  int failed = 0;
  for (const auto& c : criteria) {
    if (only != 0 && c.id != only) continue;
    Failures f;
    const auto start = std::chrono::steady_clock::now();
    try {
      c.run(f);
    } catch (const std::exception& e) {
      f.expect(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (secs >= c.bound_seconds) f.expect(false, "took " + std::to_string(secs) + " s");
    const bool ok = f.items.empty();
    if (!ok) ++failed;
    std::printf("%s  %2d  %-38s %8.3f s (bound %g s)%s%s\n", ok ? "PASS" : "FAIL", c.id, c.name, secs, c.bound_seconds,
                ok ? "" : "  ", ok ? "" : f.items.front().c_str());
    for (std::size_t i = 1; i < f.items.size() && i < 5; ++i) std::printf("          %s\n", f.items[i].c_str());
  }
  return failed == 0 ? 0 : 1;
}
