#include "cdgakit/sullivan.hpp"

#include <map>

#include "cdgakit/errors.hpp"

namespace cdgakit {

namespace {

// Multiplicative extension of generator images to monomials, memoized.
class Extension {
public:
  Extension(const FreeGCA& alg, const std::vector<QVector>& images, const TruncatedDGA& target)
      : alg_(alg), images_(images), target_(target) {}

  QVector operator()(const Monomial& m) {
    if (auto it = memo_.find(m); it != memo_.end()) return it->second;
    QVector out;
    std::size_t first = 0;
    while (first < m.exponents.size() && m.exponents[first] == 0) ++first;
    if (first == m.exponents.size()) {
      out = target_.unit();
    } else {
      Monomial rest = m;
      --rest.exponents[first];
      const auto [sign, prod] = alg_.multiply(alg_.generator_monomial(first), rest);
      if (sign == 0 || prod != m) throw PreconditionError("minimal_model: inconsistent monomial order");
      out = target_.multiply(alg_.generator(first).degree, images_[first], alg_.degree(rest), (*this)(rest));
      if (sign < 0) out = Rational(-1) * out;
    }
    memo_.emplace(m, out);
    return out;
  }

private:
  const FreeGCA& alg_;
  const std::vector<QVector>& images_;
  const TruncatedDGA& target_;
  std::map<Monomial, QVector> memo_;
};

DGMorphism comparison_map(const FreeCDGA& model, int cutoff, const std::vector<QVector>& images,
                          const DGAPtr& target) {
  auto source = std::make_shared<const TruncatedDGA>(truncate(model, cutoff));
  Extension ext(model.algebra(), images, *target);
  std::vector<QMatrix> maps;
  for (int k = 0; k <= std::min(cutoff, target->cutoff()); ++k) {
    std::vector<QVector> cols;
    for (const auto& m : model.algebra().basis_in_degree(k)) cols.push_back(ext(m));
    maps.push_back(QMatrix::from_columns(cols, target->dim(k)));
  }
  return DGMorphism(source, target, std::move(maps));
}

Element element_from(const FreeGCA& alg, int degree, const QVector& x) {
  const auto basis = alg.basis_in_degree(degree);
  Element e;
  for (std::size_t i = 0; i < x.size(); ++i)
    if (sgn(x[i]) != 0) e.add_term(basis[i], x[i]);
  return e;
}

QVector combine(const std::vector<QVector>& reps, const QVector& coeffs, std::size_t dim) {
  QVector out = zero_vector(dim);
  for (std::size_t i = 0; i < coeffs.size(); ++i)
    if (sgn(coeffs[i]) != 0) axpy(out, coeffs[i], reps[i]);
  return out;
}

}  // namespace

MinimalModelResult minimal_model(DGAPtr target, int upto) {
  if (!target) throw InputError("minimal_model: null target");
  if (upto < 0) throw InputError("minimal_model: negative degree bound");
  if (upto >= target->cutoff()) throw CutoffTooSmall("minimal_model up to degree " + std::to_string(upto), upto + 1);
  if (!target->has_products()) throw PreconditionError("minimal_model: target has no products");
  const auto ht = cohomology(*target, upto);
  if (ht.dim(0) != 1) throw PreconditionError("minimal_model: H^0 of the target is not Q");
  if (upto >= 1 && ht.dim(1) != 0) throw PreconditionError("minimal_model: target is not 1-connected (H^1 != 0)");

  std::vector<GeneratorSpec> gens;
  std::vector<Element> diffs;
  std::vector<QVector> images;
  auto current = [&] {
    FreeGCA alg(gens);
    std::vector<Element> d;
    // Re-home differentials into the enlarged algebra (exponent vectors grow).
    for (const auto& e : diffs) {
      Element moved;
      for (const auto& [m, c] : e.terms()) {
        Monomial mm = m;
        mm.exponents.resize(gens.size(), 0);
        moved.add_term(mm, c);
      }
      d.push_back(std::move(moved));
    }
    return FreeCDGA(std::move(alg), std::move(d));
  };
  auto add = [&](int degree, Element d, QVector image) {
    int k = 0;
    for (const auto& g : gens)
      if (g.degree == degree) ++k;
    gens.push_back({"v" + std::to_string(degree) + "_" + std::to_string(k), degree});
    diffs.push_back(std::move(d));
    images.push_back(std::move(image));
  };

  for (int n = 2; n <= upto - 1; ++n) {
    {
      const auto model = current();
      const auto h = comparison_map(model, n + 1, images, target);
      const auto hm = cohomology(*h.source(), n);
      const auto f = induced_map(h, hm, ht);
      const auto& fn = f[static_cast<std::size_t>(n)];
      for (const auto& e : complement_basis(image_basis(fn), ht.dim(n))) {
        add(n, Element(), combine(ht.representatives(n), e, target->dim(n)));
      }
    }
    {
      const auto model = current();
      const auto h = comparison_map(model, n + 2, images, target);
      const auto hm = cohomology(*h.source(), n + 1);
      const auto f = induced_map(h, hm, ht);
      const auto ker = kernel_basis(f[static_cast<std::size_t>(n + 1)]);
      const std::size_t dim_m = h.source()->dim(n + 1);
      for (const auto& c : ker) {
        const QVector z = combine(hm.representatives(n + 1), c, dim_m);
        const auto pre = solve(target->differential(n), h.apply(n + 1, z));
        if (!pre) throw PreconditionError("minimal_model: killed class does not vanish in the target");
        add(n, element_from(model.algebra(), n + 1, z), *pre);
      }
    }
  }

  MinimalModelResult r;
  r.model = current();
  r.comparison = comparison_map(r.model, target->cutoff(), images, target);
  r.generator_images = images;
  r.built_upto = upto;
  return r;
}

MinimalModelResult minimal_model(const TruncatedDGA& target, int upto) {
  return minimal_model(std::make_shared<const TruncatedDGA>(target), upto);
}

MinimalityResult minimality_check(const FreeCDGA& f) {
  const auto& alg = f.algebra();
  for (std::size_t i = 0; i < alg.size(); ++i) {
    for (const auto& [m, c] : f.d_of_generator(i).terms()) {
      if (alg.word_length(m) < 2) return {false, i};
    }
  }
  return {};
}

FreeCDGA loop_model(const FreeCDGA& base, LoopSign sign) {
  const auto& alg = base.algebra();
  for (const auto& g : alg.generators()) {
    if (g.degree < 2) throw PreconditionError("loop_model: generator " + g.name + " has degree < 2");
  }
  if (const auto m = minimality_check(base); !m) {
    throw PreconditionError("loop_model: base is not minimal at " + alg.generator(*m.offending_generator).name);
  }
  const std::size_t n = alg.size();
  std::vector<GeneratorSpec> gens = alg.generators();
  for (const auto& g : alg.generators()) gens.push_back({g.name + "bar", g.degree - 1});
  FreeGCA loop(gens);

  auto widen = [&](const Element& e) {
    Element out;
    for (const auto& [m, c] : e.terms()) {
      Monomial mm = m;
      mm.exponents.resize(2 * n, 0);
      out.add_term(mm, c);
    }
    return out;
  };
  std::vector<Element> d(2 * n);
  for (std::size_t i = 0; i < n; ++i) d[i] = widen(base.d_of_generator(i));
  FreeCDGA partial(loop, d);
  const auto s = loop_shift(base, partial, sign);
  // d s + s d = 0 on v: d(s v) = -s(dv), and s(v) = ε_v v̄.
  for (std::size_t i = 0; i < n; ++i) {
    const Rational eps = s[i].coefficient(loop.generator_monomial(n + i));
    d[n + i] = (Rational(-1) / eps) * apply_derivation(loop, s, -1, d[i]);
  }
  return FreeCDGA(std::move(loop), std::move(d));
}

FreeCDGA loop_model(const MinimalModelResult& base, LoopSign sign) { return loop_model(base.model, sign); }

std::vector<Element> loop_shift(const FreeCDGA& base, const FreeCDGA& loop, LoopSign sign) {
  const std::size_t n = base.algebra().size();
  if (loop.algebra().size() != 2 * n) throw InputError("loop_shift: loop model has the wrong number of generators");
  std::vector<Element> s(2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    const int deg = base.algebra().generator(i).degree;
    const Rational eps = sign == LoopSign::Right && deg % 2 != 0 ? -1 : 1;
    s[i] = Element(loop.algebra().generator_monomial(n + i), eps);
  }
  return s;
}

}  // namespace cdgakit
