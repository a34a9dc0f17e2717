#include "cdgakit/gluing.hpp"

#include <sstream>

#include "cdgakit/errors.hpp"
#include "cdgakit/polyforms.hpp"

namespace cdgakit {

namespace {

QMatrix leg_difference(const DGMorphism& f, const DGMorphism& g, int k) {
  return f.matrix(k).hstack(Rational(-1) * g.matrix(k));
}

std::pair<QVector, QVector> split(const QVector& v, std::size_t dim_a) {
  return {QVector(v.begin(), v.begin() + static_cast<long>(dim_a)), QVector(v.begin() + static_cast<long>(dim_a), v.end())};
}

QVector join(const QVector& a, const QVector& b) {
  QVector out = a;
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

std::size_t nullity(const QMatrix& m) { return m.cols() - rank(m); }

std::optional<int> first_non_surjective(const DGMorphism& h, int upto) {
  for (int k = 0; k <= upto; ++k) {
    if (rank(h.matrix(k)) != h.target()->dim(k)) return k;
  }
  return std::nullopt;
}

QMatrix evaluation_row(int vertex, int weight) {
  // Restricting to vertex v of Δ[1] omits the other vertex.
  return face_restriction_matrix(1, 1 - vertex, 0, weight);
}

}  // namespace

QVector FiberProductDGA::pair(int k, const QVector& coords) const {
  return kernels.at(static_cast<std::size_t>(k)).embed(coords);
}

QVector FiberProductDGA::coordinates(int k, const QVector& a_part, const QVector& b_part) const {
  const auto& ker = kernels.at(static_cast<std::size_t>(k));
  const QVector v = join(a_part, b_part);
  if (v.size() != ker.ambient) throw InputError("fiber product: vector has the wrong length");
  QVector c = ker.coordinates(v);
  if (ker.embed(c) != v) throw InputError("fiber product: f(a) != g(b) in degree " + std::to_string(k));
  return c;
}

FiberProductDGA fiber_product(const DGMorphism& f, const DGMorphism& g, int upto) {
  if (!f.target() || f.target() != g.target()) throw InputError("fiber_product: legs have different targets");
  if (upto < 0) throw InputError("fiber_product: negative degree bound");
  const int n = upto + 1;
  if (f.top_degree() < n || g.top_degree() < n) {
    throw CutoffTooSmall("fiber_product through degree " + std::to_string(upto), n);
  }
  FiberProductDGA fp;
  fp.f = f;
  fp.g = g;
  fp.upto = upto;
  const auto& A = *f.source();
  const auto& B = *g.source();
  for (int k = 0; k <= n; ++k) fp.kernels.push_back(kernel(leg_difference(f, g, k)));

  TruncatedDGABuilder bld(n);
  for (int k = 0; k <= n; ++k) {
    const auto& ker = fp.kernels[static_cast<std::size_t>(k)];
    std::vector<std::string> labels;
    for (auto c : ker.free_columns) {
      labels.push_back(c < A.dim(k) ? "A:" + A.labels(k)[c] : "B:" + B.labels(k)[c - A.dim(k)]);
    }
    bld.set_basis(k, std::move(labels));
  }
  for (int k = 0; k < n; ++k) {
    const auto& ker = fp.kernels[static_cast<std::size_t>(k)];
    std::vector<QVector> cols;
    for (const auto& v : ker.basis) {
      const auto [a, b] = split(v, A.dim(k));
      cols.push_back(fp.coordinates(k + 1, A.d(k, a), B.d(k, b)));
    }
    bld.set_differential(k, QMatrix::from_columns(cols, bld.dim(k + 1)));
  }
  bld.set_unit(fp.coordinates(0, A.unit(), B.unit()));
  if (!A.has_products() || !B.has_products()) {
    bld.disable_products();
  } else {
    bld.fill_products([&](int i, std::size_t x, int j, std::size_t y) -> std::optional<SparseVector> {
      const auto [xa, xb] = split(fp.kernels[static_cast<std::size_t>(i)].basis[x], A.dim(i));
      const auto [ya, yb] = split(fp.kernels[static_cast<std::size_t>(j)].basis[y], A.dim(j));
      const auto pa = A.try_multiply(i, xa, j, ya);
      const auto pb = B.try_multiply(i, xb, j, yb);
      if (!pa || !pb) return std::nullopt;
      return to_sparse(fp.coordinates(i + j, *pa, *pb));
    });
  }
  fp.carrier = std::make_shared<const TruncatedDGA>(bld.build());

  std::vector<QMatrix> ma, mb;
  for (int k = 0; k <= n; ++k) {
    const auto& ker = fp.kernels[static_cast<std::size_t>(k)];
    QMatrix pa(A.dim(k), ker.dim()), pb(B.dim(k), ker.dim());
    for (std::size_t c = 0; c < ker.dim(); ++c) {
      const auto& v = ker.basis[c];
      for (std::size_t r = 0; r < v.size(); ++r) {
        if (sgn(v[r]) == 0) continue;
        if (r < A.dim(k)) pa.set(r, c, v[r]);
        else pb.set(r - A.dim(k), c, v[r]);
      }
    }
    ma.push_back(std::move(pa));
    mb.push_back(std::move(pb));
  }
  fp.pr_a = DGMorphism(fp.carrier, f.source(), std::move(ma));
  fp.pr_b = DGMorphism(fp.carrier, g.source(), std::move(mb));
  return fp;
}

std::string MayerVietorisReport::format() const {
  std::ostringstream os;
  os << "Mayer-Vietoris through degree " << upto << " (surjective leg " << surjective_leg << ")\n";
  for (int k = 0; k <= upto; ++k) {
    const auto i = static_cast<std::size_t>(k);
    os << "  k=" << k << ": H(fp)=" << dims_fp[i] << " H(A)+H(B)=" << dims_ab[i] << " H(C)=" << dims_c[i];
    if (i < connecting_ranks.size()) os << " rank delta=" << connecting_ranks[i];
    os << '\n';
  }
  os << (exact() ? "  exact at every node\n" : "  NOT exact:\n");
  for (const auto& f : failures) os << "    " << f << '\n';
  return os.str();
}

MayerVietorisReport mayer_vietoris(const FiberProductDGA& fp, int upto) {
  if (upto < 0) throw InputError("mayer_vietoris: negative degree bound");
  if (upto > fp.upto) throw CutoffTooSmall("mayer_vietoris beyond the fiber product range", upto + 1);
  MayerVietorisReport r;
  r.upto = upto;
  const auto ff = first_non_surjective(fp.f, upto);
  const auto gf = first_non_surjective(fp.g, upto);
  if (ff && gf) {
    throw PreconditionError("mayer_vietoris: no surjective leg (f fails in degree " + std::to_string(*ff) +
                            ", g fails in degree " + std::to_string(*gf) + ")");
  }
  r.surjective_leg = ff ? 'g' : 'f';

  const auto& A = *fp.a();
  const auto hfp = cohomology(*fp.carrier, upto);
  const auto ha = cohomology(A, upto);
  const auto hb = cohomology(*fp.b(), upto);
  const auto hc = cohomology(*fp.c(), upto);
  const auto pa = induced_map(fp.pr_a, hfp, ha), pb = induced_map(fp.pr_b, hfp, hb);
  const auto fa = induced_map(fp.f, ha, hc), gb = induced_map(fp.g, hb, hc);
  for (int k = 0; k <= upto; ++k) {
    const auto i = static_cast<std::size_t>(k);
    r.dims_fp.push_back(hfp.dim(k));
    r.dims_ab.push_back(ha.dim(k) + hb.dim(k));
    r.dims_c.push_back(hc.dim(k));
    r.alpha.push_back(pa[i].vstack(pb[i]));
    r.beta.push_back(fa[i].hstack(Rational(-1) * gb[i]));
  }
  for (int k = 0; k < upto; ++k) {
    const auto m = leg_difference(fp.f, fp.g, k);
    std::vector<QVector> cols;
    for (const auto& c : hc.representatives(k)) {
      const auto lift = solve(m, c);
      if (!lift) throw PreconditionError("mayer_vietoris: cannot lift a class of C in degree " + std::to_string(k));
      const auto [a, b] = split(*lift, A.dim(k));
      const auto coords = fp.coordinates(k + 1, A.d(k, a), fp.b()->d(k, b));
      cols.push_back(hfp.class_of(k + 1, coords));
    }
    r.delta.push_back(QMatrix::from_columns(cols, hfp.dim(k + 1)));
    r.connecting_ranks.push_back(rank(r.delta.back()));
  }

  auto check = [&](const std::string& node, const QMatrix& out, const QMatrix* in) {
    const std::size_t in_rank = in ? rank(*in) : 0;
    if (in && !(out * *in).is_zero()) r.failures.push_back(node + ": composite is not zero");
    if (nullity(out) != in_rank) {
      r.failures.push_back(node + ": dim ker = " + std::to_string(nullity(out)) + " but rank in = " + std::to_string(in_rank));
    }
  };
  for (int k = 0; k <= upto; ++k) {
    const auto i = static_cast<std::size_t>(k);
    const std::string deg = std::to_string(k);
    check("H^" + deg + "(fp)", r.alpha[i], k == 0 ? nullptr : &r.delta[i - 1]);
    check("H^" + deg + "(A)+H^" + deg + "(B)", r.beta[i], &r.alpha[i]);
    if (k < upto) check("H^" + deg + "(C)", r.delta[i], &r.beta[i]);
  }
  return r;
}

QVector SuspensionModel::omega(int j, const QVector& x) const {
  if (j < 2) throw InputError("suspension: no ω ⊗ dt part below degree 2");
  if (j > 2) return x;
  QVector out = zero_vector(source->dim(1));
  for (std::size_t i = 0; i < x.size(); ++i) out[complement_columns.at(i)] = x[i];
  return out;
}

SuspensionModel suspension_model(DGAPtr m, int upto) {
  if (!m) throw InputError("suspension_model: null algebra");
  if (upto < 0) throw InputError("suspension_model: negative degree bound");
  if (upto > m->cutoff() || m->cutoff() < 1) throw CutoffTooSmall("suspension_model", std::max(upto, 1));
  if (cohomology(*m, 0).dim(0) != 1) throw PreconditionError("suspension_model: H^0 is not Q");
  SuspensionModel s;
  s.source = m;
  s.upto = upto;
  for (const auto& e : complement_basis(image_basis(m->differential(0)), m->dim(1))) {
    for (std::size_t i = 0; i < e.size(); ++i)
      if (sgn(e[i]) != 0) s.complement_columns.push_back(i);
  }
  const int n = upto + 1;
  TruncatedDGABuilder bld(n);
  for (int j = 0; j <= n; ++j) {
    std::vector<std::string> labels;
    if (j == 0) labels.push_back("1");
    if (j == 2)
      for (auto c : s.complement_columns) labels.push_back(m->labels(1)[c] + "⊗dt");
    if (j >= 3)
      for (const auto& l : m->labels(j - 1)) labels.push_back(l + "⊗dt");
    bld.set_basis(j, std::move(labels));
  }
  for (int j = 0; j < n; ++j) {
    if (j < 2) {
      bld.set_differential(j, QMatrix(bld.dim(j + 1), bld.dim(j)));
    } else if (j == 2) {
      std::vector<QVector> cols;
      for (auto c : s.complement_columns) cols.push_back(m->differential(1).column(c));
      bld.set_differential(j, QMatrix::from_columns(cols, m->dim(2)));
    } else {
      bld.set_differential(j, m->differential(j - 1));
    }
  }
  bld.set_unit({Rational(1)});
  bld.fill_products([](int i, std::size_t x, int j, std::size_t y) -> std::optional<SparseVector> {
    if (i == 0) return SparseVector{{y, Rational(1)}};
    if (j == 0) return SparseVector{{x, Rational(1)}};
    return SparseVector{};
  });
  s.carrier = std::make_shared<const TruncatedDGA>(bld.build());
  return s;
}

SuspensionModel suspension_model(const TruncatedDGA& m, int upto) {
  return suspension_model(std::make_shared<const TruncatedDGA>(m), upto);
}

GluingData circle_from_interval(int weight, int cutoff) {
  if (weight < 1) throw InputError("circle_from_interval: weight must be at least 1");
  auto interval = std::make_shared<const TruncatedDGA>(simplex_forms_dga(1, weight, cutoff));
  auto ends = std::make_shared<const TruncatedDGA>(direct_product(point_dga(cutoff), point_dga(cutoff)));
  auto point = std::make_shared<const TruncatedDGA>(point_dga(cutoff));
  std::vector<QMatrix> fm, gm;
  for (int k = 0; k <= cutoff; ++k) {
    if (k == 0) {
      fm.push_back(evaluation_row(0, weight).vstack(evaluation_row(1, weight)));
      gm.push_back(QMatrix::from_rows({{1}, {1}}, 1));
    } else {
      fm.push_back(QMatrix(ends->dim(k), interval->dim(k)));
      gm.push_back(QMatrix(ends->dim(k), point->dim(k)));
    }
  }
  return {DGMorphism(interval, ends, std::move(fm)), DGMorphism(point, ends, std::move(gm))};
}

SuspensionTriple suspension_triple(DGAPtr m, int weight, int cutoff) {
  if (!m) throw InputError("suspension_triple: null algebra");
  if (weight < 1) throw InputError("suspension_triple: weight must be at least 1");
  SuspensionTriple t;
  t.m = m;
  t.weight = weight;
  t.interval = std::make_shared<const TruncatedDGA>(simplex_forms_dga(1, weight, cutoff));
  t.tensor = tensor_product(*m, *t.interval, cutoff);
  auto a = std::make_shared<const TruncatedDGA>(t.tensor.dga);
  auto c = std::make_shared<const TruncatedDGA>(direct_product(*m, *m));
  auto b = std::make_shared<const TruncatedDGA>(direct_product(point_dga(cutoff), point_dga(cutoff)));
  const QMatrix e0 = evaluation_row(0, weight), e1 = evaluation_row(1, weight);
  std::vector<QMatrix> fm, gm;
  for (int k = 0; k <= cutoff; ++k) {
    QMatrix fk(c->dim(k), a->dim(k));
    for (std::size_t x = 0; x < m->dim(k); ++x) {
      for (std::size_t p = 0; p < t.interval->dim(0); ++p) {
        const auto col = t.tensor.index(k, x, 0, p);
        fk.set(x, col, e0.at(0, p));
        fk.set(m->dim(k) + x, col, e1.at(0, p));
      }
    }
    fm.push_back(std::move(fk));
    QMatrix gk(c->dim(k), b->dim(k));
    if (k == 0) {
      for (std::size_t r = 0; r < m->dim(0); ++r) {
        gk.set(r, 0, m->unit()[r]);
        gk.set(m->dim(0) + r, 1, m->unit()[r]);
      }
    }
    gm.push_back(std::move(gk));
  }
  t.legs = {DGMorphism(a, c, std::move(fm)), DGMorphism(b, c, std::move(gm))};
  return t;
}

DGMorphism suspension_inclusion(const SuspensionModel& s, const SuspensionTriple& t, const FiberProductDGA& fp) {
  if (s.source != t.m) throw InputError("suspension_inclusion: models of different algebras");
  if (fp.a() != t.legs.f.source()) throw InputError("suspension_inclusion: fiber product of another triple");
  const int top = std::min(s.carrier->cutoff(), fp.carrier->cutoff());
  const auto dt = form_basis(1, 1, t.weight).index.at(FormKey{{0}, 1u});
  const auto& A = *fp.a();
  const auto& B = *fp.b();
  std::vector<QMatrix> maps;
  for (int j = 0; j <= top; ++j) {
    std::vector<QVector> cols;
    if (j == 0) cols.push_back(fp.carrier->unit());
    if (j >= 2) {
      for (std::size_t c = 0; c < s.carrier->dim(j); ++c) {
        const QVector w = s.omega(j, unit_vector(s.carrier->dim(j), c));
        QVector a = zero_vector(A.dim(j));
        for (std::size_t x = 0; x < w.size(); ++x)
          if (sgn(w[x]) != 0) a[t.tensor.index(j - 1, x, 1, dt)] = w[x];
        cols.push_back(fp.coordinates(j, a, zero_vector(B.dim(j))));
      }
    }
    maps.push_back(QMatrix::from_columns(cols, fp.carrier->dim(j)));
  }
  return DGMorphism(s.carrier, fp.carrier, std::move(maps));
}

QuasiIsoResult theta_equivalence_check(const FiberProductDGA& fp, const DGMorphism& theta, int upto) {
  if (theta.target() != fp.carrier) throw InputError("theta_equivalence_check: theta does not land in the fiber product");
  const auto errs = theta.validate();
  if (!errs.empty()) throw InputError("theta_equivalence_check: " + errs.front());
  return is_quasi_iso(theta, upto);
}

}  // namespace cdgakit
