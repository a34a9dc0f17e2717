#include "cdgakit/specseq.hpp"

#include <algorithm>
#include <sstream>
#include <tuple>

#include "cdgakit/errors.hpp"

namespace cdgakit {

namespace {

QMatrix columns(const std::vector<QVector>& vs, std::size_t rows) { return QMatrix::from_columns(vs, rows); }

bool spans_inside(const std::vector<QVector>& xs, const std::vector<QVector>& space, std::size_t dim) {
  if (xs.empty()) return true;
  std::vector<QVector> all = space;
  all.insert(all.end(), xs.begin(), xs.end());
  return rank(all, dim) == rank(space, dim);
}

// Z_r^s in degree n, memoized over (r, s, n).
class Tower {
public:
  explicit Tower(const FilteredComplex& fc) : fc_(fc) {}

  const std::vector<QVector>& z(int r, int s, int n) {
    const auto key = std::make_tuple(r, s, n);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    const std::size_t dim = fc_.dims[static_cast<std::size_t>(n)];
    const auto base = row_space_basis(fc_.level(s, n), dim);
    std::vector<QVector> out;
    if (base.empty() || s + r <= 0) {
      out = base;
    } else {
      const std::size_t dim1 = fc_.dims[static_cast<std::size_t>(n) + 1];
      const QMatrix db = fc_.d[static_cast<std::size_t>(n)] * columns(base, dim);
      const auto target = row_space_basis(fc_.level(s + r, n + 1), dim1);
      QMatrix m = db;
      if (!target.empty()) m = db.hstack(Rational(-1) * columns(target, dim1));
      for (const auto& y : kernel_basis(m)) {
        QVector x = zero_vector(dim);
        for (std::size_t j = 0; j < base.size(); ++j)
          if (sgn(y[j]) != 0) axpy(x, y[j], base[j]);
        out.push_back(std::move(x));
      }
      out = row_space_basis(out, dim);
    }
    return memo_.emplace(key, std::move(out)).first->second;
  }

private:
  const FilteredComplex& fc_;
  std::map<std::tuple<int, int, int>, std::vector<QVector>> memo_;
};

Page build_page(const FilteredComplex& fc, Tower& tower, int r) {
  Page pg;
  pg.r = r;
  pg.length = fc.length();
  pg.top = fc.top();
  for (int n = 0; n <= fc.top() - 1; ++n) {
    const std::size_t dim = fc.dims[static_cast<std::size_t>(n)];
    for (int p = 0; p <= fc.length(); ++p) {
      const auto& zr = tower.z(r, p, n);
      std::vector<QVector> bnd = tower.z(r - 1, p + 1, n);
      if (n >= 1) {
        for (const auto& x : tower.z(r - 1, p - r + 1, n - 1)) bnd.push_back(fc.d[static_cast<std::size_t>(n) - 1].apply(x));
      }
      pg.entries.emplace(std::make_pair(p, n - p), Subquotient(zr, bnd, dim));
    }
  }
  for (const auto& [key, e] : pg.entries) {
    const auto [p, q] = key;
    const int n = p + q;
    auto it = pg.entries.find({p + r, q - r + 1});
    if (it == pg.entries.end()) continue;
    std::vector<QVector> cols;
    for (const auto& x : e.representatives()) cols.push_back(it->second.coordinates(fc.d[static_cast<std::size_t>(n)].apply(x)));
    pg.differentials.emplace(key, columns(cols, it->second.dim()));
  }
  return pg;
}

QMatrix psi_or_zero(const std::map<std::pair<int, int>, QMatrix>& psi, std::pair<int, int> key, std::size_t rows,
                    std::size_t cols) {
  auto it = psi.find(key);
  return it == psi.end() ? QMatrix(rows, cols) : it->second;
}

}  // namespace

// ---- FilteredComplex ----------------------------------------------------

std::vector<QVector> FilteredComplex::level(int p, int n) const {
  const auto in = static_cast<std::size_t>(n);
  if (p <= 0) {
    std::vector<QVector> all;
    for (std::size_t i = 0; i < dims.at(in); ++i) all.push_back(unit_vector(dims[in], i));
    return all;
  }
  if (p > length()) return {};
  return filtration[static_cast<std::size_t>(p)].at(in);
}

std::vector<std::string> FilteredComplex::check() const {
  std::vector<std::string> out;
  if (dims.empty()) return {"filtered complex: no degrees"};
  if (static_cast<int>(d.size()) != top()) return {"filtered complex: need one differential per degree below the top"};
  for (int n = 0; n < top(); ++n) {
    const auto& m = d[static_cast<std::size_t>(n)];
    if (m.rows() != dims[static_cast<std::size_t>(n) + 1] || m.cols() != dims[static_cast<std::size_t>(n)]) {
      out.push_back("d in degree " + std::to_string(n) + " has the wrong shape");
    }
    if (n + 1 < top() && !(d[static_cast<std::size_t>(n) + 1] * m).is_zero()) out.push_back("d^2 != 0 in degree " + std::to_string(n));
  }
  if (filtration.empty()) out.push_back("filtration has no levels");
  if (!out.empty()) return out;
  for (int p = 0; p <= length(); ++p) {
    const auto& lv = filtration[static_cast<std::size_t>(p)];
    if (static_cast<int>(lv.size()) != top() + 1) {
      out.push_back("F^" + std::to_string(p) + " does not list every degree");
      continue;
    }
    for (int n = 0; n <= top(); ++n)
      for (const auto& v : lv[static_cast<std::size_t>(n)])
        if (v.size() != dims[static_cast<std::size_t>(n)]) out.push_back("F^" + std::to_string(p) + " vector of the wrong length");
  }
  if (!out.empty()) return out;
  for (int n = 0; n <= top(); ++n) {
    const auto dim = dims[static_cast<std::size_t>(n)];
    if (rank(filtration[0][static_cast<std::size_t>(n)], dim) != dim) out.push_back("F^0 is not everything in degree " + std::to_string(n));
    for (int p = 0; p < length(); ++p) {
      if (!spans_inside(level(p + 1, n), level(p, n), dim)) {
        out.push_back("F^" + std::to_string(p + 1) + " is not inside F^" + std::to_string(p) + " in degree " + std::to_string(n));
      }
    }
    if (n == top()) continue;
    for (int p = 1; p <= length(); ++p) {
      std::vector<QVector> images;
      for (const auto& v : level(p, n)) images.push_back(d[static_cast<std::size_t>(n)].apply(v));
      if (!spans_inside(images, level(p, n + 1), dims[static_cast<std::size_t>(n) + 1])) {
        out.push_back("d does not preserve F^" + std::to_string(p) + " in degree " + std::to_string(n));
      }
    }
  }
  if (!multiply) return out;
  for (int i = 0; i <= top(); ++i) {
    for (int j = 0; i + j <= top(); ++j) {
      for (int p = 0; p <= length(); ++p) {
        for (int q = 0; q <= length(); ++q) {
          const auto target = level(p + q, i + j);
          for (const auto& a : level(p, i)) {
            for (const auto& b : level(q, j)) {
              const auto prod = multiply(i, a, j, b);
              if (prod && !spans_inside({*prod}, target, dims[static_cast<std::size_t>(i + j)])) {
                out.push_back("F^" + std::to_string(p) + " F^" + std::to_string(q) + " is not inside F^" +
                              std::to_string(p + q) + " in degrees " + std::to_string(i) + "+" + std::to_string(j));
                goto next_pair;
              }
            }
          }
        next_pair:;
        }
      }
    }
  }
  return out;
}

// ---- Pages --------------------------------------------------------------

std::size_t Page::dim(int p, int q) const {
  auto it = entries.find({p, q});
  return it == entries.end() ? 0 : it->second.dim();
}

bool Page::differential_known(int p, int q) const {
  return p + r > length || differentials.count({p, q}) != 0;
}

QMatrix Page::differential(int p, int q) const {
  if (auto it = differentials.find({p, q}); it != differentials.end()) return it->second;
  if (p + r > length) return QMatrix(0, dim(p, q));
  throw InputError("page: d_" + std::to_string(r) + " out of (" + std::to_string(p) + "," + std::to_string(q) +
                   ") needs the degree above the top");
}

std::string Page::format() const {
  std::ostringstream os;
  os << "E_" << r << ":";
  for (const auto& [key, e] : entries) {
    if (e.dim() == 0) continue;
    os << " (" << key.first << "," << key.second << ")=" << e.dim();
  }
  return os.str();
}

SpectralSequence spectral_sequence(const FilteredComplex& fc, int r_max) {
  if (const auto bad = fc.check(); !bad.empty()) throw InputError("filtered complex: " + bad.front());
  SpectralSequence ss;
  ss.length = fc.length();
  Tower tower(fc);
  const int last = std::max(r_max, fc.length() + 1);
  for (int r = 0; r <= last; ++r) ss.pages.push_back(build_page(fc, tower, r));
  return ss;
}

std::vector<Page> pages(const FilteredComplex& fc, int r_max) {
  auto ss = spectral_sequence(fc, r_max);
  ss.pages.resize(static_cast<std::size_t>(r_max) + 1);
  return ss.pages;
}

std::optional<PageCohomology> page_cohomology(const SpectralSequence& ss, int r, int p, int q) {
  if (r + 1 >= static_cast<int>(ss.pages.size())) return std::nullopt;
  const Page& pg = ss.page(r);
  if (!pg.entries.count({p, q}) || !pg.differential_known(p, q)) return std::nullopt;
  const std::size_t dim = pg.dim(p, q);
  const QMatrix out = pg.differential(p, q);
  QMatrix in(dim, 0);
  if (pg.entries.count({p - r, q + r - 1})) in = pg.differential(p - r, q + r - 1);
  PageCohomology pc{homology_at(in, out), QMatrix()};
  const auto& next = ss.page(r + 1).entries.at({p, q});
  const auto& here = pg.entries.at({p, q});
  std::vector<QVector> cols;
  for (const auto& x : next.representatives()) cols.push_back(pc.homology.coordinates(here.coordinates(x)));
  pc.comparison = columns(cols, pc.homology.dim());
  return pc;
}

// ---- Skeletal filtration ------------------------------------------------

SkeletalFiltration skeletal_filtration(const FiniteLocalSystem& e, int cutoff, bool with_products) {
  SkeletalFiltration sf{global_sections(e, cutoff, with_products), {}};
  const auto& g = sf.sections;
  auto& fc = sf.complex;
  for (int k = 0; k <= cutoff; ++k) fc.dims.push_back(g.dga->dim(k));
  for (int k = 0; k < cutoff; ++k) fc.d.push_back(g.dga->differential(k));
  const int length = std::max(g.base.dim(), 0);
  fc.filtration.resize(static_cast<std::size_t>(length) + 1);
  for (int k = 0; k <= cutoff; ++k) {
    const auto ik = static_cast<std::size_t>(k);
    const QMatrix embed = columns(g.kernels[ik].basis, g.ambient_dims[ik]);
    fc.filtration[0].push_back(fc.level(-1, k));
    for (int p = 1; p <= length; ++p) {
      std::vector<std::size_t> rows;
      for (const auto& s : g.simplices) {
        if (static_cast<int>(s.size()) - 1 >= p) continue;
        const auto off = g.offsets[ik].at(s);
        for (std::size_t i = 0; i < g.fibers.at(s)->dim(k); ++i) rows.push_back(off + i);
      }
      fc.filtration[static_cast<std::size_t>(p)].push_back(kernel_basis(embed.select_rows(rows)));
    }
  }
  return sf;
}

std::string E2Report::format() const {
  std::ostringstream os;
  for (const auto& e : entries) {
    os << "E2(" << e.p << "," << e.q << ") = " << e.spectral << ", H^" << e.p << "(K; H^" << e.q << ") = " << e.expected
       << (e.spectral == e.expected ? "" : "  MISMATCH") << "\n";
  }
  return os.str();
}

E2Report e2_check(const FiniteLocalSystem& e, int p_max, int q_max) {
  const int cutoff = p_max + q_max + 1;
  if (cutoff > e.cutoff()) throw CutoffTooSmall("e2_check: fibers are truncated too low", cutoff);
  const auto lc = cohomology_local_system(e, q_max);
  const auto h = h_local_coefficients(lc, p_max, q_max);
  const auto sf = skeletal_filtration(e, cutoff);
  const auto ss = spectral_sequence(sf.complex, 2);
  E2Report rep;
  for (int p = 0; p <= p_max; ++p) {
    for (int q = 0; q <= q_max; ++q) {
      BidegreeComparison c{p, q, ss.page(2).dim(p, q), h[static_cast<std::size_t>(p)][static_cast<std::size_t>(q)]};
      if (c.spectral != c.expected && !rep.first_mismatch) rep.first_mismatch = std::make_pair(p, q);
      rep.entries.push_back(c);
    }
  }
  return rep;
}

std::vector<QVector> filtered_classes(const FilteredComplex& fc, const GradedCohomology& h, int p, int n) {
  const auto dim = fc.dims.at(static_cast<std::size_t>(n));
  const auto base = row_space_basis(fc.level(p, n), dim);
  if (base.empty()) return {};
  const QMatrix b = columns(base, dim);
  std::vector<QVector> classes;
  for (const auto& y : kernel_basis(fc.d.at(static_cast<std::size_t>(n)) * b)) classes.push_back(h.class_of(n, b.apply(y)));
  return row_space_basis(classes, h.dim(n));
}

std::string EInftyReport::format() const {
  std::ostringstream os;
  for (int k = 0; k <= upto; ++k) {
    os << "degree " << k << ": E_inf total " << totals[static_cast<std::size_t>(k)] << ", H(Gamma) "
       << target[static_cast<std::size_t>(k)] << "\n";
  }
  os << product_checks << " product checks\n";
  for (const auto& f : failures) os << "FAIL " << f << "\n";
  return os.str();
}

EInftyReport einfty_vs_target(const FiniteLocalSystem& e, int upto) {
  const int cutoff = upto + 1;
  if (cutoff > e.cutoff()) throw CutoffTooSmall("einfty_vs_target: fibers are truncated too low", cutoff);
  const auto sf = skeletal_filtration(e, cutoff);
  const auto ss = spectral_sequence(sf.complex);
  const auto h = cohomology(*sf.sections.dga, upto);
  EInftyReport rep;
  rep.upto = upto;
  const auto& inf = ss.infinity();
  const int length = sf.complex.length();
  for (int k = 0; k <= upto; ++k) {
    std::size_t total = 0;
    for (int p = 0; p <= length; ++p) total += inf.dim(p, k - p);
    rep.totals.push_back(total);
    rep.target.push_back(h.dim(k));
    if (total != h.dim(k)) {
      rep.failures.push_back("degree " + std::to_string(k) + ": E_inf total " + std::to_string(total) + " != dim H " +
                             std::to_string(h.dim(k)));
    }
  }
  // F^p H^i as class subspaces.
  std::vector<std::vector<std::vector<QVector>>> fh(static_cast<std::size_t>(length) + 2);
  for (int p = 0; p <= length + 1; ++p)
    for (int k = 0; k <= upto; ++k) fh[static_cast<std::size_t>(p)].push_back(filtered_classes(sf.complex, h, p, k));
  auto rep_of = [&](int k, const QVector& cls) {
    QVector x = zero_vector(sf.complex.dims[static_cast<std::size_t>(k)]);
    const auto& reps = h.representatives(k);
    for (std::size_t i = 0; i < cls.size(); ++i)
      if (sgn(cls[i]) != 0) axpy(x, cls[i], reps[i]);
    return x;
  };
  for (int i = 1; i <= upto; ++i) {
    for (int j = 1; i + j <= upto; ++j) {
      for (int p = 0; p <= length; ++p) {
        for (int q = 0; q <= length; ++q) {
          const auto& target = fh[static_cast<std::size_t>(std::min(p + q, length + 1))][static_cast<std::size_t>(i + j)];
          for (const auto& a : fh[static_cast<std::size_t>(p)][static_cast<std::size_t>(i)]) {
            for (const auto& b : fh[static_cast<std::size_t>(q)][static_cast<std::size_t>(j)]) {
              const auto prod = sf.sections.multiply(i, rep_of(i, a), j, rep_of(j, b));
              if (!prod) continue;
              ++rep.product_checks;
              const QVector c = h.class_of(i + j, *prod);
              if (!spans_inside({c}, target, h.dim(i + j))) {
                rep.failures.push_back("product of F^" + std::to_string(p) + "H^" + std::to_string(i) + " and F^" +
                                       std::to_string(q) + "H^" + std::to_string(j) + " leaves F^" + std::to_string(p + q));
              }
            }
          }
        }
      }
    }
  }
  return rep;
}

// ---- Morphisms ----------------------------------------------------------

PagesMorphism filtered_map_pages(const FilteredComplex& source, const FilteredComplex& target,
                                 const std::vector<QMatrix>& h, int r_max) {
  const int top = std::min(source.top(), target.top());
  if (static_cast<int>(h.size()) < top + 1) throw InputError("filtered map: need one matrix per degree");
  for (int n = 0; n <= top; ++n) {
    const auto& m = h[static_cast<std::size_t>(n)];
    if (m.rows() != target.dims[static_cast<std::size_t>(n)] || m.cols() != source.dims[static_cast<std::size_t>(n)]) {
      throw InputError("filtered map: wrong shape in degree " + std::to_string(n));
    }
    if (n < top && !(target.d[static_cast<std::size_t>(n)] * m == h[static_cast<std::size_t>(n) + 1] * source.d[static_cast<std::size_t>(n)])) {
      throw InputError("filtered map: not a chain map in degree " + std::to_string(n));
    }
    for (int p = 1; p <= source.length(); ++p) {
      std::vector<QVector> images;
      for (const auto& v : source.level(p, n)) images.push_back(m.apply(v));
      if (!spans_inside(images, target.level(p, n), target.dims[static_cast<std::size_t>(n)])) {
        throw InputError("filtered map: F^" + std::to_string(p) + " is not preserved in degree " + std::to_string(n));
      }
    }
  }
  const int last = std::max({r_max, source.length() + 1, target.length() + 1});
  PagesMorphism pm{spectral_sequence(source, last), spectral_sequence(target, last), {}, {}};
  for (int r = 0; r <= last; ++r) {
    const Page& ps = pm.source.page(r);
    const Page& pt = pm.target.page(r);
    std::map<std::pair<int, int>, QMatrix> psi;
    for (const auto& [key, e] : ps.entries) {
      const int n = key.first + key.second;
      if (n > top - 1) continue;
      auto it = pt.entries.find(key);
      if (it == pt.entries.end()) continue;
      std::vector<QVector> cols;
      for (const auto& x : e.representatives()) cols.push_back(it->second.coordinates(h[static_cast<std::size_t>(n)].apply(x)));
      psi.emplace(key, columns(cols, it->second.dim()));
    }
    for (const auto& [key, e] : ps.entries) {
      const auto [p, q] = key;
      if (p + q > top - 2 || !ps.differential_known(p, q) || !pt.differential_known(p, q)) continue;
      const std::pair<int, int> next{p + r, q - r + 1};
      const QMatrix ds = ps.differential(p, q);
      const QMatrix dt = pt.differential(p, q);
      const QMatrix lhs = psi_or_zero(psi, next, dt.rows(), ds.rows()) * ds;
      const QMatrix rhs = dt * psi_or_zero(psi, key, pt.dim(p, q), e.dim());
      if (!(lhs == rhs)) {
        pm.failures.push_back("Psi_" + std::to_string(r) + " does not commute with d_" + std::to_string(r) + " at (" +
                              std::to_string(p) + "," + std::to_string(q) + ")");
      }
    }
    pm.psi.push_back(std::move(psi));
  }
  for (int r = 0; r < last; ++r) {
    for (const auto& [key, m] : pm.psi[static_cast<std::size_t>(r)]) {
      const auto [p, q] = key;
      if (p + q > top - 2) continue;
      const auto hs = page_cohomology(pm.source, r, p, q);
      const auto ht = page_cohomology(pm.target, r, p, q);
      if (!hs || !ht) continue;
      std::vector<QVector> cols;
      for (const auto& u : hs->homology.representatives()) cols.push_back(ht->homology.coordinates(m.apply(u)));
      const QMatrix induced = columns(cols, ht->homology.dim());
      const QMatrix next = psi_or_zero(pm.psi[static_cast<std::size_t>(r) + 1], key, pm.target.page(r + 1).dim(p, q),
                                       pm.source.page(r + 1).dim(p, q));
      if (!(induced * hs->comparison == ht->comparison * next)) {
        pm.failures.push_back("Psi_" + std::to_string(r + 1) + " is not induced by Psi_" + std::to_string(r) + " at (" +
                              std::to_string(p) + "," + std::to_string(q) + ")");
      }
    }
  }
  return pm;
}

SystemPagesMorphism triple_morphism_pages(const SystemMorphism& m, int cutoff, int r_max) {
  if (const auto bad = m.validate(); !bad.empty()) throw InputError("triple_morphism_pages: " + bad.front());
  SystemPagesMorphism out{skeletal_filtration(*m.source, cutoff), skeletal_filtration(*m.target, cutoff), {}, {}};
  const auto& gs = out.source.sections;
  const auto& gt = out.target.sections;
  for (int k = 0; k <= cutoff; ++k) {
    const auto ik = static_cast<std::size_t>(k);
    std::vector<QVector> cols;
    for (const auto& v : gs.kernels[ik].basis) {
      QVector y(gt.ambient_dims[ik]);
      for (const auto& s : gs.simplices) {
        const auto os = gs.offsets[ik].at(s);
        const auto ot = gt.offsets[ik].at(s);
        const auto& mat = m.at(s).matrix(k);
        for (std::size_t r = 0; r < mat.rows(); ++r) {
          Rational acc = 0;
          for (const auto& [c, val] : mat.row(r)) acc += val * v[os + c];
          y[ot + r] = acc;
        }
      }
      cols.push_back(gt.kernels[ik].coordinates(y));
    }
    out.sections_map.push_back(columns(cols, gt.kernels[ik].dim()));
  }
  out.pages = filtered_map_pages(out.source.complex, out.target.complex, out.sections_map, r_max);
  return out;
}

}  // namespace cdgakit
