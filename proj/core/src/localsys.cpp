#include "cdgakit/localsys.hpp"

#include <algorithm>
#include <set>

#include "cdgakit/errors.hpp"

namespace cdgakit {

namespace {

std::string face_name(const Simplex& s, const Simplex& t) { return format_simplex(s) + " -> " + format_simplex(t); }

// Proper nonempty faces of s.
std::vector<Simplex> proper_faces(const Simplex& s) {
  std::vector<Simplex> out;
  const std::size_t n = s.size();
  for (unsigned mask = 1; mask + 1 < (1u << n); ++mask) {
    Simplex t;
    for (std::size_t i = 0; i < n; ++i)
      if (mask & (1u << i)) t.push_back(s[i]);
    out.push_back(std::move(t));
  }
  std::sort(out.begin(), out.end(), [](const Simplex& a, const Simplex& b) {
    return a.size() != b.size() ? a.size() < b.size() : a < b;
  });
  return out;
}

// Compatibility matrix on ⊕ fiber(t)^k over the given simplices: one block
// row per codimension-one face pair inside the list.
QMatrix compatibility(const FiniteLocalSystem& e, const std::vector<Simplex>& simplices,
                      const std::map<Simplex, std::size_t>& offsets, std::size_t ambient, int k) {
  std::size_t rows = 0;
  std::vector<std::tuple<Simplex, std::size_t, std::size_t>> pairs;
  for (const auto& s : simplices) {
    if (s.size() < 2) continue;
    for (std::size_t i = 0; i < s.size(); ++i) {
      const Simplex t = face(s, i);
      if (!offsets.count(t)) continue;
      pairs.emplace_back(s, i, rows);
      rows += e.fiber(t)->dim(k);
    }
  }
  QMatrix m(rows, ambient);
  for (const auto& [s, i, row0] : pairs) {
    const auto& r = e.restriction(s, i).matrix(k);
    const auto so = offsets.at(s), to = offsets.at(face(s, i));
    for (std::size_t row = 0; row < r.rows(); ++row) {
      for (const auto& [c, v] : r.row(row)) m.add(row0 + row, so + c, v);
      m.add(row0 + row, to + row, -1);
    }
  }
  return m;
}

DGMorphism block_morphism(DGAPtr source, DGAPtr target, const std::vector<QMatrix>& maps) {
  return DGMorphism(std::move(source), std::move(target), maps);
}

}  // namespace

// ---- FiniteLocalSystem --------------------------------------------------

FiniteLocalSystem::FiniteLocalSystem(SimplicialComplexK base, std::map<Simplex, DGAPtr> fibers,
                                     std::map<Simplex, std::vector<DGMorphism>> restrictions)
    : base_(std::move(base)), fibers_(std::move(fibers)), restrictions_(std::move(restrictions)) {
  for (const auto& s : base_.all_simplices()) {
    auto it = fibers_.find(s);
    if (it == fibers_.end() || !it->second) throw InputError("local system: no fiber on " + format_simplex(s));
    if (s.size() < 2) continue;
    auto rt = restrictions_.find(s);
    if (rt == restrictions_.end() || rt->second.size() != s.size()) {
      throw InputError("local system: restrictions of " + format_simplex(s) + " are missing");
    }
    for (std::size_t i = 0; i < s.size(); ++i) {
      const auto& r = rt->second[i];
      const Simplex t = face(s, i);
      if (r.source() != it->second || r.target() != fibers_.at(t)) {
        throw InputError("local system: restriction " + face_name(s, t) + " has the wrong endpoints");
      }
    }
  }
  for (const auto& [s, f] : fibers_)
    if (!base_.contains(s)) throw InputError("local system: fiber on " + format_simplex(s) + " outside the base");
}

const DGAPtr& FiniteLocalSystem::fiber(const Simplex& s) const {
  auto it = fibers_.find(s);
  if (it == fibers_.end()) throw InputError("local system: no simplex " + format_simplex(s));
  return it->second;
}

const DGMorphism& FiniteLocalSystem::restriction(const Simplex& sigma, std::size_t i) const {
  auto it = restrictions_.find(sigma);
  if (it == restrictions_.end() || i >= it->second.size()) {
    throw InputError("local system: no restriction " + std::to_string(i) + " on " + format_simplex(sigma));
  }
  return it->second[i];
}

DGMorphism FiniteLocalSystem::restriction(const Simplex& sigma, const Simplex& tau) const {
  const auto pos = positions_in(tau, sigma);
  if (tau == sigma) return DGMorphism::identity(fiber(sigma));
  // Remove missing vertices from the last position down.
  std::vector<std::size_t> drop;
  std::size_t next = 0;
  for (std::size_t i = 0; i < sigma.size(); ++i) {
    if (next < pos.size() && pos[next] == i) {
      ++next;
    } else {
      drop.push_back(i);
    }
  }
  Simplex cur = sigma;
  std::optional<DGMorphism> acc;
  for (auto it = drop.rbegin(); it != drop.rend(); ++it) {
    const auto& r = restriction(cur, *it);
    acc = acc ? compose(r, *acc) : r;
    cur = face(cur, *it);
  }
  return *acc;
}

int FiniteLocalSystem::cutoff() const {
  int c = -1;
  for (const auto& [s, f] : fibers_) c = c < 0 ? f->cutoff() : std::min(c, f->cutoff());
  return c;
}

std::vector<std::string> validate(const FiniteLocalSystem& e) {
  std::vector<std::string> out;
  const auto& K = e.base();
  for (const auto& s : K.all_simplices()) {
    if (s.size() < 2) continue;
    for (std::size_t i = 0; i < s.size(); ++i) {
      for (const auto& msg : e.restriction(s, i).validate()) out.push_back(face_name(s, face(s, i)) + ": " + msg);
    }
    for (std::size_t j = 1; j < s.size() && s.size() >= 3; ++j) {
      for (std::size_t i = 0; i < j; ++i) {
        // Omit j then i, versus omit i then j - 1.
        const auto& a1 = e.restriction(s, j);
        const auto& a2 = e.restriction(face(s, j), i);
        const auto& b1 = e.restriction(s, i);
        const auto& b2 = e.restriction(face(s, i), j - 1);
        const int top = std::min({a1.top_degree(), a2.top_degree(), b1.top_degree(), b2.top_degree()});
        for (int k = 0; k <= top; ++k) {
          if (!(a2.matrix(k) * a1.matrix(k) == b2.matrix(k) * b1.matrix(k))) {
            out.push_back(face_name(s, face(face(s, j), i)) + ": restrictions do not commute in degree " +
                          std::to_string(k));
            break;
          }
        }
      }
    }
  }
  return out;
}

// ---- SystemMorphism -----------------------------------------------------

const DGMorphism& SystemMorphism::at(const Simplex& s) const {
  auto it = maps.find(s);
  if (it == maps.end()) throw InputError("system morphism: no map on " + format_simplex(s));
  return it->second;
}

std::vector<std::string> SystemMorphism::validate() const {
  std::vector<std::string> out;
  if (!source || !target) return {"system morphism: null endpoint"};
  if (!(source->base() == target->base())) return {"system morphism: bases differ"};
  for (const auto& s : source->base().all_simplices()) {
    auto it = maps.find(s);
    if (it == maps.end()) {
      out.push_back("no map on " + format_simplex(s));
      continue;
    }
    const auto& m = it->second;
    if (m.source() != source->fiber(s) || m.target() != target->fiber(s)) {
      out.push_back(format_simplex(s) + ": map has the wrong endpoints");
      continue;
    }
    for (const auto& msg : m.validate()) out.push_back(format_simplex(s) + ": " + msg);
  }
  if (!out.empty()) return out;
  for (const auto& s : source->base().all_simplices()) {
    if (s.size() < 2) continue;
    for (std::size_t i = 0; i < s.size(); ++i) {
      const Simplex t = face(s, i);
      const auto& rs = source->restriction(s, i);
      const auto& rt = target->restriction(s, i);
      const auto& ms = maps.at(s);
      const auto& mt = maps.at(t);
      const int top = std::min({rs.top_degree(), rt.top_degree(), ms.top_degree(), mt.top_degree()});
      for (int k = 0; k <= top; ++k) {
        if (!(mt.matrix(k) * rs.matrix(k) == rt.matrix(k) * ms.matrix(k))) {
          out.push_back(face_name(s, t) + ": map does not commute with restriction in degree " + std::to_string(k));
          break;
        }
      }
    }
  }
  return out;
}

SystemMorphism identity_morphism(SystemPtr e) {
  SystemMorphism m{e, e, {}};
  for (const auto& s : e->base().all_simplices()) m.maps.emplace(s, DGMorphism::identity(e->fiber(s)));
  return m;
}

SystemMorphism compose(const SystemMorphism& g, const SystemMorphism& f) {
  if (f.target != g.source) throw InputError("compose: target of f is not the source of g");
  SystemMorphism m{f.source, g.target, {}};
  for (const auto& [s, fs] : f.maps) m.maps.emplace(s, compose(g.at(s), fs));
  return m;
}

// ---- Builders -----------------------------------------------------------

SystemPtr constant_system(const SimplicialComplexK& k, DGAPtr fiber) {
  std::map<Simplex, DGAPtr> fibers;
  std::map<Simplex, std::vector<DGMorphism>> res;
  const auto id = DGMorphism::identity(fiber);
  for (const auto& s : k.all_simplices()) {
    fibers[s] = fiber;
    if (s.size() >= 2) res[s] = std::vector<DGMorphism>(s.size(), id);
  }
  return std::make_shared<const FiniteLocalSystem>(k, std::move(fibers), std::move(res));
}

FormsSystem forms_system(const SimplicialComplexK& k, int weight, DGAPtr fiber, int cutoff,
                         const std::map<std::pair<int, int>, DGMorphism>& transports) {
  if (!fiber) throw InputError("forms_system: null fiber");
  if (cutoff > fiber->cutoff()) throw CutoffTooSmall("forms_system: fiber cutoff", cutoff);
  FormsSystem fs;
  fs.weight = weight;
  fs.cutoff = cutoff;
  fs.fiber = fiber;
  const int top = std::max(k.dim(), 0);
  for (int n = 0; n <= top; ++n) {
    fs.simplex_forms.push_back(std::make_shared<const TruncatedDGA>(simplex_forms_dga(n, weight, cutoff)));
    fs.tensors.push_back(tensor_product(*fs.simplex_forms.back(), *fiber, cutoff));
    fs.fibers.push_back(std::make_shared<const TruncatedDGA>(fs.tensors.back().dga));
  }
  const auto id_f = DGMorphism::identity(fiber);
  for (const auto& [edge, t] : transports) {
    if (t.source() != fiber || t.target() != fiber) throw InputError("forms_system: transport is not an endomorphism of the fiber");
    if (!k.contains(Simplex{edge.first, edge.second})) throw InputError("forms_system: transport on a missing edge");
  }
  // Face maps of the simplex forms, per (n, i).
  std::map<std::pair<int, std::size_t>, DGMorphism> faces;
  auto face_map = [&](int n, std::size_t i) -> const DGMorphism& {
    auto key = std::make_pair(n, i);
    auto it = faces.find(key);
    if (it != faces.end()) return it->second;
    std::vector<QMatrix> maps;
    for (int d = 0; d <= cutoff; ++d) maps.push_back(face_restriction_matrix(n, static_cast<int>(i), d, weight));
    return faces.emplace(key, DGMorphism(fs.simplex_forms[static_cast<std::size_t>(n)],
                                         fs.simplex_forms[static_cast<std::size_t>(n) - 1], std::move(maps)))
        .first->second;
  };
  std::map<Simplex, DGAPtr> fibers;
  std::map<Simplex, std::vector<DGMorphism>> res;
  for (const auto& s : k.all_simplices()) {
    const int n = static_cast<int>(s.size()) - 1;
    fibers[s] = fs.fibers[static_cast<std::size_t>(n)];
    if (n == 0) continue;
    auto& v = res[s];
    for (std::size_t i = 0; i <= static_cast<std::size_t>(n); ++i) {
      const DGMorphism* t = &id_f;
      if (i == 0) {
        auto it = transports.find({s[0], s[1]});
        if (it != transports.end()) t = &it->second;
      }
      v.push_back(tensor_morphism(fs.fibers[static_cast<std::size_t>(n)], fs.tensors[static_cast<std::size_t>(n)],
                                  fs.fibers[static_cast<std::size_t>(n) - 1], fs.tensors[static_cast<std::size_t>(n) - 1],
                                  face_map(n, i), *t));
    }
  }
  fs.system = std::make_shared<const FiniteLocalSystem>(k, std::move(fibers), std::move(res));
  return fs;
}

SystemMorphism forms_morphism(const FormsSystem& source, const FormsSystem& target, const DGMorphism& phi) {
  if (!(source.system->base() == target.system->base()) || source.weight != target.weight) {
    throw InputError("forms_morphism: systems differ in base or weight");
  }
  if (phi.source() != source.fiber || phi.target() != target.fiber) throw InputError("forms_morphism: φ has the wrong endpoints");
  std::vector<DGMorphism> per_dim;
  for (std::size_t n = 0; n < source.fibers.size(); ++n) {
    per_dim.push_back(tensor_morphism(source.fibers[n], source.tensors[n], target.fibers[n], target.tensors[n],
                                      DGMorphism::identity(source.simplex_forms[n]), phi));
  }
  SystemMorphism m{source.system, target.system, {}};
  for (const auto& s : source.system->base().all_simplices()) m.maps.emplace(s, per_dim[s.size() - 1]);
  return m;
}

SystemPtr product_forms_system(const SimplicialComplexK& k, const SimplicialComplexK& f, int weight, int cutoff,
                               bool with_products) {
  int width = 1;
  for (int v : f.vertices()) width = std::max(width, v + 1);
  std::map<Simplex, FormsDGA> forms;
  for (const auto& s : k.all_simplices()) {
    forms.emplace(s, forms_dga(product_complex(SimplicialComplexK::simplex_on(s), f, width).complex, weight, cutoff,
                               with_products));
  }
  std::map<Simplex, DGAPtr> fibers;
  std::map<Simplex, std::vector<DGMorphism>> res;
  for (const auto& [s, fd] : forms) {
    fibers[s] = fd.dga;
    if (s.size() < 2) continue;
    for (std::size_t i = 0; i < s.size(); ++i) res[s].push_back(forms_restriction(fd, forms.at(face(s, i))));
  }
  return std::make_shared<const FiniteLocalSystem>(k, std::move(fibers), std::move(res));
}

SystemPtr circle_bundle_system(const SimplicialForm& omega, int weight, int cutoff) {
  if (weight < 2) throw InputError("circle_bundle_system: weight must be at least 2");
  const auto& K = omega.base;
  // Complete the family by restriction from any simplex that carries a form.
  SimplicialForm w{K, omega.forms};
  for (const auto& s : K.all_simplices()) {
    if (w.forms.count(s)) continue;
    for (const auto& [r, form] : omega.forms) {
      if (is_face(s, r)) {
        w.forms[s] = restrict_to_face(form, positions_in(s, r));
        break;
      }
    }
  }
  if (!w.clashes().empty()) throw InputError("circle_bundle_system: ω is not a compatible family");
  for (const auto& [s, form] : w.forms) {
    if (form.is_zero()) continue;
    if (form.degree() != 2 || form.weight() > 2 || !d(form).is_zero()) {
      throw InputError("circle_bundle_system: ω on " + format_simplex(s) + " is not a closed 2-form of weight <= 2");
    }
  }
  const int low = weight - 2;
  std::map<Simplex, DGAPtr> fibers;
  for (const auto& s : K.all_simplices()) {
    const int n = static_cast<int>(s.size()) - 1;
    const PolyForm om = w.on(s);
    auto size_a = [&](int k) { return k < 0 ? std::size_t{0} : form_basis(n, k, weight).size(); };
    auto size_b = [&](int k) { return k < 1 ? std::size_t{0} : form_basis(n, k - 1, low).size(); };
    TruncatedDGABuilder b(cutoff);
    for (int k = 0; k <= cutoff; ++k) {
      auto labels = form_labels(n, k, weight);
      if (k >= 1)
        for (const auto& l : form_labels(n, k - 1, low)) labels.push_back("(" + l + ")*z");
      b.set_basis(k, std::move(labels));
    }
    for (int k = 0; k < cutoff; ++k) {
      QMatrix m(size_a(k + 1) + size_b(k + 1), size_a(k) + size_b(k));
      const auto& da = form_differential_matrix(n, k, weight);
      for (std::size_t r = 0; r < da.rows(); ++r)
        for (const auto& [c, v] : da.row(r)) m.add(r, c, v);
      if (k >= 1) {
        const auto& bb = form_basis(n, k - 1, low);
        const auto& target = form_basis(n, k + 1, weight);
        const auto& db = form_differential_matrix(n, k - 1, low);
        const Rational sign = (k - 1) % 2 == 0 ? 1 : -1;
        for (std::size_t c = 0; c < bb.size(); ++c) {
          const PolyForm prod = wedge(PolyForm::term(n, bb.keys[c].exponents, bb.keys[c].mask), om);
          const auto coords = target.coordinates(prod);
          for (std::size_t r = 0; r < coords.size(); ++r)
            if (sgn(coords[r]) != 0) m.add(r, size_a(k) + c, sign * coords[r]);
        }
        for (std::size_t r = 0; r < db.rows(); ++r)
          for (const auto& [c, v] : db.row(r)) m.add(size_a(k + 1) + r, size_a(k) + c, v);
      }
      b.set_differential(k, std::move(m));
    }
    b.set_unit(form_basis(n, 0, weight).coordinates(PolyForm::constant(n, 1)));
    // Basis element (k, x) as (form, has z).
    auto element = [&](int k, std::size_t x) -> std::pair<PolyForm, bool> {
      if (x < size_a(k)) {
        const auto& key = form_basis(n, k, weight).keys[x];
        return {PolyForm::term(n, key.exponents, key.mask), false};
      }
      const auto& key = form_basis(n, k - 1, low).keys[x - size_a(k)];
      return {PolyForm::term(n, key.exponents, key.mask), true};
    };
    b.fill_products([&](int i, std::size_t x, int j, std::size_t y) -> std::optional<SparseVector> {
      auto [a, az] = element(i, x);
      auto [c, cz] = element(j, y);
      if (az && cz) return SparseVector{};
      const int k = i + j;
      PolyForm p = wedge(a, c);
      if (az) {
        // (a z) c = (-1)^{|c|} a c z
        if (j % 2 != 0) p = Rational(-1) * p;
      }
      if (!az && !cz) {
        auto coords = form_basis(n, k, weight).try_coordinates(p);
        if (!coords) return std::nullopt;
        return to_sparse(*coords);
      }
      auto coords = form_basis(n, k - 1, low).try_coordinates(p);
      if (!coords) return std::nullopt;
      SparseVector out;
      for (const auto& [r, v] : to_sparse(*coords)) out.emplace_back(size_a(k) + r, v);
      return out;
    });
    fibers[s] = std::make_shared<const TruncatedDGA>(b.build());
  }
  std::map<Simplex, std::vector<DGMorphism>> res;
  for (const auto& s : K.all_simplices()) {
    const int n = static_cast<int>(s.size()) - 1;
    if (n == 0) continue;
    for (std::size_t i = 0; i < s.size(); ++i) {
      const Simplex t = face(s, i);
      std::vector<QMatrix> maps;
      for (int k = 0; k <= cutoff; ++k) {
        const auto& ra = face_restriction_matrix(n, static_cast<int>(i), k, weight);
        QMatrix m(fibers[t]->dim(k), fibers[s]->dim(k));
        for (std::size_t r = 0; r < ra.rows(); ++r)
          for (const auto& [c, v] : ra.row(r)) m.add(r, c, v);
        if (k >= 1) {
          const auto& rb = face_restriction_matrix(n, static_cast<int>(i), k - 1, low);
          for (std::size_t r = 0; r < rb.rows(); ++r)
            for (const auto& [c, v] : rb.row(r)) m.add(ra.rows() + r, ra.cols() + c, v);
        }
        maps.push_back(std::move(m));
      }
      res[s].push_back(block_morphism(fibers[s], fibers[t], maps));
    }
  }
  return std::make_shared<const FiniteLocalSystem>(K, std::move(fibers), std::move(res));
}

SystemPtr sign_twisted_system(const SimplicialComplexK& k, int q, const Simplex& edge, int cutoff) {
  if (q < 1) throw InputError("sign_twisted_system: degree must be positive");
  if (edge.size() != 2 || !k.contains(edge)) throw InputError("sign_twisted_system: not an edge of the base");
  const auto free = FreeCDGA::from_strings({{"e", q}}, {});
  Monomial sq = free.algebra().unit_monomial();
  sq.exponents[0] = 2;
  const auto fiber = std::make_shared<const TruncatedDGA>(
      q % 2 == 0 ? monomial_quotient(free, {sq}, cutoff) : truncate(free, cutoff));
  const auto id = DGMorphism::identity(fiber);
  std::vector<QMatrix> maps;
  for (int d = 0; d <= cutoff; ++d) {
    maps.push_back(d == q ? Rational(-1) * QMatrix::identity(fiber->dim(d)) : QMatrix::identity(fiber->dim(d)));
  }
  const DGMorphism flip(fiber, fiber, std::move(maps));
  std::map<Simplex, DGAPtr> fibers;
  std::map<Simplex, std::vector<DGMorphism>> res;
  for (const auto& s : k.all_simplices()) {
    fibers[s] = fiber;
    if (s.size() < 2) continue;
    res[s] = std::vector<DGMorphism>(s.size(), id);
    if (s == edge) res[s][1] = flip;
  }
  return std::make_shared<const FiniteLocalSystem>(k, std::move(fibers), std::move(res));
}

CylinderSystem cylinder(SystemPtr e, int weight) {
  const int c = e->cutoff();
  const auto interval = std::make_shared<const TruncatedDGA>(simplex_forms_dga(1, weight, c));
  const auto id_i = DGMorphism::identity(interval);
  std::map<Simplex, TensorDGA> tensors;
  std::map<Simplex, DGAPtr> fibers;
  for (const auto& s : e->base().all_simplices()) {
    auto t = tensor_product(*e->fiber(s), *interval, c);
    fibers[s] = std::make_shared<const TruncatedDGA>(t.dga);
    tensors.emplace(s, std::move(t));
  }
  std::map<Simplex, std::vector<DGMorphism>> res;
  for (const auto& s : e->base().all_simplices()) {
    if (s.size() < 2) continue;
    for (std::size_t i = 0; i < s.size(); ++i) {
      const Simplex t = face(s, i);
      res[s].push_back(tensor_morphism(fibers[s], tensors.at(s), fibers[t], tensors.at(t), e->restriction(s, i), id_i));
    }
  }
  CylinderSystem cyl;
  cyl.system = std::make_shared<const FiniteLocalSystem>(e->base(), fibers, std::move(res));
  cyl.inclusion = {e, cyl.system, {}};
  cyl.epsilon0 = {cyl.system, e, {}};
  cyl.epsilon1 = {cyl.system, e, {}};
  const auto& unit = interval->unit();
  for (const auto& s : e->base().all_simplices()) {
    const auto& f = e->fiber(s);
    const auto& t = tensors.at(s);
    std::vector<QMatrix> inc, ev0, ev1;
    for (int k = 0; k <= c; ++k) {
      QMatrix mi(fibers[s]->dim(k), f->dim(k));
      QMatrix m0(f->dim(k), fibers[s]->dim(k)), m1(f->dim(k), fibers[s]->dim(k));
      const auto& e0 = face_restriction_matrix(1, 1, 0, weight);  // value at vertex 0
      const auto& e1 = face_restriction_matrix(1, 0, 0, weight);  // value at vertex 1
      for (std::size_t a = 0; a < f->dim(k); ++a) {
        for (std::size_t y = 0; y < interval->dim(0); ++y) {
          if (sgn(unit[y]) != 0) mi.add(t.index(k, a, 0, y), a, unit[y]);
          const Rational v0 = e0.at(0, y), v1 = e1.at(0, y);
          if (sgn(v0) != 0) m0.add(a, t.index(k, a, 0, y), v0);
          if (sgn(v1) != 0) m1.add(a, t.index(k, a, 0, y), v1);
        }
      }
      inc.push_back(std::move(mi));
      ev0.push_back(std::move(m0));
      ev1.push_back(std::move(m1));
    }
    cyl.inclusion.maps.emplace(s, DGMorphism(f, fibers[s], std::move(inc)));
    cyl.epsilon0.maps.emplace(s, DGMorphism(fibers[s], f, std::move(ev0)));
    cyl.epsilon1.maps.emplace(s, DGMorphism(fibers[s], f, std::move(ev1)));
  }
  return cyl;
}

// ---- Predicates ---------------------------------------------------------

LocalConstancyResult is_locally_constant(const FiniteLocalSystem& e, int upto) {
  for (const auto& s : e.base().all_simplices()) {
    if (s.size() < 2) continue;
    for (std::size_t i = 0; i < s.size(); ++i) {
      const auto q = is_quasi_iso(e.restriction(s, i), upto);
      if (!q.ok) return {false, std::make_pair(s, face(s, i)), q.first_failing_degree};
    }
  }
  return {};
}

ExtendabilityResult is_extendable(const FiniteLocalSystem& e) {
  const int c = e.cutoff();
  for (const auto& s : e.base().all_simplices()) {
    if (s.size() < 2) continue;
    const auto faces = proper_faces(s);
    std::vector<DGMorphism> res;
    for (const auto& t : faces) res.push_back(e.restriction(s, t));
    for (int k = 0; k <= c; ++k) {
      std::map<Simplex, std::size_t> offsets;
      std::size_t ambient = 0;
      for (const auto& t : faces) {
        offsets[t] = ambient;
        ambient += e.fiber(t)->dim(k);
      }
      const auto compat = compatibility(e, faces, offsets, ambient, k);
      const std::size_t sections = ambient - rank(compat);
      QMatrix r(0, e.fiber(s)->dim(k));
      for (const auto& m : res) r = r.vstack(m.matrix(k));
      if (rank(r) != sections) return {false, s, k};
    }
  }
  return {};
}

std::vector<std::string> check_a_algebra(const FiniteLocalSystem& e, const std::map<Simplex, DGMorphism>& structure) {
  std::vector<std::string> out;
  DGAPtr a;
  for (const auto& s : e.base().all_simplices()) {
    auto it = structure.find(s);
    if (it == structure.end()) {
      out.push_back("no structure map on " + format_simplex(s));
      continue;
    }
    if (!a) a = it->second.source();
    if (it->second.source() != a) out.push_back(format_simplex(s) + ": structure maps have different sources");
    if (it->second.target() != e.fiber(s)) out.push_back(format_simplex(s) + ": structure map misses the fiber");
    for (const auto& msg : it->second.validate()) out.push_back(format_simplex(s) + ": " + msg);
  }
  if (!out.empty()) return out;
  for (const auto& s : e.base().all_simplices()) {
    if (s.size() < 2) continue;
    for (std::size_t i = 0; i < s.size(); ++i) {
      const auto& r = e.restriction(s, i);
      const auto& ms = structure.at(s);
      const auto& mt = structure.at(face(s, i));
      const int top = std::min({r.top_degree(), ms.top_degree(), mt.top_degree()});
      for (int k = 0; k <= top; ++k) {
        if (!(r.matrix(k) * ms.matrix(k) == mt.matrix(k))) {
          out.push_back(face_name(s, face(s, i)) + ": structure maps do not commute in degree " + std::to_string(k));
          break;
        }
      }
    }
  }
  return out;
}

// ---- Global sections ----------------------------------------------------

QVector GlobalSections::component(int k, const QVector& coords, const Simplex& s) const {
  const QVector amb = ambient(k, coords);
  const auto off = offsets.at(static_cast<std::size_t>(k)).at(s);
  const auto n = fibers.at(s)->dim(k);
  return QVector(amb.begin() + static_cast<std::ptrdiff_t>(off), amb.begin() + static_cast<std::ptrdiff_t>(off + n));
}

std::optional<QVector> GlobalSections::multiply(int i, const QVector& x, int j, const QVector& y) const {
  const int k = i + j;
  if (k >= static_cast<int>(kernels.size())) return std::nullopt;
  QVector out(ambient_dims[static_cast<std::size_t>(k)]);
  for (const auto& s : simplices) {
    auto p = fibers.at(s)->try_multiply(i, component(i, x, s), j, component(j, y, s));
    if (!p) return std::nullopt;
    const auto off = offsets[static_cast<std::size_t>(k)].at(s);
    for (std::size_t r = 0; r < p->size(); ++r) out[off + r] = (*p)[r];
  }
  return kernels[static_cast<std::size_t>(k)].coordinates(out);
}

GlobalSections global_sections(const FiniteLocalSystem& e, int cutoff, bool with_products) {
  if (cutoff > e.cutoff()) throw CutoffTooSmall("global_sections: fibers are truncated below the cutoff", cutoff);
  GlobalSections g;
  g.base = e.base();
  g.simplices = g.base.all_simplices();
  for (const auto& s : g.simplices) g.fibers[s] = e.fiber(s);
  for (int k = 0; k <= cutoff; ++k) {
    std::map<Simplex, std::size_t> off;
    std::size_t amb = 0;
    for (const auto& s : g.simplices) {
      off[s] = amb;
      amb += e.fiber(s)->dim(k);
    }
    g.kernels.push_back(kernel(compatibility(e, g.simplices, off, amb, k)));
    g.offsets.push_back(std::move(off));
    g.ambient_dims.push_back(amb);
  }
  TruncatedDGABuilder b(cutoff);
  for (int k = 0; k <= cutoff; ++k) {
    std::vector<std::string> labels;
    const auto& off = g.offsets[static_cast<std::size_t>(k)];
    for (auto col : g.kernels[static_cast<std::size_t>(k)].free_columns) {
      for (auto it = g.simplices.rbegin(); it != g.simplices.rend(); ++it) {
        const auto o = off.at(*it);
        if (o <= col && col < o + e.fiber(*it)->dim(k)) {
          labels.push_back(format_simplex(*it) + ":" + e.fiber(*it)->labels(k)[col - o]);
          break;
        }
      }
    }
    b.set_basis(k, std::move(labels));
  }
  for (int k = 0; k < cutoff; ++k) {
    const auto& ker = g.kernels[static_cast<std::size_t>(k)];
    std::vector<QVector> cols;
    for (const auto& v : ker.basis) {
      QVector y(g.ambient_dims[static_cast<std::size_t>(k) + 1]);
      for (const auto& s : g.simplices) {
        const auto o = g.offsets[static_cast<std::size_t>(k)].at(s);
        const auto o1 = g.offsets[static_cast<std::size_t>(k) + 1].at(s);
        const auto& dm = e.fiber(s)->differential(k);
        for (std::size_t r = 0; r < dm.rows(); ++r) {
          Rational acc = 0;
          for (const auto& [c, val] : dm.row(r)) acc += val * v[o + c];
          y[o1 + r] = acc;
        }
      }
      cols.push_back(g.kernels[static_cast<std::size_t>(k) + 1].coordinates(y));
    }
    b.set_differential(k, QMatrix::from_columns(cols, g.kernels[static_cast<std::size_t>(k) + 1].dim()));
  }
  {
    QVector one(g.ambient_dims[0]);
    for (const auto& s : g.simplices) {
      const auto& u = e.fiber(s)->unit();
      const auto o = g.offsets[0].at(s);
      for (std::size_t r = 0; r < u.size(); ++r) one[o + r] = u[r];
    }
    b.set_unit(g.kernels[0].coordinates(one));
  }
  if (!with_products) {
    b.disable_products();
  } else {
    b.fill_products([&](int i, std::size_t x, int j, std::size_t y) -> std::optional<SparseVector> {
      auto p = g.multiply(i, unit_vector(g.kernels[static_cast<std::size_t>(i)].dim(), x), j,
                          unit_vector(g.kernels[static_cast<std::size_t>(j)].dim(), y));
      if (!p) return std::nullopt;
      return to_sparse(*p);
    });
  }
  g.dga = std::make_shared<const TruncatedDGA>(b.build());
  return g;
}

// ---- Pullback and fiber products ----------------------------------------

namespace {

Simplex vertex_image(const SimplicialComplexK& k, const Simplex& s, const std::map<int, int>& u) {
  Simplex out;
  for (int v : s) {
    auto it = u.find(v);
    if (it == u.end()) throw InputError("pullback: vertex " + std::to_string(v) + " has no image");
    if (!out.empty() && it->second < out.back()) throw InputError("pullback: map is not order preserving on " + format_simplex(s));
    if (out.empty() || it->second != out.back()) out.push_back(it->second);
  }
  if (!k.contains(out)) throw InputError("pullback: image of " + format_simplex(s) + " is not a simplex");
  return out;
}

}  // namespace

SystemMorphism pullback(const SystemMorphism& m, SystemPtr source, SystemPtr target, const std::map<int, int>& u) {
  SystemMorphism out{source, target, {}};
  for (const auto& s : source->base().all_simplices()) {
    out.maps.emplace(s, m.at(vertex_image(m.source->base(), s, u)));
  }
  return out;
}

SystemPtr pullback(SystemPtr e, const SimplicialComplexK& l, const std::map<int, int>& u) {
  auto image = [&](const Simplex& s) { return vertex_image(e->base(), s, u); };
  std::map<Simplex, DGAPtr> fibers;
  std::map<Simplex, std::vector<DGMorphism>> res;
  for (const auto& s : l.all_simplices()) {
    const Simplex rho = image(s);
    fibers[s] = e->fiber(rho);
    if (s.size() < 2) continue;
    auto& v = res[s];
    for (std::size_t i = 0; i < s.size(); ++i) {
      const Simplex r2 = image(face(s, i));
      if (r2 == rho) {
        v.push_back(DGMorphism::identity(e->fiber(rho)));
      } else {
        std::size_t p = 0;
        while (p < r2.size() && r2[p] == rho[p]) ++p;
        v.push_back(e->restriction(rho, p));
      }
    }
  }
  return std::make_shared<const FiniteLocalSystem>(l, std::move(fibers), std::move(res));
}

FiberProductSystem fiber_product_system(const SystemMorphism& f, const SystemMorphism& g, int upto) {
  if (!f.target || f.target != g.target) throw InputError("fiber_product_system: legs have different targets");
  if (!(f.source->base() == f.target->base()) || !(g.source->base() == f.target->base())) {
    throw InputError("fiber_product_system: systems live over different bases");
  }
  const auto& K = f.target->base();
  FiberProductSystem out;
  for (const auto& s : K.all_simplices()) {
    const auto& fs = f.at(s);
    for (int k = 0; k <= upto + 1 && k <= fs.top_degree(); ++k) {
      if (rank(fs.matrix(k)) != fs.target()->dim(k)) {
        throw PreconditionError("fiber_product_system: f is not surjective on " + format_simplex(s) + " in degree " +
                                std::to_string(k));
      }
    }
    out.pieces.emplace(s, fiber_product(fs, g.at(s), upto));
  }
  std::map<Simplex, DGAPtr> fibers;
  for (const auto& [s, p] : out.pieces) fibers[s] = p.carrier;
  std::map<Simplex, std::vector<DGMorphism>> res;
  for (const auto& s : K.all_simplices()) {
    if (s.size() < 2) continue;
    const auto& ps = out.pieces.at(s);
    for (std::size_t i = 0; i < s.size(); ++i) {
      const auto& pt = out.pieces.at(face(s, i));
      const auto& ra = f.source->restriction(s, i);
      const auto& rb = g.source->restriction(s, i);
      std::vector<QMatrix> maps;
      for (int k = 0; k <= upto + 1; ++k) {
        const auto& ker = ps.kernels[static_cast<std::size_t>(k)];
        const std::size_t da = ps.a()->dim(k);
        std::vector<QVector> cols;
        for (const auto& v : ker.basis) {
          const QVector a(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(da));
          const QVector b(v.begin() + static_cast<std::ptrdiff_t>(da), v.end());
          cols.push_back(pt.coordinates(k, ra.apply(k, a), rb.apply(k, b)));
        }
        maps.push_back(QMatrix::from_columns(cols, pt.carrier->dim(k)));
      }
      res[s].push_back(DGMorphism(ps.carrier, pt.carrier, std::move(maps)));
    }
  }
  out.system = std::make_shared<const FiniteLocalSystem>(K, std::move(fibers), std::move(res));
  out.pr1 = {out.system, f.source, {}};
  out.pr2 = {out.system, g.source, {}};
  for (const auto& [s, p] : out.pieces) {
    out.pr1.maps.emplace(s, p.pr_a);
    out.pr2.maps.emplace(s, p.pr_b);
  }
  return out;
}

SystemMorphism fiber_product_morphism(const FiberProductSystem& src, const FiberProductSystem& dst,
                                      const SystemMorphism& a, const SystemMorphism& b) {
  SystemMorphism m{src.system, dst.system, {}};
  for (const auto& [s, ps] : src.pieces) {
    const auto& pd = dst.pieces.at(s);
    const int top = std::min(ps.carrier->cutoff(), pd.carrier->cutoff());
    std::vector<QMatrix> maps;
    for (int k = 0; k <= top; ++k) {
      const auto& ker = ps.kernels[static_cast<std::size_t>(k)];
      const std::size_t da = ps.a()->dim(k);
      std::vector<QVector> cols;
      for (const auto& v : ker.basis) {
        const QVector x(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(da));
        const QVector y(v.begin() + static_cast<std::ptrdiff_t>(da), v.end());
        cols.push_back(pd.coordinates(k, a.at(s).apply(k, x), b.at(s).apply(k, y)));
      }
      maps.push_back(QMatrix::from_columns(cols, pd.carrier->dim(k)));
    }
    m.maps.emplace(s, DGMorphism(ps.carrier, pd.carrier, std::move(maps)));
  }
  return m;
}

// ---- Cohomology with local coefficients ---------------------------------

std::vector<std::string> LocalCoefficients::check_cocycle() const {
  std::vector<std::string> out;
  for (const auto& t : base.simplices(2)) {
    const auto& ab = edge_maps.at({t[0], t[1]});
    const auto& bc = edge_maps.at({t[1], t[2]});
    const auto& ac = edge_maps.at({t[0], t[2]});
    for (int q = 0; q <= upto; ++q) {
      const auto iq = static_cast<std::size_t>(q);
      if (!(ab[iq] * bc[iq] == ac[iq])) out.push_back(format_simplex(t) + ": cocycle fails in degree " + std::to_string(q));
    }
  }
  return out;
}

LocalCoefficients cohomology_local_system(const FiniteLocalSystem& e, int upto) {
  if (const auto lc = is_locally_constant(e, upto); !lc) {
    throw PreconditionError("cohomology_local_system: restriction " + face_name(lc.failing_face->first, lc.failing_face->second) +
                            " is not a quasi-isomorphism in degree " + std::to_string(*lc.degree));
  }
  LocalCoefficients c;
  c.base = e.base();
  c.upto = upto;
  std::map<int, GradedCohomology> hv;
  for (const auto& v : c.base.simplices(0)) {
    hv.emplace(v[0], cohomology(*e.fiber(v), upto));
    c.dims[v[0]] = hv.at(v[0]).dims();
  }
  for (const auto& edge : c.base.simplices(1)) {
    const auto he = cohomology(*e.fiber(edge), upto);
    const auto to_u = induced_map(e.restriction(edge, 1), he, hv.at(edge[0]));
    const auto to_v = induced_map(e.restriction(edge, 0), he, hv.at(edge[1]));
    auto& maps = c.edge_maps[{edge[0], edge[1]}];
    for (int q = 0; q <= upto; ++q) {
      const auto inv = inverse(to_v[static_cast<std::size_t>(q)]);
      if (!inv) throw PreconditionError("cohomology_local_system: edge map is not invertible");
      maps.push_back(to_u[static_cast<std::size_t>(q)] * *inv);
    }
  }
  return c;
}

TwistedCochains twisted_cochains(const LocalCoefficients& c, int q) {
  if (q < 0 || q > c.upto) throw InputError("twisted_cochains: degree outside the coefficient range");
  const auto iq = static_cast<std::size_t>(q);
  TwistedCochains t;
  const int top = c.base.dim();
  for (int p = 0; p <= top; ++p) {
    std::map<Simplex, std::size_t> off;
    std::size_t n = 0;
    for (const auto& s : c.base.simplices(p)) {
      off[s] = n;
      n += c.dims.at(s[0])[iq];
    }
    t.offsets.push_back(std::move(off));
    t.dims.push_back(n);
  }
  for (int p = 0; p < top; ++p) {
    QMatrix m(t.dims[static_cast<std::size_t>(p) + 1], t.dims[static_cast<std::size_t>(p)]);
    for (const auto& s : c.base.simplices(p + 1)) {
      const auto row0 = t.offsets[static_cast<std::size_t>(p) + 1].at(s);
      for (std::size_t i = 0; i < s.size(); ++i) {
        const Simplex f = face(s, i);
        const auto col0 = t.offsets[static_cast<std::size_t>(p)].at(f);
        if (i == 0) {
          const auto& mv = c.edge_maps.at({s[0], s[1]})[iq];
          for (std::size_t r = 0; r < mv.rows(); ++r)
            for (const auto& [cc, v] : mv.row(r)) m.add(row0 + r, col0 + cc, v);
        } else {
          const Rational sign = i % 2 == 0 ? 1 : -1;
          for (std::size_t r = 0; r < c.dims.at(s[0])[iq]; ++r) m.add(row0 + r, col0 + r, sign);
        }
      }
    }
    t.coboundary.push_back(std::move(m));
  }
  return t;
}

std::vector<std::vector<std::size_t>> h_local_coefficients(const LocalCoefficients& c, int p_max, int q_max) {
  if (q_max > c.upto) throw InputError("h_local_coefficients: q_max exceeds the coefficient range");
  if (const auto bad = c.check_cocycle(); !bad.empty()) throw InputError("h_local_coefficients: " + bad.front());
  std::vector<std::vector<std::size_t>> out(static_cast<std::size_t>(p_max) + 1,
                                            std::vector<std::size_t>(static_cast<std::size_t>(q_max) + 1, 0));
  for (int q = 0; q <= q_max; ++q) {
    const auto t = twisted_cochains(c, q);
    const int top = static_cast<int>(t.dims.size()) - 1;
    std::vector<std::size_t> ranks(t.coboundary.size());
    for (std::size_t p = 0; p < t.coboundary.size(); ++p) ranks[p] = rank(t.coboundary[p]);
    for (int p = 0; p <= std::min(p_max, top); ++p) {
      const auto ip = static_cast<std::size_t>(p);
      std::size_t h = t.dims[ip];
      if (ip < ranks.size()) h -= ranks[ip];
      if (p > 0) h -= ranks[ip - 1];
      out[ip][static_cast<std::size_t>(q)] = h;
    }
  }
  return out;
}

}  // namespace cdgakit
