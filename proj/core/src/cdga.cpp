#include "cdgakit/cdga.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace cdgakit {

FreeCDGA::FreeCDGA(FreeGCA algebra, std::vector<Element> differential)
    : alg_(std::move(algebra)), d_(std::move(differential)) {
  if (d_.empty()) d_.resize(alg_.size());
  if (d_.size() != alg_.size()) throw InputError("differential must be given for every generator");
  for (std::size_t i = 0; i < d_.size(); ++i) {
    const auto& g = alg_.generator(i);
    for (const auto& [m, c] : d_[i].terms()) {
      if (alg_.degree(m) != g.degree + 1) {
        throw InputError("d(" + g.name + ") = " + alg_.format(d_[i]) + " is not of degree " +
                         std::to_string(g.degree + 1));
      }
    }
  }
}

FreeCDGA FreeCDGA::from_strings(std::vector<GeneratorSpec> generators,
                                const std::vector<std::pair<std::string, std::string>>& differential) {
  FreeGCA alg(std::move(generators));
  std::vector<Element> d(alg.size());
  for (const auto& [name, expr] : differential) d[alg.index_of(name)] = alg.parse(expr);
  return FreeCDGA(std::move(alg), std::move(d));
}

Element FreeCDGA::d(const Element& x) const { return apply_derivation(alg_, d_, 1, x); }

std::optional<DSquaredFailure> check_d_squared(const FreeCDGA& f) {
  for (std::size_t i = 0; i < f.algebra().size(); ++i) {
    Element r = f.d(f.d_of_generator(i));
    if (!r.is_zero()) return DSquaredFailure{i, std::move(r)};
  }
  return std::nullopt;
}

ProductTable::ProductTable(std::size_t dim_i, std::size_t dim_j, std::size_t dim_target)
    : dim_i_(dim_i), dim_j_(dim_j), dim_target_(dim_target), defined_(dim_i * dim_j, 0),
      values_(dim_i * dim_j) {}

void ProductTable::set(std::size_t a, std::size_t b, SparseVector v) {
  for (const auto& [idx, c] : v) {
    if (idx >= dim_target_) throw InputError("product value index out of range");
  }
  const std::size_t pos = a * dim_j_ + b;
  defined_.at(pos) = 1;
  values_.at(pos) = std::move(v);
}

std::size_t ProductTable::undefined_count() const {
  return static_cast<std::size_t>(std::count(defined_.begin(), defined_.end(), 0));
}

TruncatedDGA::TruncatedDGA(Parts parts) : parts_(std::move(parts)) {
  const auto n = static_cast<std::size_t>(parts_.cutoff);
  if (parts_.cutoff < 0) throw InputError("negative cutoff");
  if (parts_.labels.size() != n + 1) throw InputError("TruncatedDGA: need a basis for each degree 0..cutoff");
  if (parts_.differential.size() != n) throw InputError("TruncatedDGA: need a differential for each degree below the cutoff");
  for (std::size_t k = 0; k < n; ++k) {
    const auto& m = parts_.differential[k];
    if (m.rows() != parts_.labels[k + 1].size() || m.cols() != parts_.labels[k].size()) {
      throw InputError("TruncatedDGA: differential in degree " + std::to_string(k) + " has wrong shape");
    }
  }
  if (parts_.unit.size() != parts_.labels[0].size() || is_zero(parts_.unit)) {
    throw InputError("TruncatedDGA: unit must be a nonzero degree-0 vector");
  }
  if (parts_.has_products) {
    if (parts_.products.size() != n + 1) throw InputError("TruncatedDGA: product tables missing");
    for (std::size_t i = 0; i <= n; ++i) {
      if (parts_.products[i].size() != n + 1 - i) throw InputError("TruncatedDGA: product tables missing");
      for (std::size_t j = 0; i + j <= n; ++j) {
        const auto& t = parts_.products[i][j];
        if (t.dim_i() != parts_.labels[i].size() || t.dim_j() != parts_.labels[j].size()) {
          throw InputError("TruncatedDGA: product table has wrong shape");
        }
      }
    }
  }
}

std::size_t TruncatedDGA::dim(int k) const {
  if (k < 0 || k > parts_.cutoff) throw InputError("degree " + std::to_string(k) + " outside 0..cutoff");
  return parts_.labels[static_cast<std::size_t>(k)].size();
}

std::size_t TruncatedDGA::total_dim() const {
  std::size_t n = 0;
  for (const auto& l : parts_.labels) n += l.size();
  return n;
}

const QMatrix& TruncatedDGA::differential(int k) const {
  if (k < 0) throw InputError("negative degree");
  if (k >= parts_.cutoff) {
    throw CutoffTooSmall("differential out of degree " + std::to_string(k) + " is not in the truncated model", k + 1);
  }
  return parts_.differential[static_cast<std::size_t>(k)];
}

const ProductTable& TruncatedDGA::product_table(int i, int j) const {
  if (!parts_.has_products) throw InputError("this truncated DGA was built without product tables");
  if (i < 0 || j < 0) throw InputError("negative degree");
  if (i + j > parts_.cutoff) {
    throw CutoffTooSmall("product of degrees " + std::to_string(i) + " and " + std::to_string(j), i + j);
  }
  return parts_.products[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
}

std::optional<QVector> TruncatedDGA::try_multiply(int i, const QVector& x, int j, const QVector& y) const {
  if (x.size() != dim(i) || y.size() != dim(j)) throw InputError("multiply: vector length mismatch");
  if (i + j > parts_.cutoff || !parts_.has_products) return std::nullopt;
  const auto& t = product_table(i, j);
  QVector out(dim(i + j));
  for (std::size_t a = 0; a < x.size(); ++a) {
    if (sgn(x[a]) == 0) continue;
    for (std::size_t b = 0; b < y.size(); ++b) {
      if (sgn(y[b]) == 0) continue;
      if (!t.defined(a, b)) return std::nullopt;
      const Rational c = x[a] * y[b];
      for (const auto& [idx, v] : t.value(a, b)) out[idx] += c * v;
    }
  }
  return out;
}

QVector TruncatedDGA::multiply(int i, const QVector& x, int j, const QVector& y) const {
  auto r = try_multiply(i, x, j, y);
  if (!r) {
    if (!parts_.has_products) throw InputError("this truncated DGA was built without product tables");
    throw CutoffTooSmall("product of degree " + std::to_string(i) + " and " + std::to_string(j) +
                             " elements leaves the truncated model",
                         std::max(i + j, parts_.cutoff + 1));
  }
  return *r;
}

std::optional<QVector> TruncatedDGA::basis_product(int i, std::size_t a, int j, std::size_t b) const {
  if (i + j > parts_.cutoff || !parts_.has_products) return std::nullopt;
  const auto& t = product_table(i, j);
  if (!t.defined(a, b)) return std::nullopt;
  return to_dense(t.value(a, b), dim(i + j));
}

std::string TruncatedDGA::format(int k, const QVector& x) const {
  const auto& lab = labels(k);
  std::string s;
  for (std::size_t a = 0; a < x.size(); ++a) {
    if (sgn(x[a]) == 0) continue;
    if (!s.empty()) s += sgn(x[a]) < 0 ? " - " : " + ";
    else if (sgn(x[a]) < 0) s += "-";
    const Rational mag = abs(x[a]);
    if (mag != 1) s += to_string(mag) + "*";
    s += lab[a];
  }
  return s.empty() ? "0" : s;
}

std::vector<std::string> TruncatedDGA::validate() const {
  std::vector<std::string> bad;
  const int n = parts_.cutoff;
  for (int k = 0; k + 1 < n; ++k) {
    if (!(differential(k + 1) * differential(k)).is_zero()) {
      bad.push_back("d^2 != 0 starting in degree " + std::to_string(k));
    }
  }
  if (n > 0 && !is_zero(d(0, unit()))) bad.push_back("d(1) != 0");
  if (!parts_.has_products) return bad;
  for (int k = 0; k <= n; ++k) {
    for (std::size_t a = 0; a < dim(k); ++a) {
      const auto e = basis_vector(k, a);
      auto left = try_multiply(0, unit(), k, e);
      auto right = try_multiply(k, e, 0, unit());
      if (!left || *left != e || !right || *right != e) {
        bad.push_back("unit law fails on " + labels(k)[a]);
      }
    }
  }
  for (int i = 0; i <= n; ++i) {
    for (int j = 0; i + j <= n; ++j) {
      const int sign = (i * j) % 2 == 0 ? 1 : -1;
      for (std::size_t a = 0; a < dim(i); ++a) {
        for (std::size_t b = 0; b < dim(j); ++b) {
          auto ab = basis_product(i, a, j, b);
          auto ba = basis_product(j, b, i, a);
          if (ab && ba && *ab != Rational(sign) * *ba) {
            bad.push_back("graded commutativity fails on " + labels(i)[a] + ", " + labels(j)[b]);
          }
          if (i + j + 1 > n || !ab) continue;
          const auto ea = basis_vector(i, a);
          const auto eb = basis_vector(j, b);
          auto t1 = try_multiply(i + 1, d(i, ea), j, eb);
          auto t2 = try_multiply(i, ea, j + 1, d(j, eb));
          if (!t1 || !t2) continue;
          QVector rhs = *t1;
          axpy(rhs, i % 2 == 0 ? 1 : -1, *t2);
          if (d(i + j, *ab) != rhs) {
            bad.push_back("Leibniz rule fails on " + labels(i)[a] + ", " + labels(j)[b]);
          }
        }
      }
    }
  }
  return bad;
}

std::vector<std::string> TruncatedDGA::check_associativity(std::size_t budget) const {
  std::vector<std::string> bad;
  if (!parts_.has_products) return bad;
  const int n = parts_.cutoff;
  struct Triple {
    int i, j, k;
    std::size_t a, b, c;
  };
  std::vector<Triple> triples;
  for (int i = 0; i <= n; ++i) {
    for (int j = 0; i + j <= n; ++j) {
      for (int k = 0; i + j + k <= n; ++k) {
        for (std::size_t a = 0; a < dim(i); ++a)
          for (std::size_t b = 0; b < dim(j); ++b)
            for (std::size_t c = 0; c < dim(k); ++c) triples.push_back({i, j, k, a, b, c});
      }
    }
  }
  std::size_t stride = 1;
  if (budget > 0 && triples.size() > budget) stride = triples.size() / budget;
  for (std::size_t t = 0; t < triples.size(); t += stride) {
    const auto& [i, j, k, a, b, c] = triples[t];
    auto ab = basis_product(i, a, j, b);
    auto bc = basis_product(j, b, k, c);
    if (!ab || !bc) continue;
    auto l = try_multiply(i + j, *ab, k, basis_vector(k, c));
    auto r = try_multiply(i, basis_vector(i, a), j + k, *bc);
    if (l && r && *l != *r) {
      bad.push_back("associativity fails on " + labels(i)[a] + ", " + labels(j)[b] + ", " + labels(k)[c]);
    }
  }
  return bad;
}

TruncatedDGABuilder::TruncatedDGABuilder(int cutoff) {
  if (cutoff < 0) throw InputError("negative cutoff");
  parts_.cutoff = cutoff;
  parts_.labels.resize(static_cast<std::size_t>(cutoff) + 1);
  parts_.differential.resize(static_cast<std::size_t>(cutoff));
}

void TruncatedDGABuilder::set_basis(int k, std::vector<std::string> labels) {
  parts_.labels.at(static_cast<std::size_t>(k)) = std::move(labels);
  tables_ready_ = false;
}

void TruncatedDGABuilder::set_differential(int k, QMatrix m) {
  parts_.differential.at(static_cast<std::size_t>(k)) = std::move(m);
}

void TruncatedDGABuilder::set_unit(QVector unit) { parts_.unit = std::move(unit); }

void TruncatedDGABuilder::disable_products() {
  parts_.has_products = false;
  parts_.products.clear();
  tables_ready_ = true;
}

void TruncatedDGABuilder::ensure_tables() {
  if (tables_ready_) return;
  const auto n = static_cast<std::size_t>(parts_.cutoff);
  parts_.products.assign(n + 1, {});
  for (std::size_t i = 0; i <= n; ++i) {
    for (std::size_t j = 0; i + j <= n; ++j) {
      parts_.products[i].emplace_back(parts_.labels[i].size(), parts_.labels[j].size(),
                                      parts_.labels[i + j].size());
    }
  }
  tables_ready_ = true;
}

void TruncatedDGABuilder::fill_products(
    const std::function<std::optional<SparseVector>(int, std::size_t, int, std::size_t)>& fn) {
  ensure_tables();
  const int n = parts_.cutoff;
  for (int i = 0; i <= n; ++i) {
    for (int j = 0; i + j <= n; ++j) {
      auto& t = parts_.products[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
      for (std::size_t a = 0; a < t.dim_i(); ++a) {
        for (std::size_t b = 0; b < t.dim_j(); ++b) {
          if (auto v = fn(i, a, j, b)) t.set(a, b, std::move(*v));
        }
      }
    }
  }
}

void TruncatedDGABuilder::set_product(int i, std::size_t a, int j, std::size_t b, SparseVector value) {
  ensure_tables();
  parts_.products.at(static_cast<std::size_t>(i)).at(static_cast<std::size_t>(j)).set(a, b, std::move(value));
}

TruncatedDGA TruncatedDGABuilder::build() {
  if (parts_.has_products) ensure_tables();
  for (std::size_t k = 0; k < parts_.differential.size(); ++k) {
    auto& m = parts_.differential[k];
    if (m.rows() == 0 && m.cols() == 0) m = QMatrix(parts_.labels[k + 1].size(), parts_.labels[k].size());
  }
  return TruncatedDGA(parts_);
}

namespace {

bool divisible_by(const Monomial& m, const Monomial& q) {
  for (std::size_t i = 0; i < m.exponents.size(); ++i) {
    if (m.exponents[i] < q.exponents[i]) return false;
  }
  return true;
}

TruncatedDGA build_from_monomials(const FreeCDGA& f, int cutoff,
                                  const std::function<bool(const Monomial&)>& keep) {
  const auto& alg = f.algebra();
  TruncatedDGABuilder b(cutoff);
  std::vector<std::vector<Monomial>> bases(static_cast<std::size_t>(cutoff) + 1);
  std::vector<std::map<Monomial, std::size_t>> index(bases.size());
  for (int k = 0; k <= cutoff; ++k) {
    std::vector<std::string> labels;
    for (auto& m : alg.basis_in_degree(k)) {
      if (!keep(m)) continue;
      index[static_cast<std::size_t>(k)][m] = bases[static_cast<std::size_t>(k)].size();
      labels.push_back(alg.format(m));
      bases[static_cast<std::size_t>(k)].push_back(std::move(m));
    }
    b.set_basis(k, std::move(labels));
  }
  for (int k = 0; k < cutoff; ++k) {
    const auto& src = bases[static_cast<std::size_t>(k)];
    QMatrix m(bases[static_cast<std::size_t>(k) + 1].size(), src.size());
    for (std::size_t c = 0; c < src.size(); ++c) {
      const Element dm = f.d(Element(src[c], 1));
      for (const auto& [mon, coef] : dm.terms()) {
        auto it = index[static_cast<std::size_t>(k) + 1].find(mon);
        if (it != index[static_cast<std::size_t>(k) + 1].end()) m.add(it->second, c, coef);
      }
    }
    b.set_differential(k, std::move(m));
  }
  QVector unit(bases[0].size());
  unit.at(0) = 1;
  b.set_unit(std::move(unit));
  b.fill_products([&](int i, std::size_t a, int j, std::size_t c) -> std::optional<SparseVector> {
    auto [sign, m] = alg.multiply(bases[static_cast<std::size_t>(i)][a], bases[static_cast<std::size_t>(j)][c]);
    if (sign == 0) return SparseVector{};
    auto it = index[static_cast<std::size_t>(i + j)].find(m);
    if (it == index[static_cast<std::size_t>(i + j)].end()) return SparseVector{};
    return SparseVector{{it->second, Rational(sign)}};
  });
  return b.build();
}

}  // namespace

TruncatedDGA truncate(const FreeCDGA& f, int cutoff) {
  if (cutoff < 0) throw InputError("negative cutoff");
  return build_from_monomials(f, cutoff, [](const Monomial&) { return true; });
}

TruncatedDGA monomial_quotient(const FreeCDGA& f, const std::vector<Monomial>& killed, int cutoff) {
  if (cutoff < 0) throw InputError("negative cutoff");
  const auto& alg = f.algebra();
  auto in_ideal = [&](const Monomial& m) {
    return std::any_of(killed.begin(), killed.end(), [&](const Monomial& q) { return divisible_by(m, q); });
  };
  for (const auto& q : killed) {
    if (q.exponents.size() != alg.size()) throw InputError("killed monomial has wrong length");
    const Element dq = f.d(Element(q, 1));
    for (const auto& [m, c] : dq.terms()) {
      if (!in_ideal(m)) {
        throw InputError("monomial ideal is not stable under d: d(" + alg.format(q) + ") has term " + alg.format(m));
      }
    }
  }
  return build_from_monomials(f, cutoff, [&](const Monomial& m) { return !in_ideal(m); });
}

TruncatedDGA point_dga(int cutoff) {
  TruncatedDGABuilder b(cutoff);
  b.set_basis(0, {"1"});
  for (int k = 1; k <= cutoff; ++k) b.set_basis(k, {});
  b.set_unit({Rational(1)});
  b.fill_products([](int i, std::size_t, int j, std::size_t) -> std::optional<SparseVector> {
    if (i == 0 && j == 0) return SparseVector{{0, Rational(1)}};
    return SparseVector{};
  });
  return b.build();
}

TruncatedDGA direct_product(const TruncatedDGA& a, const TruncatedDGA& b) {
  const int n = std::min(a.cutoff(), b.cutoff());
  TruncatedDGABuilder bld(n);
  for (int k = 0; k <= n; ++k) {
    std::vector<std::string> labels;
    for (const auto& l : a.labels(k)) labels.push_back("(" + l + ",0)");
    for (const auto& l : b.labels(k)) labels.push_back("(0," + l + ")");
    bld.set_basis(k, std::move(labels));
  }
  for (int k = 0; k < n; ++k) {
    QMatrix m(a.dim(k + 1) + b.dim(k + 1), a.dim(k) + b.dim(k));
    const auto& da = a.differential(k);
    const auto& db = b.differential(k);
    for (std::size_t r = 0; r < da.rows(); ++r)
      for (const auto& [c, v] : da.row(r)) m.set(r, c, v);
    for (std::size_t r = 0; r < db.rows(); ++r)
      for (const auto& [c, v] : db.row(r)) m.set(a.dim(k + 1) + r, a.dim(k) + c, v);
    bld.set_differential(k, std::move(m));
  }
  QVector unit = a.unit();
  unit.insert(unit.end(), b.unit().begin(), b.unit().end());
  bld.set_unit(std::move(unit));
  if (!a.has_products() || !b.has_products()) {
    bld.disable_products();
    return bld.build();
  }
  bld.fill_products([&](int i, std::size_t x, int j, std::size_t y) -> std::optional<SparseVector> {
    const bool xa = x < a.dim(i);
    const bool ya = y < b.dim(j) + a.dim(j) && y < a.dim(j);
    if (xa != ya) return SparseVector{};
    if (xa) {
      auto p = a.basis_product(i, x, j, y);
      if (!p) return std::nullopt;
      return to_sparse(*p);
    }
    auto p = b.basis_product(i, x - a.dim(i), j, y - a.dim(j));
    if (!p) return std::nullopt;
    SparseVector v;
    for (auto& [idx, c] : to_sparse(*p)) v.emplace_back(idx + a.dim(i + j), c);
    return v;
  });
  return bld.build();
}

std::size_t TensorDGA::index(int i, std::size_t a, int j, std::size_t b) const {
  const auto k = static_cast<std::size_t>(i + j);
  return offsets.at(k).at(static_cast<std::size_t>(i)) + a * dims_b.at(static_cast<std::size_t>(j)) + b;
}

TensorDGA tensor_product(const TruncatedDGA& a, const TruncatedDGA& b, int cutoff) {
  if (cutoff > a.cutoff() || cutoff > b.cutoff()) {
    throw CutoffTooSmall("tensor product cutoff exceeds a factor's cutoff", cutoff);
  }
  TensorDGA t;
  const auto n = static_cast<std::size_t>(cutoff);
  t.dims_b.resize(n + 1);
  for (std::size_t j = 0; j <= n; ++j) t.dims_b[j] = b.dim(static_cast<int>(j));
  t.offsets.assign(n + 1, {});
  TruncatedDGABuilder bld(cutoff);
  for (int k = 0; k <= cutoff; ++k) {
    std::vector<std::string> labels;
    auto& off = t.offsets[static_cast<std::size_t>(k)];
    for (int i = 0; i <= k; ++i) {
      off.push_back(labels.size());
      const int j = k - i;
      for (const auto& la : a.labels(i))
        for (const auto& lb : b.labels(j)) labels.push_back(la + "⊗" + lb);
    }
    bld.set_basis(k, std::move(labels));
  }
  for (int k = 0; k < cutoff; ++k) {
    QMatrix m(bld.dim(k + 1), bld.dim(k));
    for (int i = 0; i <= k; ++i) {
      const int j = k - i;
      const auto& da = a.differential(i);
      const auto& db = b.differential(j);
      const Rational sign = i % 2 == 0 ? 1 : -1;
      for (std::size_t x = 0; x < a.dim(i); ++x) {
        for (std::size_t y = 0; y < b.dim(j); ++y) {
          const auto col = t.index(i, x, j, y);
          for (std::size_t r = 0; r < da.rows(); ++r) {
            const Rational v = da.at(r, x);
            if (sgn(v) != 0) m.add(t.index(i + 1, r, j, y), col, v);
          }
          for (std::size_t r = 0; r < db.rows(); ++r) {
            const Rational v = db.at(r, y);
            if (sgn(v) != 0) m.add(t.index(i, x, j + 1, r), col, sign * v);
          }
        }
      }
    }
    bld.set_differential(k, std::move(m));
  }
  QVector unit(bld.dim(0));
  for (std::size_t x = 0; x < a.dim(0); ++x)
    for (std::size_t y = 0; y < b.dim(0); ++y) unit[t.index(0, x, 0, y)] = a.unit()[x] * b.unit()[y];
  bld.set_unit(std::move(unit));
  if (!a.has_products() || !b.has_products()) {
    bld.disable_products();
    t.dga = bld.build();
    return t;
  }
  // Locate (i, x, j, y) from a flat index of degree k.
  auto split = [&](int k, std::size_t flat) {
    const auto& off = t.offsets[static_cast<std::size_t>(k)];
    int i = static_cast<int>(std::upper_bound(off.begin(), off.end(), flat) - off.begin()) - 1;
    // Skip empty blocks that share an offset.
    while (i + 1 < static_cast<int>(off.size()) && off[static_cast<std::size_t>(i) + 1] == off[static_cast<std::size_t>(i)] &&
           off[static_cast<std::size_t>(i)] <= flat) {
      ++i;
    }
    while (i > 0 && off[static_cast<std::size_t>(i)] > flat) --i;
    const std::size_t rel = flat - off[static_cast<std::size_t>(i)];
    const std::size_t db = t.dims_b[static_cast<std::size_t>(k - i)];
    return std::tuple<int, std::size_t, std::size_t>{i, rel / db, rel % db};
  };
  bld.fill_products([&](int k1, std::size_t p, int k2, std::size_t q) -> std::optional<SparseVector> {
    auto [i1, x1, y1] = split(k1, p);
    auto [i2, x2, y2] = split(k2, q);
    const int j1 = k1 - i1;
    const int j2 = k2 - i2;
    auto pa = a.basis_product(i1, x1, i2, x2);
    auto pb = b.basis_product(j1, y1, j2, y2);
    if (!pa || !pb) return std::nullopt;
    const Rational sign = (j1 * i2) % 2 == 0 ? 1 : -1;
    SparseVector out;
    for (const auto& [ia, ca] : to_sparse(*pa))
      for (const auto& [ib, cb] : to_sparse(*pb)) out.emplace_back(t.index(i1 + i2, ia, j1 + j2, ib), sign * ca * cb);
    std::sort(out.begin(), out.end(), [](const auto& u, const auto& v) { return u.first < v.first; });
    return out;
  });
  t.dga = bld.build();
  return t;
}

DGMorphism::DGMorphism(DGAPtr source, DGAPtr target, std::vector<QMatrix> maps)
    : source_(std::move(source)), target_(std::move(target)), maps_(std::move(maps)) {
  if (!source_ || !target_) throw InputError("DGMorphism: null algebra");
  const int top = std::min(source_->cutoff(), target_->cutoff());
  if (static_cast<int>(maps_.size()) != top + 1) {
    throw InputError("DGMorphism: need one matrix per degree 0.." + std::to_string(top));
  }
  for (int k = 0; k <= top; ++k) {
    const auto& m = maps_[static_cast<std::size_t>(k)];
    if (m.rows() != target_->dim(k) || m.cols() != source_->dim(k)) {
      throw InputError("DGMorphism: matrix in degree " + std::to_string(k) + " has wrong shape");
    }
  }
}

DGMorphism DGMorphism::identity(DGAPtr a) {
  std::vector<QMatrix> maps;
  for (int k = 0; k <= a->cutoff(); ++k) maps.push_back(QMatrix::identity(a->dim(k)));
  return DGMorphism(a, a, std::move(maps));
}

DGMorphism DGMorphism::augmentation_like(DGAPtr source, DGAPtr target, QMatrix degree_zero) {
  const int top = std::min(source->cutoff(), target->cutoff());
  std::vector<QMatrix> maps;
  maps.push_back(std::move(degree_zero));
  for (int k = 1; k <= top; ++k) maps.emplace_back(target->dim(k), source->dim(k));
  return DGMorphism(std::move(source), std::move(target), std::move(maps));
}

const QMatrix& DGMorphism::matrix(int k) const {
  if (k < 0 || k > top_degree()) {
    throw CutoffTooSmall("morphism is not defined in degree " + std::to_string(k), k);
  }
  return maps_[static_cast<std::size_t>(k)];
}

std::vector<std::string> DGMorphism::validate() const {
  std::vector<std::string> bad;
  const int top = top_degree();
  for (int k = 0; k < top; ++k) {
    if (matrix(k + 1) * source_->differential(k) != target_->differential(k) * matrix(k)) {
      bad.push_back("does not commute with d in degree " + std::to_string(k));
    }
  }
  if (apply(0, source_->unit()) != target_->unit()) bad.push_back("does not send the unit to the unit");
  if (!source_->has_products() || !target_->has_products()) return bad;
  for (int i = 0; i <= top; ++i) {
    for (int j = 0; i + j <= top; ++j) {
      for (std::size_t a = 0; a < source_->dim(i); ++a) {
        for (std::size_t b = 0; b < source_->dim(j); ++b) {
          auto ab = source_->basis_product(i, a, j, b);
          if (!ab) continue;
          auto rhs = target_->try_multiply(i, matrix(i).column(a), j, matrix(j).column(b));
          if (!rhs) continue;
          if (apply(i + j, *ab) != *rhs) {
            bad.push_back("not multiplicative on " + source_->labels(i)[a] + ", " + source_->labels(j)[b]);
          }
        }
      }
    }
  }
  return bad;
}

DGMorphism compose(const DGMorphism& g, const DGMorphism& f) {
  if (f.target().get() != g.source().get() && !(f.target()->parts().labels == g.source()->parts().labels)) {
    throw InputError("compose: target of f is not the source of g");
  }
  const int top = std::min(g.top_degree(), f.top_degree());
  const int expected = std::min(f.source()->cutoff(), g.target()->cutoff());
  if (top < expected) {
    throw CutoffTooSmall("composite is not defined in all degrees of its endpoints", expected);
  }
  std::vector<QMatrix> maps;
  for (int k = 0; k <= top; ++k) maps.push_back(g.matrix(k) * f.matrix(k));
  return DGMorphism(f.source(), g.target(), std::move(maps));
}

DGMorphism tensor_morphism(DGAPtr source, const TensorDGA& st, DGAPtr target, const TensorDGA& tt,
                           const DGMorphism& f, const DGMorphism& g) {
  const int top = std::min(source->cutoff(), target->cutoff());
  if (f.top_degree() < top || g.top_degree() < top) throw CutoffTooSmall("tensor_morphism: factor map too short", top);
  std::vector<QMatrix> maps;
  for (int k = 0; k <= top; ++k) {
    QMatrix m(target->dim(k), source->dim(k));
    for (int i = 0; i <= k; ++i) {
      const int j = k - i;
      const auto& fi = f.matrix(i);
      const auto& gj = g.matrix(j);
      for (std::size_t r = 0; r < fi.rows(); ++r)
        for (const auto& [x, u] : fi.row(r))
          for (std::size_t s = 0; s < gj.rows(); ++s)
            for (const auto& [y, v] : gj.row(s)) m.add(tt.index(i, r, j, s), st.index(i, x, j, y), u * v);
    }
    maps.push_back(std::move(m));
  }
  return DGMorphism(std::move(source), std::move(target), std::move(maps));
}

}  // namespace cdgakit
