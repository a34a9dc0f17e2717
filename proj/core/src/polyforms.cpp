#include "cdgakit/polyforms.hpp"

#include <algorithm>
#include <bit>
#include <mutex>
#include <random>
#include <sstream>
#include <tuple>

namespace cdgakit {

namespace {

int popcount(unsigned m) { return std::popcount(m); }

/// Sign of dt_S ∧ dt_T (0 if they overlap).
int wedge_sign(unsigned s, unsigned t) {
  if (s & t) return 0;
  int inversions = 0;
  for (unsigned j = 0; j < 32; ++j) {
    if (!(t & (1u << j))) continue;
    inversions += popcount(s >> (j + 1));
  }
  return inversions % 2 == 0 ? 1 : -1;
}

mpz_class factorial(unsigned long n) {
  mpz_class f;
  mpz_fac_ui(f.get_mpz_t(), n);
  return f;
}

}  // namespace

int FormKey::form_degree() const { return popcount(mask); }

int FormKey::poly_degree() const {
  int s = 0;
  for (int e : exponents) s += e;
  return s;
}

std::string format_key(const FormKey& key) {
  std::string s;
  for (std::size_t i = 0; i < key.exponents.size(); ++i) {
    if (key.exponents[i] == 0) continue;
    if (!s.empty()) s += "*";
    s += "t" + std::to_string(i + 1);
    if (key.exponents[i] > 1) s += "^" + std::to_string(key.exponents[i]);
  }
  for (unsigned i = 0; i < 32; ++i) {
    if (!(key.mask & (1u << i))) continue;
    if (!s.empty()) s += "*";
    s += "dt" + std::to_string(i + 1);
  }
  return s.empty() ? "1" : s;
}

PolyForm::PolyForm(int n) : n_(n) {
  if (n < 0 || n > 30) throw InputError("simplex dimension out of range");
}

PolyForm PolyForm::constant(int n, const Rational& c) {
  PolyForm f(n);
  f.add_term(FormKey{std::vector<int>(static_cast<std::size_t>(n), 0), 0}, c);
  return f;
}

PolyForm PolyForm::coordinate(int n, int i) {
  if (i < 0 || i > n) throw InputError("coordinate index out of range");
  if (i > 0) {
    std::vector<int> e(static_cast<std::size_t>(n), 0);
    e[static_cast<std::size_t>(i - 1)] = 1;
    return term(n, std::move(e), 0);
  }
  PolyForm f = constant(n, 1);
  for (int j = 1; j <= n; ++j) f -= coordinate(n, j);
  return f;
}

PolyForm PolyForm::differential(int n, int i) {
  if (i < 0 || i > n) throw InputError("coordinate index out of range");
  if (i > 0) return term(n, std::vector<int>(static_cast<std::size_t>(n), 0), 1u << (i - 1));
  PolyForm f(n);
  for (int j = 1; j <= n; ++j) f -= differential(n, j);
  return f;
}

PolyForm PolyForm::term(int n, std::vector<int> exponents, unsigned mask, const Rational& c) {
  PolyForm f(n);
  if (exponents.size() != static_cast<std::size_t>(n)) throw InputError("exponent vector length mismatch");
  if (n < 32 && (mask >> n) != 0) throw InputError("differential index out of range");
  for (int e : exponents)
    if (e < 0) throw InputError("negative exponent");
  f.add_term(FormKey{std::move(exponents), mask}, c);
  return f;
}

std::optional<int> PolyForm::degree() const {
  if (terms_.empty()) return std::nullopt;
  const int k = terms_.begin()->first.form_degree();
  for (const auto& [key, c] : terms_)
    if (key.form_degree() != k) return std::nullopt;
  return k;
}

int PolyForm::weight() const {
  int w = -1;
  for (const auto& [key, c] : terms_) w = std::max(w, key.weight());
  return w;
}

PolyForm PolyForm::component(int k) const {
  PolyForm out(n_);
  for (const auto& [key, c] : terms_)
    if (key.form_degree() == k) out.terms_.emplace(key, c);
  return out;
}

void PolyForm::add_term(const FormKey& key, const Rational& c) {
  if (sgn(c) == 0) return;
  auto [it, inserted] = terms_.try_emplace(key, c);
  if (!inserted) {
    it->second += c;
    if (sgn(it->second) == 0) terms_.erase(it);
  }
}

void PolyForm::check(const PolyForm& o) const {
  if (o.n_ != n_) throw InputError("forms live on simplices of different dimension");
}

PolyForm& PolyForm::operator+=(const PolyForm& o) {
  check(o);
  for (const auto& [k, c] : o.terms_) add_term(k, c);
  return *this;
}

PolyForm& PolyForm::operator-=(const PolyForm& o) {
  check(o);
  for (const auto& [k, c] : o.terms_) add_term(k, -c);
  return *this;
}

PolyForm& PolyForm::operator*=(const Rational& s) {
  if (sgn(s) == 0) {
    terms_.clear();
    return *this;
  }
  for (auto& [k, c] : terms_) c *= s;
  return *this;
}

std::string PolyForm::format() const {
  if (terms_.empty()) return "0";
  std::string s;
  for (const auto& [key, c] : terms_) {
    if (!s.empty()) s += sgn(c) < 0 ? " - " : " + ";
    else if (sgn(c) < 0) s += "-";
    const Rational mag = abs(c);
    const std::string body = format_key(key);
    if (body == "1") {
      s += to_string(mag);
    } else {
      if (mag != 1) s += to_string(mag) + "*";
      s += body;
    }
  }
  return s;
}

PolyForm d(const PolyForm& w) {
  PolyForm out(w.dim());
  for (const auto& [key, c] : w.terms()) {
    for (int i = 1; i <= w.dim(); ++i) {
      const auto ii = static_cast<std::size_t>(i - 1);
      const unsigned bit = 1u << ii;
      if (key.exponents[ii] == 0 || (key.mask & bit)) continue;
      FormKey k2 = key;
      k2.exponents[ii] -= 1;
      k2.mask |= bit;
      const int sign = popcount(key.mask & (bit - 1)) % 2 == 0 ? 1 : -1;
      out.add_term(k2, Rational(sign * key.exponents[ii]) * c);
    }
  }
  return out;
}

PolyForm wedge(const PolyForm& a, const PolyForm& b) {
  if (a.dim() != b.dim()) throw InputError("wedge of forms on simplices of different dimension");
  PolyForm out(a.dim());
  for (const auto& [ka, ca] : a.terms()) {
    for (const auto& [kb, cb] : b.terms()) {
      const int sign = wedge_sign(ka.mask, kb.mask);
      if (sign == 0) continue;
      FormKey k{ka.exponents, ka.mask | kb.mask};
      for (std::size_t i = 0; i < k.exponents.size(); ++i) k.exponents[i] += kb.exponents[i];
      out.add_term(k, Rational(sign) * ca * cb);
    }
  }
  return out;
}

PolyForm restrict_to_face(const PolyForm& w, const std::vector<std::size_t>& positions) {
  const int n = w.dim();
  if (positions.empty()) throw InputError("face must have at least one vertex");
  for (std::size_t k = 0; k < positions.size(); ++k) {
    if (positions[k] > static_cast<std::size_t>(n) || (k > 0 && positions[k] <= positions[k - 1])) {
      throw InputError("face positions must be increasing and within the simplex");
    }
  }
  const int m = static_cast<int>(positions.size()) - 1;
  std::vector<PolyForm> t_img(static_cast<std::size_t>(n) + 1, PolyForm(m));
  for (std::size_t k = 0; k < positions.size(); ++k) {
    if (positions[k] >= 1) t_img[positions[k]] = PolyForm::coordinate(m, static_cast<int>(k));
  }
  std::vector<PolyForm> dt_img(t_img.size(), PolyForm(m));
  for (std::size_t j = 1; j < t_img.size(); ++j) dt_img[j] = d(t_img[j]);

  std::map<std::pair<std::size_t, int>, PolyForm> powers;
  auto power = [&](std::size_t j, int e) -> const PolyForm& {
    auto it = powers.find({j, e});
    if (it != powers.end()) return it->second;
    PolyForm p = PolyForm::constant(m, 1);
    for (int i = 0; i < e; ++i) p = wedge(p, t_img[j]);
    return powers.emplace(std::make_pair(j, e), std::move(p)).first->second;
  };

  PolyForm out(m);
  for (const auto& [key, c] : w.terms()) {
    PolyForm acc = PolyForm::constant(m, c);
    for (std::size_t j = 1; j <= static_cast<std::size_t>(n) && !acc.is_zero(); ++j) {
      if (key.exponents[j - 1] > 0) acc = wedge(acc, power(j, key.exponents[j - 1]));
    }
    for (std::size_t j = 1; j <= static_cast<std::size_t>(n) && !acc.is_zero(); ++j) {
      if (key.mask & (1u << (j - 1))) acc = wedge(acc, dt_img[j]);
    }
    out += acc;
  }
  return out;
}

PolyForm face_restrict(const PolyForm& w, int i) {
  const int n = w.dim();
  if (n < 1) throw InputError("a point has no proper faces");
  if (i < 0 || i > n) throw InputError("face index out of range");
  std::vector<std::size_t> pos;
  for (int j = 0; j <= n; ++j)
    if (j != i) pos.push_back(static_cast<std::size_t>(j));
  return restrict_to_face(w, pos);
}

Rational integrate(const PolyForm& w) {
  const int n = w.dim();
  const unsigned top = n == 0 ? 0u : (n >= 32 ? ~0u : (1u << n) - 1);
  Rational total = 0;
  for (const auto& [key, c] : w.terms()) {
    if (key.mask != top) throw InputError("integrate needs a form of top degree " + std::to_string(n));
    mpz_class num = 1;
    for (int e : key.exponents) num *= factorial(static_cast<unsigned long>(e));
    Rational v(num, factorial(static_cast<unsigned long>(key.poly_degree() + n)));
    v.canonicalize();
    total += c * v;
  }
  return total;
}

PolyForm contraction(const PolyForm& w) {
  PolyForm out(w.dim());
  for (const auto& [key, c] : w.terms()) {
    const int k = key.form_degree();
    if (k == 0) continue;
    const Rational scale = c / Rational(key.poly_degree() + k);
    int j = 0;
    for (unsigned i = 0; i < 32; ++i) {
      const unsigned bit = 1u << i;
      if (!(key.mask & bit)) continue;
      FormKey k2 = key;
      k2.exponents[i] += 1;
      k2.mask &= ~bit;
      out.add_term(k2, j % 2 == 0 ? scale : Rational(-scale));
      ++j;
    }
  }
  return out;
}

PolyForm evaluate_at_vertex0(const PolyForm& w) {
  Rational v = 0;
  for (const auto& [key, c] : w.terms()) {
    if (key.mask == 0 && key.poly_degree() == 0) v += c;
  }
  return PolyForm::constant(w.dim(), v);
}

PolyForm partial(const PolyForm& f, int i) {
  if (i < 1 || i > f.dim()) throw InputError("partial derivative index out of range");
  PolyForm out(f.dim());
  const auto ii = static_cast<std::size_t>(i - 1);
  for (const auto& [key, c] : f.terms()) {
    if (key.mask != 0 || key.exponents[ii] == 0) continue;
    FormKey k2 = key;
    k2.exponents[ii] -= 1;
    out.add_term(k2, Rational(key.exponents[ii]) * c);
  }
  return out;
}

QVector FormBasis::coordinates(const PolyForm& w) const {
  auto c = try_coordinates(w);
  if (!c) {
    throw InputError("form " + w.format() + " is not in the degree-" + std::to_string(k) + " weight-" +
                     std::to_string(weight) + " basis");
  }
  return *c;
}

std::optional<QVector> FormBasis::try_coordinates(const PolyForm& w) const {
  if (w.dim() != n) throw InputError("form lives on a simplex of another dimension");
  QVector out(keys.size());
  for (const auto& [key, c] : w.terms()) {
    auto it = index.find(key);
    if (it == index.end()) return std::nullopt;
    out[it->second] = c;
  }
  return out;
}

PolyForm FormBasis::form(const QVector& coords) const {
  if (coords.size() != keys.size()) throw InputError("form coordinates have the wrong length");
  PolyForm f(n);
  for (std::size_t i = 0; i < keys.size(); ++i) f.add_term(keys[i], coords[i]);
  return f;
}

namespace {

std::mutex& cache_mutex() {
  static std::mutex m;
  return m;
}

FormBasis make_basis(int n, int k, int weight) {
  FormBasis b;
  b.n = n;
  b.k = k;
  b.weight = weight;
  if (k < 0 || k > n || weight < k) return b;
  const int pdeg = weight - k;
  std::vector<std::vector<int>> exps;
  std::vector<int> e(static_cast<std::size_t>(n), 0);
  auto rec = [&](auto&& self, std::size_t i, int remaining) -> void {
    if (i == e.size()) {
      exps.push_back(e);
      return;
    }
    for (int v = 0; v <= remaining; ++v) {
      e[i] = v;
      self(self, i + 1, remaining - v);
    }
    e[i] = 0;
  };
  rec(rec, 0, pdeg);
  std::sort(exps.begin(), exps.end());
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    if (popcount(mask) != k) continue;
    for (const auto& x : exps) {
      b.index[FormKey{x, mask}] = b.keys.size();
      b.keys.push_back(FormKey{x, mask});
    }
  }
  return b;
}

}  // namespace

const FormBasis& form_basis(int n, int k, int weight) {
  static std::map<std::tuple<int, int, int>, FormBasis> cache;
  std::lock_guard<std::mutex> lock(cache_mutex());
  auto key = std::make_tuple(n, k, weight);
  auto it = cache.find(key);
  if (it == cache.end()) it = cache.emplace(key, make_basis(n, k, weight)).first;
  return it->second;
}

std::vector<std::string> form_labels(int n, int k, int weight) {
  std::vector<std::string> out;
  for (const auto& key : form_basis(n, k, weight).keys) out.push_back(format_key(key));
  return out;
}

const QMatrix& face_restriction_matrix(int n, int i, int k, int weight) {
  static std::map<std::tuple<int, int, int, int>, QMatrix> cache;
  const auto key = std::make_tuple(n, i, k, weight);
  {
    std::lock_guard<std::mutex> lock(cache_mutex());
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
  }
  const auto& src = form_basis(n, k, weight);
  const auto& dst = form_basis(n - 1, k, weight);
  QMatrix m(dst.size(), src.size());
  for (std::size_t c = 0; c < src.size(); ++c) {
    const PolyForm r = face_restrict(PolyForm::term(n, src.keys[c].exponents, src.keys[c].mask), i);
    const auto coords = dst.coordinates(r);
    for (std::size_t r2 = 0; r2 < coords.size(); ++r2)
      if (sgn(coords[r2]) != 0) m.set(r2, c, coords[r2]);
  }
  std::lock_guard<std::mutex> lock(cache_mutex());
  return cache.emplace(key, std::move(m)).first->second;
}

const QMatrix& form_differential_matrix(int n, int k, int weight) {
  static std::map<std::tuple<int, int, int>, QMatrix> cache;
  const auto key = std::make_tuple(n, k, weight);
  {
    std::lock_guard<std::mutex> lock(cache_mutex());
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
  }
  const auto& src = form_basis(n, k, weight);
  const auto& dst = form_basis(n, k + 1, weight);
  QMatrix m(dst.size(), src.size());
  for (std::size_t c = 0; c < src.size(); ++c) {
    const PolyForm r = d(PolyForm::term(n, src.keys[c].exponents, src.keys[c].mask));
    for (const auto& [kk, v] : r.terms()) m.set(dst.index.at(kk), c, v);
  }
  std::lock_guard<std::mutex> lock(cache_mutex());
  return cache.emplace(key, std::move(m)).first->second;
}

namespace {

/// Product of basis keys: nullopt when the weight overflows, sign 0 when the
/// product vanishes.
std::optional<std::pair<int, FormKey>> key_product(const FormKey& a, const FormKey& b, int weight) {
  const int sign = wedge_sign(a.mask, b.mask);
  if (sign == 0) return std::make_pair(0, FormKey{});
  if (a.weight() + b.weight() > weight) return std::nullopt;
  FormKey k{a.exponents, a.mask | b.mask};
  for (std::size_t i = 0; i < k.exponents.size(); ++i) k.exponents[i] += b.exponents[i];
  return std::make_pair(sign, std::move(k));
}

}  // namespace

TruncatedDGA simplex_forms_dga(int n, int weight, int cutoff) {
  if (n < 0 || weight < 0 || cutoff < 0) throw InputError("simplex_forms_dga: negative parameter");
  TruncatedDGABuilder b(cutoff);
  for (int k = 0; k <= cutoff; ++k) b.set_basis(k, form_labels(n, k, weight));
  for (int k = 0; k < cutoff; ++k) b.set_differential(k, form_differential_matrix(n, k, weight));
  b.set_unit(form_basis(n, 0, weight).coordinates(PolyForm::constant(n, 1)));
  b.fill_products([&](int i, std::size_t x, int j, std::size_t y) -> std::optional<SparseVector> {
    const auto& ki = form_basis(n, i, weight).keys[x];
    const auto& kj = form_basis(n, j, weight).keys[y];
    auto p = key_product(ki, kj, weight);
    if (!p) return std::nullopt;
    if (p->first == 0) return SparseVector{};
    return SparseVector{{form_basis(n, i + j, weight).index.at(p->second), Rational(p->first)}};
  });
  return b.build();
}

PolyForm SimplicialForm::on(const Simplex& s) const {
  auto it = forms.find(s);
  if (it != forms.end()) return it->second;
  return PolyForm(static_cast<int>(s.size()) - 1);
}

std::vector<std::pair<Simplex, Simplex>> SimplicialForm::clashes() const {
  std::vector<std::pair<Simplex, Simplex>> out;
  for (const auto& [s, w] : forms) {
    if (!base.contains(s)) throw InputError("form given on " + format_simplex(s) + " outside the complex");
    if (w.dim() != static_cast<int>(s.size()) - 1) {
      throw InputError("form on " + format_simplex(s) + " lives on a simplex of another dimension");
    }
  }
  for (const auto& s : base.all_simplices()) {
    if (s.size() < 2) continue;
    const PolyForm w = on(s);
    for (std::size_t i = 0; i < s.size(); ++i) {
      const Simplex t = face(s, i);
      if (face_restrict(w, static_cast<int>(i)) != on(t)) out.emplace_back(s, t);
    }
  }
  return out;
}

SimplicialForm SimplicialForm::restricted_to(const SimplicialComplexK& sub) const {
  SimplicialForm out{sub, {}};
  for (const auto& [s, w] : forms)
    if (sub.contains(s)) out.forms.emplace(s, w);
  return out;
}

std::map<Simplex, Rational> integration_cochain(const SimplicialForm& w, int k) {
  std::map<Simplex, Rational> out;
  for (const auto& s : w.base.simplices(k)) out[s] = integrate(w.on(s).component(k));
  return out;
}

std::map<Simplex, Rational> coboundary(const SimplicialComplexK& K, const std::map<Simplex, Rational>& c, int k) {
  std::map<Simplex, Rational> out;
  for (const auto& s : K.simplices(k)) {
    Rational v = 0;
    if (k >= 1) {
      for (std::size_t i = 0; i < s.size(); ++i) {
        auto it = c.find(face(s, i));
        if (it != c.end()) v += i % 2 == 0 ? it->second : Rational(-it->second);
      }
    }
    out[s] = v;
  }
  return out;
}

SimplicialForm extend(const SimplicialForm& on_l, const SimplicialComplexK& K) {
  if (!on_l.base.is_subcomplex_of(K)) throw InputError("extend: the family's base is not a subcomplex");
  const auto bad = on_l.clashes();
  if (!bad.empty()) {
    throw InputError("extend: incompatible family on " + format_simplex(bad.front().first) + " and its face " +
                     format_simplex(bad.front().second));
  }
  SimplicialForm out{K, on_l.forms};
  for (const auto& v : K.simplices(0)) {
    if (on_l.base.contains(v)) continue;
    Rational value = 0;
    for (const auto& e : K.simplices(1)) {
      if (!is_face(v, e)) continue;
      const Simplex other = e[0] == v[0] ? Simplex{e[1]} : Simplex{e[0]};
      if (on_l.base.contains(other)) {
        value = integrate(on_l.on(other).component(0));
        break;
      }
    }
    if (sgn(value) != 0) out.forms[v] = PolyForm::constant(0, value);
  }
  for (int n = 1; n <= K.dim(); ++n) {
    for (const auto& s : K.simplices(n)) {
      if (on_l.base.contains(s)) continue;
      PolyForm result(n);
      for (int k = 0; k < n; ++k) {
        std::vector<PolyForm> targets;
        int w = -1;
        for (int i = 0; i <= n; ++i) {
          targets.push_back(out.on(face(s, static_cast<std::size_t>(i))).component(k));
          w = std::max(w, targets.back().weight());
        }
        if (w < 0) continue;
        bool found = false;
        for (int weight = std::max(w, k); weight <= std::max(w, k) + n + 2 && !found; ++weight) {
          const auto& src = form_basis(n, k, weight);
          const auto& dst = form_basis(n - 1, k, weight);
          QMatrix sys(dst.size() * static_cast<std::size_t>(n + 1), src.size());
          QVector rhs;
          for (int i = 0; i <= n; ++i) {
            const auto& r = face_restriction_matrix(n, i, k, weight);
            for (std::size_t row = 0; row < r.rows(); ++row)
              for (const auto& [c, v] : r.row(row)) sys.set(static_cast<std::size_t>(i) * dst.size() + row, c, v);
            auto coords = dst.coordinates(targets[static_cast<std::size_t>(i)]);
            rhs.insert(rhs.end(), coords.begin(), coords.end());
          }
          if (auto x = solve(sys, rhs)) {
            result += src.form(*x);
            found = true;
          }
        }
        if (!found) {
          throw PreconditionError("extend: no extension over " + format_simplex(s) + " within the weight bound");
        }
      }
      if (!result.is_zero()) out.forms[s] = std::move(result);
    }
  }
  return out;
}

QVector FormsDGA::ambient(int k, const SimplicialForm& w) const {
  QVector out(ambient_dims.at(static_cast<std::size_t>(k)));
  for (const auto& [s, off] : offsets.at(static_cast<std::size_t>(k))) {
    const auto& basis = form_basis(static_cast<int>(s.size()) - 1, k, weight);
    const auto c = basis.coordinates(w.on(s).component(k));
    std::copy(c.begin(), c.end(), out.begin() + static_cast<std::ptrdiff_t>(off));
  }
  return out;
}

QVector FormsDGA::coordinates(int k, const SimplicialForm& w) const {
  const auto amb = ambient(k, w);
  const auto& ker = carriers.at(static_cast<std::size_t>(k));
  auto c = ker.coordinates(amb);
  if (ker.embed(c) != amb) throw InputError("family is not compatible");
  return c;
}

SimplicialForm FormsDGA::form(int k, const QVector& coords) const {
  const auto amb = carriers.at(static_cast<std::size_t>(k)).embed(coords);
  SimplicialForm out{complex, {}};
  for (const auto& [s, off] : offsets.at(static_cast<std::size_t>(k))) {
    const auto& basis = form_basis(static_cast<int>(s.size()) - 1, k, weight);
    QVector part(amb.begin() + static_cast<std::ptrdiff_t>(off),
                 amb.begin() + static_cast<std::ptrdiff_t>(off + basis.size()));
    PolyForm f = basis.form(part);
    if (!f.is_zero()) out.forms.emplace(s, std::move(f));
  }
  return out;
}

FormsDGA forms_dga(const SimplicialComplexK& K, int weight, int cutoff, bool with_products) {
  if (weight < 0 || cutoff < 0) throw InputError("forms_dga: negative parameter");
  FormsDGA fd;
  fd.complex = K;
  fd.weight = weight;
  const auto all = K.all_simplices();
  // Blocks in degree k: simplices of dimension >= k.
  std::vector<std::vector<std::pair<Simplex, std::size_t>>> blocks(static_cast<std::size_t>(cutoff) + 1);
  fd.offsets.resize(blocks.size());
  fd.ambient_dims.resize(blocks.size());
  for (int k = 0; k <= cutoff; ++k) {
    std::size_t off = 0;
    for (const auto& s : all) {
      const int n = static_cast<int>(s.size()) - 1;
      const auto sz = form_basis(n, k, weight).size();
      if (sz == 0) continue;
      blocks[static_cast<std::size_t>(k)].emplace_back(s, off);
      fd.offsets[static_cast<std::size_t>(k)][s] = off;
      off += sz;
    }
    fd.ambient_dims[static_cast<std::size_t>(k)] = off;
  }
  for (int k = 0; k <= cutoff; ++k) {
    const auto& offs = fd.offsets[static_cast<std::size_t>(k)];
    std::vector<std::tuple<std::size_t, std::size_t, int, int, std::size_t>> constraints;
    std::size_t rows = 0;
    for (const auto& [s, off] : blocks[static_cast<std::size_t>(k)]) {
      const int n = static_cast<int>(s.size()) - 1;
      if (n == 0) continue;
      for (int i = 0; i <= n; ++i) {
        const auto t = face(s, static_cast<std::size_t>(i));
        auto it = offs.find(t);
        if (it == offs.end()) continue;
        constraints.emplace_back(off, it->second, n, i, rows);
        rows += form_basis(n - 1, k, weight).size();
      }
    }
    QMatrix compat(rows, fd.ambient_dims[static_cast<std::size_t>(k)]);
    for (const auto& [soff, toff, n, i, row0] : constraints) {
      const auto& r = face_restriction_matrix(n, i, k, weight);
      for (std::size_t row = 0; row < r.rows(); ++row) {
        for (const auto& [c, v] : r.row(row)) compat.set(row0 + row, soff + c, v);
        compat.set(row0 + row, toff + row, -1);
      }
    }
    fd.carriers.push_back(kernel(compat));
  }
  TruncatedDGABuilder b(cutoff);
  for (int k = 0; k <= cutoff; ++k) {
    const auto& ker = fd.carriers[static_cast<std::size_t>(k)];
    const auto& blk = blocks[static_cast<std::size_t>(k)];
    std::vector<std::string> labels;
    for (auto col : ker.free_columns) {
      auto it = std::upper_bound(blk.begin(), blk.end(), col,
                                 [](std::size_t c, const auto& e) { return c < e.second; });
      --it;
      const int n = static_cast<int>(it->first.size()) - 1;
      labels.push_back(format_simplex(it->first) + ":" + format_key(form_basis(n, k, weight).keys[col - it->second]));
    }
    b.set_basis(k, std::move(labels));
  }
  // Ambient differential is block diagonal.
  auto ambient_d = [&](int k, const QVector& x) {
    QVector y(fd.ambient_dims[static_cast<std::size_t>(k) + 1]);
    for (const auto& [s, off] : blocks[static_cast<std::size_t>(k)]) {
      auto it = fd.offsets[static_cast<std::size_t>(k) + 1].find(s);
      if (it == fd.offsets[static_cast<std::size_t>(k) + 1].end()) continue;
      const int n = static_cast<int>(s.size()) - 1;
      const auto& m = form_differential_matrix(n, k, weight);
      for (std::size_t r = 0; r < m.rows(); ++r) {
        Rational acc = 0;
        for (const auto& [c, v] : m.row(r)) acc += v * x[off + c];
        y[it->second + r] = acc;
      }
    }
    return y;
  };
  for (int k = 0; k < cutoff; ++k) {
    const auto& ker = fd.carriers[static_cast<std::size_t>(k)];
    std::vector<QVector> cols;
    for (const auto& v : ker.basis) cols.push_back(fd.carriers[static_cast<std::size_t>(k) + 1].coordinates(ambient_d(k, v)));
    b.set_differential(k, QMatrix::from_columns(cols, fd.carriers[static_cast<std::size_t>(k) + 1].dim()));
  }
  {
    QVector one(fd.ambient_dims[0]);
    for (const auto& [s, off] : blocks[0]) {
      const int n = static_cast<int>(s.size()) - 1;
      one[off + form_basis(n, 0, weight).index.at(FormKey{std::vector<int>(static_cast<std::size_t>(n), 0), 0})] = 1;
    }
    b.set_unit(fd.carriers[0].coordinates(one));
  }
  if (!with_products) {
    b.disable_products();
  } else {
    b.fill_products([&](int i, std::size_t x, int j, std::size_t y) -> std::optional<SparseVector> {
      const auto& u = fd.carriers[static_cast<std::size_t>(i)].basis[x];
      const auto& v = fd.carriers[static_cast<std::size_t>(j)].basis[y];
      const auto& target = fd.carriers[static_cast<std::size_t>(i + j)];
      QVector amb(fd.ambient_dims[static_cast<std::size_t>(i + j)]);
      for (const auto& [s, toff] : blocks[static_cast<std::size_t>(i + j)]) {
        const int n = static_cast<int>(s.size()) - 1;
        const auto& bi = form_basis(n, i, weight);
        const auto& bj = form_basis(n, j, weight);
        const auto& bt = form_basis(n, i + j, weight);
        const auto oi = fd.offsets[static_cast<std::size_t>(i)].at(s);
        const auto oj = fd.offsets[static_cast<std::size_t>(j)].at(s);
        for (std::size_t p = 0; p < bi.size(); ++p) {
          if (sgn(u[oi + p]) == 0) continue;
          for (std::size_t q = 0; q < bj.size(); ++q) {
            if (sgn(v[oj + q]) == 0) continue;
            auto kp = key_product(bi.keys[p], bj.keys[q], weight);
            if (!kp) return std::nullopt;
            if (kp->first == 0) continue;
            amb[toff + bt.index.at(kp->second)] += Rational(kp->first) * u[oi + p] * v[oj + q];
          }
        }
      }
      return to_sparse(target.coordinates(amb));
    });
  }
  fd.dga = std::make_shared<const TruncatedDGA>(b.build());
  return fd;
}

DGMorphism forms_restriction(const FormsDGA& big, const FormsDGA& small) {
  if (!small.complex.is_subcomplex_of(big.complex)) throw InputError("forms_restriction: not a subcomplex");
  if (big.weight != small.weight) throw InputError("forms_restriction: weights differ");
  const int top = std::min(big.dga->cutoff(), small.dga->cutoff());
  std::vector<QMatrix> maps;
  for (int k = 0; k <= top; ++k) {
    const auto& kb = big.carriers[static_cast<std::size_t>(k)];
    const auto& ks = small.carriers[static_cast<std::size_t>(k)];
    std::vector<QVector> cols;
    for (const auto& v : kb.basis) {
      QVector amb(small.ambient_dims[static_cast<std::size_t>(k)]);
      for (const auto& [s, off] : small.offsets[static_cast<std::size_t>(k)]) {
        const auto bo = big.offsets[static_cast<std::size_t>(k)].at(s);
        const auto sz = form_basis(static_cast<int>(s.size()) - 1, k, big.weight).size();
        for (std::size_t i = 0; i < sz; ++i) amb[off + i] = v[bo + i];
      }
      cols.push_back(ks.coordinates(amb));
    }
    maps.push_back(QMatrix::from_columns(cols, ks.dim()));
  }
  return DGMorphism(big.dga, small.dga, std::move(maps));
}

bool AdmissibleReport::all_passed() const {
  return std::all_of(axioms.begin(), axioms.end(), [](const AxiomResult& a) { return a.passed; });
}

std::string AdmissibleReport::format() const {
  static const char* names[5] = {"(i)", "(ii)", "(iii)", "(iv)", "(v)"};
  std::ostringstream os;
  for (std::size_t i = 0; i < 5; ++i) {
    os << names[i] << " " << (axioms[i].passed ? "pass" : "FAIL") << " (" << axioms[i].cases << " cases)\n";
    for (const auto& f : axioms[i].failures) os << "    " << f << "\n";
  }
  return os.str();
}

namespace {

PolyForm random_form(std::mt19937_64& rng, int n, int k, int weight) {
  const auto& b = form_basis(n, k, weight);
  std::uniform_int_distribution<int> coef(-3, 3);
  std::uniform_int_distribution<int> keep(0, 2);
  PolyForm f(n);
  for (const auto& key : b.keys)
    if (keep(rng) == 0) f.add_term(key, coef(rng));
  return f;
}

std::size_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  std::size_t r = 1;
  for (int i = 1; i <= k; ++i) r = r * static_cast<std::size_t>(n - k + i) / static_cast<std::size_t>(i);
  return r;
}

void fail(AxiomResult& a, std::string msg) {
  a.passed = false;
  if (a.failures.size() < 10) a.failures.push_back(std::move(msg));
}

}  // namespace

AdmissibleReport check_admissible_axioms(int n_max, std::size_t sample_budget, std::uint64_t seed) {
  if (n_max < 0) throw InputError("n_max must be non-negative");
  std::mt19937_64 rng(seed);
  AdmissibleReport rep;
  const std::size_t per = std::max<std::size_t>(sample_budget, 1);

  // (i) forms on a point are the constants.
  {
    auto& a = rep.axioms[0];
    for (int w = 0; w <= 4; ++w) {
      ++a.cases;
      if (form_basis(0, 0, w).size() != 1) fail(a, "degree-0 forms on a point are not 1-dimensional");
      for (int k = 1; k <= 3; ++k)
        if (form_basis(0, k, w).size() != 0) fail(a, "nonzero positive-degree forms on a point");
    }
    const auto pt = simplex_forms_dga(0, 3, 2);
    ++a.cases;
    if (pt.dim(0) != 1 || pt.dim(1) != 0 || pt.dim(2) != 0) fail(a, "A(Δ[0]) is not Q");
  }
  // (ii) A_n = A_n^0 ⊗ ∧(dt1..dtn), degreewise at every weight.
  {
    auto& a = rep.axioms[1];
    for (int n = 0; n <= n_max; ++n) {
      for (int w = 0; w <= 4; ++w) {
        for (int k = 0; k <= n + 1; ++k) {
          ++a.cases;
          const auto& b = form_basis(n, k, w);
          const std::size_t expected = w >= k ? binomial(n, k) * binomial(w - k + n, n) : 0;
          if (b.size() != expected) {
            fail(a, "dim A_" + std::to_string(n) + "^" + std::to_string(k) + " at weight " + std::to_string(w) +
                        " is " + std::to_string(b.size()) + ", expected " + std::to_string(expected));
          }
          for (const auto& key : b.keys) {
            // Each basis form is a function times dt_S.
            PolyForm f = PolyForm::term(n, key.exponents, 0);
            for (int i = 1; i <= n; ++i)
              if (key.mask & (1u << (i - 1))) f = wedge(f, PolyForm::differential(n, i));
            if (f != PolyForm::term(n, key.exponents, key.mask)) fail(a, "basis form is not p * dt_S");
          }
        }
      }
    }
  }
  // (iii) acyclicity via the contraction.
  {
    auto& a = rep.axioms[2];
    for (int n = 1; n <= n_max; ++n) {
      for (std::size_t s = 0; s < per; ++s) {
        std::uniform_int_distribution<int> kd(0, n);
        const int k = kd(rng);
        const PolyForm w = random_form(rng, n, k, 4);
        ++a.cases;
        if (d(contraction(w)) + contraction(d(w)) != w - (k == 0 ? evaluate_at_vertex0(w) : PolyForm(n))) {
          fail(a, "dh + hd != id - ε on " + w.format());
        }
        if (k >= 1) {
          const PolyForm closed = d(random_form(rng, n, k - 1, 4));
          ++a.cases;
          if (d(contraction(closed)) != closed) fail(a, "closed form not exact via h: " + closed.format());
        }
      }
      const auto dga = simplex_forms_dga(n, 3, n + 1);
      const auto h = cohomology(dga, n);
      ++a.cases;
      if (h.dim(0) != 1) fail(a, "H^0(A(Δ[" + std::to_string(n) + "])) is not Q");
      for (int k = 1; k <= n; ++k)
        if (h.dim(k) != 0) fail(a, "H^" + std::to_string(k) + "(A(Δ[" + std::to_string(n) + "])) != 0");
    }
  }
  // (iv) extension from subcomplexes of Δ[n].
  {
    auto& a = rep.axioms[3];
    for (int n = 1; n <= n_max; ++n) {
      const auto full = SimplicialComplexK::full_simplex(n);
      std::vector<SimplicialComplexK> subs;
      subs.push_back(SimplicialComplexK::boundary_of_simplex(n));
      subs.push_back(full.subcomplex({{0}}));
      {
        Simplex all(static_cast<std::size_t>(n) + 1);
        for (int i = 0; i <= n; ++i) all[static_cast<std::size_t>(i)] = i;
        std::vector<Simplex> horn;
        for (std::size_t i = 1; i < all.size(); ++i) horn.push_back(face(all, i));
        subs.push_back(full.subcomplex(horn));
      }
      for (const auto& L : subs) {
        const auto fl = forms_dga(L, 2, n, false);
        const std::size_t samples = std::max<std::size_t>(per / 4, 2);
        for (std::size_t s = 0; s < samples; ++s) {
          std::uniform_int_distribution<int> kd(0, std::max(0, L.dim()));
          const int k = kd(rng);
          std::uniform_int_distribution<int> coef(-3, 3);
          QVector c(fl.carriers[static_cast<std::size_t>(k)].dim());
          for (auto& x : c) x = coef(rng);
          const auto fam = fl.form(k, c);
          ++a.cases;
          try {
            const auto ext = extend(fam, full);
            if (!ext.clashes().empty()) fail(a, "extension is not compatible");
            if (ext.restricted_to(L).forms != fam.forms) fail(a, "extension does not restrict to the family");
          } catch (const std::exception& e) {
            fail(a, std::string("extension failed: ") + e.what());
          }
        }
      }
    }
  }
  // (v) df = f w has no solution for nonconstant f.
  {
    auto& a = rep.axioms[4];
    const std::size_t samples = std::max<std::size_t>(per, 20);
    for (std::size_t s = 0; s < samples; ++s) {
      const int n = 1 + static_cast<int>(s % static_cast<std::size_t>(std::max(1, n_max)));
      PolyForm f(n);
      while (f.weight() < 1) f = random_form(rng, n, 0, 3);
      ++a.cases;
      for (int bound = 0; bound <= 3; ++bound) {
        // Unknowns: coefficients of w_i over monomials of degree <= bound.
        const auto& wb = form_basis(n, 0, bound);
        const auto& rb = form_basis(n, 0, f.weight() + bound);
        QMatrix sys(rb.size() * static_cast<std::size_t>(n), wb.size() * static_cast<std::size_t>(n));
        QVector rhs;
        for (int i = 0; i < n; ++i) {
          for (std::size_t c = 0; c < wb.size(); ++c) {
            const auto prod = wedge(f, PolyForm::term(n, wb.keys[c].exponents, 0));
            for (const auto& [key, v] : prod.terms())
              sys.set(static_cast<std::size_t>(i) * rb.size() + rb.index.at(key),
                      static_cast<std::size_t>(i) * wb.size() + c, v);
          }
          const auto target = rb.coordinates(partial(f, i + 1));
          rhs.insert(rhs.end(), target.begin(), target.end());
        }
        if (solve(sys, rhs)) {
          fail(a, "df = f w solvable for nonconstant f = " + f.format());
          break;
        }
      }
    }
  }
  return rep;
}

}  // namespace cdgakit
