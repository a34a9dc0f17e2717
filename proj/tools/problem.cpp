#include "problem.hpp"

#include <set>
#include <tuple>

#include "cdgakit/errors.hpp"
#include "cdgakit/gluing.hpp"

namespace cdgakit::cli {

namespace {

const std::set<std::string, std::less<>> kTasks{"cohomology", "minimal-model", "loop-model", "suspend",
                                                 "glue",       "gamma",         "ss",         "check-admissible"};

const json& require(const json& obj, std::string_view key, std::string_view where) {
  if (!obj.is_object() || !obj.contains(key)) throw InputError(std::string(where) + ": missing \"" + std::string(key) + "\"");
  return obj.at(std::string(key));
}

int int_from_json(const json& j, std::string_view where) {
  if (!j.is_number_integer()) throw InputError(std::string(where) + ": expected an integer");
  return j.get<int>();
}

std::string string_from_json(const json& j, std::string_view where) {
  if (!j.is_string()) throw InputError(std::string(where) + ": expected a string");
  return j.get<std::string>();
}

Simplex simplex_from_json(const json& j, std::string_view where) {
  if (!j.is_array()) throw InputError(std::string(where) + ": expected a list of vertices");
  Simplex s;
  for (const auto& v : j) s.push_back(int_from_json(v, where));
  return s;
}

SparseVector sparse_from_json(const json& j, std::size_t dim, std::string_view where) {
  if (!j.is_array() || j.size() != dim) throw InputError(std::string(where) + ": expected " + std::to_string(dim) + " entries");
  QVector v;
  for (const auto& x : j) v.push_back(rational_from_json(x, where));
  return to_sparse(v);
}

json vector_to_json(const QVector& v) {
  json out = json::array();
  for (const auto& x : v) out.push_back(rational_to_json(x));
  return out;
}

}  // namespace

Rational rational_from_json(const json& j, std::string_view where) {
  if (j.is_number_integer()) return Rational(j.dump());
  if (j.is_number_float()) throw InputError(std::string(where) + ": decimal " + j.dump() + " is not accepted; write p/q");
  if (!j.is_string()) throw InputError(std::string(where) + ": expected a rational \"p/q\"");
  const auto s = j.get<std::string>();
  if (s.find_first_of(".eE") != std::string::npos) throw InputError(std::string(where) + ": decimal \"" + s + "\" is not accepted; write p/q");
  try {
    return parse_rational(s);
  } catch (const InputError& e) {
    throw InputError(std::string(where) + ": " + e.what());
  }
}

json rational_to_json(const Rational& q) { return to_string(q); }

QMatrix matrix_from_json(const json& rows, std::size_t n_rows, std::size_t n_cols, std::string_view where) {
  if (!rows.is_array() || rows.size() != n_rows) {
    throw InputError(std::string(where) + ": expected " + std::to_string(n_rows) + " rows");
  }
  QMatrix m(n_rows, n_cols);
  for (std::size_t r = 0; r < n_rows; ++r) {
    if (!rows[r].is_array() || rows[r].size() != n_cols) {
      throw InputError(std::string(where) + ": row " + std::to_string(r) + " needs " + std::to_string(n_cols) + " entries");
    }
    for (std::size_t c = 0; c < n_cols; ++c) {
      const auto q = rational_from_json(rows[r][c], where);
      if (sgn(q) != 0) m.set(r, c, q);
    }
  }
  return m;
}

json matrix_to_json(const QMatrix& m) {
  json rows = json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (std::size_t c = 0; c < m.cols(); ++c) row.push_back(rational_to_json(m.at(r, c)));
    rows.push_back(std::move(row));
  }
  return rows;
}

// ---- Algebras -----------------------------------------------------------

json algebra_to_json(const FreeCDGA& f) {
  const auto& alg = f.algebra();
  json gens = json::array(), diff = json::object();
  for (std::size_t i = 0; i < alg.size(); ++i) {
    gens.push_back({{"name", alg.generator(i).name}, {"degree", alg.generator(i).degree}});
    if (!f.d_of_generator(i).is_zero()) diff[alg.generator(i).name] = alg.format(f.d_of_generator(i));
  }
  return {{"kind", "free"}, {"generators", gens}, {"differential", diff}};
}

json algebra_to_json(const TruncatedDGA& a) {
  json basis = json::array(), diff = json::array();
  for (int k = 0; k <= a.cutoff(); ++k) basis.push_back(a.labels(k));
  for (int k = 0; k < a.cutoff(); ++k) diff.push_back(matrix_to_json(a.differential(k)));
  json out{{"kind", "truncated"}, {"cutoff", a.cutoff()}, {"basis", basis}, {"unit", vector_to_json(a.unit())},
           {"differential", diff}};
  if (!a.has_products()) {
    out["products"] = nullptr;
    return out;
  }
  json products = json::array(), undefined = json::array();
  for (int i = 0; i <= a.cutoff(); ++i) {
    for (int j = 0; i + j <= a.cutoff(); ++j) {
      for (std::size_t x = 0; x < a.dim(i); ++x) {
        for (std::size_t y = 0; y < a.dim(j); ++y) {
          const auto p = a.basis_product(i, x, j, y);
          if (!p) {
            undefined.push_back({i, x, j, y});
          } else if (!is_zero(*p)) {
            products.push_back({{"at", {i, x, j, y}}, {"value", vector_to_json(*p)}});
          }
        }
      }
    }
  }
  out["products"] = products;
  if (!undefined.empty()) out["undefined"] = undefined;
  return out;
}

FreeCDGA free_from_json(const json& spec, std::string_view name) {
  const std::string where = "algebra " + std::string(name);
  std::vector<GeneratorSpec> gens;
  for (const auto& g : require(spec, "generators", where)) {
    gens.push_back({string_from_json(require(g, "name", where), where), int_from_json(require(g, "degree", where), where)});
  }
  FreeGCA alg(gens);
  std::vector<Element> d(gens.size());
  if (spec.contains("differential")) {
    const auto& diff = spec.at("differential");
    if (!diff.is_object()) throw InputError(where + ": \"differential\" maps generator names to expressions");
    for (const auto& [g, expr] : diff.items()) {
      const auto text = string_from_json(expr, where + " d(" + g + ")");
      try {
        d[alg.index_of(g)] = alg.parse(text);
      } catch (const InputError& e) {
        throw InputError(where + " d(" + g + "): " + e.what());
      }
    }
  }
  return FreeCDGA(std::move(alg), std::move(d));
}

TruncatedDGA truncated_from_json(const json& spec, std::string_view name) {
  const std::string where = "algebra " + std::string(name);
  const int cutoff = int_from_json(require(spec, "cutoff", where), where);
  const auto& basis = require(spec, "basis", where);
  if (cutoff < 0 || !basis.is_array() || static_cast<int>(basis.size()) != cutoff + 1) {
    throw InputError(where + ": \"basis\" needs one label list per degree 0.." + std::to_string(cutoff));
  }
  TruncatedDGABuilder b(cutoff);
  std::vector<std::size_t> dims;
  for (int k = 0; k <= cutoff; ++k) {
    std::vector<std::string> labels;
    for (const auto& l : basis[static_cast<std::size_t>(k)]) labels.push_back(string_from_json(l, where));
    dims.push_back(labels.size());
    b.set_basis(k, std::move(labels));
  }
  const auto& diff = require(spec, "differential", where);
  if (!diff.is_array() || static_cast<int>(diff.size()) != cutoff) throw InputError(where + ": \"differential\" needs one matrix per degree below the cutoff");
  for (int k = 0; k < cutoff; ++k) {
    const auto ik = static_cast<std::size_t>(k);
    b.set_differential(k, matrix_from_json(diff[ik], dims[ik + 1], dims[ik], where + " d in degree " + std::to_string(k)));
  }
  QVector unit;
  for (const auto& x : require(spec, "unit", where)) unit.push_back(rational_from_json(x, where + " unit"));
  if (unit.size() != dims[0]) throw InputError(where + ": unit has the wrong length");
  b.set_unit(std::move(unit));
  if (!spec.contains("products") || spec.at("products").is_null()) {
    b.disable_products();
  } else {
    std::map<std::tuple<int, std::size_t, int, std::size_t>, SparseVector> table;
    std::set<std::tuple<int, std::size_t, int, std::size_t>> undefined;
    auto key_of = [&](const json& at) {
      if (!at.is_array() || at.size() != 4) throw InputError(where + ": product positions are [i, a, j, b]");
      const int i = int_from_json(at[0], where), j = int_from_json(at[2], where);
      const int a = int_from_json(at[1], where), bb = int_from_json(at[3], where);
      if (i < 0 || j < 0 || i + j > cutoff || a < 0 || bb < 0 || static_cast<std::size_t>(a) >= dims[static_cast<std::size_t>(i)] ||
          static_cast<std::size_t>(bb) >= dims[static_cast<std::size_t>(j)]) {
        throw InputError(where + ": product position " + at.dump() + " is out of range");
      }
      return std::make_tuple(i, static_cast<std::size_t>(a), j, static_cast<std::size_t>(bb));
    };
    for (const auto& p : spec.at("products")) {
      const auto key = key_of(require(p, "at", where));
      table[key] = sparse_from_json(require(p, "value", where), dims[static_cast<std::size_t>(std::get<0>(key) + std::get<2>(key))], where);
    }
    if (spec.contains("undefined"))
      for (const auto& at : spec.at("undefined")) undefined.insert(key_of(at));
    b.fill_products([&](int i, std::size_t a, int j, std::size_t c) -> std::optional<SparseVector> {
      const auto key = std::make_tuple(i, a, j, c);
      if (undefined.count(key)) return std::nullopt;
      auto it = table.find(key);
      return it == table.end() ? SparseVector{} : it->second;
    });
  }
  auto out = b.build();
  if (const auto bad = out.validate(); !bad.empty()) throw InputError(where + ": " + bad.front());
  return out;
}

json parse_document(std::string_view text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1, col = 1;
    const std::size_t stop = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    for (std::size_t i = 0; i < stop; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    std::string msg = e.what();
    if (const auto pos = msg.find("syntax error"); pos != std::string::npos) msg = msg.substr(pos);
    throw InputError("parse error at line " + std::to_string(line) + ", column " + std::to_string(col) + ": " + msg);
  }
}

// ---- Problem ------------------------------------------------------------

Problem::Problem(json doc) : doc_(std::move(doc)) {
  if (!doc_.is_object()) throw InputError("problem file must be a JSON object");
  const auto version = string_from_json(require(doc_, "version", "problem"), "version");
  if (version != kVersion) throw InputError("unsupported version \"" + version + "\" (expected \"" + std::string(kVersion) + "\")");
  task_ = string_from_json(require(doc_, "task", "problem"), "task");
  if (!kTasks.count(task_)) throw InputError("unknown task \"" + task_ + "\"");
  params_ = doc_.contains("parameters") ? doc_.at("parameters") : json::object();
  if (!params_.is_object()) throw InputError("\"parameters\" must be an object");
}

std::optional<int> Problem::int_parameter(std::string_view key) const {
  if (!params_.contains(key)) return std::nullopt;
  return int_from_json(params_.at(std::string(key)), "parameter " + std::string(key));
}

int Problem::int_parameter(std::string_view key, int fallback) const { return int_parameter(key).value_or(fallback); }

std::string Problem::string_parameter(std::string_view key) const {
  return string_from_json(require(params_, key, "parameters"), "parameter " + std::string(key));
}

const json& Problem::section(std::string_view kind, const std::string& name) const {
  const auto& all = require(doc_, kind, "problem");
  if (!all.is_object() || !all.contains(name)) throw InputError("unknown " + std::string(kind) + " entry \"" + name + "\"");
  return all.at(name);
}

FreeCDGA Problem::free_algebra(const std::string& name) const {
  const auto& spec = section("algebras", name);
  const auto kind = spec.value("kind", std::string("free"));
  if (kind != "free") throw InputError("algebra " + name + " is not a free presentation");
  return free_from_json(spec, name);
}

DGAPtr Problem::algebra(const std::string& name, int fallback_cutoff) {
  const auto& spec = section("algebras", name);
  const std::string where = "algebra " + name;
  const int cutoff = spec.contains("cutoff") ? int_from_json(spec.at("cutoff"), where) : fallback_cutoff;
  const std::string key = name + "@" + std::to_string(cutoff);
  if (auto it = algebras_.find(key); it != algebras_.end()) return it->second;
  const auto kind = spec.value("kind", std::string("free"));
  DGAPtr out;
  if (kind == "truncated") {
    out = std::make_shared<const TruncatedDGA>(truncated_from_json(spec, name));
  } else if (kind == "free") {
    const auto f = free_from_json(spec, name);
    if (const auto bad = check_d_squared(f)) {
      throw InputError(where + ": d^2 != 0 on generator " + f.algebra().generator(bad->generator).name);
    }
    std::vector<Monomial> killed;
    if (spec.contains("relations")) {
      for (const auto& r : spec.at("relations")) {
        const auto e = f.algebra().parse(string_from_json(r, where + " relation"));
        if (e.terms().size() != 1) throw InputError(where + ": relations must be single monomials");
        killed.push_back(e.terms().begin()->first);
      }
    }
    out = std::make_shared<const TruncatedDGA>(killed.empty() ? truncate(f, cutoff) : monomial_quotient(f, killed, cutoff));
  } else if (kind == "point") {
    out = std::make_shared<const TruncatedDGA>(point_dga(cutoff));
  } else {
    throw InputError(where + ": unknown kind \"" + kind + "\"");
  }
  algebras_.emplace(key, out);
  return out;
}

DGMorphism Problem::morphism(const std::string& name, int fallback_cutoff) {
  const std::string key = name + "@" + std::to_string(fallback_cutoff);
  if (auto it = morphisms_.find(key); it != morphisms_.end()) return it->second;
  const auto& spec = section("morphisms", name);
  const std::string where = "morphism " + name;
  const auto kind = spec.value("kind", std::string("matrices"));
  DGMorphism out;
  if (kind == "identity") {
    out = DGMorphism::identity(algebra(string_from_json(require(spec, "algebra", where), where), fallback_cutoff));
  } else if (kind == "scale") {
    const auto a = algebra(string_from_json(require(spec, "algebra", where), where), fallback_cutoff);
    const int degree = int_from_json(require(spec, "degree", where), where);
    const auto factor = rational_from_json(require(spec, "factor", where), where);
    std::vector<QMatrix> maps;
    for (int k = 0; k <= a->cutoff(); ++k) maps.push_back(k == degree ? factor * QMatrix::identity(a->dim(k)) : QMatrix::identity(a->dim(k)));
    out = DGMorphism(a, a, std::move(maps));
  } else if (kind == "matrices") {
    const auto s = algebra(string_from_json(require(spec, "source", where), where), fallback_cutoff);
    const auto t = algebra(string_from_json(require(spec, "target", where), where), fallback_cutoff);
    const auto& mats = require(spec, "matrices", where);
    const int top = std::min(s->cutoff(), t->cutoff());
    if (!mats.is_array() || static_cast<int>(mats.size()) < top + 1) {
      throw InputError(where + ": need matrices for degrees 0.." + std::to_string(top));
    }
    std::vector<QMatrix> maps;
    for (int k = 0; k <= top; ++k) {
      maps.push_back(matrix_from_json(mats[static_cast<std::size_t>(k)], t->dim(k), s->dim(k), where + " degree " + std::to_string(k)));
    }
    out = DGMorphism(s, t, std::move(maps));
  } else {
    throw InputError(where + ": unknown kind \"" + kind + "\"");
  }
  if (const auto bad = out.validate(); !bad.empty()) throw InputError(where + ": " + bad.front());
  morphisms_.emplace(key, out);
  return out;
}

SimplicialComplexK Problem::complex(const std::string& name) const {
  const auto& spec = section("complexes", name);
  const std::string where = "complex " + name;
  const auto kind = string_from_json(require(spec, "kind", where), where);
  if (kind == "facets") {
    std::vector<Simplex> facets;
    for (const auto& f : require(spec, "facets", where)) facets.push_back(simplex_from_json(f, where));
    return SimplicialComplexK(facets);
  }
  const int n = int_from_json(require(spec, "n", where), where);
  if (kind == "cycle") return SimplicialComplexK::cycle(n);
  if (kind == "simplex") return SimplicialComplexK::full_simplex(n);
  if (kind == "boundary") return SimplicialComplexK::boundary_of_simplex(n);
  throw InputError(where + ": unknown kind \"" + kind + "\"");
}

SystemPtr Problem::system(const std::string& name, int cutoff) {
  const auto& spec = section("systems", name);
  const std::string where = "system " + name;
  const auto kind = string_from_json(require(spec, "kind", where), where);
  const auto base = complex(string_from_json(require(spec, "base", where), where));
  auto weight = [&] { return int_from_json(require(spec, "weight", where), where); };
  if (kind == "constant") return constant_system(base, algebra(string_from_json(require(spec, "fiber", where), where), cutoff));
  if (kind == "forms") {
    const auto fiber = algebra(string_from_json(require(spec, "fiber", where), where), cutoff);
    std::map<std::pair<int, int>, DGMorphism> transports;
    if (spec.contains("transports")) {
      for (const auto& t : spec.at("transports")) {
        const auto edge = simplex_from_json(require(t, "edge", where), where);
        if (edge.size() != 2) throw InputError(where + ": transport edges have two vertices");
        transports.emplace(std::make_pair(edge[0], edge[1]), morphism(string_from_json(require(t, "morphism", where), where), cutoff));
      }
    }
    return forms_system(base, weight(), fiber, cutoff, transports).system;
  }
  if (kind == "sign-twisted") {
    const auto edge = simplex_from_json(require(spec, "edge", where), where);
    return sign_twisted_system(base, int_from_json(require(spec, "q", where), where), edge, cutoff);
  }
  if (kind == "product-forms") {
    return product_forms_system(base, complex(string_from_json(require(spec, "fiber_complex", where), where)), weight(), cutoff, false);
  }
  if (kind == "suspension-triple") {
    const int w = weight();
    const auto m = algebra(string_from_json(require(spec, "m", where), where), cutoff + 1);
    const auto t = suspension_triple(m, w, cutoff + 1);
    const auto e1 = forms_system(base, w, t.legs.f.source(), cutoff + 1);
    const auto e0 = forms_system(base, w, t.legs.f.target(), cutoff + 1);
    const auto e2 = forms_system(base, w, t.legs.g.source(), cutoff + 1);
    return fiber_product_system(forms_morphism(e1, e0, t.legs.f), forms_morphism(e2, e0, t.legs.g), cutoff).system;
  }
  throw InputError(where + ": unknown kind \"" + kind + "\"");
}

}  // namespace cdgakit::cli
