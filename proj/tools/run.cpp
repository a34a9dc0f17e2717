#include "run.hpp"

#include <algorithm>
#include <chrono>
#include <sstream>

#include "cdgakit/errors.hpp"
#include "cdgakit/gluing.hpp"
#include "cdgakit/polyforms.hpp"
#include "cdgakit/specseq.hpp"
#include "cdgakit/sullivan.hpp"

namespace cdgakit::cli {

namespace {

struct Verdict {
  std::vector<std::string> failures;
  void expect(bool ok, const std::string& what) {
    if (!ok) failures.push_back(what);
  }
};

struct TaskOutput {
  json result = json::object();
  std::ostringstream human;
  Verdict verdict;
};

int require_upto(const Problem& p, const Options& opt, int fallback = -1) {
  if (opt.upto) return *opt.upto;
  if (const auto u = p.int_parameter("upto")) return *u;
  if (fallback >= 0) return fallback;
  throw InputError("task " + p.task() + " needs \"upto\" (parameter or --upto)");
}

int cutoff_or(const Problem& p, const Options& opt, int fallback) {
  if (opt.cutoff) return *opt.cutoff;
  return p.int_parameter("cutoff", fallback);
}

json dims_json(const std::vector<std::size_t>& d) {
  json out = json::array();
  for (auto x : d) out.push_back(x);
  return out;
}

std::string dims_text(const std::vector<std::size_t>& d) {
  std::string s;
  for (std::size_t i = 0; i < d.size(); ++i) s += (i ? "," : "") + std::to_string(d[i]);
  return s;
}

// Cohomology dimensions from ranks of the differential matrices alone.
std::vector<std::size_t> rank_dims(const TruncatedDGA& a, int upto) {
  std::vector<std::size_t> out;
  for (int k = 0; k <= upto; ++k) {
    const auto r_out = rank(a.differential(k));
    const auto r_in = k == 0 ? 0 : rank(a.differential(k - 1));
    out.push_back(a.dim(k) - r_out - r_in);
  }
  return out;
}

std::string combination(const QVector& coeffs, const std::vector<std::string>& names) {
  std::vector<std::pair<std::string, Rational>> terms;
  for (std::size_t i = 0; i < coeffs.size(); ++i)
    if (sgn(coeffs[i]) != 0) terms.emplace_back(names[i], coeffs[i]);
  std::sort(terms.begin(), terms.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  std::string s;
  for (const auto& [name, c] : terms) {
    if (s.empty()) {
      s += c == -1 ? "-" : "";
    } else {
      s += sgn(c) < 0 ? " - " : " + ";
    }
    const Rational mag = abs(c);
    if (mag != 1) s += to_string(mag) + "*";
    s += name;
  }
  return s.empty() ? "0" : s;
}

// Class indices of one degree, ordered by their printed names.
std::vector<std::size_t> by_name(const std::vector<std::string>& names) {
  std::vector<std::size_t> order(names.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return names[a] < names[b]; });
  return order;
}

// ---- Tasks --------------------------------------------------------------

void cohomology_task(Problem& p, const Options& opt, TaskOutput& out) {
  const auto name = p.string_parameter("algebra");
  const int upto = require_upto(p, opt);
  const auto a = p.algebra(name, cutoff_or(p, opt, upto + 1));
  if (upto >= a->cutoff()) throw CutoffTooSmall("cohomology through degree " + std::to_string(upto), upto + 1);
  const auto h = cohomology(*a, upto);
  std::vector<std::vector<std::string>> names;
  std::vector<std::vector<std::size_t>> order;
  json classes = json::array();
  out.human << "H*(" << name << ") through degree " << upto << "\n";
  for (int k = 0; k <= upto; ++k) {
    std::vector<std::string> nk;
    for (const auto& rep : h.representatives(k)) nk.push_back("[" + a->format(k, rep) + "]");
    order.push_back(by_name(nk));
    json ck = json::array();
    out.human << "  H^" << k << ": " << h.dim(k);
    for (const auto i : order.back()) {
      ck.push_back(nk[i]);
      out.human << "  " << nk[i];
    }
    out.human << "\n";
    names.push_back(std::move(nk));
    classes.push_back(std::move(ck));
  }
  json products = json::array();
  if (a->has_products()) {
    for (int i = 1; i <= upto; ++i) {
      for (int j = i; i + j <= upto; ++j) {
        const auto& oi = order[static_cast<std::size_t>(i)];
        const auto& oj = order[static_cast<std::size_t>(j)];
        for (std::size_t xi = 0; xi < oi.size(); ++xi) {
          for (std::size_t yi = i == j ? xi : 0; yi < oj.size(); ++yi) {
            const auto x = oi[xi], y = oj[yi];
            const auto v = h.product(i, x, j, y);
            const auto& l = names[static_cast<std::size_t>(i)][x];
            const auto& r = names[static_cast<std::size_t>(j)][y];
            const std::string value = v ? combination(*v, names[static_cast<std::size_t>(i + j)]) : "undefined";
            products.push_back({{"left", l}, {"right", r}, {"value", value}});
            out.human << "  " << l << " " << r << " = " << value << "\n";
          }
        }
      }
    }
  }
  out.result = {{"algebra", name}, {"upto", upto}, {"dims", dims_json(h.dims())}, {"classes", classes}, {"products", products}};
  if (opt.verify) out.verdict.expect(rank_dims(*a, upto) == h.dims(), "rank oracle disagrees with the cohomology dimensions");
}

void minimal_model_task(Problem& p, const Options& opt, TaskOutput& out) {
  const auto name = p.string_parameter("algebra");
  const int upto = require_upto(p, opt);
  const auto a = p.algebra(name, cutoff_or(p, opt, upto + 1));
  const auto mm = minimal_model(a, upto);
  const auto& alg = mm.model.algebra();
  out.human << "minimal model of " << name << " through degree " << mm.built_upto << "\n";
  for (std::size_t i = 0; i < alg.size(); ++i) {
    out.human << "  " << alg.generator(i).name << " (" << alg.generator(i).degree << ")";
    if (!mm.model.d_of_generator(i).is_zero()) out.human << "  d = " << alg.format(mm.model.d_of_generator(i));
    out.human << "\n";
  }
  json images = json::object();
  for (std::size_t i = 0; i < alg.size(); ++i) {
    images[alg.generator(i).name] = a->format(alg.generator(i).degree, mm.generator_images[i]);
  }
  out.result = {{"algebra", name}, {"upto", upto}, {"built_upto", mm.built_upto}, {"model", algebra_to_json(mm.model)},
                {"images", images}};
  out.verdict.expect(minimality_check(mm.model).minimal, "model is not minimal");
  if (opt.verify) {
    const auto q = is_quasi_iso(mm.comparison, upto - 1);
    out.verdict.expect(q.ok, "comparison is not a quasi-isomorphism in degree " + std::to_string(q.first_failing_degree.value_or(-1)));
  }
}

void loop_model_task(Problem& p, const Options& opt, TaskOutput& out) {
  const auto name = p.string_parameter("algebra");
  const int upto = require_upto(p, opt);
  const auto sign = p.parameters().value("sign", std::string("right"));
  if (sign != "right" && sign != "left") throw InputError("parameter sign: expected \"right\" or \"left\"");
  const auto loop = loop_model(p.free_algebra(name), sign == "right" ? LoopSign::Right : LoopSign::Left);
  const auto t = truncate(loop, cutoff_or(p, opt, upto + 1));
  const auto dims = cohomology(t, upto).dims();
  const auto& alg = loop.algebra();
  out.human << "loop model of " << name << "\n";
  for (std::size_t i = 0; i < alg.size(); ++i) {
    out.human << "  " << alg.generator(i).name << " (" << alg.generator(i).degree << ")";
    if (!loop.d_of_generator(i).is_zero()) out.human << "  d = " << alg.format(loop.d_of_generator(i));
    out.human << "\n";
  }
  out.human << "  dims " << dims_text(dims) << "\n";
  out.result = {{"algebra", name}, {"upto", upto}, {"model", algebra_to_json(loop)}, {"dims", dims_json(dims)}};
  out.verdict.expect(!check_d_squared(loop).has_value(), "d^2 != 0 on the loop model");
  if (opt.verify) out.verdict.expect(rank_dims(t, upto) == dims, "rank oracle disagrees with the loop model dimensions");
}

void suspend_task(Problem& p, const Options& opt, TaskOutput& out) {
  const auto name = p.string_parameter("algebra");
  const int upto = require_upto(p, opt);
  const auto m = p.algebra(name, cutoff_or(p, opt, upto));
  const auto s = suspension_model(m, upto);
  const auto h = cohomology(*s.carrier, upto);
  const auto hm = cohomology(*m, std::min(upto - 1, m->cutoff() - 1));
  bool shifted = true;
  for (int k = 1; k <= upto; ++k) {
    if (k - 1 > hm.upto()) break;
    const std::size_t reduced = hm.dim(k - 1) - (k - 1 == 0 ? 1 : 0);
    shifted = shifted && h.dim(k) == reduced;
  }
  bool products_vanish = true;
  for (int i = 1; i <= upto; ++i)
    for (int j = 1; i + j <= upto; ++j)
      for (std::size_t a = 0; a < h.dim(i); ++a)
        for (std::size_t b = 0; b < h.dim(j); ++b)
          if (const auto v = h.product(i, a, j, b); v && !is_zero(*v)) products_vanish = false;
  out.human << "suspension of " << name << ": dims " << dims_text(h.dims()) << "\n";
  out.human << "  positive products vanish: " << (products_vanish ? "yes" : "no") << "\n";
  out.result = {{"algebra", name},
                {"upto", upto},
                {"dims", dims_json(h.dims())},
                {"products_vanish", products_vanish},
                {"carrier", algebra_to_json(*s.carrier)}};
  out.verdict.expect(shifted, "H^{k+1} of the suspension differs from reduced H^k");
  out.verdict.expect(products_vanish, "a product of positive-degree classes is nonzero");
  if (opt.verify) out.verdict.expect(rank_dims(*s.carrier, upto) == h.dims(), "rank oracle disagrees with the suspension dimensions");
}

void glue_task(Problem& p, const Options& opt, TaskOutput& out) {
  const int upto = require_upto(p, opt);
  const auto& g = p.parameters().contains("gluing") ? p.parameters().at("gluing") : json();
  if (!g.is_object()) throw InputError("task glue needs a \"gluing\" parameter object");
  const auto kind = g.value("kind", std::string("legs"));
  const int c = cutoff_or(p, opt, upto + 1);
  auto weight = [&] {
    if (!g.contains("weight") || !g.at("weight").is_number_integer()) throw InputError("gluing: missing integer \"weight\"");
    return g.at("weight").get<int>();
  };
  GluingData legs;
  if (kind == "circle-from-interval") {
    legs = circle_from_interval(weight(), c);
  } else if (kind == "suspension-triple") {
    if (!g.contains("m") || !g.at("m").is_string()) throw InputError("gluing: missing algebra name \"m\"");
    legs = suspension_triple(p.algebra(g.at("m").get<std::string>(), c), weight(), c).legs;
  } else if (kind == "legs") {
    if (!g.contains("f") || !g.contains("g") || !g.at("f").is_string() || !g.at("g").is_string()) {
      throw InputError("gluing: \"f\" and \"g\" name morphisms");
    }
    legs = {p.morphism(g.at("f").get<std::string>(), c), p.morphism(g.at("g").get<std::string>(), c)};
  } else {
    throw InputError("gluing: unknown kind \"" + kind + "\"");
  }
  const auto fp = fiber_product(legs.f, legs.g, upto);
  const auto mv = mayer_vietoris(fp, upto);
  const auto dims = cohomology(*fp.carrier, upto).dims();
  out.human << "fiber product (" << kind << "): dims " << dims_text(dims) << "\n" << mv.format();
  json ranks = json::array();
  for (auto r : mv.connecting_ranks) ranks.push_back(r);
  out.result = {{"kind", kind},
                {"upto", upto},
                {"dims", dims_json(dims)},
                {"mayer_vietoris", {{"exact", mv.exact()}, {"connecting_ranks", ranks}, {"failures", mv.failures}}},
                {"carrier", algebra_to_json(*fp.carrier)}};
  out.verdict.expect(mv.exact(), "Mayer-Vietoris sequence is not exact");
  if (opt.verify) out.verdict.expect(rank_dims(*fp.carrier, upto) == dims, "rank oracle disagrees with the fiber product dimensions");
}

void gamma_task(Problem& p, const Options& opt, TaskOutput& out) {
  const auto name = p.string_parameter("system");
  const int upto = require_upto(p, opt);
  const int c = cutoff_or(p, opt, upto + 1);
  const auto e = p.system(name, c);
  if (const auto bad = validate(*e); !bad.empty()) throw InputError("system " + name + ": " + bad.front());
  const auto g = global_sections(*e, upto + 1);
  const auto h = cohomology(*g.dga, upto);
  std::vector<std::size_t> dims;
  for (int k = 0; k <= upto; ++k) dims.push_back(g.dga->dim(k));
  const bool constant = is_locally_constant(*e, upto).ok;
  const bool extendable = is_extendable(*e).ok;
  out.human << "Gamma(" << name << "): dims " << dims_text(dims) << ", cohomology " << dims_text(h.dims()) << "\n";
  out.human << "  locally constant: " << (constant ? "yes" : "no") << ", extendable: " << (extendable ? "yes" : "no") << "\n";
  out.result = {{"system", name},       {"upto", upto},           {"dims", dims_json(dims)}, {"cohomology", dims_json(h.dims())},
                {"locally_constant", constant}, {"extendable", extendable}};
  if (opt.verify) out.verdict.expect(rank_dims(*g.dga, upto) == h.dims(), "rank oracle disagrees with H(Gamma)");
}

void ss_task(Problem& p, const Options& opt, TaskOutput& out) {
  const auto name = p.string_parameter("system");
  const int p_max = p.int_parameter("p_max", 2), q_max = p.int_parameter("q_max", 4);
  const int r_max = p.int_parameter("r_max", 3);
  const int c = cutoff_or(p, opt, p_max + q_max + 1);
  const auto e = p.system(name, c);
  if (const auto bad = validate(*e); !bad.empty()) throw InputError("system " + name + ": " + bad.front());
  const auto sf = skeletal_filtration(*e, c);
  const auto ss = spectral_sequence(sf.complex, r_max);
  json pages = json::array();
  for (int r = 0; r <= r_max; ++r) {
    const auto& pg = ss.page(r);
    json entries = json::array(), diffs = json::array();
    for (const auto& [key, sq] : pg.entries)
      if (sq.dim() != 0) entries.push_back({{"p", key.first}, {"q", key.second}, {"dim", sq.dim()}});
    for (const auto& [key, m] : pg.differentials) {
      const auto rk = m.rows() == 0 || m.cols() == 0 ? 0 : rank(m);
      if (rk != 0) diffs.push_back({{"p", key.first}, {"q", key.second}, {"rank", rk}});
    }
    pages.push_back({{"r", r}, {"entries", entries}, {"differentials", diffs}});
    out.human << pg.format() << "\n";
  }
  const auto e2 = e2_check(*e, p_max, q_max);
  const auto inf = einfty_vs_target(*e, c - 1);
  json e2j = json::array();
  for (const auto& b : e2.entries) e2j.push_back({{"p", b.p}, {"q", b.q}, {"spectral", b.spectral}, {"expected", b.expected}});
  out.human << e2.format() << inf.format();
  out.result = {{"system", name},
                {"cutoff", c},
                {"pages", pages},
                {"e2", {{"ok", e2.ok()}, {"entries", e2j}}},
                {"einfty", {{"ok", inf.ok()}, {"totals", dims_json(inf.totals)}, {"target", dims_json(inf.target)},
                            {"product_checks", inf.product_checks}}}};
  out.verdict.expect(e2.ok(), "E2 differs from cohomology with local coefficients");
  for (const auto& f : inf.failures) out.verdict.expect(false, f);
}

void admissible_task(Problem& p, const Options&, TaskOutput& out) {
  const int n_max = p.int_parameter("n_max", 3);
  const int samples = p.int_parameter("samples", 20);
  const int seed = p.int_parameter("seed", 1);
  if (n_max < 0 || samples < 0) throw InputError("check-admissible: n_max and samples must be nonnegative");
  const auto rep = check_admissible_axioms(n_max, static_cast<std::size_t>(samples), static_cast<std::uint64_t>(seed));
  static const char* names[5] = {"i", "ii", "iii", "iv", "v"};
  json axioms = json::array();
  for (std::size_t i = 0; i < 5; ++i) {
    axioms.push_back({{"axiom", names[i]}, {"passed", rep.axioms[i].passed}, {"cases", rep.axioms[i].cases},
                      {"failures", rep.axioms[i].failures}});
    out.verdict.expect(rep.axioms[i].passed, std::string("axiom (") + names[i] + ") fails");
  }
  out.human << rep.format();
  out.result = {{"n_max", n_max}, {"samples", samples}, {"axioms", axioms}};
}

json error_report(const std::string& kind, const std::string& message, std::optional<int> needed = std::nullopt) {
  json err{{"kind", kind}, {"message", message}};
  if (needed) err["needed_cutoff"] = *needed;
  return {{"version", kVersion}, {"error", err}};
}

}  // namespace

Outcome run_document(json doc, const Options& opt) {
  Outcome out;
  const auto start = std::chrono::steady_clock::now();
  try {
    if (opt.task && doc.is_object()) doc["task"] = *opt.task;
    Problem p(std::move(doc));
    TaskOutput t;
    const auto& task = p.task();
    if (task == "cohomology") cohomology_task(p, opt, t);
    else if (task == "minimal-model") minimal_model_task(p, opt, t);
    else if (task == "loop-model") loop_model_task(p, opt, t);
    else if (task == "suspend") suspend_task(p, opt, t);
    else if (task == "glue") glue_task(p, opt, t);
    else if (task == "gamma") gamma_task(p, opt, t);
    else if (task == "ss") ss_task(p, opt, t);
    else admissible_task(p, opt, t);
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool ok = t.verdict.failures.empty();
    out.report = {{"version", kVersion},
                  {"task", task},
                  {"result", t.result},
                  {"verdict", {{"ok", ok}, {"failures", t.verdict.failures}}},
                  {"meta", {{"seconds", seconds}, {"verified", opt.verify}}}};
    out.human = t.human.str();
    for (const auto& f : t.verdict.failures) out.human += "FAIL " + f + "\n";
    out.human += ok ? "ok\n" : "check failed\n";
    out.exit_code = ok ? 0 : 1;
  } catch (const CutoffTooSmall& e) {
    out.report = error_report("cutoff", e.what(), e.needed());
    out.human = std::string("error: ") + e.what() + "\n";
    out.exit_code = 2;
  } catch (const PreconditionError& e) {
    out.report = error_report("precondition", e.what());
    out.human = std::string("error: ") + e.what() + "\n";
    out.exit_code = 2;
  } catch (const InputError& e) {
    out.report = error_report("input", e.what());
    out.human = std::string("error: ") + e.what() + "\n";
    out.exit_code = 2;
  } catch (const json::exception& e) {
    out.report = error_report("input", e.what());
    out.human = std::string("error: ") + e.what() + "\n";
    out.exit_code = 2;
  }
  return out;
}

Outcome run_text(std::string_view text, const Options& opt) {
  try {
    return run_document(parse_document(text), opt);
  } catch (const InputError& e) {
    Outcome out;
    out.report = error_report("parse", e.what());
    out.human = std::string("error: ") + e.what() + "\n";
    out.exit_code = 2;
    return out;
  }
}

std::string render(const Outcome& out, bool machine) { return machine ? out.report.dump(2) + "\n" : out.human; }

}  // namespace cdgakit::cli
