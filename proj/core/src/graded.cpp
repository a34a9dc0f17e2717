#include "cdgakit/graded.hpp"

#include <cctype>
#include <set>
#include <sstream>

namespace cdgakit {

Element::Element(const Monomial& m, const Rational& c) { add_term(m, c); }

Rational Element::coefficient(const Monomial& m) const {
  auto it = terms_.find(m);
  return it == terms_.end() ? Rational(0) : it->second;
}

void Element::add_term(const Monomial& m, const Rational& c) {
  if (sgn(c) == 0) return;
  auto [it, inserted] = terms_.try_emplace(m, c);
  if (!inserted) {
    it->second += c;
    if (sgn(it->second) == 0) terms_.erase(it);
  }
}

Element& Element::operator+=(const Element& other) {
  for (const auto& [m, c] : other.terms_) add_term(m, c);
  return *this;
}

Element& Element::operator-=(const Element& other) {
  for (const auto& [m, c] : other.terms_) add_term(m, -c);
  return *this;
}

Element& Element::operator*=(const Rational& s) {
  if (sgn(s) == 0) {
    terms_.clear();
    return *this;
  }
  for (auto& [m, c] : terms_) c *= s;
  return *this;
}

FreeGCA::FreeGCA(std::vector<GeneratorSpec> generators) : gens_(std::move(generators)) {
  std::set<std::string> seen;
  for (const auto& g : gens_) {
    if (g.degree < 1) {
      throw InputError("generator '" + g.name + "' has degree " + std::to_string(g.degree) +
                       "; generators must have positive degree");
    }
    if (g.name.empty()) throw InputError("generator with empty name");
    if (!seen.insert(g.name).second) throw InputError("duplicate generator name '" + g.name + "'");
  }
}

std::size_t FreeGCA::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < gens_.size(); ++i) {
    if (gens_[i].name == name) return i;
  }
  throw InputError("unknown generator '" + std::string(name) + "'");
}

Monomial FreeGCA::generator_monomial(std::size_t i) const {
  Monomial m = unit_monomial();
  m.exponents.at(i) = 1;
  return m;
}

void FreeGCA::check(const Monomial& m) const {
  if (m.exponents.size() != gens_.size()) {
    throw InputError("monomial does not belong to this algebra (generator count mismatch)");
  }
}

int FreeGCA::degree(const Monomial& m) const {
  check(m);
  int d = 0;
  for (std::size_t i = 0; i < gens_.size(); ++i) d += m.exponents[i] * gens_[i].degree;
  return d;
}

int FreeGCA::word_length(const Monomial& m) const {
  check(m);
  int w = 0;
  for (int e : m.exponents) w += e;
  return w;
}

bool FreeGCA::is_homogeneous(const Element& e) const {
  if (e.is_zero()) return true;
  const int d = degree(e.terms().begin()->first);
  for (const auto& [m, c] : e.terms()) {
    if (degree(m) != d) return false;
  }
  return true;
}

int FreeGCA::degree(const Element& e) const {
  if (e.is_zero()) throw InputError("degree of the zero element is undefined");
  if (!is_homogeneous(e)) throw InputError("element is not homogeneous: " + format(e));
  return degree(e.terms().begin()->first);
}

std::pair<int, Monomial> FreeGCA::multiply(const Monomial& a, const Monomial& b) const {
  check(a);
  check(b);
  Monomial out = a;
  int parity = 0;
  // Move each odd factor of b leftwards past the odd factors of a that sit
  // after it in the canonical order.
  int odd_in_a_after = 0;
  for (std::size_t i = gens_.size(); i-- > 0;) {
    if (is_odd(i)) {
      if (a.exponents[i] + b.exponents[i] > 1) return {0, Monomial{}};
      if (b.exponents[i] == 1) parity += odd_in_a_after;
      odd_in_a_after += a.exponents[i];
    }
    out.exponents[i] += b.exponents[i];
  }
  return {parity % 2 == 0 ? 1 : -1, std::move(out)};
}

Element FreeGCA::multiply(const Element& a, const Element& b) const {
  Element out;
  for (const auto& [ma, ca] : a.terms()) {
    for (const auto& [mb, cb] : b.terms()) {
      auto [sign, m] = multiply(ma, mb);
      if (sign == 0) continue;
      out.add_term(m, sign > 0 ? Rational(ca * cb) : Rational(-ca * cb));
    }
  }
  return out;
}

Element FreeGCA::power(const Element& a, int n) const {
  if (n < 0) throw InputError("negative power");
  Element out = unit();
  for (int i = 0; i < n; ++i) out = multiply(out, a);
  return out;
}

std::vector<Monomial> FreeGCA::basis_in_degree(int n) const {
  std::vector<Monomial> out;
  if (n < 0) return out;
  std::vector<int> exps(gens_.size(), 0);
  auto rec = [&](auto&& self, std::size_t i, int remaining) -> void {
    if (i == gens_.size()) {
      if (remaining == 0) out.push_back(Monomial{exps});
      return;
    }
    const int d = gens_[i].degree;
    const int max_e = is_odd(i) ? 1 : remaining / d;
    for (int e = 0; e <= max_e && e * d <= remaining; ++e) {
      exps[i] = e;
      self(self, i + 1, remaining - e * d);
    }
    exps[i] = 0;
  };
  rec(rec, 0, n);
  return out;
}

std::string FreeGCA::format(const Monomial& m) const {
  check(m);
  std::string s;
  for (std::size_t i = 0; i < gens_.size(); ++i) {
    if (m.exponents[i] == 0) continue;
    if (!s.empty()) s += "*";
    s += gens_[i].name;
    if (m.exponents[i] > 1) s += "^" + std::to_string(m.exponents[i]);
  }
  return s.empty() ? "1" : s;
}

std::string FreeGCA::format(const Element& e) const {
  if (e.is_zero()) return "0";
  std::string s;
  bool first = true;
  for (const auto& [m, c] : e.terms()) {
    Rational mag = abs(c);
    if (first) {
      if (sgn(c) < 0) s += "-";
    } else {
      s += sgn(c) < 0 ? " - " : " + ";
    }
    first = false;
    const bool is_unit = degree(m) == 0;
    if (mag != 1 || is_unit) {
      s += to_string(mag);
      if (!is_unit) s += "*";
    }
    if (!is_unit) s += format(m);
  }
  return s;
}

namespace {

class TermParser {
public:
  TermParser(const FreeGCA& alg, std::string_view text) : alg_(alg), text_(text) {}

  Element parse() {
    Element out;
    skip();
    if (pos_ == text_.size()) throw error("empty expression");
    bool first = true;
    while (pos_ < text_.size()) {
      int sign = 1;
      if (peek() == '+' || peek() == '-') {
        sign = peek() == '-' ? -1 : 1;
        ++pos_;
        skip();
      } else if (!first) {
        throw error("expected '+' or '-'");
      }
      first = false;
      Element term = parse_term();
      out += Rational(sign) * term;
      skip();
    }
    return out;
  }

private:
  Element parse_term() {
    Rational coef = 1;
    Element acc = alg_.unit();
    bool have_factor = false;
    while (pos_ < text_.size()) {
      skip();
      const char ch = peek();
      if (std::isdigit(static_cast<unsigned char>(ch))) {
        coef *= parse_number();
        have_factor = true;
      } else if (std::isalpha(static_cast<unsigned char>(ch)) || ch == '_') {
        std::size_t start = pos_;
        while (pos_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_' ||
                text_[pos_] == '\'')) {
          ++pos_;
        }
        const auto name = text_.substr(start, pos_ - start);
        int exp = 1;
        skip();
        if (peek() == '^') {
          ++pos_;
          skip();
          start = pos_;
          while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
          if (start == pos_) throw error("expected exponent after '^'");
          exp = std::stoi(std::string(text_.substr(start, pos_ - start)));
        }
        std::size_t idx = 0;
        try {
          idx = alg_.index_of(name);
        } catch (const InputError&) {
          throw error("unknown generator '" + std::string(name) + "'");
        }
        acc = alg_.multiply(acc, alg_.power(alg_.gen(idx), exp));
        have_factor = true;
      } else {
        break;
      }
      skip();
      if (peek() == '*') {
        ++pos_;
        continue;
      }
      if (peek() == '+' || peek() == '-' || pos_ >= text_.size()) break;
    }
    if (!have_factor) throw error("expected a coefficient or generator");
    return coef * acc;
  }

  Rational parse_number() {
    std::size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (peek() == '/') {
      ++pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }
    if (peek() == '.') throw error("decimal notation is not accepted; use p/q");
    return parse_rational(text_.substr(start, pos_ - start));
  }

  char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }
  void skip() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  InputError error(const std::string& msg) const {
    return InputError("cannot parse '" + std::string(text_) + "' at position " +
                      std::to_string(pos_) + ": " + msg);
  }

  const FreeGCA& alg_;
  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

Element FreeGCA::parse(std::string_view text) const { return TermParser(*this, text).parse(); }

Element apply_derivation(const FreeGCA& alg, const std::vector<Element>& on_generators,
                         int derivation_degree, const Element& x) {
  if (on_generators.size() != alg.size()) throw InputError("derivation: wrong number of generator values");
  Element out;
  for (const auto& [m, c] : x.terms()) {
    // Expand m as an ordered word of generators and apply the Leibniz rule.
    std::vector<std::size_t> word;
    for (std::size_t i = 0; i < alg.size(); ++i) {
      for (int e = 0; e < m.exponents[i]; ++e) word.push_back(i);
    }
    int prefix_degree = 0;
    for (std::size_t pos = 0; pos < word.size(); ++pos) {
      Element left = alg.unit();
      for (std::size_t k = 0; k < pos; ++k) left = alg.multiply(left, alg.gen(word[k]));
      Element right = alg.unit();
      for (std::size_t k = pos + 1; k < word.size(); ++k) right = alg.multiply(right, alg.gen(word[k]));
      Element term = alg.multiply(alg.multiply(left, on_generators[word[pos]]), right);
      const int sign = (derivation_degree * prefix_degree) % 2 == 0 ? 1 : -1;
      out += Rational(sign) * c * term;
      prefix_degree += alg.generator(word[pos]).degree;
    }
  }
  return out;
}

}  // namespace cdgakit
