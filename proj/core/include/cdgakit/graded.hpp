#pragma once

// Free graded-commutative algebras on finitely many generators of positive
// degree. Monomials are exponent vectors in declaration order; odd
// generators have exponent at most one.

#include <compare>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cdgakit/exactlin.hpp"

namespace cdgakit {

struct GeneratorSpec {
  std::string name;
  int degree = 1;

  bool operator==(const GeneratorSpec&) const = default;
};

struct Monomial {
  std::vector<int> exponents;

  auto operator<=>(const Monomial&) const = default;
  bool operator==(const Monomial&) const = default;
};

class Element {
public:
  using Terms = std::map<Monomial, Rational>;

  Element() = default;
  Element(const Monomial& m, const Rational& c);

  const Terms& terms() const noexcept { return terms_; }
  bool is_zero() const noexcept { return terms_.empty(); }
  Rational coefficient(const Monomial& m) const;

  void add_term(const Monomial& m, const Rational& c);
  Element& operator+=(const Element& other);
  Element& operator-=(const Element& other);
  Element& operator*=(const Rational& s);

  friend Element operator+(Element a, const Element& b) { return a += b; }
  friend Element operator-(Element a, const Element& b) { return a -= b; }
  friend Element operator*(const Rational& s, Element a) { return a *= s; }
  friend Element operator-(Element a) { return a *= -1; }
  bool operator==(const Element&) const = default;

private:
  Terms terms_;
};

class FreeGCA {
public:
  FreeGCA() = default;
  explicit FreeGCA(std::vector<GeneratorSpec> generators);

  const std::vector<GeneratorSpec>& generators() const noexcept { return gens_; }
  std::size_t size() const noexcept { return gens_.size(); }
  const GeneratorSpec& generator(std::size_t i) const { return gens_.at(i); }
  /// Index of a generator by name; throws InputError when unknown.
  std::size_t index_of(std::string_view name) const;
  bool is_odd(std::size_t i) const { return gens_.at(i).degree % 2 != 0; }

  Monomial unit_monomial() const { return Monomial{std::vector<int>(gens_.size(), 0)}; }
  Monomial generator_monomial(std::size_t i) const;
  Element unit() const { return Element(unit_monomial(), 1); }
  Element gen(std::size_t i) const { return Element(generator_monomial(i), 1); }
  Element gen(std::string_view name) const { return gen(index_of(name)); }

  int degree(const Monomial& m) const;
  int word_length(const Monomial& m) const;
  /// Degree of a homogeneous nonzero element; throws InputError otherwise.
  int degree(const Element& e) const;
  bool is_homogeneous(const Element& e) const;

  /// Product of monomials with its Koszul sign; sign 0 means the product vanishes.
  std::pair<int, Monomial> multiply(const Monomial& a, const Monomial& b) const;
  Element multiply(const Element& a, const Element& b) const;
  Element power(const Element& a, int n) const;

  /// Monomials of total degree n in lexicographic order of exponent vectors.
  std::vector<Monomial> basis_in_degree(int n) const;

  std::string format(const Monomial& m) const;
  std::string format(const Element& e) const;
  /// Parses sums of terms like "x^2*y - 3/2 t1*t2"; factors may come in any
  /// order and are multiplied with Koszul signs.
  Element parse(std::string_view text) const;

  bool operator==(const FreeGCA&) const = default;

private:
  void check(const Monomial& m) const;

  std::vector<GeneratorSpec> gens_;
};

/// Graded derivation of the given degree determined by its generator values.
/// Applies D(ab) = D(a) b + (-1)^{deg(D) |a|} a D(b).
Element apply_derivation(const FreeGCA& alg, const std::vector<Element>& on_generators,
                         int derivation_degree, const Element& x);

}  // namespace cdgakit
