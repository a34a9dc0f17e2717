#pragma once

// Polynomial differential forms on standard simplices and on finite ordered
// simplicial complexes.
//
// On Δ[n] the coordinates are t1..tn with t0 = 1 - (t1 + ... + tn). A term
// is p(t) dt_S for a monomial p and a subset S of {1..n} stored as a bit
// mask (bit i-1 for dt_i). The weight of a term is deg p + |S|; finite
// bases bound the weight by D, which is preserved by d, by face restriction
// and by the contraction.

#include <array>
#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cdgakit/cdga.hpp"
#include "cdgakit/complex.hpp"
#include "cdgakit/exactlin.hpp"

namespace cdgakit {

struct FormKey {
  std::vector<int> exponents;
  unsigned mask = 0;

  auto operator<=>(const FormKey&) const = default;
  bool operator==(const FormKey&) const = default;
  int form_degree() const;
  int poly_degree() const;
  int weight() const { return poly_degree() + form_degree(); }
};

class PolyForm {
public:
  using Terms = std::map<FormKey, Rational>;

  PolyForm() = default;
  explicit PolyForm(int n);

  static PolyForm constant(int n, const Rational& c);
  /// t_i for 1 <= i <= n; i = 0 gives t0 = 1 - sum t.
  static PolyForm coordinate(int n, int i);
  /// dt_i; i = 0 gives -sum dt.
  static PolyForm differential(int n, int i);
  static PolyForm term(int n, std::vector<int> exponents, unsigned mask, const Rational& c = 1);

  int dim() const noexcept { return n_; }
  const Terms& terms() const noexcept { return terms_; }
  bool is_zero() const noexcept { return terms_.empty(); }
  /// Form degree when all terms share it (and the form is nonzero).
  std::optional<int> degree() const;
  /// Max weight over terms; -1 for the zero form.
  int weight() const;
  /// The part of form degree k.
  PolyForm component(int k) const;

  void add_term(const FormKey& key, const Rational& c);
  PolyForm& operator+=(const PolyForm& o);
  PolyForm& operator-=(const PolyForm& o);
  PolyForm& operator*=(const Rational& s);
  friend PolyForm operator+(PolyForm a, const PolyForm& b) { return a += b; }
  friend PolyForm operator-(PolyForm a, const PolyForm& b) { return a -= b; }
  friend PolyForm operator*(const Rational& s, PolyForm a) { return a *= s; }
  bool operator==(const PolyForm&) const = default;

  std::string format() const;

private:
  void check(const PolyForm& o) const;

  int n_ = 0;
  Terms terms_;
};

std::string format_key(const FormKey& key);

PolyForm d(const PolyForm& w);
PolyForm wedge(const PolyForm& a, const PolyForm& b);
/// Pullback along the affine inclusion of a face tau of Δ[n]; positions
/// lists the vertices of tau as increasing positions 0..n.
PolyForm restrict_to_face(const PolyForm& w, const std::vector<std::size_t>& positions);
/// The i-th face (omit vertex i), 0 <= i <= n.
PolyForm face_restrict(const PolyForm& w, int i);
/// Exact integral of a top-degree form over Δ[n] (the value for n = 0).
Rational integrate(const PolyForm& w);
/// Cone contraction toward vertex 0: dh + hd = id - ε.
PolyForm contraction(const PolyForm& w);
/// ε: the value at vertex 0 of the degree-0 part, as a constant form.
PolyForm evaluate_at_vertex0(const PolyForm& w);
/// ∂f/∂t_i of the degree-0 part, 1 <= i <= n.
PolyForm partial(const PolyForm& f, int i);

/// Basis of weight <= D forms of degree k on Δ[n]: form keys ordered by mask,
/// then by exponent vector.
struct FormBasis {
  int n = 0, k = 0, weight = 0;
  std::vector<FormKey> keys;
  std::map<FormKey, std::size_t> index;
  std::size_t size() const noexcept { return keys.size(); }
  QVector coordinates(const PolyForm& w) const;  // InputError when out of range
  std::optional<QVector> try_coordinates(const PolyForm& w) const;
  PolyForm form(const QVector& coords) const;
};
const FormBasis& form_basis(int n, int k, int weight);
std::vector<std::string> form_labels(int n, int k, int weight);

/// Matrix of face_restrict(., i) from degree-k weight-D forms on Δ[n] to Δ[n-1].
const QMatrix& face_restriction_matrix(int n, int i, int k, int weight);
/// Matrix of d on weight-D forms of degree k on Δ[n].
const QMatrix& form_differential_matrix(int n, int k, int weight);

/// A^*_D(Δ[n]) as a truncated DGA (basis labels are the forms).
TruncatedDGA simplex_forms_dga(int n, int weight, int cutoff);

/// A family of forms indexed by simplices (missing simplices carry 0).
struct SimplicialForm {
  SimplicialComplexK base;
  std::map<Simplex, PolyForm> forms;

  PolyForm on(const Simplex& s) const;
  /// Face pairs where the restriction of the form on sigma differs from the
  /// form on tau.
  std::vector<std::pair<Simplex, Simplex>> clashes() const;
  SimplicialForm restricted_to(const SimplicialComplexK& sub) const;
};

/// Values of integrate(ω_σ) on the k-simplices.
std::map<Simplex, Rational> integration_cochain(const SimplicialForm& w, int k);
/// Simplicial coboundary (δc)(σ) = Σ (-1)^i c(∂_i σ) of a (k-1)-cochain.
std::map<Simplex, Rational> coboundary(const SimplicialComplexK& K, const std::map<Simplex, Rational>& c, int k);

/// Extends a compatible family on L to K (L a subcomplex of K).
SimplicialForm extend(const SimplicialForm& on_l, const SimplicialComplexK& k);

/// A^*_D(K) with carriers given by compatibility kernels.
struct FormsDGA {
  SimplicialComplexK complex;
  int weight = 0;
  std::vector<Kernel> carriers;  // per degree
  std::vector<std::map<Simplex, std::size_t>> offsets;  // per degree
  std::vector<std::size_t> ambient_dims;
  DGAPtr dga;

  QVector ambient(int k, const SimplicialForm& w) const;
  QVector coordinates(int k, const SimplicialForm& w) const;
  SimplicialForm form(int k, const QVector& coords) const;
};

FormsDGA forms_dga(const SimplicialComplexK& k, int weight, int cutoff, bool with_products = true);
/// Restriction A(K) -> A(L) for L a subcomplex; both built with the same weight.
DGMorphism forms_restriction(const FormsDGA& big, const FormsDGA& small);

struct AxiomResult {
  bool passed = true;
  std::size_t cases = 0;
  std::vector<std::string> failures;
};

struct AdmissibleReport {
  std::array<AxiomResult, 5> axioms;
  bool all_passed() const;
  std::string format() const;
};

/// Checks the five admissibility conditions on Δ[0..n_max] with randomized
/// samples. sample_budget controls the number of samples per condition.
AdmissibleReport check_admissible_axioms(int n_max, std::size_t sample_budget, std::uint64_t seed = 1);

}  // namespace cdgakit
