#pragma once

// Differential graded algebras: free presentations (FreeCDGA), explicit
// finite truncations (TruncatedDGA), morphisms and cohomology.

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "cdgakit/exactlin.hpp"
#include "cdgakit/graded.hpp"

namespace cdgakit {

/// (ΛV, d) with d given on generators and extended by the Leibniz rule.
class FreeCDGA {
public:
  FreeCDGA() = default;
  /// Throws InputError when a differential value is not homogeneous of
  /// degree |g| + 1. d^2 = 0 is not enforced here; see check_d_squared.
  FreeCDGA(FreeGCA algebra, std::vector<Element> differential);

  /// Convenience: generators plus "name" -> expression differentials.
  static FreeCDGA from_strings(std::vector<GeneratorSpec> generators,
                               const std::vector<std::pair<std::string, std::string>>& differential);

  const FreeGCA& algebra() const noexcept { return alg_; }
  const std::vector<Element>& differential() const noexcept { return d_; }
  const Element& d_of_generator(std::size_t i) const { return d_.at(i); }
  Element d(const Element& x) const;

  bool operator==(const FreeCDGA&) const = default;

private:
  FreeGCA alg_;
  std::vector<Element> d_;
};

struct DSquaredFailure {
  std::size_t generator;
  Element residue;
};

std::optional<DSquaredFailure> check_d_squared(const FreeCDGA& f);

/// Structure constants of a truncated algebra.
///
/// Products of degree i and j basis elements are stored for i + j <= cutoff.
/// A pair can still be undefined when the exact product leaves the finite
/// model (for example forms whose polynomial weight overflows); callers that
/// need such a product get CutoffTooSmall.
class ProductTable {
public:
  ProductTable() = default;
  ProductTable(std::size_t dim_i, std::size_t dim_j, std::size_t dim_target);

  std::size_t dim_i() const noexcept { return dim_i_; }
  std::size_t dim_j() const noexcept { return dim_j_; }
  bool defined(std::size_t a, std::size_t b) const { return defined_.at(a * dim_j_ + b) != 0; }
  const SparseVector& value(std::size_t a, std::size_t b) const { return values_.at(a * dim_j_ + b); }
  void set(std::size_t a, std::size_t b, SparseVector v);
  std::size_t undefined_count() const;

private:
  std::size_t dim_i_ = 0, dim_j_ = 0, dim_target_ = 0;
  std::vector<char> defined_;
  std::vector<SparseVector> values_;
};

/// A DG algebra given by explicit bases in degrees 0..cutoff.
///
/// differential(k) maps degree k to degree k + 1 for k < cutoff; d out of
/// the top degree is unknown, so cohomology is only reported below the
/// cutoff.
class TruncatedDGA {
public:
  struct Parts {
    int cutoff = 0;
    std::vector<std::vector<std::string>> labels;  // cutoff + 1 entries
    std::vector<QMatrix> differential;             // cutoff entries
    QVector unit;                                  // in degree 0
    bool has_products = true;
    std::vector<std::vector<ProductTable>> products;  // [i][j] for i + j <= cutoff
  };

  TruncatedDGA() = default;
  explicit TruncatedDGA(Parts parts);

  int cutoff() const noexcept { return parts_.cutoff; }
  std::size_t dim(int k) const;
  const std::vector<std::string>& labels(int k) const { return parts_.labels.at(static_cast<std::size_t>(k)); }
  const QMatrix& differential(int k) const;
  const QVector& unit() const noexcept { return parts_.unit; }
  bool has_products() const noexcept { return parts_.has_products; }
  const ProductTable& product_table(int i, int j) const;
  std::size_t total_dim() const;

  QVector d(int k, const QVector& x) const { return differential(k).apply(x); }
  std::optional<QVector> try_multiply(int i, const QVector& x, int j, const QVector& y) const;
  /// Throws CutoffTooSmall when the product is not available in the model.
  QVector multiply(int i, const QVector& x, int j, const QVector& y) const;
  std::optional<QVector> basis_product(int i, std::size_t a, int j, std::size_t b) const;

  QVector basis_vector(int k, std::size_t a) const { return unit_vector(dim(k), a); }
  std::string format(int k, const QVector& x) const;

  /// Structural checks: unit laws, d^2 = 0, Leibniz and graded commutativity
  /// on every basis pair where the products are defined. Returns the list of
  /// violations (empty when valid).
  std::vector<std::string> validate() const;
  /// Associativity on basis triples where all products are defined. With a
  /// nonzero budget only that many triples are tested (deterministic stride).
  std::vector<std::string> check_associativity(std::size_t budget = 0) const;

  const Parts& parts() const noexcept { return parts_; }

private:
  Parts parts_;
};

using DGAPtr = std::shared_ptr<const TruncatedDGA>;

/// Incremental construction of a TruncatedDGA.
class TruncatedDGABuilder {
public:
  explicit TruncatedDGABuilder(int cutoff);

  void set_basis(int k, std::vector<std::string> labels);
  void set_differential(int k, QMatrix m);
  void set_unit(QVector unit);
  void disable_products();
  /// Fills every (i, j) table with i + j <= cutoff from a callback returning
  /// the product of basis elements or nullopt when undefined.
  void fill_products(
      const std::function<std::optional<SparseVector>(int, std::size_t, int, std::size_t)>& fn);
  void set_product(int i, std::size_t a, int j, std::size_t b, SparseVector value);

  std::size_t dim(int k) const { return parts_.labels.at(static_cast<std::size_t>(k)).size(); }
  TruncatedDGA build();

private:
  void ensure_tables();

  TruncatedDGA::Parts parts_;
  bool tables_ready_ = false;
};

/// The free algebra truncated at degree N: bases are basis_in_degree outputs.
TruncatedDGA truncate(const FreeCDGA& f, int cutoff);

/// ΛV/(monomial ideal) truncated at degree N. The ideal must be stable
/// under d; otherwise InputError.
TruncatedDGA monomial_quotient(const FreeCDGA& f, const std::vector<Monomial>& killed, int cutoff);

/// Q concentrated in degree 0.
TruncatedDGA point_dga(int cutoff);

/// A x B with componentwise operations; cutoff = min of the cutoffs.
TruncatedDGA direct_product(const TruncatedDGA& a, const TruncatedDGA& b);

/// A ⊗ B with the Koszul sign rule. Basis of degree k lists pairs (i, a, b)
/// with i ascending, then a, then b.
struct TensorDGA {
  TruncatedDGA dga;
  std::size_t index(int i, std::size_t a, int j, std::size_t b) const;

  std::vector<std::vector<std::size_t>> offsets;  // offsets[k][i]
  std::vector<std::size_t> dims_b;                // dims of the right factor
};
TensorDGA tensor_product(const TruncatedDGA& a, const TruncatedDGA& b, int cutoff);

class DGMorphism;
/// f ⊗ g from source = A ⊗ B to target = A' ⊗ B' for f: A -> A', g: B -> B'.
DGMorphism tensor_morphism(DGAPtr source, const TensorDGA& st, DGAPtr target, const TensorDGA& tt,
                           const DGMorphism& f, const DGMorphism& g);

/// Per-degree linear map between truncated DGAs (degrees 0..min cutoff).
class DGMorphism {
public:
  DGMorphism() = default;
  DGMorphism(DGAPtr source, DGAPtr target, std::vector<QMatrix> maps);

  static DGMorphism identity(DGAPtr a);
  /// Maps everything of positive degree to zero and the unit to the unit
  /// (only a DG morphism when that is compatible with the source).
  static DGMorphism augmentation_like(DGAPtr source, DGAPtr target, QMatrix degree_zero);

  const DGAPtr& source() const noexcept { return source_; }
  const DGAPtr& target() const noexcept { return target_; }
  int top_degree() const noexcept { return static_cast<int>(maps_.size()) - 1; }
  const QMatrix& matrix(int k) const;
  QVector apply(int k, const QVector& x) const { return matrix(k).apply(x); }

  /// Chain-map, unit and multiplicativity checks (multiplicativity on basis
  /// pairs where both products are defined). Empty when valid.
  std::vector<std::string> validate() const;

private:
  DGAPtr source_, target_;
  std::vector<QMatrix> maps_;
};

/// g ∘ f.
DGMorphism compose(const DGMorphism& g, const DGMorphism& f);

/// Cohomology up to a degree, with canonical representatives.
class GradedCohomology {
public:
  GradedCohomology() = default;
  GradedCohomology(const TruncatedDGA& a, int upto);

  int upto() const noexcept { return upto_; }
  std::size_t dim(int k) const { return groups_.at(static_cast<std::size_t>(k)).dim(); }
  std::vector<std::size_t> dims() const;
  const std::vector<QVector>& representatives(int k) const {
    return groups_.at(static_cast<std::size_t>(k)).representatives();
  }
  const Subquotient& group(int k) const { return groups_.at(static_cast<std::size_t>(k)); }
  /// Class coordinates of a cocycle; InputError if x is not a cocycle.
  QVector class_of(int k, const QVector& x) const { return group(k).coordinates(x); }

  /// Product of classes, nullopt when some representative product is not
  /// available in the truncated model or i + j > upto.
  std::optional<QVector> product(int i, std::size_t a, int j, std::size_t b) const;

private:
  int upto_ = -1;
  std::vector<Subquotient> groups_;
  // products_[i][j][a * dim_j + b]
  std::vector<std::vector<std::vector<std::optional<QVector>>>> products_;
};

/// H^k for k <= upto. Requires upto < cutoff (InputError otherwise).
GradedCohomology cohomology(const TruncatedDGA& a, int upto);

/// Induced maps H^k(source) -> H^k(target) for k <= upto. Throws
/// InputError when h is not a cochain map in that range.
std::vector<QMatrix> induced_map(const DGMorphism& h, int upto);
std::vector<QMatrix> induced_map(const DGMorphism& h, const GradedCohomology& hs,
                                 const GradedCohomology& ht);

struct QuasiIsoResult {
  bool ok = true;
  std::optional<int> first_failing_degree;
  explicit operator bool() const noexcept { return ok; }
};

QuasiIsoResult is_quasi_iso(const DGMorphism& h, int upto);

}  // namespace cdgakit
