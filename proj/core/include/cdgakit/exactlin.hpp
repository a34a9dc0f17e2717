#pragma once

// Exact linear algebra over Q.
//
// Every cohomology, rank and solve in the library goes through this file.
// Scalars are GMP rationals (always canonical: lowest terms, positive
// denominator). Matrices store sparse rows; elimination switches to a dense
// working copy when the matrix has fewer than 64 columns.

#include <gmpxx.h>

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cdgakit/errors.hpp"

namespace cdgakit {

using Rational = mpq_class;
using QVector = std::vector<Rational>;
using SparseVector = std::vector<std::pair<std::size_t, Rational>>;

/// Parses "p/q", "p" or "-p/q". Decimal notation is rejected.
Rational parse_rational(std::string_view text);
/// n/d in lowest terms (d != 0).
Rational ratio(long n, long d);
std::string to_string(const Rational& q);

/// Bit length of numerator times denominator; the pivot tie-break measure.
std::size_t bit_length(const Rational& q);

QVector zero_vector(std::size_t n);
QVector unit_vector(std::size_t n, std::size_t i);
bool is_zero(const QVector& v);
QVector& axpy(QVector& y, const Rational& a, const QVector& x);  // y += a x
QVector operator+(const QVector& a, const QVector& b);
QVector operator-(const QVector& a, const QVector& b);
QVector operator*(const Rational& s, const QVector& v);

SparseVector to_sparse(const QVector& v);
QVector to_dense(const SparseVector& v, std::size_t n);

class QMatrix {
public:
  using Row = SparseVector;  // sorted by column, no stored zeros

  QMatrix() = default;
  QMatrix(std::size_t rows, std::size_t cols);

  static QMatrix identity(std::size_t n);
  static QMatrix from_rows(const std::vector<QVector>& rows, std::size_t cols);
  static QMatrix from_columns(const std::vector<QVector>& cols, std::size_t rows);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t nnz() const noexcept;

  Rational at(std::size_t r, std::size_t c) const;
  void set(std::size_t r, std::size_t c, const Rational& v);
  void add(std::size_t r, std::size_t c, const Rational& v);
  const Row& row(std::size_t r) const { return data_.at(r); }
  void set_row(std::size_t r, Row row);

  QVector apply(const QVector& x) const;
  QVector column(std::size_t c) const;
  QVector dense_row(std::size_t r) const;
  QMatrix transposed() const;
  std::vector<QVector> to_dense_rows() const;
  bool is_zero() const noexcept { return nnz() == 0; }

  /// Restriction to a subset of rows (in the given order).
  QMatrix select_rows(const std::vector<std::size_t>& idx) const;
  /// [this | other]
  QMatrix hstack(const QMatrix& other) const;
  /// [this ; other]
  QMatrix vstack(const QMatrix& other) const;

  friend QMatrix operator*(const QMatrix& a, const QMatrix& b);
  friend QMatrix operator+(const QMatrix& a, const QMatrix& b);
  friend QMatrix operator-(const QMatrix& a, const QMatrix& b);
  friend QMatrix operator*(const Rational& s, const QMatrix& m);
  friend bool operator==(const QMatrix& a, const QMatrix& b);

private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Row> data_;
};

struct RrefResult {
  std::size_t rank = 0;
  std::vector<std::size_t> pivots;
  QMatrix reduced;  // same shape as the input; zero rows at the bottom
};

RrefResult rref(const QMatrix& m);
std::size_t rank(const QMatrix& m);
std::size_t rank(const std::vector<QVector>& vectors, std::size_t ambient_dim);

/// Kernel with the free-column layout: basis vector j has a 1 in
/// free_columns[j] and 0 in every other free column, so the coordinates of
/// any kernel element are read off at the free columns.
struct Kernel {
  std::vector<QVector> basis;
  std::vector<std::size_t> free_columns;
  std::size_t ambient = 0;

  std::size_t dim() const noexcept { return basis.size(); }
  QVector coordinates(const QVector& x) const;
  QVector embed(const QVector& coords) const;
};

Kernel kernel(const QMatrix& m);
std::vector<QVector> kernel_basis(const QMatrix& m);

/// Some x with m x = b, or nullopt. Throws InputError on a length mismatch.
std::optional<QVector> solve(const QMatrix& m, const QVector& b);

/// Canonical basis of span(vectors): the nonzero rows of the RREF.
std::vector<QVector> row_space_basis(const std::vector<QVector>& vectors, std::size_t ambient_dim);
/// Column space of m, as RREF rows of m^T.
std::vector<QVector> image_basis(const QMatrix& m);

/// Standard unit vectors completing span(sub) to the whole space.
std::vector<QVector> complement_basis(const std::vector<QVector>& sub, std::size_t ambient_dim);

std::optional<QMatrix> inverse(const QMatrix& m);

/// Z / D for subspaces D <= Z of Q^n given by spanning sets.
///
/// Representatives are the first Z-basis vectors (canonical RREF order) that
/// are independent of D, so class names are reproducible.
class Subquotient {
public:
  Subquotient() = default;
  Subquotient(const std::vector<QVector>& z_span, const std::vector<QVector>& d_span,
              std::size_t ambient);

  std::size_t dim() const noexcept { return reps_.size(); }
  std::size_t ambient() const noexcept { return ambient_; }
  const std::vector<QVector>& representatives() const noexcept { return reps_; }
  const std::vector<QVector>& trivial_basis() const noexcept { return d_basis_; }

  bool contains(const QVector& x) const;     // x in Z
  bool is_trivial(const QVector& x) const;   // x in D
  /// Class coordinates of x in Z; throws InputError if x is not in Z.
  QVector coordinates(const QVector& x) const;
  std::optional<QVector> try_coordinates(const QVector& x) const;

private:
  std::size_t ambient_ = 0;
  std::vector<QVector> reps_;
  std::vector<QVector> d_basis_;
  // RREF of [reps; d_basis] and the transform T with R = T W.
  std::vector<QVector> reduced_;
  std::vector<std::size_t> pivots_;
  std::vector<QVector> transform_;
};

/// Homology at the middle of X --a--> Y --b--> W. Throws InputError when
/// b a != 0 or the shapes disagree.
Subquotient homology_at(const QMatrix& incoming, const QMatrix& outgoing);

}  // namespace cdgakit
