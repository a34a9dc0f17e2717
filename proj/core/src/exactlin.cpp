#include "cdgakit/exactlin.hpp"

#include <algorithm>
#include <cctype>
#include <limits>

namespace cdgakit {

Rational parse_rational(std::string_view text) {
  std::string s;
  for (char ch : text) {
    if (!std::isspace(static_cast<unsigned char>(ch))) s.push_back(ch);
  }
  if (s.empty()) throw InputError("empty rational literal");
  auto valid_int = [](std::string_view part) {
    std::size_t i = 0;
    if (!part.empty() && (part[0] == '-' || part[0] == '+')) i = 1;
    if (i >= part.size()) return false;
    for (; i < part.size(); ++i) {
      if (!std::isdigit(static_cast<unsigned char>(part[i]))) return false;
    }
    return true;
  };
  const auto slash = s.find('/');
  std::string num = s.substr(0, slash);
  std::string den = slash == std::string::npos ? "1" : s.substr(slash + 1);
  if (!valid_int(num) || !valid_int(den) || den[0] == '-' || den[0] == '+') {
    throw InputError("bad rational literal '" + std::string(text) + "' (expected p or p/q)");
  }
  if (num[0] == '+') num.erase(0, 1);
  mpz_class n(num), d(den);
  if (d == 0) throw InputError("zero denominator in '" + std::string(text) + "'");
  Rational q(n, d);
  q.canonicalize();
  return q;
}

Rational ratio(long n, long d) {
  if (d == 0) throw InputError("zero denominator");
  Rational q(n, d);
  q.canonicalize();
  return q;
}

std::string to_string(const Rational& q) { return q.get_str(); }

std::size_t bit_length(const Rational& q) {
  return mpz_sizeinbase(q.get_num_mpz_t(), 2) + mpz_sizeinbase(q.get_den_mpz_t(), 2);
}

QVector zero_vector(std::size_t n) { return QVector(n); }

QVector unit_vector(std::size_t n, std::size_t i) {
  QVector v(n);
  v.at(i) = 1;
  return v;
}

bool is_zero(const QVector& v) {
  return std::all_of(v.begin(), v.end(), [](const Rational& x) { return sgn(x) == 0; });
}

QVector& axpy(QVector& y, const Rational& a, const QVector& x) {
  if (y.size() != x.size()) throw InputError("axpy: length mismatch");
  if (sgn(a) == 0) return y;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (sgn(x[i]) != 0) y[i] += a * x[i];
  }
  return y;
}

QVector operator+(const QVector& a, const QVector& b) {
  QVector r = a;
  return axpy(r, 1, b);
}

QVector operator-(const QVector& a, const QVector& b) {
  QVector r = a;
  return axpy(r, -1, b);
}

QVector operator*(const Rational& s, const QVector& v) {
  QVector r(v.size());
  if (sgn(s) == 0) return r;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (sgn(v[i]) != 0) r[i] = s * v[i];
  }
  return r;
}

SparseVector to_sparse(const QVector& v) {
  SparseVector out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (sgn(v[i]) != 0) out.emplace_back(i, v[i]);
  }
  return out;
}

QVector to_dense(const SparseVector& v, std::size_t n) {
  QVector out(n);
  for (const auto& [i, x] : v) out.at(i) += x;
  return out;
}

namespace {

// y <- y + a x for sorted sparse rows.
SparseVector sparse_axpy(const SparseVector& y, const Rational& a, const SparseVector& x) {
  SparseVector out;
  out.reserve(y.size() + x.size());
  auto iy = y.begin();
  auto ix = x.begin();
  while (iy != y.end() || ix != x.end()) {
    if (ix == x.end() || (iy != y.end() && iy->first < ix->first)) {
      out.push_back(*iy++);
    } else if (iy == y.end() || ix->first < iy->first) {
      out.emplace_back(ix->first, a * ix->second);
      ++ix;
    } else {
      Rational v = iy->second + a * ix->second;
      if (sgn(v) != 0) out.emplace_back(iy->first, std::move(v));
      ++iy;
      ++ix;
    }
  }
  return out;
}

}  // namespace

QMatrix::QMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows) {}

QMatrix QMatrix::identity(std::size_t n) {
  QMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m.data_[i].emplace_back(i, 1);
  return m;
}

QMatrix QMatrix::from_rows(const std::vector<QVector>& rows, std::size_t cols) {
  QMatrix m(rows.size(), cols);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != cols) throw InputError("from_rows: ragged rows");
    m.data_[r] = to_sparse(rows[r]);
  }
  return m;
}

QMatrix QMatrix::from_columns(const std::vector<QVector>& cols, std::size_t rows) {
  QMatrix m(rows, cols.size());
  for (std::size_t c = 0; c < cols.size(); ++c) {
    if (cols[c].size() != rows) throw InputError("from_columns: ragged columns");
    for (std::size_t r = 0; r < rows; ++r) {
      if (sgn(cols[c][r]) != 0) m.data_[r].emplace_back(c, cols[c][r]);
    }
  }
  return m;
}

std::size_t QMatrix::nnz() const noexcept {
  std::size_t n = 0;
  for (const auto& row : data_) n += row.size();
  return n;
}

Rational QMatrix::at(std::size_t r, std::size_t c) const {
  if (r >= rows_ || c >= cols_) throw InputError("QMatrix::at out of range");
  const auto& row = data_[r];
  auto it = std::lower_bound(row.begin(), row.end(), c,
                             [](const auto& e, std::size_t col) { return e.first < col; });
  if (it != row.end() && it->first == c) return it->second;
  return 0;
}

void QMatrix::set(std::size_t r, std::size_t c, const Rational& v) {
  if (r >= rows_ || c >= cols_) throw InputError("QMatrix::set out of range");
  auto& row = data_[r];
  auto it = std::lower_bound(row.begin(), row.end(), c,
                             [](const auto& e, std::size_t col) { return e.first < col; });
  if (it != row.end() && it->first == c) {
    if (sgn(v) == 0) {
      row.erase(it);
    } else {
      it->second = v;
    }
  } else if (sgn(v) != 0) {
    row.insert(it, {c, v});
  }
}

void QMatrix::add(std::size_t r, std::size_t c, const Rational& v) {
  if (sgn(v) == 0) return;
  set(r, c, at(r, c) + v);
}

void QMatrix::set_row(std::size_t r, Row row) {
  if (r >= rows_) throw InputError("QMatrix::set_row out of range");
  std::sort(row.begin(), row.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  Row clean;
  for (auto& [c, v] : row) {
    if (c >= cols_) throw InputError("QMatrix::set_row column out of range");
    if (!clean.empty() && clean.back().first == c) {
      clean.back().second += v;
    } else {
      clean.emplace_back(c, std::move(v));
    }
  }
  std::erase_if(clean, [](const auto& e) { return sgn(e.second) == 0; });
  data_[r] = std::move(clean);
}

QVector QMatrix::apply(const QVector& x) const {
  if (x.size() != cols_) throw InputError("QMatrix::apply: length mismatch");
  QVector y(rows_);
  for (std::size_t r = 0; r < rows_; ++r) {
    for (const auto& [c, v] : data_[r]) {
      if (sgn(x[c]) != 0) y[r] += v * x[c];
    }
  }
  return y;
}

QVector QMatrix::column(std::size_t c) const {
  QVector out(rows_);
  for (std::size_t r = 0; r < rows_; ++r) out[r] = at(r, c);
  return out;
}

QVector QMatrix::dense_row(std::size_t r) const { return to_dense(data_.at(r), cols_); }

QMatrix QMatrix::transposed() const {
  QMatrix t(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r) {
    for (const auto& [c, v] : data_[r]) t.data_[c].emplace_back(r, v);
  }
  return t;
}

std::vector<QVector> QMatrix::to_dense_rows() const {
  std::vector<QVector> out;
  out.reserve(rows_);
  for (std::size_t r = 0; r < rows_; ++r) out.push_back(dense_row(r));
  return out;
}

QMatrix QMatrix::select_rows(const std::vector<std::size_t>& idx) const {
  QMatrix m(idx.size(), cols_);
  for (std::size_t i = 0; i < idx.size(); ++i) m.data_[i] = data_.at(idx[i]);
  return m;
}

QMatrix QMatrix::hstack(const QMatrix& other) const {
  if (rows_ != other.rows_) throw InputError("hstack: row count mismatch");
  QMatrix m(rows_, cols_ + other.cols_);
  for (std::size_t r = 0; r < rows_; ++r) {
    m.data_[r] = data_[r];
    for (const auto& [c, v] : other.data_[r]) m.data_[r].emplace_back(c + cols_, v);
  }
  return m;
}

QMatrix QMatrix::vstack(const QMatrix& other) const {
  if (cols_ != other.cols_) throw InputError("vstack: column count mismatch");
  QMatrix m(rows_ + other.rows_, cols_);
  std::copy(data_.begin(), data_.end(), m.data_.begin());
  std::copy(other.data_.begin(), other.data_.end(), m.data_.begin() + static_cast<std::ptrdiff_t>(rows_));
  return m;
}

QMatrix operator*(const QMatrix& a, const QMatrix& b) {
  if (a.cols_ != b.rows_) throw InputError("matrix product: shape mismatch");
  QMatrix m(a.rows_, b.cols_);
  for (std::size_t r = 0; r < a.rows_; ++r) {
    SparseVector acc;
    for (const auto& [k, v] : a.data_[r]) acc = sparse_axpy(acc, v, b.data_[k]);
    m.data_[r] = std::move(acc);
  }
  return m;
}

QMatrix operator+(const QMatrix& a, const QMatrix& b) {
  if (a.rows_ != b.rows_ || a.cols_ != b.cols_) throw InputError("matrix sum: shape mismatch");
  QMatrix m(a.rows_, a.cols_);
  for (std::size_t r = 0; r < a.rows_; ++r) m.data_[r] = sparse_axpy(a.data_[r], 1, b.data_[r]);
  return m;
}

QMatrix operator-(const QMatrix& a, const QMatrix& b) {
  if (a.rows_ != b.rows_ || a.cols_ != b.cols_) throw InputError("matrix difference: shape mismatch");
  QMatrix m(a.rows_, a.cols_);
  for (std::size_t r = 0; r < a.rows_; ++r) m.data_[r] = sparse_axpy(a.data_[r], -1, b.data_[r]);
  return m;
}

QMatrix operator*(const Rational& s, const QMatrix& a) {
  QMatrix m(a.rows_, a.cols_);
  if (sgn(s) == 0) return m;
  for (std::size_t r = 0; r < a.rows_; ++r) {
    for (const auto& [c, v] : a.data_[r]) m.data_[r].emplace_back(c, s * v);
  }
  return m;
}

bool operator==(const QMatrix& a, const QMatrix& b) {
  return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
}

namespace {

constexpr std::size_t kDenseColumnLimit = 64;

RrefResult rref_dense(const QMatrix& m) {
  auto rows = m.to_dense_rows();
  const std::size_t nrows = rows.size();
  const std::size_t ncols = m.cols();
  RrefResult res;
  std::size_t r = 0;
  for (std::size_t c = 0; c < ncols && r < nrows; ++c) {
    std::size_t best = nrows;
    std::size_t best_bits = std::numeric_limits<std::size_t>::max();
    for (std::size_t i = r; i < nrows; ++i) {
      if (sgn(rows[i][c]) == 0) continue;
      const auto bits = bit_length(rows[i][c]);
      if (bits < best_bits) {
        best = i;
        best_bits = bits;
      }
    }
    if (best == nrows) continue;
    std::swap(rows[r], rows[best]);
    const Rational inv = 1 / rows[r][c];
    for (std::size_t j = c; j < ncols; ++j) rows[r][j] *= inv;
    for (std::size_t i = 0; i < nrows; ++i) {
      if (i == r || sgn(rows[i][c]) == 0) continue;
      const Rational f = rows[i][c];
      for (std::size_t j = c; j < ncols; ++j) {
        if (sgn(rows[r][j]) != 0) rows[i][j] -= f * rows[r][j];
      }
    }
    res.pivots.push_back(c);
    ++r;
  }
  res.rank = r;
  res.reduced = QMatrix::from_rows(rows, ncols);
  return res;
}

RrefResult rref_sparse(const QMatrix& m) {
  std::vector<SparseVector> pending;
  for (std::size_t r = 0; r < m.rows(); ++r) {
    if (!m.row(r).empty()) pending.push_back(m.row(r));
  }
  std::vector<SparseVector> done;
  RrefResult res;
  while (!pending.empty()) {
    std::size_t lead = std::numeric_limits<std::size_t>::max();
    for (const auto& row : pending) lead = std::min(lead, row.front().first);
    std::size_t best = pending.size();
    std::size_t best_bits = std::numeric_limits<std::size_t>::max();
    for (std::size_t i = 0; i < pending.size(); ++i) {
      if (pending[i].front().first != lead) continue;
      const auto bits = bit_length(pending[i].front().second);
      if (bits < best_bits) {
        best = i;
        best_bits = bits;
      }
    }
    SparseVector piv = std::move(pending[best]);
    pending.erase(pending.begin() + static_cast<std::ptrdiff_t>(best));
    const Rational inv = 1 / piv.front().second;
    for (auto& e : piv) e.second *= inv;
    auto eliminate = [&](SparseVector& row) {
      auto it = std::lower_bound(row.begin(), row.end(), lead,
                                 [](const auto& e, std::size_t col) { return e.first < col; });
      if (it == row.end() || it->first != lead) return;
      const Rational f = -it->second;
      row = sparse_axpy(row, f, piv);
    };
    for (auto& row : pending) eliminate(row);
    for (auto& row : done) eliminate(row);
    std::erase_if(pending, [](const SparseVector& row) { return row.empty(); });
    res.pivots.push_back(lead);
    done.push_back(std::move(piv));
  }
  res.rank = done.size();
  res.reduced = QMatrix(m.rows(), m.cols());
  for (std::size_t i = 0; i < done.size(); ++i) res.reduced.set_row(i, std::move(done[i]));
  return res;
}

}  // namespace

RrefResult rref(const QMatrix& m) {
  if (m.cols() < kDenseColumnLimit && m.rows() * m.cols() <= 64 * 64 * 4) return rref_dense(m);
  return rref_sparse(m);
}

std::size_t rank(const QMatrix& m) { return rref(m).rank; }

std::size_t rank(const std::vector<QVector>& vectors, std::size_t ambient_dim) {
  if (vectors.empty()) return 0;
  return rank(QMatrix::from_rows(vectors, ambient_dim));
}

QVector Kernel::coordinates(const QVector& x) const {
  if (x.size() != ambient) throw InputError("Kernel::coordinates: length mismatch");
  QVector c(free_columns.size());
  for (std::size_t j = 0; j < free_columns.size(); ++j) c[j] = x[free_columns[j]];
  return c;
}

QVector Kernel::embed(const QVector& coords) const {
  if (coords.size() != basis.size()) throw InputError("Kernel::embed: length mismatch");
  QVector x(ambient);
  for (std::size_t j = 0; j < basis.size(); ++j) axpy(x, coords[j], basis[j]);
  return x;
}

Kernel kernel(const QMatrix& m) {
  Kernel k;
  k.ambient = m.cols();
  const auto rr = rref(m);
  std::vector<bool> is_pivot(m.cols(), false);
  for (auto p : rr.pivots) is_pivot[p] = true;
  for (std::size_t f = 0; f < m.cols(); ++f) {
    if (is_pivot[f]) continue;
    QVector v(m.cols());
    v[f] = 1;
    for (std::size_t i = 0; i < rr.rank; ++i) v[rr.pivots[i]] = -rr.reduced.at(i, f);
    k.basis.push_back(std::move(v));
    k.free_columns.push_back(f);
  }
  return k;
}

std::vector<QVector> kernel_basis(const QMatrix& m) { return kernel(m).basis; }

std::optional<QVector> solve(const QMatrix& m, const QVector& b) {
  if (b.size() != m.rows()) throw InputError("solve: right-hand side length does not match row count");
  QMatrix aug = m.hstack(QMatrix::from_columns({b}, m.rows()));
  const auto rr = rref(aug);
  if (!rr.pivots.empty() && rr.pivots.back() == m.cols()) return std::nullopt;
  QVector x(m.cols());
  for (std::size_t i = 0; i < rr.rank; ++i) x[rr.pivots[i]] = rr.reduced.at(i, m.cols());
  return x;
}

std::vector<QVector> row_space_basis(const std::vector<QVector>& vectors, std::size_t ambient_dim) {
  if (vectors.empty()) return {};
  const auto rr = rref(QMatrix::from_rows(vectors, ambient_dim));
  std::vector<QVector> out;
  for (std::size_t i = 0; i < rr.rank; ++i) out.push_back(rr.reduced.dense_row(i));
  return out;
}

std::vector<QVector> image_basis(const QMatrix& m) {
  const auto t = m.transposed();
  const auto rr = rref(t);
  std::vector<QVector> out;
  for (std::size_t i = 0; i < rr.rank; ++i) out.push_back(rr.reduced.dense_row(i));
  return out;
}

std::vector<QVector> complement_basis(const std::vector<QVector>& sub, std::size_t ambient_dim) {
  std::vector<bool> is_pivot(ambient_dim, false);
  if (!sub.empty()) {
    for (auto p : rref(QMatrix::from_rows(sub, ambient_dim)).pivots) is_pivot[p] = true;
  }
  std::vector<QVector> out;
  for (std::size_t i = 0; i < ambient_dim; ++i) {
    if (!is_pivot[i]) out.push_back(unit_vector(ambient_dim, i));
  }
  return out;
}

std::optional<QMatrix> inverse(const QMatrix& m) {
  if (m.rows() != m.cols()) throw InputError("inverse: matrix is not square");
  const std::size_t n = m.rows();
  const auto rr = rref(m.hstack(QMatrix::identity(n)));
  if (rr.rank < n || (n > 0 && rr.pivots[n - 1] >= n)) return std::nullopt;
  QMatrix inv(n, n);
  for (std::size_t r = 0; r < n; ++r) {
    SparseVector row;
    for (const auto& [c, v] : rr.reduced.row(r)) {
      if (c >= n) row.emplace_back(c - n, v);
    }
    inv.set_row(r, std::move(row));
  }
  return inv;
}

namespace {

// Incremental echelon form used to pick representatives independent of a
// fixed subspace.
class Echelon {
public:
  explicit Echelon(std::size_t n) : n_(n) {}

  // Returns true and records v when it is independent of the stored rows.
  bool insert(QVector v) {
    reduce(v);
    std::size_t lead = n_;
    for (std::size_t i = 0; i < n_; ++i) {
      if (sgn(v[i]) != 0) {
        lead = i;
        break;
      }
    }
    if (lead == n_) return false;
    const Rational inv = 1 / v[lead];
    for (auto& x : v) x *= inv;
    rows_.push_back(std::move(v));
    leads_.push_back(lead);
    return true;
  }

private:
  void reduce(QVector& v) const {
    for (std::size_t i = 0; i < rows_.size(); ++i) {
      if (sgn(v[leads_[i]]) == 0) continue;
      const Rational f = -v[leads_[i]];
      axpy(v, f, rows_[i]);
    }
  }

  std::size_t n_;
  std::vector<QVector> rows_;
  std::vector<std::size_t> leads_;
};

}  // namespace

Subquotient::Subquotient(const std::vector<QVector>& z_span, const std::vector<QVector>& d_span,
                         std::size_t ambient)
    : ambient_(ambient) {
  for (const auto& v : z_span) {
    if (v.size() != ambient) throw InputError("Subquotient: vector length mismatch");
  }
  for (const auto& v : d_span) {
    if (v.size() != ambient) throw InputError("Subquotient: vector length mismatch");
  }
  const auto z_basis = row_space_basis(z_span, ambient);
  d_basis_ = row_space_basis(d_span, ambient);

  Echelon ech(ambient);
  for (const auto& v : d_basis_) ech.insert(v);
  for (const auto& v : z_basis) {
    if (ech.insert(v)) reps_.push_back(v);
  }
  if (reps_.size() + d_basis_.size() != z_basis.size()) {
    throw InputError("Subquotient: trivial subspace is not contained in the ambient subspace");
  }

  const std::size_t k = reps_.size() + d_basis_.size();
  if (k == 0) return;
  std::vector<QVector> w = reps_;
  w.insert(w.end(), d_basis_.begin(), d_basis_.end());
  const auto rr = rref(QMatrix::from_rows(w, ambient).hstack(QMatrix::identity(k)));
  for (std::size_t i = 0; i < k; ++i) {
    QVector full = rr.reduced.dense_row(i);
    reduced_.emplace_back(full.begin(), full.begin() + static_cast<std::ptrdiff_t>(ambient));
    transform_.emplace_back(full.begin() + static_cast<std::ptrdiff_t>(ambient), full.end());
    pivots_.push_back(rr.pivots[i]);
  }
}

std::optional<QVector> Subquotient::try_coordinates(const QVector& x) const {
  if (x.size() != ambient_) throw InputError("Subquotient: vector length mismatch");
  const std::size_t k = reduced_.size();
  QVector residual = x;
  QVector combo(k);
  for (std::size_t i = 0; i < k; ++i) {
    const Rational c = x[pivots_[i]];
    if (sgn(c) == 0) continue;
    axpy(residual, -c, reduced_[i]);
    axpy(combo, c, transform_[i]);
  }
  if (!is_zero(residual)) return std::nullopt;
  combo.resize(reps_.size());
  return combo;
}

QVector Subquotient::coordinates(const QVector& x) const {
  auto c = try_coordinates(x);
  if (!c) throw InputError("Subquotient: vector is not in the ambient subspace");
  return *c;
}

bool Subquotient::contains(const QVector& x) const { return try_coordinates(x).has_value(); }

bool Subquotient::is_trivial(const QVector& x) const {
  auto c = try_coordinates(x);
  return c && is_zero(*c);
}

Subquotient homology_at(const QMatrix& incoming, const QMatrix& outgoing) {
  if (incoming.rows() != outgoing.cols()) throw InputError("homology_at: shapes do not compose");
  if (!(outgoing * incoming).is_zero()) throw InputError("homology_at: composite is not zero");
  return Subquotient(kernel_basis(outgoing), image_basis(incoming), outgoing.cols());
}

}  // namespace cdgakit
