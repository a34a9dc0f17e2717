#include "cdgakit/cdga.hpp"

namespace cdgakit {

namespace {

QMatrix incoming_differential(const TruncatedDGA& a, int k) {
  if (k == 0) return QMatrix(a.dim(0), 0);
  return a.differential(k - 1);
}

}  // namespace

GradedCohomology::GradedCohomology(const TruncatedDGA& a, int upto) : upto_(upto) {
  if (upto < 0) throw InputError("cohomology: negative degree bound");
  if (upto >= a.cutoff()) {
    throw CutoffTooSmall("cohomology in degree " + std::to_string(upto) + " needs cutoff above it", upto + 1);
  }
  for (int k = 0; k <= upto; ++k) groups_.push_back(homology_at(incoming_differential(a, k), a.differential(k)));
  products_.assign(static_cast<std::size_t>(upto) + 1, {});
  for (int i = 0; i <= upto; ++i) {
    products_[static_cast<std::size_t>(i)].resize(static_cast<std::size_t>(upto - i) + 1);
    if (!a.has_products()) continue;
    for (int j = 0; i + j <= upto; ++j) {
      auto& cell = products_[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
      for (const auto& x : representatives(i)) {
        for (const auto& y : representatives(j)) {
          auto p = a.try_multiply(i, x, j, y);
          cell.push_back(p ? std::optional<QVector>(class_of(i + j, *p)) : std::nullopt);
        }
      }
    }
  }
}

std::vector<std::size_t> GradedCohomology::dims() const {
  std::vector<std::size_t> out;
  for (const auto& g : groups_) out.push_back(g.dim());
  return out;
}

std::optional<QVector> GradedCohomology::product(int i, std::size_t a, int j, std::size_t b) const {
  if (i < 0 || j < 0 || i + j > upto_) return std::nullopt;
  const auto& cell = products_[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  if (cell.empty()) return std::nullopt;
  if (a >= dim(i) || b >= dim(j)) throw InputError("cohomology product: class index out of range");
  return cell[a * dim(j) + b];
}

GradedCohomology cohomology(const TruncatedDGA& a, int upto) { return GradedCohomology(a, upto); }

std::vector<QMatrix> induced_map(const DGMorphism& h, const GradedCohomology& hs, const GradedCohomology& ht) {
  const int upto = std::min(hs.upto(), ht.upto());
  if (upto > h.top_degree()) throw CutoffTooSmall("morphism not defined in all requested degrees", upto);
  std::vector<QMatrix> out;
  for (int k = 0; k <= upto; ++k) {
    std::vector<QVector> cols;
    for (const auto& rep : hs.representatives(k)) {
      auto img = h.apply(k, rep);
      auto c = ht.group(k).try_coordinates(img);
      if (!c) throw InputError("induced_map: image of a cocycle is not a cocycle in degree " + std::to_string(k));
      cols.push_back(std::move(*c));
    }
    out.push_back(QMatrix::from_columns(cols, ht.dim(k)));
  }
  return out;
}

std::vector<QMatrix> induced_map(const DGMorphism& h, int upto) {
  for (int k = 0; k < upto && k < h.top_degree(); ++k) {
    if (h.matrix(k + 1) * h.source()->differential(k) != h.target()->differential(k) * h.matrix(k)) {
      throw InputError("induced_map: not a cochain map in degree " + std::to_string(k));
    }
  }
  return induced_map(h, cohomology(*h.source(), upto), cohomology(*h.target(), upto));
}

QuasiIsoResult is_quasi_iso(const DGMorphism& h, int upto) {
  const auto maps = induced_map(h, upto);
  QuasiIsoResult r;
  for (int k = 0; k <= upto; ++k) {
    const auto& m = maps[static_cast<std::size_t>(k)];
    if (m.rows() != m.cols() || rank(m) != m.rows()) {
      r.ok = false;
      r.first_failing_degree = k;
      return r;
    }
  }
  return r;
}

}  // namespace cdgakit
