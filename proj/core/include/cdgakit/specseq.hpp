#pragma once

// Spectral sequences of finite filtered cochain complexes, and the skeletal
// filtration on global sections of a local system.

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cdgakit/exactlin.hpp"
#include "cdgakit/localsys.hpp"

namespace cdgakit {

/// A cochain complex in degrees 0..top with a decreasing filtration
/// F^0 = C ⊇ F^1 ⊇ ... ⊇ F^length ⊇ F^{length+1} = 0. The differential out
/// of the top degree is unknown, so pages are reported in degrees < top.
struct FilteredComplex {
  std::vector<std::size_t> dims;                              // degrees 0..top
  std::vector<QMatrix> d;                                     // d[n]: C^n -> C^{n+1}, n < top
  std::vector<std::vector<std::vector<QVector>>> filtration;  // [p][n] spanning sets, p = 0..length
  /// Optional product C^i x C^j -> C^{i+j}; nullopt when undefined.
  std::function<std::optional<QVector>(int, const QVector&, int, const QVector&)> multiply;

  int top() const noexcept { return static_cast<int>(dims.size()) - 1; }
  int length() const noexcept { return static_cast<int>(filtration.size()) - 1; }
  /// Spanning set of F^p C^n (all of C^n for p <= 0, empty past the length).
  std::vector<QVector> level(int p, int n) const;
  /// Shapes, F^0 = C, F^{p+1} ⊆ F^p, d F^p ⊆ F^p, and F^p F^q ⊆ F^{p+q}
  /// on spanning vectors when a product is present. Empty when valid.
  std::vector<std::string> check() const;
};

/// E_r^{p,q} = Z_r^p / (Z_{r-1}^{p+1} + d Z_{r-1}^{p-r+1}) in C^{p+q}, with
/// Z_r^p = F^p ∩ d^{-1} F^{p+r}. Entries cover 0 <= p <= length and total
/// degrees 0..top-1.
struct Page {
  int r = 0;
  int length = 0;
  int top = 0;
  std::map<std::pair<int, int>, Subquotient> entries;
  /// d_r from (p, q) to (p + r, q - r + 1), present when the target entry exists.
  std::map<std::pair<int, int>, QMatrix> differentials;

  std::size_t dim(int p, int q) const;
  /// Known when the target lies past the filtration (then zero) or in range.
  bool differential_known(int p, int q) const;
  /// The d_r matrix, zero-sized to the target when it leaves the filtration.
  QMatrix differential(int p, int q) const;
  std::string format() const;
};

struct SpectralSequence {
  std::vector<Page> pages;  // r = 0, 1, ...
  int length = 0;

  const Page& page(int r) const { return pages.at(static_cast<std::size_t>(r)); }
  /// E_{length+1}, where every later differential vanishes.
  const Page& infinity() const { return pages.at(static_cast<std::size_t>(length) + 1); }
};

/// InputError when the filtration invariants fail.
SpectralSequence spectral_sequence(const FilteredComplex& fc, int r_max = 0);
/// Pages E_0..E_{r_max}.
std::vector<Page> pages(const FilteredComplex& fc, int r_max);

/// Classes of the d_r-cohomology of a page at (p, q), in page coordinates,
/// and the comparison E_{r+1}^{p,q} -> H(E_r, d_r)^{p,q} (columns are the
/// next page's representatives). nullopt when a neighbouring d_r is unknown.
struct PageCohomology {
  Subquotient homology;
  QMatrix comparison;
};
std::optional<PageCohomology> page_cohomology(const SpectralSequence& ss, int r, int p, int q);

// ---- Skeletal filtration ------------------------------------------------

/// F^p Γ = sections whose components vanish on every simplex of dimension < p.
struct SkeletalFiltration {
  GlobalSections sections;
  FilteredComplex complex;
};
SkeletalFiltration skeletal_filtration(const FiniteLocalSystem& e, int cutoff, bool with_products = false);

struct BidegreeComparison {
  int p = 0, q = 0;
  std::size_t spectral = 0, expected = 0;
};

struct E2Report {
  std::vector<BidegreeComparison> entries;
  std::optional<std::pair<int, int>> first_mismatch;
  bool ok() const noexcept { return !first_mismatch.has_value(); }
  std::string format() const;
};

/// E₂ of the skeletal spectral sequence against H^p(K; H^q) for p <= p_max,
/// q <= q_max. PreconditionError unless e is locally constant through q_max;
/// CutoffTooSmall unless the fibers reach degree p_max + q_max + 1.
E2Report e2_check(const FiniteLocalSystem& e, int p_max, int q_max);

struct EInftyReport {
  int upto = 0;
  std::vector<std::size_t> totals;  // Σ_p dim E_∞^{p, k-p}
  std::vector<std::size_t> target;  // dim H^k(Γ)
  std::size_t product_checks = 0;
  std::vector<std::string> failures;
  bool ok() const noexcept { return failures.empty(); }
  std::string format() const;
};

/// Totals of E_∞ against H(Γ) through degree upto, and F^p H · F^{p'} H ⊆
/// F^{p+p'} H on classes whose product is defined.
EInftyReport einfty_vs_target(const FiniteLocalSystem& e, int upto);

/// F^p H^n as a subspace of H^n, spanned in class coordinates.
std::vector<QVector> filtered_classes(const FilteredComplex& fc, const GradedCohomology& h, int p, int n);

// ---- Morphisms ----------------------------------------------------------

struct PagesMorphism {
  SpectralSequence source, target;
  /// psi[r][(p, q)]: E_r^{p,q}(source) -> E_r^{p,q}(target) in representative coordinates.
  std::vector<std::map<std::pair<int, int>, QMatrix>> psi;
  /// Commutation with d_r and compatibility with passing to the next page.
  std::vector<std::string> failures;
  bool ok() const noexcept { return failures.empty(); }
};

/// Ψ_r for a filtered chain map h (h[n]: C^n -> C'^n). InputError when h
/// is not a chain map or does not preserve the filtration.
PagesMorphism filtered_map_pages(const FilteredComplex& source, const FilteredComplex& target,
                                 const std::vector<QMatrix>& h, int r_max);

/// Γ(m) on the skeletal filtrations of source and target, through the
/// given cutoff.
struct SystemPagesMorphism {
  SkeletalFiltration source, target;
  std::vector<QMatrix> sections_map;  // per degree
  PagesMorphism pages;
};
SystemPagesMorphism triple_morphism_pages(const SystemMorphism& m, int cutoff, int r_max);

}  // namespace cdgakit
