#pragma once

// Fiber products A x_C B of DGA morphisms, their Mayer-Vietoris sequence,
// and the small suspension model Q ⊕ (Ω' ⊗ dt).

#include <optional>
#include <string>
#include <vector>

#include "cdgakit/cdga.hpp"

namespace cdgakit {

/// Carrier in degree k: the kernel of [f_k, -g_k] on A^k ⊕ B^k, with
/// coordinates read at the kernel's free columns.
struct FiberProductDGA {
  DGMorphism f, g;  // A -> C, B -> C
  int upto = 0;
  std::vector<Kernel> kernels;  // degrees 0..upto + 1
  DGAPtr carrier;               // cutoff upto + 1
  DGMorphism pr_a, pr_b;

  const DGAPtr& a() const { return f.source(); }
  const DGAPtr& b() const { return g.source(); }
  const DGAPtr& c() const { return f.target(); }

  /// (a, b) as one vector of A^k ⊕ B^k.
  QVector pair(int k, const QVector& coords) const;
  /// Carrier coordinates of (a, b); InputError when f(a) != g(b).
  QVector coordinates(int k, const QVector& a_part, const QVector& b_part) const;
};

/// InputError when the legs have different targets; CutoffTooSmall when a
/// leg is not defined through degree upto + 1.
FiberProductDGA fiber_product(const DGMorphism& f, const DGMorphism& g, int upto);

/// H(A x_C B) -> H(A) ⊕ H(B) -> H(C) -> H^{+1}(A x_C B), with
/// alpha = (pr_A, pr_B) and beta = f - g.
struct MayerVietorisReport {
  int upto = 0;
  char surjective_leg = 'f';
  std::vector<std::size_t> dims_fp, dims_ab, dims_c;
  std::vector<QMatrix> alpha, beta;
  std::vector<QMatrix> delta;  // degrees 0..upto - 1
  std::vector<std::size_t> connecting_ranks;
  std::vector<std::string> failures;

  bool exact() const noexcept { return failures.empty(); }
  std::string format() const;
};

/// Requires upto <= fp.upto and one leg surjective in every degree <= upto
/// (PreconditionError naming the failing degree otherwise).
MayerVietorisReport mayer_vietoris(const FiberProductDGA& fp, int upto);

/// Q·1 in degree 0 and Ω'^{j-1} ⊗ dt in degree j, where Ω'^1 is the
/// canonical complement of d(m^0) in m^1 and Ω'^k = m^k for k >= 2.
struct SuspensionModel {
  DGAPtr source;
  DGAPtr carrier;  // cutoff upto + 1
  std::vector<std::size_t> complement_columns;  // basis of Ω'^1 inside m^1
  int upto = 0;

  /// The element ω of m^{j-1} with carrier vector x = ω ⊗ dt (j >= 2).
  QVector omega(int j, const QVector& x) const;
};

/// PreconditionError unless H^0(m) = Q; CutoffTooSmall unless upto <= cutoff.
SuspensionModel suspension_model(DGAPtr m, int upto);
SuspensionModel suspension_model(const TruncatedDGA& m, int upto);

/// A pair of legs with a common target.
struct GluingData {
  DGMorphism f, g;
};

/// A = A_D(Δ[1]), C = Q x Q by evaluation at both ends, B = Q diagonally.
GluingData circle_from_interval(int weight, int cutoff);

/// A = m ⊗ A_D(Δ[1]), C = m x m by evaluation at both ends, B = Q x Q by
/// the units.
struct SuspensionTriple {
  GluingData legs;
  TensorDGA tensor;
  DGAPtr m, interval;
  int weight = 0;
};
SuspensionTriple suspension_triple(DGAPtr m, int weight, int cutoff);

/// ξ: 1 -> 1, ω ⊗ dt -> (ω ⊗ dt, 0) from the suspension carrier into the
/// fiber product of the triple.
DGMorphism suspension_inclusion(const SuspensionModel& s, const SuspensionTriple& t, const FiberProductDGA& fp);

/// is_quasi_iso(theta, upto) for theta: glued -> fp.carrier. InputError
/// when theta does not land in the carrier or is not a DG morphism.
QuasiIsoResult theta_equivalence_check(const FiberProductDGA& fp, const DGMorphism& theta, int upto);

}  // namespace cdgakit
