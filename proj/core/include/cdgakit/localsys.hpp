#pragma once

// Finite local systems of truncated DGAs over ordered simplicial complexes.
//
// A system stores a fiber per simplex and, for every simplex σ of positive
// dimension, the restrictions to its codimension-one faces: restriction i
// goes to face(σ, i). Longer face inclusions are composites.

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cdgakit/cdga.hpp"
#include "cdgakit/complex.hpp"
#include "cdgakit/gluing.hpp"
#include "cdgakit/polyforms.hpp"

namespace cdgakit {

class FiniteLocalSystem {
public:
  FiniteLocalSystem() = default;
  /// InputError when a fiber or restriction is missing or a restriction has
  /// the wrong endpoints.
  FiniteLocalSystem(SimplicialComplexK base, std::map<Simplex, DGAPtr> fibers,
                    std::map<Simplex, std::vector<DGMorphism>> restrictions);

  const SimplicialComplexK& base() const noexcept { return base_; }
  const DGAPtr& fiber(const Simplex& s) const;
  const DGMorphism& restriction(const Simplex& sigma, std::size_t i) const;
  /// Composite restriction to a face tau of sigma (identity when equal).
  DGMorphism restriction(const Simplex& sigma, const Simplex& tau) const;
  /// Smallest fiber cutoff.
  int cutoff() const;

private:
  SimplicialComplexK base_;
  std::map<Simplex, DGAPtr> fibers_;
  std::map<Simplex, std::vector<DGMorphism>> restrictions_;
};

using SystemPtr = std::shared_ptr<const FiniteLocalSystem>;

/// DG-morphism checks on every restriction and commutation of the two ways
/// around every codimension-two face. Empty when valid.
std::vector<std::string> validate(const FiniteLocalSystem& e);

/// Per-simplex maps source_σ -> target_σ over a common base.
struct SystemMorphism {
  SystemPtr source, target;
  std::map<Simplex, DGMorphism> maps;

  const DGMorphism& at(const Simplex& s) const;
  /// Each map is a DG morphism and commutes with the restrictions.
  std::vector<std::string> validate() const;
};

SystemMorphism identity_morphism(SystemPtr e);
SystemMorphism compose(const SystemMorphism& g, const SystemMorphism& f);

// ---- Builders -----------------------------------------------------------

/// Fiber F on every simplex, identity restrictions.
SystemPtr constant_system(const SimplicialComplexK& k, DGAPtr fiber);

/// A_D(σ) ⊗ F on every simplex, with a transport automorphism T_{uv} of F
/// attached to edges (u, v): restricting to a face whose least vertex moved
/// from u to v applies T_{uv} on F. Missing edges carry the identity. The
/// transports must satisfy T_{vw} ∘ T_{uv} = T_{uw} on every 2-simplex for
/// the result to validate.
struct FormsSystem {
  SystemPtr system;
  int weight = 0;
  int cutoff = 0;
  DGAPtr fiber;
  std::vector<DGAPtr> simplex_forms;  // A_D(Δ[n]) per dimension n
  std::vector<TensorDGA> tensors;     // A_D(Δ[n]) ⊗ F per dimension n
  std::vector<DGAPtr> fibers;         // shared tensor fiber per dimension
};
FormsSystem forms_system(const SimplicialComplexK& k, int weight, DGAPtr fiber, int cutoff,
                         const std::map<std::pair<int, int>, DGMorphism>& transports = {});

/// id ⊗ φ between two forms systems over the same base and weight (both
/// without transports, or with transports that φ intertwines).
SystemMorphism forms_morphism(const FormsSystem& source, const FormsSystem& target, const DGMorphism& phi);

/// Forms on σ × F for a fixed complex F, restrictions along the product
/// subcomplexes. Γ of this system is A_D(K × F).
SystemPtr product_forms_system(const SimplicialComplexK& k, const SimplicialComplexK& f, int weight, int cutoff,
                               bool with_products = true);

/// A_D(σ) ⊕ A_{D-2}(σ)·z with |z| = 1 and dz = ω_σ for a closed 2-form ω
/// on K of weight <= 2; products leaving the weight bound are undefined.
SystemPtr circle_bundle_system(const SimplicialForm& omega, int weight, int cutoff);

/// ℚ·1 ⊕ ℚ·e with e² = 0 in degree q on every simplex; the restriction of
/// the given edge to its first vertex sends e to -e.
SystemPtr sign_twisted_system(const SimplicialComplexK& k, int q, const Simplex& edge, int cutoff);

/// E ⊗ A_D(Δ[1]) with the restrictions of E on the left factor, and the
/// evaluations at the two ends back to E.
struct CylinderSystem {
  SystemPtr system;
  SystemMorphism inclusion;  // x -> x ⊗ 1
  SystemMorphism epsilon0, epsilon1;
};
CylinderSystem cylinder(SystemPtr e, int weight);

// ---- Predicates ---------------------------------------------------------

struct LocalConstancyResult {
  bool ok = true;
  std::optional<std::pair<Simplex, Simplex>> failing_face;  // (σ, τ)
  std::optional<int> degree;
  explicit operator bool() const noexcept { return ok; }
};
/// Every codimension-one restriction is a quasi-isomorphism in degrees <= upto.
LocalConstancyResult is_locally_constant(const FiniteLocalSystem& e, int upto);

struct ExtendabilityResult {
  bool ok = true;
  std::optional<Simplex> witness;
  std::optional<int> degree;
  explicit operator bool() const noexcept { return ok; }
};
/// For every simplex σ, sections over σ surject onto compatible families on
/// the proper faces of σ, degreewise up to the smallest fiber cutoff.
ExtendabilityResult is_extendable(const FiniteLocalSystem& e);

/// Every fiber receives a map from A (a DG morphism) commuting with the
/// restrictions; the structure maps are passed per simplex.
std::vector<std::string> check_a_algebra(const FiniteLocalSystem& e, const std::map<Simplex, DGMorphism>& structure);

// ---- Global sections ----------------------------------------------------

/// Γ(E) in degrees 0..cutoff: tuples (x_σ) compatible with every
/// codimension-one restriction, coordinates at the kernel's free columns.
struct GlobalSections {
  SimplicialComplexK base;
  std::vector<Simplex> simplices;                       // all_simplices order
  std::vector<std::map<Simplex, std::size_t>> offsets;  // per degree
  std::vector<std::size_t> ambient_dims;
  std::vector<Kernel> kernels;
  std::map<Simplex, DGAPtr> fibers;
  DGAPtr dga;

  QVector ambient(int k, const QVector& coords) const { return kernels.at(static_cast<std::size_t>(k)).embed(coords); }
  /// The σ-component of a section.
  QVector component(int k, const QVector& coords, const Simplex& s) const;
  /// Componentwise product; nullopt when some fiber product is undefined.
  std::optional<QVector> multiply(int i, const QVector& x, int j, const QVector& y) const;
};
GlobalSections global_sections(const FiniteLocalSystem& e, int cutoff, bool with_products = false);

// ---- Pullback and fiber products ----------------------------------------

/// (E^u)_σ = E_{u(σ)} for a vertex map u: L -> K that is weakly increasing
/// on each simplex of L and sends simplices to simplices; InputError
/// otherwise. Degenerate faces carry identity restrictions.
SystemPtr pullback(SystemPtr e, const SimplicialComplexK& l, const std::map<int, int>& u);
/// (m^u)_σ = m_{u(σ)} between already pulled back endpoints.
SystemMorphism pullback(const SystemMorphism& m, SystemPtr source, SystemPtr target, const std::map<int, int>& u);

struct FiberProductSystem {
  SystemPtr system;
  std::map<Simplex, FiberProductDGA> pieces;
  SystemMorphism pr1, pr2;
};
/// Objectwise fiber products E₁ ×_{E₀} E₂ in degrees <= upto + 1.
/// PreconditionError naming the simplex when some f_σ is not surjective.
FiberProductSystem fiber_product_system(const SystemMorphism& f, const SystemMorphism& g, int upto);

/// a ×_c b between fiber products over the same base.
SystemMorphism fiber_product_morphism(const FiberProductSystem& src, const FiberProductSystem& dst,
                                      const SystemMorphism& a, const SystemMorphism& b);

// ---- Cohomology with local coefficients ---------------------------------

struct LocalCoefficients {
  SimplicialComplexK base;
  int upto = 0;
  std::map<int, std::vector<std::size_t>> dims;  // vertex -> dims in degrees 0..upto
  /// For an edge (u, v), u < v: degreewise isomorphisms L_v -> L_u.
  std::map<std::pair<int, int>, std::vector<QMatrix>> edge_maps;

  /// Triangles (a, b, c) where M_ab M_bc != M_ac, with the degree.
  std::vector<std::string> check_cocycle() const;
};

/// PreconditionError unless e is locally constant in degrees <= upto.
LocalCoefficients cohomology_local_system(const FiniteLocalSystem& e, int upto);

/// The twisted cochain complex in fiber degree q: C^p = ⊕ L^q at the least
/// vertex of each p-simplex, with the edge map applied on the face that
/// omits the least vertex.
struct TwistedCochains {
  std::vector<std::size_t> dims;  // p = 0..dim K
  std::vector<QMatrix> coboundary;
  std::vector<std::map<Simplex, std::size_t>> offsets;
};
TwistedCochains twisted_cochains(const LocalCoefficients& c, int q);

/// dims H^p(K; L^q) for p <= p_max, q <= q_max, indexed [p][q].
/// InputError when the cocycle condition fails or q_max > c.upto.
std::vector<std::vector<std::size_t>> h_local_coefficients(const LocalCoefficients& c, int p_max, int q_max);

}  // namespace cdgakit
