#pragma once

// Minimal Sullivan models of 1-connected DGAs, built degree by degree, and
// the free loop space model ∧(V ⊕ V̄).

#include <optional>

#include "cdgakit/cdga.hpp"

namespace cdgakit {

struct MinimalModelResult {
  FreeCDGA model;
  /// truncate(model, target cutoff) -> target.
  DGMorphism comparison;
  /// Images of the generators in the target, in generator order.
  std::vector<QVector> generator_images;
  int built_upto = 0;
};

/// Generators v{n}_{k} of degree n are added in stages n = 2 .. upto - 1:
/// first d-closed ones hitting coker H^n, then ones killing ker H^{n+1}.
/// The comparison is a quasi-isomorphism through degree upto - 1.
///
/// PreconditionError when H^0 != Q or H^1 != 0, or the target has no
/// products; CutoffTooSmall when upto >= cutoff.
MinimalModelResult minimal_model(DGAPtr target, int upto);
MinimalModelResult minimal_model(const TruncatedDGA& target, int upto);

struct MinimalityResult {
  bool minimal = true;
  std::optional<std::size_t> offending_generator;
  explicit operator bool() const noexcept { return minimal; }
};

/// True iff no d(generator) has a term of word length < 2.
MinimalityResult minimality_check(const FreeCDGA& f);

enum class LoopSign {
  /// d(v̄) = s(dv) for the right derivation s(ab) = a s(b) + (-1)^{|b|} s(a) b;
  /// gives d(ȳ) = (n+1) x̄ x^n for CP^n.
  Right,
  /// d(v̄) = -s(dv) for the left derivation s(ab) = s(a) b + (-1)^{|a|} a s(b).
  Left,
};

/// ∧(V ⊕ V̄) with |v̄| = |v| - 1, generator v̄ named v + "bar".
/// PreconditionError unless the input is minimal with all degrees >= 2.
FreeCDGA loop_model(const FreeCDGA& base, LoopSign sign = LoopSign::Right);
FreeCDGA loop_model(const MinimalModelResult& base, LoopSign sign = LoopSign::Right);

/// The degree -1 derivation s with s(v) = ε_v v̄, s(v̄) = 0 on a loop model
/// of `base`, where ε_v = 1 for Left and (-1)^{|v|} for Right. With
/// this s, d s + s d = 0 in both conventions.
std::vector<Element> loop_shift(const FreeCDGA& base, const FreeCDGA& loop, LoopSign sign);

}  // namespace cdgakit
