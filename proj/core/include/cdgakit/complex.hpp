#pragma once

// Finite ordered simplicial complexes. A simplex is a strictly increasing
// list of integer vertex labels.

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "cdgakit/errors.hpp"

namespace cdgakit {

using Simplex = std::vector<int>;

std::string format_simplex(const Simplex& s);
/// The face omitting the vertex at position i.
Simplex face(const Simplex& s, std::size_t i);
/// Positions of tau's vertices inside sigma; InputError if tau is not a face.
std::vector<std::size_t> positions_in(const Simplex& tau, const Simplex& sigma);
bool is_face(const Simplex& tau, const Simplex& sigma);

class SimplicialComplexK {
public:
  SimplicialComplexK() = default;
  /// Downward closure of the given simplices. Vertex lists are sorted;
  /// repeated vertices raise InputError.
  explicit SimplicialComplexK(std::vector<Simplex> generators);

  static SimplicialComplexK full_simplex(int n);
  static SimplicialComplexK simplex_on(const Simplex& s);
  static SimplicialComplexK boundary_of_simplex(int n);
  /// The m-gon with vertices 0..m-1 (m >= 3).
  static SimplicialComplexK cycle(int m);

  int dim() const noexcept { return static_cast<int>(by_dim_.size()) - 1; }
  const std::vector<int>& vertices() const noexcept { return vertices_; }
  /// k-simplices in lexicographic order (empty outside 0..dim).
  const std::vector<Simplex>& simplices(int k) const;
  /// All simplices ordered by dimension, then lexicographically.
  std::vector<Simplex> all_simplices() const;
  std::vector<Simplex> maximal_simplices() const;
  std::size_t count() const noexcept { return index_.size(); }
  bool contains(const Simplex& s) const { return index_.count(s) != 0; }
  /// Index of s among the simplices of its dimension.
  std::size_t index(const Simplex& s) const;
  bool is_subcomplex_of(const SimplicialComplexK& other) const;
  /// The subcomplex generated by the given simplices (all must belong here).
  SimplicialComplexK subcomplex(const std::vector<Simplex>& generators) const;

  bool operator==(const SimplicialComplexK& o) const { return by_dim_ == o.by_dim_; }

private:
  std::vector<int> vertices_;
  std::vector<std::vector<Simplex>> by_dim_;
  std::map<Simplex, std::size_t> index_;
};

/// Product triangulation of |A| x |B|. The vertex (a, b) gets the label
/// a * width + b with width = max label of B + 1, so the lexicographic
/// order on pairs is the label order. Simplices are chains that increase
/// weakly in both coordinates and project to simplices of A and B.
struct ProductComplex {
  SimplicialComplexK complex;
  int width = 1;
  int label(int a, int b) const { return a * width + b; }
  std::pair<int, int> split(int label) const { return {label / width, label % width}; }
};

ProductComplex product_complex(const SimplicialComplexK& a, const SimplicialComplexK& b);
/// Same as above with an explicit label width (must exceed every label of b).
ProductComplex product_complex(const SimplicialComplexK& a, const SimplicialComplexK& b, int width);

}  // namespace cdgakit
