#include "cdgakit/complex.hpp"

#include <algorithm>
#include <set>

namespace cdgakit {

std::string format_simplex(const Simplex& s) {
  std::string out = "[";
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(s[i]);
  }
  return out + "]";
}

Simplex face(const Simplex& s, std::size_t i) {
  if (i >= s.size()) throw InputError("face index out of range");
  Simplex out;
  for (std::size_t k = 0; k < s.size(); ++k)
    if (k != i) out.push_back(s[k]);
  return out;
}

std::vector<std::size_t> positions_in(const Simplex& tau, const Simplex& sigma) {
  std::vector<std::size_t> pos;
  std::size_t k = 0;
  for (int v : tau) {
    while (k < sigma.size() && sigma[k] < v) ++k;
    if (k == sigma.size() || sigma[k] != v) {
      throw InputError(format_simplex(tau) + " is not a face of " + format_simplex(sigma));
    }
    pos.push_back(k++);
  }
  return pos;
}

bool is_face(const Simplex& tau, const Simplex& sigma) {
  return std::includes(sigma.begin(), sigma.end(), tau.begin(), tau.end());
}

SimplicialComplexK::SimplicialComplexK(std::vector<Simplex> generators) {
  std::set<Simplex> all;
  for (auto& g : generators) {
    if (g.empty()) continue;
    std::sort(g.begin(), g.end());
    if (std::adjacent_find(g.begin(), g.end()) != g.end()) {
      throw InputError("simplex " + format_simplex(g) + " repeats a vertex");
    }
    if (g.size() > 20) throw InputError("simplex dimension too large");
    const unsigned n = static_cast<unsigned>(g.size());
    for (unsigned mask = 1; mask < (1u << n); ++mask) {
      Simplex f;
      for (unsigned i = 0; i < n; ++i)
        if (mask & (1u << i)) f.push_back(g[i]);
      all.insert(std::move(f));
    }
  }
  for (const auto& s : all) {
    const auto k = s.size() - 1;
    if (by_dim_.size() <= k) by_dim_.resize(k + 1);
    by_dim_[k].push_back(s);
  }
  for (auto& level : by_dim_) {
    std::sort(level.begin(), level.end());
    for (std::size_t i = 0; i < level.size(); ++i) index_[level[i]] = i;
  }
  if (!by_dim_.empty()) {
    for (const auto& v : by_dim_[0]) vertices_.push_back(v[0]);
  }
}

SimplicialComplexK SimplicialComplexK::full_simplex(int n) {
  if (n < 0) throw InputError("negative simplex dimension");
  Simplex s(static_cast<std::size_t>(n) + 1);
  for (int i = 0; i <= n; ++i) s[static_cast<std::size_t>(i)] = i;
  return SimplicialComplexK({s});
}

SimplicialComplexK SimplicialComplexK::simplex_on(const Simplex& s) { return SimplicialComplexK({s}); }

SimplicialComplexK SimplicialComplexK::boundary_of_simplex(int n) {
  if (n < 1) throw InputError("boundary needs dimension at least 1");
  Simplex s(static_cast<std::size_t>(n) + 1);
  for (int i = 0; i <= n; ++i) s[static_cast<std::size_t>(i)] = i;
  std::vector<Simplex> faces;
  for (std::size_t i = 0; i < s.size(); ++i) faces.push_back(face(s, i));
  return SimplicialComplexK(std::move(faces));
}

SimplicialComplexK SimplicialComplexK::cycle(int m) {
  if (m < 3) throw InputError("a cycle needs at least 3 vertices");
  std::vector<Simplex> edges;
  for (int i = 0; i + 1 < m; ++i) edges.push_back({i, i + 1});
  edges.push_back({0, m - 1});
  return SimplicialComplexK(std::move(edges));
}

const std::vector<Simplex>& SimplicialComplexK::simplices(int k) const {
  static const std::vector<Simplex> empty;
  if (k < 0 || k >= static_cast<int>(by_dim_.size())) return empty;
  return by_dim_[static_cast<std::size_t>(k)];
}

std::vector<Simplex> SimplicialComplexK::all_simplices() const {
  std::vector<Simplex> out;
  for (const auto& level : by_dim_) out.insert(out.end(), level.begin(), level.end());
  return out;
}

std::vector<Simplex> SimplicialComplexK::maximal_simplices() const {
  std::vector<Simplex> out;
  for (int k = 0; k <= dim(); ++k) {
    for (const auto& s : simplices(k)) {
      bool maximal = true;
      for (const auto& t : simplices(k + 1)) {
        if (is_face(s, t)) {
          maximal = false;
          break;
        }
      }
      if (maximal) out.push_back(s);
    }
  }
  return out;
}

std::size_t SimplicialComplexK::index(const Simplex& s) const {
  auto it = index_.find(s);
  if (it == index_.end()) throw InputError("simplex " + format_simplex(s) + " is not in the complex");
  return it->second;
}

bool SimplicialComplexK::is_subcomplex_of(const SimplicialComplexK& other) const {
  for (const auto& [s, i] : index_)
    if (!other.contains(s)) return false;
  return true;
}

SimplicialComplexK SimplicialComplexK::subcomplex(const std::vector<Simplex>& generators) const {
  for (auto g : generators) {
    std::sort(g.begin(), g.end());
    if (!contains(g)) throw InputError("simplex " + format_simplex(g) + " is not in the complex");
  }
  return SimplicialComplexK(generators);
}

ProductComplex product_complex(const SimplicialComplexK& a, const SimplicialComplexK& b) {
  int width = 1;
  for (int v : b.vertices()) width = std::max(width, v + 1);
  return product_complex(a, b, width);
}

ProductComplex product_complex(const SimplicialComplexK& a, const SimplicialComplexK& b, int width) {
  for (int v : b.vertices()) {
    if (v < 0 || v >= width) throw InputError("product_complex: label width too small");
  }
  ProductComplex pc;
  pc.width = width;
  std::vector<Simplex> tops;
  // For each pair of maximal simplices, all monotone lattice paths.
  for (const auto& sa : a.maximal_simplices()) {
    for (const auto& sb : b.maximal_simplices()) {
      Simplex path;
      auto rec = [&](auto&& self, std::size_t i, std::size_t j) -> void {
        path.push_back(pc.label(sa[i], sb[j]));
        if (i + 1 == sa.size() && j + 1 == sb.size()) tops.push_back(path);
        if (i + 1 < sa.size()) self(self, i + 1, j);
        if (j + 1 < sb.size()) self(self, i, j + 1);
        path.pop_back();
      };
      rec(rec, 0, 0);
    }
  }
  pc.complex = SimplicialComplexK(std::move(tops));
  return pc;
}

}  // namespace cdgakit
