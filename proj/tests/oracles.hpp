#pragma once

// Independent reference computations shared by the test suites.

#include <algorithm>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "cdgakit/cdga.hpp"

namespace oracle {

using namespace cdgakit;

// dim H^k = dim C^k - rank d_k - rank d_{k-1}, from ranks alone.
inline std::vector<std::size_t> cohomology_dims(const TruncatedDGA& a, int upto) {
  std::vector<std::size_t> out;
  for (int k = 0; k <= upto; ++k) {
    const std::size_t out_rank = rank(a.differential(k));
    const std::size_t in_rank = k == 0 ? 0 : rank(a.differential(k - 1));
    out.push_back(a.dim(k) - out_rank - in_rank);
  }
  return out;
}

// Cohomology of a cochain complex given by matrices, via ranks.
inline std::vector<std::size_t> complex_dims(const std::vector<std::size_t>& dims, const std::vector<QMatrix>& d) {
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < dims.size(); ++k) {
    const std::size_t r_out = k < d.size() ? rank(d[k]) : 0;
    const std::size_t r_in = k == 0 ? 0 : rank(d[k - 1]);
    out.push_back(dims[k] - r_out - r_in);
  }
  return out;
}

// (∧(even x_i, odd y_j), dx = 0, dy = polynomial in the x's): d^2 = 0 always.
inline FreeCDGA random_koszul_model(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> nx(1, 2), ny(1, 2), evdeg(1, 2), coef(-2, 2);
  std::vector<GeneratorSpec> gens;
  const int ex = nx(rng);
  for (int i = 0; i < ex; ++i) gens.push_back({"x" + std::to_string(i + 1), 2 * evdeg(rng)});
  const int oy = ny(rng);
  std::uniform_int_distribution<int> oddeg(0, 3);
  for (int j = 0; j < oy; ++j) gens.push_back({"y" + std::to_string(j + 1), 2 * oddeg(rng) + 1});
  FreeGCA alg(gens);
  FreeGCA evens(std::vector<GeneratorSpec>(gens.begin(), gens.begin() + ex));
  std::vector<Element> d(gens.size());
  for (int j = 0; j < oy; ++j) {
    const auto idx = static_cast<std::size_t>(ex + j);
    for (const auto& m : evens.basis_in_degree(gens[idx].degree + 1)) {
      Monomial full = alg.unit_monomial();
      for (int i = 0; i < ex; ++i) full.exponents[static_cast<std::size_t>(i)] = m.exponents[static_cast<std::size_t>(i)];
      // Keep the differential decomposable most of the time.
      if (alg.word_length(full) >= 2 || coef(rng) == 0) d[idx].add_term(full, coef(rng));
    }
  }
  return FreeCDGA(std::move(alg), std::move(d));
}


// Minimal, 1-connected: even x_i of degree 2 or 4, odd y_j of degree 3, 5
// or 7 with d(y_j) a sum of products of at least two x's.
inline FreeCDGA random_minimal_model(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> nx(1, 2), ny(1, 2), evdeg(1, 2), oddeg(1, 3), coef(-2, 2);
  std::vector<GeneratorSpec> gens;
  const int ex = nx(rng);
  for (int i = 0; i < ex; ++i) gens.push_back({"x" + std::to_string(i + 1), 2 * evdeg(rng)});
  const int oy = ny(rng);
  for (int j = 0; j < oy; ++j) gens.push_back({"y" + std::to_string(j + 1), 2 * oddeg(rng) + 1});
  FreeGCA alg(gens);
  FreeGCA evens(std::vector<GeneratorSpec>(gens.begin(), gens.begin() + ex));
  std::vector<Element> d(gens.size());
  for (int j = 0; j < oy; ++j) {
    const auto idx = static_cast<std::size_t>(ex + j);
    for (const auto& m : evens.basis_in_degree(gens[idx].degree + 1)) {
      Monomial full = alg.unit_monomial();
      for (int i = 0; i < ex; ++i) full.exponents[static_cast<std::size_t>(i)] = m.exponents[static_cast<std::size_t>(i)];
      if (alg.word_length(full) >= 2) d[idx].add_term(full, coef(rng));
    }
  }
  return FreeCDGA(std::move(alg), std::move(d));
}

// Brute-force cochain complex of a free graded-commutative algebra with its
// own word sorting and Koszul signs, independent of FreeGCA::multiply.
class BruteForceFree {
public:
  using Word = std::vector<int>;  // sorted generator indices with repetition
  using Poly = std::map<Word, Rational>;

  BruteForceFree(std::vector<int> degrees, std::vector<Poly> d) : deg_(std::move(degrees)), d_(std::move(d)) {}

  // Sorts a word by bubble sort, tracking signs; returns 0 if an odd
  // generator repeats.
  int normalize(Word& w) const {
    int sign = 1;
    for (std::size_t i = 0; i < w.size(); ++i)
      for (std::size_t j = 0; j + 1 < w.size() - i; ++j)
        if (w[j] > w[j + 1]) {
          if (deg_[w[j]] % 2 && deg_[w[j + 1]] % 2) sign = -sign;
          std::swap(w[j], w[j + 1]);
        }
    for (std::size_t i = 0; i + 1 < w.size(); ++i)
      if (w[i] == w[i + 1] && deg_[w[i]] % 2) return 0;
    return sign;
  }

  int degree(const Word& w) const {
    int s = 0;
    for (int g : w) s += deg_[g];
    return s;
  }

  std::vector<Word> basis(int n) const {
    std::vector<Word> out;
    Word cur;
    extend(out, cur, 0, n);
    std::sort(out.begin(), out.end());
    return out;
  }

  Poly d(const Word& w) const {
    Poly out;
    int prefix = 0;
    for (std::size_t pos = 0; pos < w.size(); ++pos) {
      for (const auto& [dw, c] : d_[w[pos]]) {
        Word full(w.begin(), w.begin() + static_cast<long>(pos));
        full.insert(full.end(), dw.begin(), dw.end());
        full.insert(full.end(), w.begin() + static_cast<long>(pos) + 1, w.end());
        const int s = normalize(full);
        if (s == 0) continue;
        const Rational v = (prefix % 2 ? -1 : 1) * s * c;
        out[full] += v;
        if (sgn(out[full]) == 0) out.erase(full);
      }
      prefix += deg_[w[pos]];
    }
    return out;
  }

  QMatrix differential(int n) const {
    const auto src = basis(n), dst = basis(n + 1);
    QMatrix m(dst.size(), src.size());
    for (std::size_t j = 0; j < src.size(); ++j)
      for (const auto& [w, c] : d(src[j])) {
        const auto it = std::find(dst.begin(), dst.end(), w);
        m.add(static_cast<std::size_t>(it - dst.begin()), j, c);
      }
    return m;
  }

  std::vector<std::size_t> cohomology_dims(int upto) const {
    std::vector<std::size_t> dims;
    std::vector<QMatrix> ds;
    for (int k = 0; k <= upto; ++k) {
      dims.push_back(basis(k).size());
      ds.push_back(differential(k));
    }
    return complex_dims(dims, ds);
  }

private:
  void extend(std::vector<Word>& out, Word& cur, int start, int remaining) const {
    if (remaining == 0) {
      out.push_back(cur);
      return;
    }
    for (int g = start; g < static_cast<int>(deg_.size()); ++g) {
      if (deg_[g] > remaining) continue;
      if (deg_[g] % 2 && !cur.empty() && cur.back() == g) continue;
      cur.push_back(g);
      extend(out, cur, deg_[g] % 2 ? g + 1 : g, remaining - deg_[g]);
      cur.pop_back();
    }
  }

  std::vector<int> deg_;
  std::vector<Poly> d_;
};

}  // namespace oracle
