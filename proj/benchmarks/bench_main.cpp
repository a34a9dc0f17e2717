#include <benchmark/benchmark.h>

#include <random>

#include "cdgakit/specseq.hpp"
#include "cdgakit/sullivan.hpp"

using namespace cdgakit;

namespace {

QMatrix random_matrix(std::size_t n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> num(-9, 9), den(1, 5);
  QMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m.set(i, j, ratio(num(rng), den(rng)));
  return m;
}

DGAPtr truncated_polynomial(int n, int cutoff) {
  const auto f = FreeCDGA::from_strings({{"x", 2}}, {});
  Monomial m = f.algebra().unit_monomial();
  m.exponents[0] = n + 1;
  return std::make_shared<const TruncatedDGA>(monomial_quotient(f, {m}, cutoff));
}

void BM_Rref(benchmark::State& state) {
  const auto m = random_matrix(static_cast<std::size_t>(state.range(0)), 7);
  for (auto _ : state) benchmark::DoNotOptimize(rref(m));
}
BENCHMARK(BM_Rref)->Arg(8)->Arg(16)->Arg(32);

void BM_CohomologyExterior(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  std::vector<GeneratorSpec> gens;
  for (int i = 0; i < n; ++i) gens.push_back({"t" + std::to_string(i), 1});
  const auto a = truncate(FreeCDGA::from_strings(gens, {}), n + 1);
  for (auto _ : state) benchmark::DoNotOptimize(cohomology(a, n));
}
BENCHMARK(BM_CohomologyExterior)->DenseRange(3, 6);

void BM_MinimalModel(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto a = truncated_polynomial(n, 2 * n + 3);
  for (auto _ : state) benchmark::DoNotOptimize(minimal_model(a, 2 * n + 2));
}
BENCHMARK(BM_MinimalModel)->DenseRange(1, 4);

void BM_SkeletalSpectralSequence(benchmark::State& state) {
  const auto k = SimplicialComplexK::cycle(static_cast<int>(state.range(0)));
  const auto e = forms_system(k, 1, truncated_polynomial(1, 7), 7);
  for (auto _ : state) benchmark::DoNotOptimize(e2_check(*e.system, 2, 4));
}
BENCHMARK(BM_SkeletalSpectralSequence)->Arg(3)->Arg(4)->Arg(5);

}  // namespace
BENCHMARK_MAIN();
