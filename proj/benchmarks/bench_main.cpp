#include <benchmark/benchmark.h>

#include <vector>

#include "tivstat/tivstat.hpp"

using namespace tivstat;

static void BM_CrossoverEigenvalues(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  RandomStream rng(42);
  const auto h = sample_crossover_matrix({0.35, n}, rng);
  for (auto _ : state) benchmark::DoNotOptimize(hermitian_eigenvalues(h));
}
BENCHMARK(BM_CrossoverEigenvalues)->Arg(200)->Arg(700)->Unit(benchmark::kMillisecond);

static void BM_ClusterY2(benchmark::State& state) {
  double L = 0.05;
  for (auto _ : state) {
    benchmark::DoNotOptimize(cluster_y2(L, 0.35));
    L = L < 10.0 ? L + 0.37 : 0.05;
  }
}
BENCHMARK(BM_ClusterY2);

static void BM_Sigma2Theory(benchmark::State& state) {
  const double L = static_cast<double>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(sigma2_theory(L, 0.35));
}
BENCHMARK(BM_Sigma2Theory)->Arg(1)->Arg(10)->Unit(benchmark::kMicrosecond);

static void BM_PowerSpectrum(benchmark::State& state) {
  EnsembleConfig c;
  c.n = 300;
  c.count = 50;
  c.seed = 3;
  c.threads = 1;
  const auto spectra = generate_ensemble(c);
  std::size_t n_common = spectra.front().size();
  for (const auto& s : spectra) n_common = std::min(n_common, s.size());
  for (auto _ : state) benchmark::DoNotOptimize(power_spectrum(spectra, n_common));
}
BENCHMARK(BM_PowerSpectrum)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
