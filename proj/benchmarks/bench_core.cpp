#include <benchmark/benchmark.h>

#include "mql/dual.hpp"
#include "mql/selftest.hpp"
#include "mql/structure.hpp"

namespace {

void BM_KernelPower(benchmark::State& state) {
  std::uint64_t rng = 7;
  mql::FiniteKernel k =
      mql::selftest::random_kernel(rng, static_cast<int>(state.range(0)), false);
  for (auto _ : state) {
    benchmark::DoNotOptimize(mql::kernel_power(k, 6));
  }
}
BENCHMARK(BM_KernelPower)->Arg(4)->Arg(8);

void BM_BuildQuiverReflection(benchmark::State& state) {
  mql::MarkovModel model(mql::selftest::reflection_system(static_cast<int>(state.range(0))));
  for (auto _ : state) {
    benchmark::DoNotOptimize(mql::build_quiver(model));
  }
}
BENCHMARK(BM_BuildQuiverReflection)->Arg(101)->Arg(1001);

void BM_DecideSimplicityReflection(benchmark::State& state) {
  mql::MarkovModel model(mql::selftest::reflection_system(static_cast<int>(state.range(0))));
  for (auto _ : state) {
    benchmark::DoNotOptimize(mql::decide_simplicity(model));
  }
}
BENCHMARK(BM_DecideSimplicityReflection)->Arg(101)->Arg(1001);

void BM_EnumerateSaturatedHereditary(benchmark::State& state) {
  std::uint64_t rng = 11;
  mql::Quiver q = mql::build_quiver(
      mql::MarkovModel(mql::selftest::random_kernel(rng, static_cast<int>(state.range(0)), true)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(mql::enumerate_saturated_hereditary(q));
  }
}
BENCHMARK(BM_EnumerateSaturatedHereditary)->Arg(8)->Arg(12);

void BM_DualKTheory(benchmark::State& state) {
  std::uint64_t rng = 13;
  mql::Quiver g = mql::selftest::random_multigraph(rng, 6, 6, 3);
  for (auto _ : state) {
    benchmark::DoNotOptimize(mql::k_theory_finite_graph(mql::dual_quiver(g)));
  }
}
BENCHMARK(BM_DualKTheory);

void BM_AttractorCantor(benchmark::State& state) {
  mql::IfsSystem ifs = mql::selftest::cantor_ifs();
  for (auto _ : state) {
    benchmark::DoNotOptimize(mql::attractor(ifs, static_cast<int>(state.range(0))));
  }
}
BENCHMARK(BM_AttractorCantor)->Arg(8)->Arg(12);

}  // namespace

BENCHMARK_MAIN();
