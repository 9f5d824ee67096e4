#include <benchmark/benchmark.h>

#include "painv/pipeline.hpp"

namespace {

using namespace painv;

const SolvedPreset& solved(const std::string& name) {
  static std::map<std::string, std::unique_ptr<SolvedPreset>> cache;
  auto& slot = cache[name];
  if (!slot) slot = std::make_unique<SolvedPreset>(solve_preset(load_preset(name)));
  return *slot;
}

void BM_PsiTable(benchmark::State& state) {
  PrecisionGuard g(256);
  RootOfUnity q(static_cast<int>(state.range(0)));
  Complex t(Real("0.7"), Real("1.3"));
  Complex theta = exp(-log(Complex(1) + t) * (Real(1) / Real(q.n())));
  for (auto _ : state) benchmark::DoNotOptimize(psi_table_from_log(q, log(t), theta));
}
BENCHMARK(BM_PsiTable)->Arg(3)->Arg(15)->Arg(51);

void BM_NewtonFig8(benchmark::State& state) {
  PrecisionGuard g(state.range(0));
  const auto& s = solved("fig8");
  CVec seed = load_preset("fig8").seed_shapes();
  newton_refine(s.system, seed, state.range(0));  // builds the dilogarithm tables for this precision
  for (auto _ : state) benchmark::DoNotOptimize(newton_refine(s.system, seed, state.range(0)));
}
BENCHMARK(BM_NewtonFig8)->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);

void BM_Fig8Bundle(benchmark::State& state) {
  PrecisionGuard g(256);
  const auto& s = solved("fig8");
  BundleOptions o;
  o.verify = false;
  RootOfUnity q(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(build_bundle(*s.layered, s.shear, s.lattice, s.lift, q, o));
}
BENCHMARK(BM_Fig8Bundle)->Arg(3)->Arg(7)->Arg(15)->Unit(benchmark::kMillisecond);

void BM_T09265Bundle(benchmark::State& state) {
  PrecisionGuard g(256);
  const auto& s = solved("t09265");
  BundleOptions o;
  o.verify = state.range(0) != 0;
  for (auto _ : state)
    benchmark::DoNotOptimize(build_bundle(*s.layered, s.shear, s.lattice, s.lift, RootOfUnity(3), o));
}
BENCHMARK(BM_T09265Bundle)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_DenseDet(benchmark::State& state) {
  PrecisionGuard g(256);
  const int d = static_cast<int>(state.range(0));
  DenseMatrix m(d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) m(i, j) = Complex(Real((i * 7 + j * 3) % 11) / Real(5), Real((i + 2 * j) % 5));
  for (auto _ : state) benchmark::DoNotOptimize(lu_det(m));
}
BENCHMARK(BM_DenseDet)->Arg(27)->Arg(81)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
