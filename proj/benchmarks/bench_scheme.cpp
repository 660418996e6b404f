#include <cmath>

#include <benchmark/benchmark.h>

#include "sphgrav/diagnostics.hpp"

using namespace sphgrav;

namespace {

SchemeConfig gaussian(double l) {
  SchemeConfig c;
  c.l = l;
  c.T = 0.5;
  c.L_max = 10.0;
  c.rho0 = [](double x) { return 0.5 * std::exp(-(x - 3) * (x - 3)) / (x * x); };
  c.m0 = [](double) { return 0.0; };
  return c;
}

void BM_Advance(benchmark::State &state) {
  const SchemeConfig c = gaussian(1.0 / static_cast<double>(state.range(0)));
  const CellArray cells = init_cells(c);
  for (auto _ : state) {
    benchmark::DoNotOptimize(advance(cells, c));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(cells.size()));
}
BENCHMARK(BM_Advance)->Arg(50)->Arg(100)->Arg(200);

void BM_ConsistencyContribution(benchmark::State &state) {
  const SchemeConfig c = gaussian(1.0 / static_cast<double>(state.range(0)));
  const StepRecord rec = advance(init_cells(c), c);
  for (auto _ : state) {
    benchmark::DoNotOptimize(consistency_contribution(rec));
  }
}
BENCHMARK(BM_ConsistencyContribution)->Arg(50)->Arg(200);

void BM_EntropyProduction(benchmark::State &state) {
  const SchemeConfig c = gaussian(1.0 / 200);
  const StepRecord rec = advance(init_cells(c), c);
  const EntropyPair pair = EntropyPair::mechanical();
  for (auto _ : state) {
    benchmark::DoNotOptimize(entropy_production_contribution(rec, pair));
  }
}
BENCHMARK(BM_EntropyProduction);

} // namespace
