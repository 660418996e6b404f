#include <cmath>
#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "sphgrav/riemann.hpp"

using namespace sphgrav;

namespace {

std::vector<std::pair<State, State>> random_pairs(std::size_t n) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> log_rho(std::log(1e-4), std::log(10.0));
  std::uniform_real_distribution<double> u(-5, 5);
  std::vector<std::pair<State, State>> out;
  for (std::size_t i = 0; i < n; ++i) {
    const double a = std::exp(log_rho(rng));
    const double b = std::exp(log_rho(rng));
    out.emplace_back(from_density_velocity(a, u(rng)), from_density_velocity(b, u(rng)));
  }
  return out;
}

void BM_SolveRiemann(benchmark::State &state) {
  const auto pairs = random_pairs(1024);
  std::size_t i = 0;
  for (auto _ : state) {
    const auto &[l, r] = pairs[i++ & 1023];
    benchmark::DoNotOptimize(solve_riemann(l, r));
  }
}
BENCHMARK(BM_SolveRiemann);

void BM_SolveBoundaryRiemann(benchmark::State &state) {
  const auto pairs = random_pairs(1024);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_boundary_riemann(pairs[i++ & 1023].second));
  }
}
BENCHMARK(BM_SolveBoundaryRiemann);

void BM_CellAverage(benchmark::State &state) {
  const WaveFan fan = solve_riemann(from_density_velocity(1, -1), from_density_velocity(0.5, 1));
  for (auto _ : state) {
    benchmark::DoNotOptimize(cell_average(fan, -5.0, 5.0, 1.0));
  }
}
BENCHMARK(BM_CellAverage);

} // namespace
