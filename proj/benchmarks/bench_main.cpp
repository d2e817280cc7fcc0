#include <benchmark/benchmark.h>

#include <vector>

#include "pcs/core_model.hpp"
#include "pcs/numerics.hpp"
#include "pcs/sl2.hpp"
#include "pcs/spectra.hpp"

namespace {

const pcs::SusyParams kReal{2.5, 3.2, 0.0, 1.0};
const pcs::SusyParams kBroken{2.0, 3.0, 0.5, 1.0};

void BM_TwoSeries(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(pcs::two_series_spectrum(kBroken, pcs::Branch::plus));
}
BENCHMARK(BM_TwoSeries);

void BM_SolveCorrespondence(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(pcs::solve_correspondence(kBroken, pcs::Branch::plus));
}
BENCHMARK(BM_SolveCorrespondence);

// One shifted inverse iteration at the ground state, N interior points.
void BM_EigenNear(benchmark::State& state) {
  const auto v = pcs::pcs_partner_coefficients(kReal, pcs::Branch::plus);
  const auto op = pcs::discretize(v, {12.0, static_cast<int>(state.range(0))});
  for (auto _ : state) benchmark::DoNotOptimize(pcs::eigen_near(op, -7.3));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_EigenNear)->RangeMultiplier(2)->Range(1000, 16000)->Complexity(benchmark::oN)->Unit(benchmark::kMicrosecond);

void BM_BoundSpectrum(benchmark::State& state) {
  const auto v = pcs::pcs_partner_coefficients(kReal, pcs::Branch::plus);
  const auto predictions = pcs::two_series_spectrum(kReal, pcs::Branch::plus).all_energies();
  const auto grid = pcs::recommended_grid(v, predictions);
  for (auto _ : state) benchmark::DoNotOptimize(pcs::bound_spectrum(v, grid, predictions));
}
BENCHMARK(BM_BoundSpectrum)->Unit(benchmark::kMillisecond);

void BM_VerifyBroken(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(pcs::verify_spectrum(kBroken));
}
BENCHMARK(BM_VerifyBroken)->Unit(benchmark::kMillisecond)->Iterations(1);

}  // namespace

BENCHMARK_MAIN();
