#include <benchmark/benchmark.h>

#include <cmath>

#include "escrate/dimension.hpp"
#include "escrate/holes.hpp"
#include "escrate/oracle.hpp"

using namespace escrate;

namespace {

const double kLog2 = std::log(2.0);

void BM_LeadingEigentriple(benchmark::State& state) {
  const auto s = Subshift::full(2);
  const auto phi = Potential::per_symbol(s, {-0.3, -1.4});
  const auto m = build_transfer_matrix(s, phi, static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(leading_eigentriple(m).lambda);
  state.counters["states"] = static_cast<double>(m.states->size());
}
BENCHMARK(BM_LeadingEigentriple)->DenseRange(10, 16, 2)->Unit(benchmark::kMillisecond);

void BM_PerturbedEigenvalue(benchmark::State& state) {
  const auto s = Subshift::full(2);
  const auto phi = Potential::constant(s, -kLog2);
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto family = standard_hole_family(s, SymbolicPoint::periodic(Word{0, 1}), n);
  for (auto _ : state) benchmark::DoNotOptimize(perturbed_eigenvalue(s, phi, family.at(n).words, n).lambda_n);
}
BENCHMARK(BM_PerturbedEigenvalue)->DenseRange(10, 16, 2)->Unit(benchmark::kMillisecond);

void BM_CantorEscapeSweep(benchmark::State& state) {
  const auto cantor = MarkovIntervalMap::cantor();
  const auto& s = cantor.subshift();
  const auto phi = Potential::constant(s, -kLog2);
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto family = standard_hole_family(s, SymbolicPoint::periodic(s.parse_word("02")), n);
  for (auto _ : state) benchmark::DoNotOptimize(escape_sweep(s, phi, family, 2, n).final_ratio);
}
BENCHMARK(BM_CantorEscapeSweep)->Arg(10)->Arg(14)->Unit(benchmark::kMillisecond);

void BM_CantorDimensionSweep(benchmark::State& state) {
  const auto cantor = MarkovIntervalMap::cantor();
  const auto& s = cantor.subshift();
  const auto family = standard_hole_family(s, SymbolicPoint::periodic(s.parse_word("02")), 14);
  for (auto _ : state) benchmark::DoNotOptimize(dimension_sweep(cantor, family, 2, 14).final_ratio);
}
BENCHMARK(BM_CantorDimensionSweep)->Unit(benchmark::kMillisecond);

void BM_ExhaustiveSurvival(benchmark::State& state) {
  const auto s = Subshift::full(2);
  const auto phi = Potential::per_symbol(s, {-0.3, -1.4});
  const auto k = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(exhaustive_survival(s, phi, {{0, 1, 1}}, k).survival.back());
}
BENCHMARK(BM_ExhaustiveSurvival)->Arg(12)->Arg(18)->Unit(benchmark::kMillisecond);

void BM_MonteCarloSurvival(benchmark::State& state) {
  const auto s = Subshift::full(2);
  const auto phi = Potential::per_symbol(s, {-0.3, -1.4});
  for (auto _ : state)
    benchmark::DoNotOptimize(monte_carlo_survival(s, phi, {{0, 1, 1}}, 12, 100'000, 7).survival.back());
}
BENCHMARK(BM_MonteCarloSurvival)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
