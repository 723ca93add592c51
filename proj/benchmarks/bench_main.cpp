#include <cmath>

#include <benchmark/benchmark.h>

#include "bcmsdp/bcmsdp.hpp"

using namespace bcmsdp;

namespace {

Index rank_for(Index n) { return static_cast<Index>(std::ceil(std::sqrt(2.0 * n))); }

ProblemInstance instance_for(const benchmark::State& state) {
  const Index n = state.range(0);
  return state.range(1) == 0 ? gen_gaussian(n, 1) : gen_erdos_renyi(n, 4 * n, -1, 1);
}

void BM_BcmEpoch(benchmark::State& state) {
  const auto inst = instance_for(state);
  const Index n = inst.n();
  auto point = FactorPoint::random(n, rank_for(n), 2);
  auto cache = init_cache(inst, point);
  Rng rng = make_rng(3);
  CoordinateSelector sel(static_cast<SelectionRule>(state.range(2)));
  for (auto _ : state) {
    double gained = 0.0;
    for (Index k = 0; k < n; ++k) gained += bcm_step(inst, point, cache, sel.next(cache, rng));
    benchmark::DoNotOptimize(gained);
  }
  state.SetItemsProcessed(state.iterations() * n);
}

void BM_InitCache(benchmark::State& state) {
  const auto inst = instance_for(state);
  const auto point = FactorPoint::random(inst.n(), rank_for(inst.n()), 2);
  for (auto _ : state) benchmark::DoNotOptimize(init_cache(inst, point));
}

void BM_LanczosLeading(benchmark::State& state) {
  const auto inst = instance_for(state);
  const auto point = FactorPoint::random(inst.n(), rank_for(inst.n()), 2);
  const auto cache = init_cache(inst, point);
  Rng rng = make_rng(4);
  for (auto _ : state) benchmark::DoNotOptimize(lanczos_leading(inst, point, cache, 50, rng));
}

void BM_DualUpperBound(benchmark::State& state) {
  const auto inst = instance_for(state);
  const auto point = FactorPoint::random(inst.n(), rank_for(inst.n()), 2);
  const auto cache = init_cache(inst, point);
  for (auto _ : state) benchmark::DoNotOptimize(dual_upper_bound(inst, point, cache));
}

void BM_RoundCut(benchmark::State& state) {
  const auto inst = instance_for(state);
  const auto point = FactorPoint::random(inst.n(), rank_for(inst.n()), 2);
  for (auto _ : state) benchmark::DoNotOptimize(round_cut(inst, point, 100, 5));
}

}  // namespace

// Args: n, family (0 gaussian, 1 sparse ER), selection rule.
BENCHMARK(BM_BcmEpoch)
    ->ArgsProduct({{100, 1000}, {0, 1}, {0, 1, 2, 3}})
    ->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_InitCache)->ArgsProduct({{100, 1000}, {0, 1}})->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_LanczosLeading)->ArgsProduct({{100, 1000}, {0, 1}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DualUpperBound)->ArgsProduct({{100, 400}, {0, 1}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RoundCut)->ArgsProduct({{100, 1000}, {1}})->Unit(benchmark::kMicrosecond);
BENCHMARK_MAIN();
