// Serial reference vs OpenMP kernels on a session midway through a run.
// Thread count is the second benchmark argument for the parallel variants.

#include <benchmark/benchmark.h>

#include "collabrec/kernels.hpp"
#include "collabrec/reference.hpp"
#include "collabrec/session.hpp"

namespace {

using namespace collabrec;

// n users, m items, `steps` steps of which roughly half are joint.
SessionState midway(std::size_t n, std::size_t m, std::size_t steps) {
  Rng rng(42);
  auto state = SessionState::create(n, m, 7);
  for (std::size_t s = 0; s < steps; ++s) {
    const bool joint = rng.bernoulli(0.5);
    std::vector<ItemId> items(n);
    std::vector<Rating> ratings(n);
    for (UserId u = 0; u < n; ++u) {
      items[u] = joint ? state.next_joint_item(u) : random_unconsumed(state, u, rng);
      ratings[u] = rng.bernoulli(0.5) ? 1 : -1;
    }
    state.record_step(items, ratings, joint);
  }
  return state;
}

AlgorithmParams params() {
  AlgorithmParams p;
  p.theta = 0.2;
  p.alpha = 0.5;
  return p;
}

void BM_NeighborhoodsReference(benchmark::State& bench) {
  const auto state = midway(static_cast<std::size_t>(bench.range(0)), 200, 60);
  for (auto _ : bench)
    for (UserId u = 0; u < state.n(); ++u)
      benchmark::DoNotOptimize(reference::neighborhood(state, u, 0.2, false));
}
BENCHMARK(BM_NeighborhoodsReference)->Arg(200)->Arg(800)->Unit(benchmark::kMillisecond);

void BM_NeighborhoodsKernel(benchmark::State& bench) {
  const auto state = midway(static_cast<std::size_t>(bench.range(0)), 200, 60);
  const int threads = static_cast<int>(bench.range(1));
  for (auto _ : bench) benchmark::DoNotOptimize(kernels::neighbor_sets(state, 0.2, false, threads));
}
BENCHMARK(BM_NeighborhoodsKernel)
    ->ArgsProduct({{200, 800}, {1, 2, 4, 8}})
    ->Unit(benchmark::kMillisecond)
    ->UseRealTime();

void BM_ExploitReference(benchmark::State& bench) {
  const auto state = midway(static_cast<std::size_t>(bench.range(0)), 200, 60);
  const auto p = params();
  for (auto _ : bench) benchmark::DoNotOptimize(reference::exploit_all(state, p, 99));
}
BENCHMARK(BM_ExploitReference)->Arg(200)->Arg(800)->Unit(benchmark::kMillisecond);

void BM_ExploitKernel(benchmark::State& bench) {
  const auto state = midway(static_cast<std::size_t>(bench.range(0)), 200, 60);
  const auto p = params();
  const int threads = static_cast<int>(bench.range(1));
  for (auto _ : bench) benchmark::DoNotOptimize(kernels::exploit_all(state, p, 99, threads));
}
BENCHMARK(BM_ExploitKernel)
    ->ArgsProduct({{200, 800}, {1, 2, 4, 8}})
    ->Unit(benchmark::kMillisecond)
    ->UseRealTime();

}  // namespace

BENCHMARK_MAIN();
