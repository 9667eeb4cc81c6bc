#include <coplan/synthesis.hpp>

#include <benchmark/benchmark.h>

#include <string>

using namespace coplan;

namespace {

// Random walk on a line of `n` cells: `fast` moves right or slips back,
// `safe` moves right slowly. Cell n-1 is the goal, cell 0 a trap.
Mdp line_walk(std::size_t n) {
  MdpBuilder b;
  for (std::size_t i = 0; i < n; ++i) b.add_state("c" + std::to_string(i));
  const auto fast = b.add_action("fast", ActionKind::independent);
  const auto safe = b.add_action("safe", ActionKind::independent);
  b.set_initial(static_cast<StateIndex>(n / 2));
  for (StateIndex i = 0; i < n; ++i) {
    if (i == 0 || i + 1 == n) {
      b.add_transition(i, safe, i, 1.0);
      continue;
    }
    b.add_transition(i, fast, i + 1, 0.6);
    b.add_transition(i, fast, i - 1, 0.4);
    b.add_transition(i, safe, i + 1, 0.1);
    b.add_transition(i, safe, i, 0.85);
    b.add_transition(i, safe, i - 1, 0.05);
  }
  return std::move(b).build();
}

UntilPartition reach_end(std::size_t n) {
  StateSet lhs(n, true);
  StateSet rhs(n, false);
  rhs[n - 1] = true;
  return until_partition(lhs, rhs);
}

void BM_UnboundedUntil(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  auto m = line_walk(n);
  auto part = reach_end(n);
  std::size_t iterations = 0;
  for (auto _ : state) {
    auto r = prob_unbounded_until_extremal(m, part, OptimizationMode::max);
    iterations = r.iterations;
    benchmark::DoNotOptimize(r.values.data());
  }
  state.counters["iterations"] = static_cast<double>(iterations);
}
BENCHMARK(BM_UnboundedUntil)->Arg(16)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_BoundedUntil(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  auto m = line_walk(n);
  auto part = reach_end(n);
  for (auto _ : state) {
    auto r = prob_bounded_until_extremal(m, part, 50, OptimizationMode::min);
    benchmark::DoNotOptimize(r.values.data());
  }
}
BENCHMARK(BM_BoundedUntil)->Arg(64)->Arg(1024)->Unit(benchmark::kMicrosecond);

void BM_Qualitative(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  auto m = line_walk(n);
  auto part = reach_end(n);
  for (auto _ : state) {
    benchmark::DoNotOptimize(prob1_max(m, part));
    benchmark::DoNotOptimize(prob1_min(m, part));
  }
}
BENCHMARK(BM_Qualitative)->Arg(64)->Arg(1024)->Unit(benchmark::kMicrosecond);

}  // namespace
