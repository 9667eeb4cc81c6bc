#include <coplan/io.hpp>
#include <coplan/product.hpp>

#include <benchmark/benchmark.h>

#include <string>

using namespace coplan;

namespace {

// A ring of `w` regions with a shared handshake at region 0 and a private move.
Agent ring_agent(std::size_t index, std::size_t w) {
  RawMdp raw;
  for (std::size_t r = 0; r < w; ++r) raw.states.push_back("r" + std::to_string(r));
  raw.initial = raw.states.front();
  const std::string own = "step" + std::to_string(index);
  raw.actions = {{"meet", ActionKind::handshake}, {own, ActionKind::independent}};
  for (std::size_t r = 0; r < w; ++r) {
    raw.transitions.push_back({raw.states[r], own, raw.states[(r + 1) % w], 0.8});
    raw.transitions.push_back({raw.states[r], own, raw.states[r], 0.2});
  }
  raw.transitions.push_back({raw.states[0], "meet", raw.states[0], 1.0});
  return Agent{"a" + std::to_string(index), build_mdp(raw), "", nullptr};
}

void BM_ProductRing(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto w = static_cast<std::size_t>(state.range(1));
  std::vector<Agent> agents;
  std::vector<AgentIndex> members;
  for (std::size_t i = 0; i < n; ++i) {
    agents.push_back(ring_agent(i, w));
    members.push_back(static_cast<AgentIndex>(i));
  }
  std::size_t states = 0;
  for (auto _ : state) {
    auto p = build_product(agents, members);
    states = p.model().num_states();
    benchmark::DoNotOptimize(states);
  }
  state.counters["joint_states"] = static_cast<double>(states);
}
BENCHMARK(BM_ProductRing)->Args({2, 4})->Args({2, 16})->Args({3, 8})->Args({4, 8})->Unit(benchmark::kMicrosecond);

void BM_ExampleOneClusters(benchmark::State& state) {
  auto agents = load_model(COPLAN_MODELS "/example1.json");
  for (auto _ : state) {
    auto c = compute_clusters(build_dependency_graph(agents));
    for (const auto& members : c.clusters) benchmark::DoNotOptimize(build_product(agents, members));
  }
}
BENCHMARK(BM_ExampleOneClusters)->Unit(benchmark::kMicrosecond);

}  // namespace
