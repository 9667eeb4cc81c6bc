#include <coplan/pctl.hpp>

#include <benchmark/benchmark.h>

#include <string>

using namespace coplan;

namespace {

void BM_ParseFormula(benchmark::State& state) {
  const std::string text = "P>=0.9 [ F meet ] & (P<=0.1 [ G<=8 !safe ] | P>0.5 [ X P>=0.2 [ a U<=3 (b & !c) ] ])";
  for (auto _ : state) benchmark::DoNotOptimize(pctl::parse_formula(text));
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * text.size()));
}
BENCHMARK(BM_ParseFormula);

void BM_ParseDeepNesting(benchmark::State& state) {
  std::string text = "goal";
  for (int i = 0; i < state.range(0); ++i) text = "P>=0.5 [ X (" + text + " & ok) ]";
  for (auto _ : state) benchmark::DoNotOptimize(pctl::parse_formula(text));
}
BENCHMARK(BM_ParseDeepNesting)->Arg(8)->Arg(64);

void BM_PrintFormula(benchmark::State& state) {
  auto f = pctl::parse_formula_sugared("P>=0.9 [ F meet ] & P<=0.1 [ G<=8 !safe ] => P>0.5 [ a U b ]");
  for (auto _ : state) benchmark::DoNotOptimize(pctl::to_string(f));
}
BENCHMARK(BM_PrintFormula);

}  // namespace
