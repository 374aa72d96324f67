#include <benchmark/benchmark.h>

#include "common.hpp"
#include "reformine/graph.hpp"
#include "reformine/parser.hpp"
#include "reformine/pretty.hpp"

using namespace reformine;

namespace {

void BM_ParseTiny(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(parse_spec(bench::kTinySpec));
  }
}
BENCHMARK(BM_ParseTiny);

void BM_ParseRotation(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(parse_spec(bench::kRotationClass));
  }
}
BENCHMARK(BM_ParseRotation);

void BM_PrettyRotation(benchmark::State& state) {
  const Ast spec = parse_spec(bench::kRotationClass);
  for (auto _ : state) {
    benchmark::DoNotOptimize(pretty(spec));
  }
}
BENCHMARK(BM_PrettyRotation);

void BM_AnnotateRotation(benchmark::State& state) {
  const Ast spec = parse_spec(bench::kRotationClass);
  for (auto _ : state) {
    benchmark::DoNotOptimize(annotate(spec));
  }
}
BENCHMARK(BM_AnnotateRotation);

void BM_GraphRoundTrip(benchmark::State& state) {
  const Ast spec = parse_spec(bench::kRotationClass);
  for (auto _ : state) {
    benchmark::DoNotOptimize(from_graph(to_graph(spec)));
  }
}
BENCHMARK(BM_GraphRoundTrip);

}  // namespace

BENCHMARK_MAIN();
