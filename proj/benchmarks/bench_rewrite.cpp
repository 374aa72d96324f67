#include <benchmark/benchmark.h>

#include "common.hpp"
#include "reformine/parser.hpp"
#include "reformine/rewrite.hpp"

using namespace reformine;

namespace {

void BM_EnumerateMatches(benchmark::State& state) {
  const Ast spec = parse_spec(bench::kRotationClass);
  for (auto _ : state) {
    benchmark::DoNotOptimize(enumerate_matches(spec));
  }
}
BENCHMARK(BM_EnumerateMatches);

void BM_ApplyCommute(benchmark::State& state) {
  const Ast spec = parse_spec(bench::kTinySpec);
  const Match m = enumerate_matches(spec, "commute").front();
  for (auto _ : state) {
    benchmark::DoNotOptimize(apply_match(spec, m));
  }
}
BENCHMARK(BM_ApplyCommute);

void BM_NormalizeRotation(benchmark::State& state) {
  const Ast spec = parse_spec(bench::kRotationClass);
  for (auto _ : state) {
    benchmark::DoNotOptimize(normalize(spec));
  }
}
BENCHMARK(BM_NormalizeRotation);

void BM_CanonicalHash(benchmark::State& state) {
  const Ast spec = parse_spec(bench::kRotationClass);
  for (auto _ : state) {
    benchmark::DoNotOptimize(canonical_hash(spec));
  }
}
BENCHMARK(BM_CanonicalHash);

}  // namespace

BENCHMARK_MAIN();
