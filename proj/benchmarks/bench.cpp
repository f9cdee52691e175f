// Microbenchmarks for the hot paths: canonicalization, census generation,
// decomposition round trips, lattice counting, and exact volumes.
#include <benchmark/benchmark.h>

#include "sqtile/counting.hpp"

using namespace sqt;

namespace {

Stratum torus_stratum() { return Stratum({0}, 1); }

SquareTiledSurface sample_surface(int n) {
  // staircase-like origami: h = (0 1 ... n-1), v = (0)(1 2 ... n-1)
  std::vector<int> h(n), v(n);
  for (int i = 0; i < n; ++i) h[i] = (i + 1) % n;
  v[0] = 0;
  for (int i = 1; i < n; ++i) v[i] = i % (n - 1) + 1;
  return build_from_permutations(h, v);
}

void BM_canonical_form(benchmark::State& state) {
  auto q = sample_surface((int)state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(canonical_form(q));
}
BENCHMARK(BM_canonical_form)->Arg(8)->Arg(16)->Arg(32);

void BM_census_unrestricted(benchmark::State& state) {
  int n = (int)state.range(0);
  for (auto _ : state) {
    long long total = 0;
    for (auto c : census_counts(n, CensusFilter{}, 1)) total += c;
    benchmark::DoNotOptimize(total);
  }
}
BENCHMARK(BM_census_unrestricted)->Arg(5)->Arg(6)->Arg(7);

void BM_census_stratum_filtered(benchmark::State& state) {
  int L = (int)state.range(0);
  CensusFilter f{Stratum({4}, 1), ""};
  for (auto _ : state) {
    long long total = 0;
    for (auto c : census_counts(L, f, 1)) total += c;
    benchmark::DoNotOptimize(total);
  }
}
BENCHMARK(BM_census_stratum_filtered)->Arg(8)->Arg(10)->Arg(12);

void BM_decompose_roundtrip(benchmark::State& state) {
  auto q = sample_surface((int)state.range(0));
  for (auto _ : state) {
    auto dec = decompose(q);
    auto par = normalize_twists(dec.dia, dec.par);
    benchmark::DoNotOptimize(reconstruct(dec.dia, par));
  }
}
BENCHMARK(BM_decompose_roundtrip)->Arg(8)->Arg(16)->Arg(32);

void BM_sq_lattice_torus(benchmark::State& state) {
  int L = (int)state.range(0);
  auto g = MultiCurveType::parse("g0.b2.s[]/e(0,0,w=1)");
  for (auto _ : state)
    benchmark::DoNotOptimize(sq_lattice(torus_stratum(), "", g, L, 1));
}
BENCHMARK(BM_sq_lattice_torus)->Arg(100)->Arg(300)->Arg(1000);

void BM_sq_lattice_h2(benchmark::State& state) {
  int L = (int)state.range(0);
  auto g = MultiCurveType::parse("g1.b2.s[4]/e(0,0,w=1)");
  for (auto _ : state)
    benchmark::DoNotOptimize(sq_lattice(Stratum({4}, 1), "", g, L, 1));
}
BENCHMARK(BM_sq_lattice_h2)->Arg(50)->Arg(100);

void BM_volume_constant_h2(benchmark::State& state) {
  auto g = MultiCurveType::parse("g1.b2.s[4]/e(0,0,w=1)");
  for (auto _ : state)
    benchmark::DoNotOptimize(volume_constant(Stratum({4}, 1), "", g, 1));
}
BENCHMARK(BM_volume_constant_h2);

void BM_partition_chart(benchmark::State& state) {
  auto g = MultiCurveType::parse("g1.b2.s[4]/e(0,0,w=1)");
  auto dias = enumerate_diagrams(Stratum({4}, 1), "", g, 1);
  TrainTrackChart c = build_chart(dias.at(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(partition_chart(c, Rat(1, 2)));
}
BENCHMARK(BM_partition_chart);

}  // namespace

BENCHMARK_MAIN();
