#include <benchmark/benchmark.h>

#include <random>

#include "linkc/compiler.hpp"
#include "linkc/gadgets.hpp"
#include "linkc/solver.hpp"

using namespace linkc;

namespace {

void BM_InversionWitness(benchmark::State& state) {
  const auto g = inversion_gadget(3.0, 3.0, 1.0, state.range(0) != 0);
  const std::vector<PlanePoint> z{PlanePoint{3.2, 0.3}};
  const std::vector<int> signs(static_cast<std::size_t>(g.branch_count()), 1);
  for (auto _ : state) benchmark::DoNotOptimize(g.witness(z, signs));
}
BENCHMARK(BM_InversionWitness)->Arg(0)->Arg(1);

void BM_EnumerateConjugation(benchmark::State& state) {
  const auto g = conjugation_gadget(1.0, false);
  const std::vector<PlanePoint> z{PlanePoint{0.2, 8.1}};
  for (auto _ : state) benchmark::DoNotOptimize(enumerate_configs(g, z));
}
BENCHMARK(BM_EnumerateConjugation);

void BM_Compile(benchmark::State& state) {
  const char* texts[] = {"z1*z1", "z1*conj(z1) - 1", "z1*z1*z1 + 2*z1"};
  const auto expr = parse_poly(texts[state.range(0)], 1);
  const Domain region{{Disc{{}, 1.0}}};
  for (auto _ : state) benchmark::DoNotOptimize(compile(expr, region, Mode::kCabled));
}
BENCHMARK(BM_Compile)->DenseRange(0, 2)->Unit(benchmark::kMillisecond);

void BM_CompiledWitness(benchmark::State& state) {
  const auto c = compile(parse_poly("z1*z1", 1), Domain{{Disc{{}, 1.0}}}, Mode::kCabled);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-0.7, 0.7);
  for (auto _ : state) {
    const std::vector<PlanePoint> z{PlanePoint{u(rng), u(rng)}};
    auto signs = first_feasible_signs(c.gadget, z);
    benchmark::DoNotOptimize(c.gadget.witness(z, *signs));
  }
}
BENCHMARK(BM_CompiledWitness)->Unit(benchmark::kMicrosecond);

void BM_NewtonPerturbed(benchmark::State& state) {
  const auto g = inversion_gadget(3.0, 3.0, 1.0, false);
  const std::vector<PlanePoint> z{PlanePoint{3.2, 0.3}};
  const auto exact = enumerate_configs(g, z).configurations.front();
  std::mt19937_64 rng(2);
  std::normal_distribution<double> n(0.0, 1e-3);
  for (auto _ : state) {
    state.PauseTiming();
    Configuration seed = exact;
    for (auto& [id, p] : seed) {
      if (!g.linkage.is_fixed(id)) p += PlanePoint{n(rng), n(rng)};
    }
    state.ResumeTiming();
    benchmark::DoNotOptimize(newton_solve(g.linkage, seed));
  }
}
BENCHMARK(BM_NewtonPerturbed)->Unit(benchmark::kMicrosecond);

void BM_TraceParabola(benchmark::State& state) {
  const auto tracer = curve_tracer(parse_poly("z1 + i*z1*(1-z1)", 1), 0.0, 1.0, Mode::kCabled);
  for (auto _ : state) benchmark::DoNotOptimize(trace_curve(tracer, static_cast<int>(state.range(0))));
}
BENCHMARK(BM_TraceParabola)->Arg(90)->Arg(720)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
