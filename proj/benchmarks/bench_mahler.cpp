// Timings of the main pipelines on the built-in examples.

#include <benchmark/benchmark.h>

#include "mahler/examples.hpp"
#include "mahler/reduction.hpp"
#include "mahler/xi.hpp"

using namespace mahler;

static void BM_SolveRudinShapiro(benchmark::State& state) {
    const MahlerOperator l = rudin_shapiro_operator();
    const Rational n(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(solution_basis(l, n));
}
BENCHMARK(BM_SolveRudinShapiro)->Arg(12)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);

static void BM_ReduceNonMinimal(benchmark::State& state) {
    const MahlerOperator l = non_minimal_operator();
    const Rational n(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(reduce_to_constant(l, n));
}
BENCHMARK(BM_ReduceNonMinimal)->Arg(12)->Arg(64)->Unit(benchmark::kMillisecond);

static void BM_Standardize(benchmark::State& state) {
    const long p = state.range(0);
    const XiIndex w({0, 1, 0}, {Alg(1), Alg(-2), Alg(3)}, {Rational(p * p), Rational(p), Rational(2 * p)});
    for (auto _ : state) {
        clear_xi_caches();
        benchmark::DoNotOptimize(standardize(w, p));
    }
}
BENCHMARK(BM_Standardize)->Arg(2)->Arg(3)->Unit(benchmark::kMicrosecond);

static void BM_XiMultiply(benchmark::State& state) {
    const XiExpr x = XiExpr::xi(XiIndex({0, 1}, {Alg(1), Alg(-2)}, {Rational(1), make_rational(1, 3)}));
    const XiExpr y = XiExpr::xi(XiIndex({2, 0}, {Alg(3), Alg(1)}, {make_rational(2, 3), Rational(1)}));
    for (auto _ : state) {
        clear_xi_caches();
        benchmark::DoNotOptimize(xi_multiply(x, y, 2));
    }
}
BENCHMARK(BM_XiMultiply)->Unit(benchmark::kMicrosecond);

static void BM_GuessRudinShapiro(benchmark::State& state) {
    const Puiseux f = rudin_shapiro_series(Rational(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(guess_minimal_operator(f, 2, 3, 4));
}
BENCHMARK(BM_GuessRudinShapiro)->Arg(60)->Arg(200)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
