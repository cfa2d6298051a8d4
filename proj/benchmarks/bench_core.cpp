// Microbenchmarks for the inner-loop kernels and one end-to-end solve.

#include "conic/direction.hpp"
#include "conic/potential.hpp"
#include "conic/rng.hpp"
#include "conic/solver.hpp"

#include <benchmark/benchmark.h>

using namespace conic;

namespace {

ConeInstance planted_for(int n, int m) {
    auto [instance, witness] = generate_planted(n, m, 1e-2, 42);
    return instance;
}

void BM_evaluate(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const int m = 3 * n;
    const ConeInstance instance = planted_for(n, m);
    const NormState id = NormState::identity(n);
    auto stream = make_stream(1, "bench-evaluate");
    const Vector x = sample_gaussian(n, stream);
    for (auto _ : state) {
        benchmark::DoNotOptimize(evaluate(instance, x, id));
    }
    state.SetComplexityN(n);
}
BENCHMARK(BM_evaluate)->RangeMultiplier(2)->Range(8, 64)->Complexity();

void BM_second_moment(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const ConeInstance instance = planted_for(n, 3 * n);
    auto stream = make_stream(2, "bench-moment");
    const Vector lambda = sample_simplex(3 * n, stream);
    for (auto _ : state) {
        benchmark::DoNotOptimize(second_moment(instance, lambda));
    }
    state.SetComplexityN(n);
}
BENCHMARK(BM_second_moment)->RangeMultiplier(2)->Range(8, 64)->Complexity();

void BM_choose_direction(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const ConeInstance instance = planted_for(n, 3 * n);
    const NormState id = NormState::identity(n);
    const PotentialEval eval = evaluate(instance, Vector::Zero(n), id);
    const SecondMoment moment = second_moment(instance, eval.lambda);
    const int depth = eigen_split_depth(n);
    for (auto _ : state) {
        benchmark::DoNotOptimize(choose_direction(eval.y, moment, id, depth));
    }
    state.SetComplexityN(n);
}
BENCHMARK(BM_choose_direction)->RangeMultiplier(2)->Range(8, 64)->Complexity();

void BM_solve_planted(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const ConeInstance instance = planted_for(n, 2 * n);
    SolveConfig cfg;
    cfg.phase_mode = PhaseMode::MwuModified;
    cfg.rescale_mode = RescaleMode::MultiRank;
    cfg.rho_hint = 1e-2;
    for (auto _ : state) {
        benchmark::DoNotOptimize(solve(instance, cfg));
    }
}
BENCHMARK(BM_solve_planted)->Arg(8)->Arg(16)->Arg(32);

} // namespace

BENCHMARK_MAIN();
