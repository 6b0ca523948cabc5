#include <benchmark/benchmark.h>

#include "roundtable/batch.hpp"
#include "roundtable/economy.hpp"
#include "roundtable/stopping.hpp"

using namespace roundtable;

namespace {

Execution mode(const benchmark::State& state) { return state.range(0) ? Execution::Parallel : Execution::Serial; }

void label(benchmark::State& state) { state.SetLabel(state.range(0) ? "parallel" : "serial"); }

void BM_UMax(benchmark::State& state) {
    UMaxOptions opts;
    opts.execution = mode(state);
    for (auto _ : state) benchmark::DoNotOptimize(u_max(UtilitySetPreset::AsymmetricLiteral, 3, opts).value);
    label(state);
}
BENCHMARK(BM_UMax)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_GridOracle(benchmark::State& state) {
    const auto utilities = make_utilities(UtilitySetPreset::Symmetric, 3);
    for (auto _ : state) benchmark::DoNotOptimize(grid_u_max(utilities, 4.0, mode(state)).polished_value);
    label(state);
}
BENCHMARK(BM_GridOracle)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_Batch(benchmark::State& state) {
    RunConfig config = parse_run_config(Json::parse(R"({"environment":"economy","mechanism":"Majority",
        "rounds":10,"agents":3,"roster":{"random_mix":{}}})"));
    BatchContext ctx;
    ctx.config = config;
    ctx.u_max = 1.0;
    BatchOptions opts;
    opts.sims = 32;
    opts.execution = mode(state);
    for (auto _ : state) benchmark::DoNotOptimize(run_batch(ctx, opts).size());
    label(state);
}
BENCHMARK(BM_Batch)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_KFold(benchmark::State& state) {
    const auto sims = synthetic_v_shape(100, 10, 4, 0.02, 7);
    CVOptions opts;
    opts.execution = mode(state);
    for (auto _ : state) benchmark::DoNotOptimize(kfold_evaluate(sims, opts).summary.size());
    label(state);
}
BENCHMARK(BM_KFold)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
