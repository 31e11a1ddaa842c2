#include <benchmark/benchmark.h>

#include <fracq/mc.hpp>
#include <fracq/solver.hpp>

using namespace fracq;

static const generator::QueueParams kQueue{0.8, 1.0};

static void BM_SpectralDecompose(benchmark::State& state) {
    const auto gen = generator::build_generator(kQueue, state.range(0));
    for (auto _ : state)
        benchmark::DoNotOptimize(generator::spectral_decompose(gen, kQueue));
}
BENCHMARK(BM_SpectralDecompose)->Arg(35)->Arg(100)->Arg(200);

static void BM_Uniformization(benchmark::State& state) {
    const auto times = mc::SimConfig::default_time_grid();
    for (auto _ : state)
        benchmark::DoNotOptimize(generator::classical_transient_oracle(kQueue, 200, times));
}
BENCHMARK(BM_Uniformization);

static void BM_TalbotPerTime(benchmark::State& state) {
    std::vector<double> one_time{8.0};
    for (auto _ : state)
        benchmark::DoNotOptimize(
            solver::laplace_symbol_transient(kQueue, 0.8, state.range(0), one_time));
}
BENCHMARK(BM_TalbotPerTime)->Arg(35)->Arg(200);

static void BM_SpectralKsTable(benchmark::State& state) {
    const specfun::KSParams p(0.8, 0.2);
    std::vector<double> times;
    for (int i = 1; i <= 25; ++i) times.push_back(0.8 * i);
    specfun::ks_eval(p, 1.0);
    for (auto _ : state)
        benchmark::DoNotOptimize(solver::transient(
            specfun::KernelKind(specfun::KilbasSaigo{p}), kQueue, state.range(0), times));
}
BENCHMARK(BM_SpectralKsTable)->Arg(35)->Arg(100);

int main(int argc, char** argv) {
    ::benchmark::Initialize(&argc, argv);
    if (::benchmark::ReportUnrecognizedArguments(argc, argv)) return 1;
    ::benchmark::RunSpecifiedBenchmarks();
    ::benchmark::Shutdown();
    return 0;
}
