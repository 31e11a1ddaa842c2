#include <benchmark/benchmark.h>

#include <fracq/mc.hpp>

using namespace fracq;

static void BM_StableVariate(benchmark::State& state) {
    mc::Stream rng(1, 1);
    for (auto _ : state) benchmark::DoNotOptimize(mc::sample_stable(0.8, rng));
}
BENCHMARK(BM_StableVariate);

static void BM_InverseCdfBuild(benchmark::State& state) {
    for (auto _ : state) {
        // bypass the process-wide cache to time the tabulation itself
        benchmark::DoNotOptimize(
            mc::make_sampler(mc::SamplerBackend::InverseCDF, specfun::KSParams(0.8, 0.2), 250));
    }
}
BENCHMARK(BM_InverseCdfBuild)->Unit(benchmark::kMillisecond);

static void BM_ClassicalPath(benchmark::State& state) {
    const generator::QueueParams q(0.8, 1.0);
    std::uint64_t rep = 0;
    for (auto _ : state) {
        mc::Stream rng(7, rep++);
        benchmark::DoNotOptimize(mc::simulate_classical_path(q, 100.0, rng));
    }
}
BENCHMARK(BM_ClassicalPath);

static void BM_RunSimulation(benchmark::State& state) {
    mc::SimConfig cfg;
    cfg.ks = specfun::KSParams(0.8, 0.2);
    cfg.replications = static_cast<std::size_t>(state.range(0));
    mc::run_simulation(cfg); // warm the sampler cache
    for (auto _ : state) benchmark::DoNotOptimize(mc::run_simulation(cfg));
}
BENCHMARK(BM_RunSimulation)->Arg(300)->Arg(3000)->Unit(benchmark::kMillisecond);

int main(int argc, char** argv) {
    ::benchmark::Initialize(&argc, argv);
    if (::benchmark::ReportUnrecognizedArguments(argc, argv)) return 1;
    ::benchmark::RunSpecifiedBenchmarks();
    ::benchmark::Shutdown();
    return 0;
}
