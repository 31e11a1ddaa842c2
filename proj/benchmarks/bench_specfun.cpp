#include <benchmark/benchmark.h>

#include <fracq/specfun.hpp>

using fracq::specfun::KSParams;

static void BM_KsEvalSmall(benchmark::State& state) {
    const KSParams p(0.8, 0.2);
    fracq::specfun::ks_eval(p, 1.0); // warm the coefficient tables
    double x = 0.1;
    for (auto _ : state) {
        benchmark::DoNotOptimize(fracq::specfun::ks_eval(p, x));
        x = x < 3.0 ? x + 0.05 : 0.1;
    }
}
BENCHMARK(BM_KsEvalSmall);

static void BM_KsEvalWide(benchmark::State& state) {
    const KSParams p(0.6, 0.2);
    const double x = static_cast<double>(state.range(0));
    fracq::specfun::ks_eval(p, x);
    for (auto _ : state) benchmark::DoNotOptimize(fracq::specfun::ks_eval(p, x));
}
BENCHMARK(BM_KsEvalWide)->Arg(10)->Arg(20)->Arg(40)->Arg(70);

static void BM_MlEval(benchmark::State& state) {
    const double x = static_cast<double>(state.range(0));
    fracq::specfun::ml_eval(0.8, x);
    for (auto _ : state) benchmark::DoNotOptimize(fracq::specfun::ml_eval(0.8, x));
}
BENCHMARK(BM_MlEval)->Arg(1)->Arg(10)->Arg(39);

static void BM_KsCoefficients(benchmark::State& state) {
    const KSParams p(0.8, 0.2);
    for (auto _ : state)
        benchmark::DoNotOptimize(fracq::specfun::ks_coefficients(p, state.range(0)));
}
BENCHMARK(BM_KsCoefficients)->Arg(50)->Arg(500);

int main(int argc, char** argv) {
    ::benchmark::Initialize(&argc, argv);
    if (::benchmark::ReportUnrecognizedArguments(argc, argv)) return 1;
    ::benchmark::RunSpecifiedBenchmarks();
    ::benchmark::Shutdown();
    return 0;
}
