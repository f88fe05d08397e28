#include <lpvet/conic_admm.hpp>
#include <lpvet/harness.hpp>

#include <benchmark/benchmark.h>

using namespace lpvet;

namespace {

LpvSystem scalar_plant()
{
    return LpvSystem::state_output({Mat::Constant(1, 1, 0.9), {Mat::Constant(1, 1, 0.3)}},
                                   {Mat::Constant(1, 1, 1.0), {Mat::Constant(1, 1, 0.2)}});
}

ExperimentData scalar_data()
{
    const auto sys = scalar_plant();
    return collect(sys, 12, uniform_law(1, -1000, 1000, 21), box_law(SchedulingBox::symmetric(1, 1), 22),
                   ball_noise_law(1, 0.01, 23), Vec::Ones(1), 0.01);
}

}  // namespace

static void BM_ProjectPsd(benchmark::State& state)
{
    const int d = static_cast<int>(state.range(0));
    const Mat R = Mat::Random(d, d);
    const Vec v0 = sdp::svec(R + R.transpose());
    Vec v = v0;
    for (auto _ : state) {
        v = v0;
        sdp::project_psd_svec(v, d);
        benchmark::DoNotOptimize(v.data());
    }
}
BENCHMARK(BM_ProjectPsd)->Arg(8)->Arg(32)->Arg(96);

static void BM_ScalarSynthesis(benchmark::State& state)
{
    const auto data = scalar_data();
    SynthesisConfig cfg;
    cfg.delta = 0.01;
    for (auto _ : state) {
        auto sol = solve_synthesis(build_synthesis_program(data, SchedulingBox::symmetric(1, 1), cfg));
        benchmark::DoNotOptimize(sol.P.data());
    }
}
BENCHMARK(BM_ScalarSynthesis)->Unit(benchmark::kMillisecond);

static void BM_SimulateExample1(benchmark::State& state)
{
    const auto sys = builtin_system("example1");
    const AffineMatrixFunction K(Mat::Constant(1, 2, -0.1), {Mat::Zero(1, 2), Mat::Zero(1, 2)});
    const FeedbackLaw fb = [&](int, const Vec& x, const Vec& p) { return Vec(eval_affine(K, p) * x); };
    const auto N = static_cast<int>(state.range(0));
    for (auto _ : state) {
        auto tr = simulate(sys, fb, box_law(SchedulingBox::symmetric(2, 1), 1), ball_noise_law(2, 0.1, 2), Vec::Ones(2), N);
        benchmark::DoNotOptimize(tr.x.data());
    }
}
BENCHMARK(BM_SimulateExample1)->Arg(200)->Arg(3000);

static void BM_RegressorRank(benchmark::State& state)
{
    const auto sys = builtin_system("example3");
    const auto d = collect(sys, 29, uniform_law(sys.m, -1, 1, 1), box_law(SchedulingBox::symmetric(sys.ell, 1), 2),
                           ball_noise_law(sys.n, 0.1, 3), Vec::Ones(sys.n), 0.1);
    for (auto _ : state) benchmark::DoNotOptimize(regressor_rank(d));
}
BENCHMARK(BM_RegressorRank);

BENCHMARK_MAIN();
