#pragma once

#include <lpvet/harness.hpp>

#include <string>

namespace lpvet::testing {

inline LpvSystem example_system(int i)
{
    return builtin_system("example" + std::to_string(i));
}

/// Scalar plant x+ = (0.9 + 0.3 p) x + (1 + 0.2 p) u + w; stabilizable on [-1, 1].
inline LpvSystem scalar_plant()
{
    return LpvSystem::state_output({Mat::Constant(1, 1, 0.9), {Mat::Constant(1, 1, 0.3)}},
                                   {Mat::Constant(1, 1, 1.0), {Mat::Constant(1, 1, 0.2)}});
}

/// Open-loop experiment with uniform inputs and schedule on the unit box.
inline ExperimentData experiment(const LpvSystem& sys, int T, std::uint64_t seed, double delta, double amplitude = 1.0)
{
    return collect(sys, T, uniform_law(sys.m, -amplitude, amplitude, seed), box_law(SchedulingBox::symmetric(sys.ell, 1.0), seed + 1),
                   delta > 0 ? ball_noise_law(sys.n, delta, seed + 2) : zero_law(sys.n), Vec::Ones(sys.n), delta);
}

inline double max_abs(const Mat& M)
{
    return M.size() ? M.cwiseAbs().maxCoeff() : 0.0;
}

struct ScalarPipeline {
    LpvSystem sys = scalar_plant();
    SchedulingBox box = SchedulingBox::symmetric(1, 1.0);
    SynthesisConfig cfg;
    ExperimentData data;
    SynthesisProgram sp;
    SynthesisSolution sol;

    ScalarPipeline()
    {
        cfg.delta = 0.01;
        data = experiment(sys, 12, 21, cfg.delta, 1000.0);
        sp = build_synthesis_program(data, box, cfg);
        sol = solve_synthesis(sp);
    }
};

/// Solved once per test binary.
inline const ScalarPipeline& scalar_pipeline()
{
    static const ScalarPipeline p;
    return p;
}

}  // namespace lpvet::testing

using namespace lpvet::testing;
