#include "test_util.hpp"

#include <lpvet/lpv.hpp>

#include <gtest/gtest.h>

using namespace lpvet;

TEST(EvalAffine, ZeroScheduleGivesBase)
{
    const auto sys = example_system(1);
    EXPECT_TRUE(eval_affine(sys.A, Vec::Zero(2)).isApprox(sys.A.base, 0.0));
}

TEST(EvalAffine, IdentityCase)
{
    AffineMatrixFunction f(Mat::Identity(2, 2), {Mat::Identity(2, 2)});
    EXPECT_TRUE(eval_affine(f, Vec::Ones(1)).isApprox(2.0 * Mat::Identity(2, 2)));
}

TEST(EvalAffine, ExampleOneEntry)
{
    const auto sys = example_system(1);
    const Mat A = eval_affine(sys.A, Vec::Ones(2));
    EXPECT_NEAR(A(0, 0), 0.2359, 1e-12);
}

TEST(EvalAffine, WrongScheduleLengthThrows)
{
    const auto sys = example_system(1);
    EXPECT_THROW(eval_affine(sys.A, Vec::Zero(3)), DimensionError);
}

TEST(LiftState, ZeroSchedule)
{
    const Vec z = lift_state((Vec(2) << 1, 2).finished(), Vec::Zero(2));
    EXPECT_EQ(z, (Vec(6) << 1, 2, 0, 0, 0, 0).finished());
}

TEST(LiftState, KroneckerLayout)
{
    EXPECT_EQ(lift_state((Vec(2) << 1, 0).finished(), Vec::Ones(1)), (Vec(4) << 1, 0, 1, 0).finished());
    const double a = 1.5, b = -2, c = 3, d = 0.25;
    const Vec z = lift_state((Vec(2) << a, b).finished(), (Vec(2) << c, d).finished());
    EXPECT_EQ(z, (Vec(6) << a, b, c * a, c * b, d * a, d * b).finished());
}

TEST(Step, Equilibrium)
{
    const auto sys = example_system(3);
    const auto s = step(sys, Vec::Zero(1), Vec::Zero(2), (Vec(1) << 0.3).finished(), Vec::Zero(1));
    EXPECT_EQ(s.x_next.norm(), 0.0);
    EXPECT_EQ(s.y.norm(), 0.0);
}

TEST(Step, IdentityDynamics)
{
    Mat C1(1, 2);
    C1 << 1, 2;
    LpvSystem sys({Mat::Identity(2, 2), {Mat::Zero(2, 2)}}, {Mat::Zero(2, 1), {Mat::Zero(2, 1)}},
                  {Mat::Ones(1, 2), {C1}}, {Mat::Zero(1, 1), {Mat::Zero(1, 1)}});
    const Vec x0 = (Vec(2) << 0.5, -1).finished();
    const auto s = step(sys, x0, Vec::Ones(1), (Vec(1) << 2).finished(), Vec::Zero(2));
    EXPECT_EQ(s.x_next, x0);
    EXPECT_NEAR(s.y(0), (0.5 - 1) + 2 * (0.5 - 2), 1e-15);
}

TEST(Step, ExampleOneHandComputed)
{
    const auto sys = example_system(1);
    const auto s = step(sys, (Vec(2) << 2, -2).finished(), Vec::Zero(1), Vec::Zero(2), Vec::Zero(2));
    // [0.2485*2 + 1.0355*2, 0.8910*2 - 0.4065*2]
    EXPECT_NEAR(s.x_next(0), 2.568, 1e-12);
    EXPECT_NEAR(s.x_next(1), 0.969, 1e-12);
}

TEST(Hankel, ScalarCases)
{
    std::vector<Vec> s{Vec::Constant(1, 1), Vec::Constant(1, 2), Vec::Constant(1, 3)};
    EXPECT_EQ(hankel(s, 1), (Mat(1, 3) << 1, 2, 3).finished());
    EXPECT_EQ(hankel(s, 2), (Mat(2, 2) << 1, 2, 2, 3).finished());
}

TEST(Hankel, BlockColumns)
{
    std::vector<Vec> v;
    for (int k = 0; k < 4; ++k) v.push_back((Vec(2) << k, 10 + k).finished());
    const Mat H = hankel(v, 2);
    ASSERT_EQ(H.rows(), 4);
    ASSERT_EQ(H.cols(), 3);
    for (int j = 0; j < 3; ++j) {
        EXPECT_EQ(Vec(H.col(j).head(2)), v[j]);
        EXPECT_EQ(Vec(H.col(j).tail(2)), v[j + 1]);
    }
}

TEST(Hankel, DepthTooLargeThrows)
{
    std::vector<Vec> s{Vec::Constant(1, 1)};
    EXPECT_THROW(hankel(s, 2), DimensionError);
}

TEST(Vertices, Interval)
{
    const auto v = vertices(SchedulingBox::symmetric(1, 1.0));
    ASSERT_EQ(v.size(), 2u);
    EXPECT_EQ(v[0](0), -1);
    EXPECT_EQ(v[1](0), 1);
}

TEST(Vertices, SquareInLexicographicOrder)
{
    const auto v = vertices(SchedulingBox::symmetric(2, 1.0));
    ASSERT_EQ(v.size(), 4u);
    const double expect[4][2] = {{-1, -1}, {-1, 1}, {1, -1}, {1, 1}};
    for (int i = 0; i < 4; ++i) {
        EXPECT_EQ(v[i](0), expect[i][0]);
        EXPECT_EQ(v[i](1), expect[i][1]);
    }
}

TEST(Vertices, DegenerateBoxCollapses)
{
    EXPECT_EQ(vertices(SchedulingBox(Vec::Zero(1), Vec::Zero(1))).size(), 1u);
    EXPECT_EQ(vertices(SchedulingBox((Vec(2) << 0, -1).finished(), (Vec(2) << 0, 1).finished())).size(), 2u);
}

TEST(Simulate, ZeroSystemStaysZero)
{
    LpvSystem sys = LpvSystem::state_output({Mat::Zero(2, 2), {Mat::Zero(2, 2)}}, {Mat::Zero(2, 1), {Mat::Zero(2, 1)}});
    const FeedbackLaw zero_fb = [](int, const Vec&, const Vec&) { return Vec::Zero(1); };
    const auto tr = simulate(sys, zero_fb, zero_law(1), zero_law(2), Vec::Zero(2), 5);
    ASSERT_EQ(tr.x.size(), 6u);
    for (const auto& x : tr.x) EXPECT_EQ(x.norm(), 0.0);
}

TEST(Simulate, OneStepMatchesStep)
{
    const auto sys = example_system(1);
    const Vec x0 = (Vec(2) << 2, -2).finished();
    const FeedbackLaw fb = [](int, const Vec& x, const Vec&) { return Vec::Constant(1, -0.3 * x(0)); };
    const auto sched = box_law(SchedulingBox::symmetric(2, 1.0), 7);
    const auto noise = ball_noise_law(2, 0.1, 8);
    const auto tr = simulate(sys, fb, sched, noise, x0, 1);
    ASSERT_EQ(tr.x.size(), 2u);
    const auto s = step(sys, x0, tr.u[0], tr.p[0], tr.w[0]);
    EXPECT_EQ(tr.x[1], s.x_next);
}

TEST(Laws, BallNoiseStaysInBall)
{
    const auto noise = ball_noise_law(3, 0.1, 5);
    for (int k = 0; k < 500; ++k) EXPECT_LE(noise(k).norm(), 0.1 + 1e-15);
}

TEST(Laws, SameSeedSameDraws)
{
    auto a = uniform_law(2, -1, 1, 42), b = uniform_law(2, -1, 1, 42);
    for (int k = 0; k < 10; ++k) EXPECT_EQ(a(k), b(k));
}

TEST(SpectralRadius, Basics)
{
    EXPECT_NEAR(spectral_radius(Mat::Identity(2, 2)), 1.0, 1e-14);
    EXPECT_NEAR(spectral_radius(0.5 * Mat::Identity(3, 3)), 0.5, 1e-14);
    EXPECT_NEAR(spectral_radius((Mat(2, 2) << 0, 1, 0, 0).finished()), 0.0, 1e-14);
    // rotation: complex pair on the unit circle
    EXPECT_NEAR(spectral_radius((Mat(2, 2) << 0, -1, 1, 0).finished()), 1.0, 1e-14);
}

TEST(Kron, MatchesDefinition)
{
    const Mat a = (Mat(2, 2) << 1, 2, 3, 4).finished();
    const Mat b = (Mat(1, 2) << 5, 6).finished();
    EXPECT_EQ(kron(a, b), (Mat(2, 4) << 5, 6, 10, 12, 15, 18, 20, 24).finished());
}
