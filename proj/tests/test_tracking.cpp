#include "test_util.hpp"

#include <lpvet/tracking.hpp>

#include <gtest/gtest.h>

#include <cmath>

using namespace lpvet;

namespace {

LpvSystem random_system(int n, int m, int r, int ell, unsigned seed)
{
    std::srand(seed);
    auto aff = [&](int rows, int cols) {
        std::vector<Mat> c;
        for (int i = 0; i < ell; ++i) c.push_back(Mat::Random(rows, cols));
        return AffineMatrixFunction(Mat::Random(rows, cols), c);
    };
    return LpvSystem(aff(n, n), aff(n, m), aff(r, n), aff(r, m));
}

}  // namespace

TEST(Augment, StructureOfLiftedMatrices)
{
    const auto sys = example_system(3);
    const auto aug = augment_system(sys);
    EXPECT_EQ(aug.nbar, 3);
    const Mat A0 = aug.A().base;
    EXPECT_EQ(A0(0, 0), 0.5387);
    EXPECT_EQ(Mat(A0.block(1, 0, 2, 1)), sys.C.base);
    EXPECT_EQ(Mat(A0.block(1, 1, 2, 2)), Mat::Identity(2, 2));
    EXPECT_EQ(max_abs(aug.A().coeffs[0].block(1, 1, 2, 2)), 0.0);
    EXPECT_EQ(Mat(aug.B().base.bottomRows(2)), sys.D.base);
    EXPECT_EQ(aug.E, (Mat(3, 3) << 1, 0, 0, 0, -1, 0, 0, 0, -1).finished());
}

TEST(Augment, RandomStepsAgreeComponentwise)
{
    const auto sys = random_system(3, 2, 2, 2, 11);
    const auto aug = augment_system(sys);
    std::srand(12);
    double worst = 0.0;
    for (int k = 0; k < 20; ++k) {
        const Vec x = Vec::Random(3), chi = Vec::Random(2), u = Vec::Random(2), w = Vec::Random(3), r = Vec::Random(2),
                  p = Vec::Random(2);
        Vec psi(5), varpi(5);
        psi << x, chi;
        varpi << w, r;
        const auto a = step(aug.plant, psi, u, p, aug.E * varpi);
        const auto b = step(sys, x, u, p, w);
        worst = std::max({worst, max_abs(a.x_next.head(3) - b.x_next), max_abs(a.x_next.tail(2) - (chi + b.y - r)),
                          max_abs(a.y - b.y)});
    }
    EXPECT_LE(worst, 1e-12);
}

TEST(Augment, IntegratorHoldsWithoutOutput)
{
    auto sys = example_system(2);
    sys.C.base.setZero();
    for (auto& c : sys.C.coeffs) c.setZero();
    sys.D.base.setZero();
    for (auto& c : sys.D.coeffs) c.setZero();
    const auto aug = augment_system(sys);
    Vec psi = (Vec(2) << 0.4, 0.7).finished();
    for (int k = 0; k < 10; ++k) psi = step(aug.plant, psi, Vec::Random(1), Vec::Random(1), Vec::Zero(2)).x_next;
    EXPECT_EQ(psi(1), 0.7);
}

TEST(Augment, MinDataLength)
{
    EXPECT_EQ(min_data_length_aug(2, 1, 1), 11);
    EXPECT_EQ(min_data_length_aug(3, 2, 1), 29);
    EXPECT_EQ(min_data_length_aug(1, 1, 0), 1);
}

TEST(Reference, CircleRadius)
{
    const auto r = make_reference(ReferenceKind::Circle, 2.5, 1000, 3000);
    ASSERT_EQ(r.samples.size(), 3001u);
    for (const auto& s : r.samples) EXPECT_NEAR(s.squaredNorm(), 6.25, 1e-12);
}

TEST(Reference, SquareLevels)
{
    const auto r = make_reference(ReferenceKind::Square, 1.0, 150, 600);
    int hi = 0, lo = 0;
    for (const auto& s : r.samples) {
        EXPECT_TRUE(s(0) == 1.0 || s(0) == -1.0);
        (s(0) > 0 ? hi : lo)++;
    }
    EXPECT_GT(hi, 0);
    EXPECT_GT(lo, 0);
}

TEST(Reference, SinusoidRange)
{
    const auto r = make_reference(ReferenceKind::Sinusoid, 1.0, 150, 600);
    EXPECT_EQ(r.samples[0](0), 0.0);
    for (const auto& s : r.samples) EXPECT_LE(std::abs(s(0)), 1.0);
    EXPECT_NEAR(r.samples[150](0), 0.0, 1e-12);
    EXPECT_NEAR(r.samples[150 / 4](0), std::sin(2 * M_PI * 37 / 150.0), 1e-15);
}

TEST(Reference, FigureEightShape)
{
    const auto r = make_reference(ReferenceKind::Figure8, 2.5, 1000, 1000);
    for (const auto& s : r.samples) {
        const double q = s(0) / 2.5;
        EXPECT_NEAR(std::abs(s(1)), std::abs(2 * s(0) * std::sqrt(std::max(0.0, 1 - q * q))), 1e-12);
    }
    // |r|^2 = a^2 (t + 4t(1 - t)) with t = sin^2, largest at t = 5/8
    EXPECT_NEAR(r.max_norm(), 2.5 * 1.25, 1e-3);
}

TEST(Reference, Errors)
{
    EXPECT_THROW(parse_reference_kind("unknown"), std::invalid_argument);
    EXPECT_THROW(make_reference(ReferenceKind::Custom, 1, 10, 10), std::invalid_argument);
    EXPECT_THROW(make_reference(ReferenceKind::Sinusoid, 1, 0, 10), std::invalid_argument);
    for (auto k : {ReferenceKind::Sinusoid, ReferenceKind::Square, ReferenceKind::Circle, ReferenceKind::Figure8})
        EXPECT_EQ(parse_reference_kind(to_string(k)), k);
}

TEST(Reference, DefaultDeltaHat)
{
    const auto sq = make_reference(ReferenceKind::Square, 1.0, 150, 600);
    EXPECT_DOUBLE_EQ(default_delta_hat(0.1, sq), 1.01);
    const auto c = make_reference(ReferenceKind::Circle, 2.5, 1000, 3000);
    EXPECT_DOUBLE_EQ(default_delta_hat(0.1, c), 2.51);
}

TEST(CollectAug, NoReferenceNoNoiseGivesZeroW)
{
    const auto aug = augment_system(example_system(2));
    ReferenceSignal zero;
    zero.samples.assign(18, Vec::Zero(1));
    const auto d = collect_aug(aug, 17, uniform_law(1, -1, 1, 1), box_law(SchedulingBox::symmetric(1, 1), 2), zero_law(1),
                               zero, Vec::Ones(2), 0.0);
    EXPECT_EQ(max_abs(d.W), 0.0);
    EXPECT_EQ(d.T, 17);
}

TEST(CollectAug, ReferenceEntersWithNegativeSign)
{
    const auto aug = augment_system(example_system(2));
    const auto ref = make_reference(ReferenceKind::Square, 1.0, 8, 20);
    const auto d = collect_aug(aug, 17, uniform_law(1, -1, 1, 1), box_law(SchedulingBox::symmetric(1, 1), 2), zero_law(1),
                               ref, Vec::Ones(2), 1.01);
    for (int k = 0; k < 17; ++k) {
        EXPECT_EQ(d.W(0, k), 0.0);
        EXPECT_EQ(d.W(1, k), -ref.samples[k](0));
    }
}

TEST(CollectAug, ExampleRanks)
{
    for (auto [i, T, rank] : {std::tuple{2, 17, 6}, std::tuple{3, 29, 10}}) {
        const auto sys = example_system(i);
        const auto aug = augment_system(sys);
        const auto ref = make_reference(i == 2 ? ReferenceKind::Sinusoid : ReferenceKind::Circle, i == 2 ? 1.0 : 2.5,
                                        i == 2 ? 150 : 1000, T);
        const auto d = collect_aug(aug, T, uniform_law(sys.m, -1, 1, 3), box_law(SchedulingBox::symmetric(1, 1), 4),
                                   ball_noise_law(sys.n, 0.1, 5), ref, Vec::Ones(aug.nbar), 0.1);
        EXPECT_EQ(regressor_rank(d), rank) << "example " << i;
    }
}

TEST(TrackingSim, ZeroEverythingStaysZero)
{
    const auto aug = augment_system(example_system(2));
    ReferenceSignal zero;
    zero.samples.assign(51, Vec::Zero(1));
    TriggerConfig cfg;
    cfg.Psi1 = Mat::Identity(2, 2);
    cfg.Psi2 = Mat::Identity(2, 2);
    const AffineMatrixFunction K(Mat::Constant(1, 2, -0.2), {Mat::Zero(1, 2)});
    const auto tr = simulate_tracking_event_triggered(aug, K, cfg, aug.B(), zero, box_law(SchedulingBox::symmetric(1, 1), 1),
                                                      zero_law(1), Vec::Zero(2), 50);
    for (const auto& x : tr.x) EXPECT_EQ(x.norm(), 0.0);
    EXPECT_EQ(inter_event_stats(tr).count, 1);
}

TEST(TrackingStats, PerfectAndOffset)
{
    SimulationTrace tr;
    tr.N = 40;
    ReferenceSignal ref = make_reference(ReferenceKind::Sinusoid, 1.0, 20, 40);
    for (int k = 0; k <= 40; ++k) tr.x.push_back(Vec::Zero(3));
    for (int k = 0; k < 40; ++k) tr.y.push_back(ref.samples[k]);
    auto st = tracking_error_stats(tr, ref, 2);
    EXPECT_EQ(st.max_error, 0.0);
    EXPECT_EQ(st.final_rms, 0.0);
    EXPECT_EQ(st.chi_max, 0.0);

    for (int k = 0; k < 40; ++k) tr.y[k] = ref.samples[k] + Vec::Constant(1, 0.3);
    st = tracking_error_stats(tr, ref, 2);
    EXPECT_NEAR(st.final_rms, 0.3, 1e-15);
    EXPECT_NEAR(st.max_error, 0.3, 1e-15);
}

TEST(TrackingStats, IntegralStateWindows)
{
    SimulationTrace tr;
    tr.N = 8;
    ReferenceSignal ref;
    ref.samples.assign(9, Vec::Zero(1));
    for (int k = 0; k <= 8; ++k) tr.x.push_back((Vec(2) << 0.0, double(k)).finished());
    for (int k = 0; k < 8; ++k) tr.y.push_back(Vec::Zero(1));
    const auto st = tracking_error_stats(tr, ref, 1);
    EXPECT_EQ(st.chi_max, 8.0);
    EXPECT_EQ(st.chi_mid, 4.0);
    EXPECT_EQ(st.chi_final_max, 8.0);
}
