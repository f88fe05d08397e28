#include "lpvet/tracking.hpp"

#include <cmath>
#include <numbers>

namespace lpvet {

AugmentedSystem augment_system(const LpvSystem& sys)
{
    const int n = sys.n, r = sys.r, m = sys.m, ell = sys.ell;
    AugmentedSystem aug;
    aug.base = sys;
    aug.nbar = n + r;
    auto lift_A = [&](const Mat& A, const Mat& C, bool identity) {
        Mat M = Mat::Zero(n + r, n + r);
        M.topLeftCorner(n, n) = A;
        M.bottomLeftCorner(r, n) = C;
        if (identity) M.bottomRightCorner(r, r).setIdentity();
        return M;
    };
    auto lift_B = [&](const Mat& B, const Mat& D) {
        Mat M(n + r, m);
        M << B, D;
        return M;
    };
    auto lift_C = [&](const Mat& C) {
        Mat M = Mat::Zero(r, n + r);
        M.leftCols(n) = C;
        return M;
    };
    std::vector<Mat> Ai, Bi, Ci, Di;
    for (int i = 0; i < ell; ++i) {
        Ai.push_back(lift_A(sys.A.coeffs[i], sys.C.coeffs[i], false));
        Bi.push_back(lift_B(sys.B.coeffs[i], sys.D.coeffs[i]));
        Ci.push_back(lift_C(sys.C.coeffs[i]));
        Di.push_back(sys.D.coeffs[i]);
    }
    aug.plant = LpvSystem({lift_A(sys.A.base, sys.C.base, true), Ai}, {lift_B(sys.B.base, sys.D.base), Bi},
                          {lift_C(sys.C.base), Ci}, {sys.D.base, Di});
    aug.E = Mat::Zero(n + r, n + r);
    aug.E.topLeftCorner(n, n).setIdentity();
    aug.E.bottomRightCorner(r, r) = -Mat::Identity(r, r);
    return aug;
}

int min_data_length_aug(int nbar, int m, int ell)
{
    return min_data_length(nbar, m, ell);
}

double ReferenceSignal::max_norm() const
{
    double mx = 0.0;
    for (const auto& s : samples) mx = std::max(mx, s.norm());
    return mx;
}

ReferenceKind parse_reference_kind(const std::string& s)
{
    if (s == "sinusoid") return ReferenceKind::Sinusoid;
    if (s == "square") return ReferenceKind::Square;
    if (s == "circle") return ReferenceKind::Circle;
    if (s == "figure8") return ReferenceKind::Figure8;
    if (s == "custom") return ReferenceKind::Custom;
    throw std::invalid_argument("unknown reference kind: " + s);
}

const char* to_string(ReferenceKind k)
{
    switch (k) {
    case ReferenceKind::Sinusoid: return "sinusoid";
    case ReferenceKind::Square: return "square";
    case ReferenceKind::Circle: return "circle";
    case ReferenceKind::Figure8: return "figure8";
    case ReferenceKind::Custom: return "custom";
    }
    return "custom";
}

ReferenceSignal make_reference(ReferenceKind kind, double amplitude, double period, int N)
{
    if (N < 0) throw std::invalid_argument("make_reference: N must be nonnegative");
    if (!(period > 0.0)) throw std::invalid_argument("make_reference: period must be positive");
    if (!(amplitude >= 0.0)) throw std::invalid_argument("make_reference: amplitude must be nonnegative");
    ReferenceSignal ref;
    ref.kind = kind;
    ref.amplitude = amplitude;
    ref.period = period;
    const double w = 2.0 * std::numbers::pi / period;
    for (int k = 0; k <= N; ++k) {
        const double th = w * k;
        switch (kind) {
        case ReferenceKind::Sinusoid:
            ref.samples.push_back(Vec::Constant(1, amplitude * std::sin(th)));
            break;
        case ReferenceKind::Square:
            ref.samples.push_back(Vec::Constant(1, std::sin(th) >= 0.0 ? amplitude : -amplitude));
            break;
        case ReferenceKind::Circle: {
            // x from the cosine, y from the circle relation, so x^2 + y^2 = a^2 up to one rounding
            const double x = amplitude * std::cos(th);
            const double y = std::copysign(std::sqrt(std::max(0.0, amplitude * amplitude - x * x)), std::sin(th));
            ref.samples.push_back((Vec(2) << x, y).finished());
            break;
        }
        case ReferenceKind::Figure8: {
            const double x = amplitude * std::sin(th);
            const double q = x / amplitude;
            const double y = 2.0 * x * std::sqrt(std::max(0.0, 1.0 - q * q)) * (std::cos(th) >= 0.0 ? 1.0 : -1.0);
            ref.samples.push_back((Vec(2) << x, y).finished());
            break;
        }
        case ReferenceKind::Custom:
            throw std::invalid_argument("make_reference: custom references carry explicit samples");
        }
    }
    return ref;
}

double default_delta_hat(double delta, const ReferenceSignal& ref)
{
    const double r = ref.max_norm();
    const double v = std::sqrt(delta * delta + r * r);
    // round up to two decimals, tolerating representation noise
    return std::ceil(v * 100.0 - 1e-9) / 100.0;
}

namespace {

Vec stacked_perturbation(const AugmentedSystem& aug, const Vec& w, const Vec& r)
{
    Vec varpi(w.size() + r.size());
    varpi << w, r;
    return aug.E * varpi;
}

const Vec& ref_at(const ReferenceSignal& ref, int k)
{
    if (ref.samples.empty()) throw std::invalid_argument("reference has no samples");
    return ref.samples[std::min<size_t>(static_cast<size_t>(k), ref.samples.size() - 1)];
}

}  // namespace

ExperimentData collect_aug(const AugmentedSystem& aug, int T, const SignalLaw& input_law,
                           const SignalLaw& schedule_law, const SignalLaw& noise_law, const ReferenceSignal& ref,
                           const Vec& psi0, double delta_hat)
{
    if (T < 1) throw std::invalid_argument("collect_aug: T must be >= 1");
    if (psi0.size() != aug.nbar) throw DimensionError("collect_aug: psi0 length differs from n + r");
    if (ref.dim() != aug.base.r) throw DimensionError("collect_aug: reference dimension differs from r");
    std::vector<Vec> x{psi0}, u, p, w, y;
    for (int k = 0; k < T; ++k) {
        u.push_back(input_law(k));
        p.push_back(schedule_law(k));
        w.push_back(stacked_perturbation(aug, noise_law(k), ref_at(ref, k)));
        auto s = step(aug.plant, x.back(), u.back(), p.back(), w.back());
        y.push_back(s.y);
        x.push_back(s.x_next);
    }
    return assemble(x, u, p, w, y, delta_hat);
}

SynthesisProgram build_tracking_synthesis_program(const ExperimentData& aug_data, const SchedulingBox& box,
                                                  const SynthesisConfig& cfg)
{
    return build_synthesis_program(aug_data, box, cfg);
}

TriggerProgram build_tracking_trigger_program(const Mat& P, const Mat& FQ, const ExperimentData& aug_data,
                                              const SchedulingBox& box, const TriggerDesign& design)
{
    return build_trigger_program(P, FQ, aug_data, box, design);
}

SimulationTrace simulate_tracking_event_triggered(const AugmentedSystem& aug, const AffineMatrixFunction& K,
                                                  const TriggerConfig& cfg, const AffineMatrixFunction& B_est,
                                                  const ReferenceSignal& ref, const SignalLaw& schedule,
                                                  const SignalLaw& noise, const Vec& psi0, int N)
{
    if (ref.dim() != aug.base.r) throw DimensionError("tracking: reference dimension differs from r");
    const SignalLaw varpi = [&](int k) { return stacked_perturbation(aug, noise(k), ref_at(ref, k)); };
    return simulate_event_triggered(aug.plant, K, cfg, B_est, schedule, varpi, psi0, N);
}

TrackingStats tracking_error_stats(const SimulationTrace& tr, const ReferenceSignal& ref, int n)
{
    TrackingStats st;
    const int N = tr.N;
    const int start = N - N / 4;
    double acc = 0.0;
    int cnt = 0;
    for (int k = 0; k < N; ++k) {
        const Vec e = tr.y[k] - ref_at(ref, k);
        st.max_error = std::max(st.max_error, e.norm());
        if (k >= start) {
            acc += e.squaredNorm();
            ++cnt;
        }
        st.error.push_back(e);
    }
    st.final_rms = cnt ? std::sqrt(acc / cnt) : 0.0;
    for (int k = 0; k <= N; ++k) {
        const double c = tr.x[k].tail(tr.x[k].size() - n).norm();
        st.chi_max = std::max(st.chi_max, c);
        if (k <= N / 2) st.chi_mid = std::max(st.chi_mid, c);
        if (k >= start) st.chi_final_max = std::max(st.chi_final_max, c);
    }
    return st;
}

}  // namespace lpvet
