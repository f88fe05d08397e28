#include "lpvet/lpv.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

namespace lpvet {

AffineMatrixFunction::AffineMatrixFunction(Mat base_, std::vector<Mat> coeffs_)
    : base(std::move(base_)), coeffs(std::move(coeffs_))
{
    for (const auto& c : coeffs)
        if (c.rows() != base.rows() || c.cols() != base.cols())
            throw DimensionError("affine coefficient shape differs from base");
}

AffineMatrixFunction AffineMatrixFunction::zero(int rows, int cols, int ell)
{
    return {Mat::Zero(rows, cols), std::vector<Mat>(ell, Mat::Zero(rows, cols))};
}

Mat AffineMatrixFunction::stacked() const
{
    Mat out(base.rows(), base.cols() * (1 + coeffs.size()));
    out.leftCols(base.cols()) = base;
    for (size_t i = 0; i < coeffs.size(); ++i) out.middleCols(base.cols() * (i + 1), base.cols()) = coeffs[i];
    return out;
}

Mat eval_affine(const AffineMatrixFunction& f, const Vec& p)
{
    if (p.size() != f.ell()) throw DimensionError("scheduling vector length differs from ell");
    Mat out = f.base;
    for (int i = 0; i < f.ell(); ++i) out += p(i) * f.coeffs[i];
    return out;
}

Vec lift_state(const Vec& x, const Vec& p)
{
    const auto n = x.size();
    Vec z(n * (1 + p.size()));
    z.head(n) = x;
    for (Eigen::Index i = 0; i < p.size(); ++i) z.segment(n * (i + 1), n) = p(i) * x;
    return z;
}

LpvSystem::LpvSystem(AffineMatrixFunction A_, AffineMatrixFunction B_, AffineMatrixFunction C_,
                     AffineMatrixFunction D_)
    : A(std::move(A_)), B(std::move(B_)), C(std::move(C_)), D(std::move(D_))
{
    n = A.rows();
    m = B.cols();
    r = C.rows();
    ell = A.ell();
    if (A.cols() != n || B.rows() != n || C.cols() != n || D.rows() != r || D.cols() != m)
        throw DimensionError("inconsistent LPV system shapes");
    if (B.ell() != ell || C.ell() != ell || D.ell() != ell)
        throw DimensionError("LPV matrices disagree on ell");
}

LpvSystem LpvSystem::state_output(AffineMatrixFunction A_, AffineMatrixFunction B_)
{
    const int n = A_.rows(), m = B_.cols(), ell = A_.ell();
    AffineMatrixFunction C(Mat::Identity(n, n), std::vector<Mat>(ell, Mat::Zero(n, n)));
    return {std::move(A_), std::move(B_), std::move(C), AffineMatrixFunction::zero(n, m, ell)};
}

StepResult step(const LpvSystem& sys, const Vec& x, const Vec& u, const Vec& p, const Vec& w)
{
    if (x.size() != sys.n || u.size() != sys.m || w.size() != sys.n)
        throw DimensionError("step: vector length mismatch");
    const Mat A = eval_affine(sys.A, p);
    const Mat B = eval_affine(sys.B, p);
    StepResult out;
    out.x_next = A * x + B * u + w;
    out.y = eval_affine(sys.C, p) * x + eval_affine(sys.D, p) * u;
    return out;
}

Mat hankel(const std::vector<Vec>& seq, int L)
{
    const int T = static_cast<int>(seq.size());
    if (L < 1 || L > T) throw DimensionError("hankel: depth must lie in [1, T]");
    const auto d = seq.front().size();
    const int cols = T - L + 1;
    Mat H(d * L, cols);
    for (int i = 0; i < L; ++i)
        for (int j = 0; j < cols; ++j) H.block(d * i, j, d, 1) = seq[i + j];
    return H;
}

SchedulingBox::SchedulingBox(Vec lo, Vec hi) : lower(std::move(lo)), upper(std::move(hi))
{
    if (lower.size() != upper.size()) throw DimensionError("box bounds differ in length");
    if ((lower.array() > upper.array()).any()) throw std::invalid_argument("box lower bound exceeds upper");
}

SchedulingBox SchedulingBox::symmetric(int ell, double bound)
{
    return {Vec::Constant(ell, -bound), Vec::Constant(ell, bound)};
}

std::vector<Vec> vertices(const SchedulingBox& box)
{
    const int ell = box.ell();
    if (ell > 20) throw std::invalid_argument("vertex enumeration limited to ell <= 20");
    std::vector<Vec> out;
    const std::uint64_t count = 1ULL << ell;
    for (std::uint64_t idx = 0; idx < count; ++idx) {
        Vec v(ell);
        for (int i = 0; i < ell; ++i) {
            const bool hi = (idx >> (ell - 1 - i)) & 1ULL;
            v(i) = hi ? box.upper(i) : box.lower(i);
        }
        if (std::none_of(out.begin(), out.end(), [&](const Vec& o) { return o == v; })) out.push_back(v);
    }
    return out;
}

SignalLaw uniform_law(int dim, double lo, double hi, std::uint64_t seed)
{
    auto rng = std::make_shared<std::mt19937_64>(seed);
    return [=](int) {
        std::uniform_real_distribution<double> dist(lo, hi);
        Vec v(dim);
        for (int i = 0; i < dim; ++i) v(i) = dist(*rng);
        return v;
    };
}

SignalLaw box_law(const SchedulingBox& box, std::uint64_t seed)
{
    auto rng = std::make_shared<std::mt19937_64>(seed);
    return [=](int) {
        Vec v(box.ell());
        for (int i = 0; i < box.ell(); ++i) {
            std::uniform_real_distribution<double> dist(box.lower(i), box.upper(i));
            v(i) = box.lower(i) == box.upper(i) ? box.lower(i) : dist(*rng);
        }
        return v;
    };
}

SignalLaw ball_noise_law(int dim, double delta, std::uint64_t seed)
{
    auto rng = std::make_shared<std::mt19937_64>(seed);
    return [=](int) {
        std::normal_distribution<double> gauss(0.0, 1.0);
        std::uniform_real_distribution<double> radius(0.0, delta);
        Vec v(dim);
        for (int i = 0; i < dim; ++i) v(i) = gauss(*rng);
        const double nv = v.norm();
        const double r = radius(*rng);
        if (nv == 0.0) return Vec::Zero(dim).eval();
        return (v * (r / nv)).eval();
    };
}

SignalLaw zero_law(int dim)
{
    return [dim](int) { return Vec::Zero(dim).eval(); };
}

SimulationTrace simulate(const LpvSystem& sys, const FeedbackLaw& feedback, const SignalLaw& schedule,
                         const SignalLaw& noise, const Vec& x0, int N)
{
    if (N < 1) throw std::invalid_argument("simulate: N must be >= 1");
    if (x0.size() != sys.n) throw DimensionError("simulate: x0 length differs from n");
    SimulationTrace tr;
    tr.N = N;
    tr.x.push_back(x0);
    for (int k = 0; k < N; ++k) {
        const Vec p = schedule(k);
        const Vec w = noise(k);
        const Vec u = feedback(k, tr.x.back(), p);
        auto s = step(sys, tr.x.back(), u, p, w);
        tr.u.push_back(u);
        tr.p.push_back(p);
        tr.w.push_back(w);
        tr.y.push_back(s.y);
        tr.triggered.push_back(true);
        tr.x.push_back(std::move(s.x_next));
    }
    return tr;
}

void attach_lyapunov(SimulationTrace& trace, const Mat& P)
{
    const Eigen::LDLT<Mat> ldlt(P);
    trace.V.clear();
    for (const auto& x : trace.x) trace.V.push_back(x.dot(ldlt.solve(x)));
}

double spectral_radius(const Mat& M)
{
    if (M.rows() != M.cols()) throw DimensionError("spectral_radius: matrix not square");
    if (M.size() == 0) return 0.0;
    return Eigen::EigenSolver<Mat>(M, false).eigenvalues().cwiseAbs().maxCoeff();
}

Mat kron(const Mat& a, const Mat& b)
{
    Mat out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

Mat blkdiag(const std::vector<Mat>& blocks)
{
    Eigen::Index r = 0, c = 0;
    for (const auto& b : blocks) {
        r += b.rows();
        c += b.cols();
    }
    Mat out = Mat::Zero(r, c);
    r = c = 0;
    for (const auto& b : blocks) {
        out.block(r, c, b.rows(), b.cols()) = b;
        r += b.rows();
        c += b.cols();
    }
    return out;
}

double lambda_min_sym(const Mat& S)
{
    if (S.size() == 0) return 0.0;
    const Mat sym = 0.5 * (S + S.transpose());
    return Eigen::SelfAdjointEigenSolver<Mat>(sym, Eigen::EigenvaluesOnly).eigenvalues().minCoeff();
}

double lambda_max_sym(const Mat& S)
{
    if (S.size() == 0) return 0.0;
    const Mat sym = 0.5 * (S + S.transpose());
    return Eigen::SelfAdjointEigenSolver<Mat>(sym, Eigen::EigenvaluesOnly).eigenvalues().maxCoeff();
}

}  // namespace lpvet
