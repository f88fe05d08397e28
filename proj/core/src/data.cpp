#include "lpvet/data.hpp"

#include <Eigen/SVD>

namespace lpvet {

namespace {

Mat columns(const std::vector<Vec>& seq, int dim)
{
    Mat M(dim, static_cast<Eigen::Index>(seq.size()));
    for (size_t k = 0; k < seq.size(); ++k) M.col(static_cast<Eigen::Index>(k)) = seq[k];
    return M;
}

Mat kron_columns(const std::vector<Vec>& p, const Mat& M)
{
    const auto ell = p.empty() ? 0 : p.front().size();
    Mat out(M.rows() * ell, M.cols());
    for (Eigen::Index k = 0; k < M.cols(); ++k)
        for (Eigen::Index i = 0; i < ell; ++i) out.block(M.rows() * i, k, M.rows(), 1) = p[k](i) * M.col(k);
    return out;
}

Mat pinv(const Mat& M, double rel_tol)
{
    Eigen::JacobiSVD<Mat> svd(M, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Vec& s = svd.singularValues();
    const double cut = s.size() ? rel_tol * s(0) : 0.0;
    Vec inv = Vec::Zero(s.size());
    for (Eigen::Index i = 0; i < s.size(); ++i)
        if (s(i) > cut) inv(i) = 1.0 / s(i);
    return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

}  // namespace

Mat ExperimentData::Delta() const
{
    return std::sqrt(static_cast<double>(T)) * delta * Mat::Identity(n, n);
}

int min_data_length(int n, int m, int ell)
{
    return n * (1 + ell) * (1 + m * (1 + ell)) - 1;
}

ExperimentData assemble(const std::vector<Vec>& x, const std::vector<Vec>& u, const std::vector<Vec>& p,
                        const std::vector<Vec>& w, const std::vector<Vec>& y, double delta)
{
    const int T = static_cast<int>(u.size());
    if (T < 1 || static_cast<int>(x.size()) != T + 1 || static_cast<int>(p.size()) != T ||
        static_cast<int>(w.size()) != T || static_cast<int>(y.size()) != T)
        throw DimensionError("assemble: sequence lengths disagree");
    ExperimentData d;
    d.T = T;
    d.n = static_cast<int>(x.front().size());
    d.m = static_cast<int>(u.front().size());
    d.ell = static_cast<int>(p.front().size());
    d.r = static_cast<int>(y.front().size());
    d.delta = delta;
    d.p = p;
    d.U = columns(u, d.m);
    d.X = columns({x.begin(), x.end() - 1}, d.n);
    d.Xplus = columns({x.begin() + 1, x.end()}, d.n);
    d.W = columns(w, d.n);
    d.Y = columns(y, d.r);
    d.UP = kron_columns(p, d.U);
    d.XP = kron_columns(p, d.X);
    d.WP = kron_columns(p, d.W);
    d.below_min_length = T < min_data_length(d.n, d.m, d.ell);
    return d;
}

ExperimentData collect(const LpvSystem& sys, int T, const SignalLaw& input_law, const SignalLaw& schedule_law,
                       const SignalLaw& noise_law, const Vec& x0, double delta)
{
    if (T < 1) throw std::invalid_argument("collect: T must be >= 1");
    std::vector<Vec> x{x0}, u, p, w, y;
    for (int k = 0; k < T; ++k) {
        u.push_back(input_law(k));
        p.push_back(schedule_law(k));
        w.push_back(noise_law(k));
        auto s = step(sys, x.back(), u.back(), p.back(), w.back());
        x.push_back(std::move(s.x_next));
        y.push_back(std::move(s.y));
    }
    return assemble(x, u, p, w, y, delta);
}

RegressorMatrices regressors(const ExperimentData& d)
{
    RegressorMatrices r;
    r.Z.resize(d.X.rows() + d.XP.rows(), d.T);
    r.Z << d.X, d.XP;
    r.G.resize(r.Z.rows() + d.U.rows() + d.UP.rows(), d.T);
    r.G << d.X, d.XP, d.U, d.UP;
    r.Theta.resize(r.G.rows(), d.T);
    r.Theta << d.U, d.UP, d.X, d.XP;
    return r;
}

double theta_pe_margin(const std::vector<Vec>& u_seq, const std::vector<Vec>& p_seq, int L)
{
    if (u_seq.size() != p_seq.size()) throw DimensionError("theta_pe_margin: u and p lengths differ");
    if (L < 1 || L > static_cast<int>(u_seq.size())) throw DimensionError("theta_pe_margin: sequence shorter than L");
    std::vector<Vec> lifted;
    lifted.reserve(u_seq.size());
    for (size_t k = 0; k < u_seq.size(); ++k) lifted.push_back(lift_state(u_seq[k], p_seq[k]));
    const Mat H = hankel(lifted, L);
    const Vec s = Eigen::JacobiSVD<Mat>(H).singularValues();
    // a wide Hankel with fewer columns than rows is rank deficient by shape
    if (H.cols() < H.rows()) return 0.0;
    return s.size() ? s(s.size() - 1) : 0.0;
}

int numerical_rank(const Mat& M, double rel_tol)
{
    if (M.size() == 0) return 0;
    const Vec s = Eigen::JacobiSVD<Mat>(M).singularValues();
    if (s(0) == 0.0) return 0;
    return static_cast<int>((s.array() > rel_tol * s(0)).count());
}

int regressor_rank(const ExperimentData& d, double rel_tol)
{
    return numerical_rank(regressors(d).Theta, rel_tol);
}

AffineMatrixFunction IdentifiedModel::A() const
{
    const auto n = A_stack.rows();
    const auto ell = A_stack.cols() / n - 1;
    std::vector<Mat> c;
    for (Eigen::Index i = 1; i <= ell; ++i) c.push_back(A_stack.middleCols(n * i, n));
    return {A_stack.leftCols(n), c};
}

AffineMatrixFunction IdentifiedModel::B() const
{
    const auto n = A_stack.rows();
    const auto ell = A_stack.cols() / n - 1;
    const auto m = B_stack.cols() / (1 + ell);
    std::vector<Mat> c;
    for (Eigen::Index i = 1; i <= ell; ++i) c.push_back(B_stack.middleCols(m * i, m));
    return {B_stack.leftCols(m), c};
}

IdentifiedModel identify(const ExperimentData& d, bool subtract_w, double rel_tol)
{
    const auto reg = regressors(d);
    const int target = (1 + d.ell) * (d.n + d.m);
    if (numerical_rank(reg.G, rel_tol) < target) throw RankDeficiencyError("identify: regressor matrix G is rank deficient");
    const Mat lhs = subtract_w ? Mat(d.Xplus - d.W) : d.Xplus;
    const Mat AB = lhs * pinv(reg.G, rel_tol);
    const int nz = d.n * (1 + d.ell);
    return {AB.leftCols(nz), AB.rightCols(AB.cols() - nz)};
}

Mat accumulated_perturbation(const LpvSystem& sys, const std::vector<Vec>& p_seq, const std::vector<Vec>& w_seq)
{
    const int T = static_cast<int>(p_seq.size());
    std::vector<Vec> wbar{Vec::Zero(sys.n)};
    for (int k = 0; k + 1 < T; ++k) wbar.push_back(eval_affine(sys.A, p_seq[k]) * wbar.back() + w_seq[k]);
    const Mat Wb = columns(wbar, sys.n);
    Mat out(Wb.rows() * (1 + sys.ell), T);
    out << Wb, kron_columns(p_seq, Wb);
    return out;
}

double perturbation_accumulation_bound(const LpvSystem& sys, const std::vector<Vec>& p_seq, double delta)
{
    const int T = static_cast<int>(p_seq.size());
    std::vector<double> a;
    for (const auto& p : p_seq) {
        Eigen::JacobiSVD<Mat> svd(eval_affine(sys.A, p));
        a.push_back(svd.singularValues()(0));
    }
    // wbar_0 = 0, so the accumulation starts at i = 1
    double total = 0.0;
    for (int i = 1; i < T; ++i) {
        double inner = 0.0;
        for (int j = 1; j <= i - 1; ++j) {
            double prod = 1.0;
            for (int h = j; h <= i - 1; ++h) prod *= a[h];
            inner += prod;
        }
        total += (1.0 + p_seq[i].norm()) * (inner + 1.0) * delta;
    }
    return total;
}

}  // namespace lpvet
